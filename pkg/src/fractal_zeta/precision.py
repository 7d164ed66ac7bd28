"""Shared arbitrary-precision context.

Everything analytical in this package runs on mpmath.  D is the number of
decimal digits we stand behind in *reported* values; internally every
computation carries GUARD_DIGITS extra so that the cancellations in the
continuation formulas do not eat into the reported figures.

The default D can be overridden with the FRACTAL_ZETA_PRECISION environment
variable.
"""

import os

from mpmath import mp, mpf

DEFAULT_DIGITS = 60
GUARD_DIGITS = 15
MIN_DIGITS = 15

# binary magnitude past which forward iteration reports overflow instead of
# grinding on astronomically long exponents
OVERFLOW_MAG = 3 * 10 ** 6


class NonConvergenceError(Exception):
    """A numerical scheme failed to settle within its iteration budget."""


class ModelValidationError(Exception):
    """A decimation model violated a construction invariant."""


class PoleProximityError(Exception):
    """Evaluation requested too close to a pole; query the residue instead."""


def default_digits():
    env = os.environ.get("FRACTAL_ZETA_PRECISION")
    if env is not None:
        try:
            return max(int(env), MIN_DIGITS)
        except ValueError:
            pass
    return DEFAULT_DIGITS


class working_precision:
    """Context manager running a block at D reported digits (D + guard internal).

    Re-entrant; restores the previous mp.dps on exit.
    """

    def __init__(self, digits=None, guard=GUARD_DIGITS):
        self.digits = default_digits() if digits is None else int(digits)
        if self.digits < MIN_DIGITS:
            raise ValueError("need at least %d digits" % MIN_DIGITS)
        self.guard = int(guard)
        self._saved = None

    def __enter__(self):
        self._saved = mp.dps
        mp.dps = self.digits + self.guard
        return self

    def __exit__(self, exc_type, exc, tb):
        mp.dps = self._saved
        return False


def tol10(k, digits):
    """10^(k - digits) as an mpf, the tolerance family used throughout."""
    return mpf(10) ** (k - digits)
