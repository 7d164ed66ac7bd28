"""Decimation polynomials, inverse branches, multiplicity generating functions.

A decimation polynomial is p(x) = a_1 x + ... + a_d x^d with p(0) = 0 and
multiplier lambda = p'(0) = a_1 > 1.  A decimation model bundles p with a
finite set of negative offsets w, each carrying a rational generating
function B_w(x) = P_w(x)/Q_w(x) whose power-series coefficients beta_m(w)
are the eigenvalue multiplicities of generation m.
"""

import json
from fractions import Fraction

from mpmath import mp, mpf, mpc, sqrt, log, fabs, polyroots

from .precision import (
    ModelValidationError,
    NonConvergenceError,
    OVERFLOW_MAG,
    default_digits,
    tol10,
)


def _to_mp(x):
    # exact for ints/Fractions, faithful for strings; floats pass through
    if isinstance(x, Fraction):
        return mpf(x.numerator) / mpf(x.denominator)
    if isinstance(x, (mpf, mpc)):
        return x
    if isinstance(x, complex):
        return mpc(x.real, x.imag)
    return mpf(x)


class DecimationPolynomial:
    """p(x) = a_1 x + ... + a_d x^d with lambda = a_1 > 1.

    coeffs are kept both as given (exact ints where possible) and as mpf.
    """

    def __init__(self, coeffs):
        if len(coeffs) < 2:
            raise ModelValidationError("degree must be at least 2")
        self.coeffs_exact = list(coeffs)
        self.coeffs = [_to_mp(a) for a in coeffs]
        self.d = len(coeffs)
        if self.coeffs[-1] == 0:
            raise ModelValidationError("leading coefficient a_d must be nonzero")
        self.lam = self.coeffs[0]
        if not self.lam > 1:
            raise ModelValidationError("multiplier lambda = a_1 must exceed 1")
        self.a_d = self.coeffs[-1]

    # rho, sigma, k are derived on demand so they always reflect mp.dps
    @property
    def rho(self):
        return log(self.d) / log(self.lam)

    @property
    def sigma(self):
        return 1 / log(self.lam)

    @property
    def log_lam(self):
        return log(self.lam)

    @property
    def k(self):
        return int(mp.floor(self.rho))

    def __repr__(self):
        return "DecimationPolynomial(%s)" % (self.coeffs_exact,)


def eval_poly(p, z):
    """p(z) by Horner's rule (in the factored-out-z form)."""
    z = _to_mp(z)
    acc = p.coeffs[-1]
    for a in reversed(p.coeffs[:-1]):
        acc = acc * z + a
    return acc * z


def eval_poly_deriv(p, z):
    """p'(z), Horner again."""
    z = _to_mp(z)
    acc = p.d * p.coeffs[-1]
    for j in range(p.d - 1, 0, -1):
        acc = acc * z + j * p.coeffs[j - 1]
    return acc


def iterate_poly(p, n, z):
    """n-fold composition p^(n)(z); n = 0 is the identity.

    Returns (value, None) normally; on overflow returns (+/-inf as a rough
    sign flag, step_index) instead of grinding through million-digit
    exponents.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    z = _to_mp(z)
    for step in range(n):
        z = eval_poly(p, z)
        if z != 0 and mp.mag(z) > OVERFLOW_MAG:
            sign = 1
            if isinstance(z, mpf) and z < 0:
                sign = -1
            return sign * mpf("inf"), step
    return z, None


def preimages(p, y, prev=None):
    """All d solutions of p(x) = y, with multiplicity.

    Index 0 is the principal branch q_1 (the root that continues q_1(0) = 0).
    Quadratics use closed forms; the principal branch is computed in the
    rationalized form 2y/(a_1 + sqrt(a_1^2 + 4 a_2 y)) which stays accurate
    as y -> 0 (the naive (-a_1 + sqrt(...))/2 form cancels catastrophically
    and can round to exactly 0 at small |y|, which poisons the inverse
    iteration downstream).

    For d > 2 a Durand-Kerner iteration is used and roots are ordered by
    distance to `prev` (the previous branch points) when given, else with
    the root nearest 0 first.
    """
    y = _to_mp(y)
    if p.d == 2:
        a1, a2 = p.coeffs[0], p.coeffs[1]
        disc = sqrt(a1 * a1 + 4 * a2 * y)
        denom = a1 + disc
        if denom == 0:
            # critical value: double root at -a1/(2 a2)
            r = -a1 / (2 * a2)
            return [r, r]
        q1 = 2 * y / denom
        q2 = -denom / (2 * a2)
        return [q1, q2]
    return _durand_kerner(p, y, prev)


def _durand_kerner(p, y, prev):
    # roots of a_d x^d + ... + a_1 x - y = 0
    digits = mp.dps
    a = [-y] + list(p.coeffs)  # ascending, degree d
    lead = a[-1]
    mono = [c / lead for c in a]

    def f(x):
        acc = mpc(0)
        for c in reversed(mono):
            acc = acc * x + c
        return acc

    n = p.d
    # standard seeding on a circle avoiding symmetry
    base = mpc(mpf("0.4"), mpf("0.9"))
    roots = [base ** i for i in range(n)]
    if prev is not None and len(prev) == n:
        roots = [mpc(r) + mpc(0, tol10(0, 2 * digits)) for r in prev]
    tol = tol10(4, digits)
    scale = 1 + max(fabs(c) for c in mono)
    for _ in range(300):
        moved = mpf(0)
        for i in range(n):
            prod = mpc(1)
            for j in range(n):
                if j != i:
                    prod *= roots[i] - roots[j]
            if prod == 0:
                prod = mpc(tol)
            delta = f(roots[i]) / prod
            roots[i] -= delta
            moved = max(moved, fabs(delta))
        if moved < tol * scale:
            break
    else:
        resid = [fabs(f(r)) for r in roots]
        raise NonConvergenceError(
            "Durand-Kerner stalled; residuals %s" % (resid,))
    if prev is not None and len(prev) == n:
        # keep branch continuity: greedily match to previous points
        out, pool = [], list(roots)
        for q in prev:
            best = min(pool, key=lambda r: fabs(r - q))
            pool.remove(best)
            out.append(best)
        return out
    roots.sort(key=lambda r: (fabs(r), mp.re(r), mp.im(r)))
    return roots


def principal_limit(p, y0, stop_digits=None, max_iter=400, window=12):
    """lim_{m->inf} lambda^m q_1^m(y0), Richardson-accelerated.

    The raw sequence converges only like lambda^-m, so a progressive
    Richardson triangle with ratios lambda^-1, lambda^-2, ... is applied
    over a sliding window; iteration stops when two successive diagonal
    entries agree to 10^(stop_digits - mp.dps) relatively.

    For y0 < 0 on the Julia interval the limit is a negative real; callers
    scale by lambda^n0 and flip sign to obtain an eigenvalue mu.
    """
    if stop_digits is None:
        stop_digits = 12  # spec'd stopping rule: 10^(12 - D)
    tol = tol10(stop_digits, mp.dps)
    lam = p.lam
    z = _to_mp(y0)
    ts = []
    diag_prev = None
    pw = lam
    for m in range(1, max_iter + 1):
        z = preimages(p, z)[0]
        ts.append(z * pw)
        pw *= lam
        row = ts[:]
        for k in range(1, len(row)):
            r = lam ** (-k)
            row = [(row[i + 1] - r * row[i]) / (1 - r) for i in range(len(row) - 1)]
        diag = row[-1]
        if diag_prev is not None:
            if fabs(diag - diag_prev) <= tol * max(mpf(1), fabs(diag)):
                return diag
        diag_prev = diag
        if len(ts) > window:
            ts = ts[1:]
    raise NonConvergenceError(
        "principal-branch limit did not settle from y0 = %s" % (y0,))


class RationalGF:
    """B(x) = P(x)/Q(x) with integer coefficient lists (ascending powers).

    Coefficients come out of the linear recurrence
        Q_0 beta_m = P_m - sum_{i>=1} Q_i beta_{m-i},
    carried in exact rational arithmetic.
    """

    def __init__(self, P, Q):
        if not Q or Q[0] == 0:
            raise ModelValidationError("Q(0) must be nonzero")
        if not all(isinstance(c, int) for c in P + Q):
            raise ModelValidationError("P, Q must have integer coefficients")
        self.P = list(P)
        self.Q = list(Q)
        self._coeffs = []  # Fraction cache

    def coeff(self, m):
        """beta_m as an exact Fraction (callers ask .as_int for multiplicities)."""
        if m < 0:
            return Fraction(0)
        while len(self._coeffs) <= m:
            n = len(self._coeffs)
            pn = Fraction(self.P[n]) if n < len(self.P) else Fraction(0)
            acc = pn
            for i in range(1, min(n, len(self.Q) - 1) + 1):
                acc -= self.Q[i] * self._coeffs[n - i]
            self._coeffs.append(acc / self.Q[0])
        return self._coeffs[m]

    def coeff_int(self, m):
        c = self.coeff(m)
        if c.denominator != 1:
            raise ModelValidationError(
                "beta_%d = %s is not an integer" % (m, c))
        return int(c)

    def coeffs_by_longdiv(self, n):
        """First n coefficients by explicit long division (cross-check path)."""
        out = []
        rem = [Fraction(c) for c in self.P]
        for m in range(n):
            lead = rem[0] / self.Q[0] if rem else Fraction(0)
            out.append(lead)
            # rem = (rem - lead*Q) / x
            width = max(len(rem), len(self.Q))
            rem = rem + [Fraction(0)] * (width - len(rem))
            for i, q in enumerate(self.Q):
                rem[i] -= lead * q
            assert rem[0] == 0
            rem = rem[1:]
            # trim trailing zeros to keep things tidy
            while rem and rem[-1] == 0:
                rem.pop()
        return out

    def eval(self, x):
        """P(x)/Q(x) at an mp number, integer Horner on both."""
        x = _to_mp(x)
        num = mpf(0)
        for c in reversed(self.P):
            num = num * x + c
        den = mpf(0)
        for c in reversed(self.Q):
            den = den * x + c
        return num / den

    def eval_exact(self, x):
        """P(x)/Q(x) at a Fraction, exactly."""
        num = Fraction(0)
        for c in reversed(self.P):
            num = num * x + c
        den = Fraction(0)
        for c in reversed(self.Q):
            den = den * x + c
        return num / den

    def q_deriv_exact(self, x):
        den = Fraction(0)
        for i in range(len(self.Q) - 1, 0, -1):
            den = den * x + i * self.Q[i]
        return den

    def p_at_exact(self, x):
        num = Fraction(0)
        for c in reversed(self.P):
            num = num * x + c
        return num

    def is_constant(self):
        return len(self.Q) == 1 and all(c == 0 for c in self.P[1:])

    def poles(self):
        """Roots of Q with orders, exact rationals preferred.

        Returns a list of (root, order) where root is a Fraction when the
        root is rational and an mpc otherwise, sorted by modulus.
        """
        # factor out rational roots first (candidates p/q with p | Q[0],
        # q | Q[-1] after reversing: roots of Q(x), Q has integer coeffs)
        work = [Fraction(c) for c in self.Q]

        def divisors(n):
            n = abs(n)
            out = set()
            i = 1
            while i * i <= n:
                if n % i == 0:
                    out.add(i)
                    out.add(n // i)
                i += 1
            return out

        found = {}
        changed = True
        while changed and len(work) > 1:
            changed = False
            # integer-ify current polynomial for candidate generation
            from math import lcm
            den = 1
            for c in work:
                den = lcm(den, c.denominator)
            iw = [int(c * den) for c in work]
            while iw and iw[-1] == 0:
                iw.pop()
            if len(iw) <= 1:
                break
            lo = next((c for c in iw if c != 0), 0)
            cands = set()
            for pn in divisors(lo if lo else 1):
                for qn in divisors(iw[-1]):
                    cands.add(Fraction(pn, qn))
                    cands.add(Fraction(-pn, qn))
            for r in sorted(cands, key=lambda f: (abs(f), f)):
                # synthetic evaluation
                val = Fraction(0)
                for c in reversed(work):
                    val = val * r + c
                if val == 0:
                    # deflate by (x - r)
                    new = [Fraction(0)] * (len(work) - 1)
                    carry = work[-1]
                    for i in range(len(work) - 2, -1, -1):
                        new[i] = carry
                        carry = work[i] + carry * r
                    work = new
                    found[r] = found.get(r, 0) + 1
                    changed = True
                    break
        out = [(r, k) for r, k in found.items()]
        if len(work) > 1:
            rest = polyroots([float(c) if c.denominator < 10 ** 15 else
                              mpf(c.numerator) / mpf(c.denominator)
                              for c in reversed(work)], maxsteps=200)
            for r in rest:
                out.append((r, 1))
        def _mod(t):
            r = t[0]
            return float(abs(r)) if isinstance(r, Fraction) else float(fabs(r))
        out.sort(key=_mod)
        return out


class OffsetSpec:
    """One offset w with its multiplicity generating function."""

    BETA_HORIZON = 200  # how far the nonnegativity/integrality scan goes

    def __init__(self, w, gf, m_min=None):
        self.w_exact = w
        self.w = _to_mp(w)
        if self.w > 0:
            raise ModelValidationError("offset must be negative (or 0 for the zero fiber)")
        self.gf = gf
        scanned_min = None
        for m in range(self.BETA_HORIZON):
            c = gf.coeff(m)
            if c < 0:
                raise ModelValidationError(
                    "beta_%d(%s) = %s negative" % (m, w, c))
            if c.denominator != 1:
                raise ModelValidationError(
                    "beta_%d(%s) = %s not an integer" % (m, w, c))
            if c > 0 and scanned_min is None:
                scanned_min = m
        if scanned_min is None:
            raise ModelValidationError("offset %s has no positive multiplicity" % w)
        if m_min is not None and m_min != scanned_min:
            raise ModelValidationError(
                "declared m_min=%s but first positive multiplicity is at m=%s"
                % (m_min, scanned_min))
        self.m_min = scanned_min

    def beta(self, m):
        return self.gf.coeff_int(m)

    def __repr__(self):
        return "OffsetSpec(w=%s, m_min=%d)" % (self.w_exact, self.m_min)


class DecimationModel:
    """Polynomial + offsets; the container every other module consumes."""

    def __init__(self, name, poly, offsets, julia_negative=True):
        self.name = name
        self.poly = poly
        self.offsets = list(offsets)
        self.julia_negative = bool(julia_negative)
        seen = set()
        for o in self.offsets:
            key = str(o.w_exact)
            if key in seen:
                raise ModelValidationError("duplicate offset %s" % key)
            seen.add(key)

    def offset(self, w):
        wv = _to_mp(w)
        for o in self.offsets:
            if o.w == wv:
                return o
        raise KeyError("no offset %s in model %s" % (w, self.name))

    @property
    def dS_half(self):
        """Half the spectral dimension: the rightmost growth exponent.

        max of the fiber growth order rho and the per-offset multiplicity
        pole rates -log r_w / log lambda.  Offsets with constant B_w have no
        pole and contribute nothing.
        """
        rates = [self.poly.rho]
        for o in self.offsets:
            if o.gf.is_constant():
                continue
            for r, _k in o.gf.poles():
                if isinstance(r, Fraction):
                    m = mpf(abs(r.numerator)) / mpf(abs(r.denominator))
                else:
                    m = fabs(r)
                if m > 0:
                    rates.append(-log(m) / log(self.poly.lam))
        return max(rates)

    def to_dict(self):
        def _enc_w(o):
            return o.w_exact if isinstance(o.w_exact, (int, float)) else str(o.w_exact)
        return {
            "name": self.name,
            "poly": list(self.poly.coeffs_exact),
            "offsets": [
                {"w": _enc_w(o), "P": list(o.gf.P), "Q": list(o.gf.Q),
                 "m_min": o.m_min}
                for o in self.offsets
            ],
            "julia_negative": self.julia_negative,
        }

    def to_json(self, path=None):
        blob = json.dumps(self.to_dict(), indent=2, sort_keys=True)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(blob + "\n")
        return blob

    @classmethod
    def from_dict(cls, data):
        try:
            poly = DecimationPolynomial(data["poly"])
            offsets = [
                OffsetSpec(o["w"], RationalGF(o["P"], o["Q"]),
                           m_min=o.get("m_min"))
                for o in data["offsets"]
            ]
            return cls(data["name"], poly, offsets,
                       julia_negative=data.get("julia_negative", True))
        except KeyError as exc:
            raise ModelValidationError("model file missing field %s" % exc)

    @classmethod
    def from_json(cls, path):
        with open(path) as fh:
            data = json.load(fh)
        return cls.from_dict(data)

    def __repr__(self):
        return "DecimationModel(%r, offsets=%s)" % (self.name, self.offsets)


def validate_model(model, grid_points=1000):
    """Structural + sampled-Julia checks; returns a report, never raises.

    The Julia check is the sampled sufficient condition: both (all) real
    inverse branch images of [x_-, 0] must stay inside [x_-, 0], where x_-
    is the leftmost real root of p.
    """
    checks = []

    def record(name, passed, detail=""):
        checks.append({"name": name, "passed": bool(passed), "detail": detail})

    p = model.poly
    record("degree", p.d >= 2, "d = %d" % p.d)
    record("multiplier", p.lam > 1, "lambda = %s" % mp.nstr(p.lam, 8))
    record("leading-coefficient", p.coeffs[-1] != 0, "")

    for o in model.offsets:
        record("offset-%s-nonpositive" % o.w_exact, o.w <= 0, "")
        ok = True
        detail = ""
        try:
            series = [o.gf.coeff(m) for m in range(50)]
            ld = o.gf.coeffs_by_longdiv(50)
            if series != ld:
                ok, detail = False, "recurrence and long division disagree"
        except ModelValidationError as exc:
            ok, detail = False, str(exc)
        record("offset-%s-gf" % o.w_exact, ok, detail)

    # Julia-interval check
    roots = polyroots([c for c in reversed([mpf(0)] + list(p.coeffs))],
                      maxsteps=200)
    real_neg = sorted(mp.re(r) for r in roots
                      if abs(mp.im(r)) < 1e-9 and mp.re(r) < -1e-12)
    if not real_neg:
        record("julia-interval", False, "p has no negative real root")
    else:
        x_minus = real_neg[0]
        bad = 0
        eps = tol10(6, mp.dps)
        for i in range(grid_points):
            y = x_minus * (i + mpf("0.5")) / grid_points
            for q in preimages(p, y):
                if abs(mp.im(q)) > eps or not (x_minus - eps <= mp.re(q) <= eps):
                    bad += 1
        record("julia-interval", bad == 0,
               "x_- = %s, %d stray branch values" % (mp.nstr(mpf(x_minus), 8), bad))
        if bad and model.julia_negative:
            record("julia-flag-consistency", False,
                   "model claims julia_negative but sampling disagrees")

    passed = all(c["passed"] for c in checks)
    return {"passed": passed, "checks": checks}
