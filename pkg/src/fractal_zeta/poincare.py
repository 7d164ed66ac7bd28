"""The Poincare function Phi and its attendants.

Phi is the entire solution of Phi(lambda z) = p(Phi(z)), Phi(0) = 0,
Phi'(0) = 1.  This module builds its Taylor series, evaluates Phi and
log Phi anywhere (log-domain lifting keeps huge arguments finite), takes
the formal log of 1 - Phi/w (the b_l(w) data), constructs the periodic
amplitude F with its Fourier coefficients f_m, and certifies the
exponential lower bound used by all integral tail estimates.
"""

from mpmath import mp, mpf, mpc, fabs, log, log1p, exp, conj, sqrt

from .precision import NonConvergenceError, default_digits, tol10
from .poly import eval_poly, eval_poly_deriv, preimages, principal_limit


class PoincareSeries:
    """Truncated Taylor series of Phi at 0 plus evaluation metadata."""

    def __init__(self, poly, coeffs, precision_digits, reduce_radius):
        self.poly = poly
        self.coeffs = coeffs              # phi_1 .. phi_N
        self.N = len(coeffs)
        self.precision_digits = precision_digits
        self.reduce_radius = reduce_radius
        self.consistency_residual = None  # filled by build_series

    def __repr__(self):
        return ("PoincareSeries(d=%d, lam=%s, N=%d, D=%d)"
                % (self.poly.d, self.poly.coeffs_exact[0], self.N,
                   self.precision_digits))


def build_series(p, N=80, digits=None, reduce_radius=None):
    """Solve the coefficient recursion lambda^n phi_n = [z^n] p(Phi_{<n}).

    For n >= 2 only phi_1..phi_{n-1} enter the right-hand side (the a_1 Phi
    term moves to the left), so
        phi_n = [z^n] sum_{j>=2} a_j Phi_{<n}^j / (lambda^n - lambda).
    Powers of the series are maintained incrementally.
    """
    if N < 2:
        raise ValueError("N must be >= 2")
    digits = default_digits() if digits is None else int(digits)
    r0 = mpf("0.25") if reduce_radius is None else mpf(reduce_radius)
    lam = p.lam
    phi = [mpf(1)]                      # phi_1
    # pw[j] holds coefficients of Phi^j (index = power of z, entry 0 unused)
    pw = {1: [mpf(0), mpf(1)]}
    for j in range(2, p.d + 1):
        pw[j] = [mpf(0)] * 2
    for n in range(2, N + 1):
        # extend each power's coefficient array to order n using phi_{<n}
        for j in range(2, p.d + 1):
            prev = pw[j - 1]
            c = mpf(0)
            # [z^n] Phi^j = sum_i [z^i] Phi^{j-1} * phi_{n-i}
            for i in range(j - 1, n):
                if i < len(prev) and n - i <= len(phi):
                    c += prev[i] * phi[n - i - 1]
            pw[j].append(c)
        rhs = mpf(0)
        for j in range(2, p.d + 1):
            rhs += p.coeffs[j - 1] * pw[j][n]
        phi_n = rhs / (lam ** n - lam)
        phi.append(phi_n)
        pw[1].append(phi_n)
    S = PoincareSeries(p, phi, digits, r0)
    S.consistency_residual = _consistency_residual(S, pw)
    return S


def _consistency_residual(S, pw):
    # re-check lambda^n phi_n = [z^n] p(Phi) against the stored powers
    p, lam = S.poly, S.poly.lam
    worst = mpf(0)
    for n in range(2, S.N + 1):
        lhs = lam ** n * S.coeffs[n - 1]
        rhs = p.coeffs[0] * S.coeffs[n - 1]
        for j in range(2, p.d + 1):
            rhs += p.coeffs[j - 1] * pw[j][n]
        if lhs != 0:
            worst = max(worst, fabs(lhs - rhs) / fabs(lhs))
    return worst


def _series_tail(S, zr_abs):
    # last-term heuristic with the spec'd safety factor 100
    return fabs(S.coeffs[-1]) * zr_abs ** S.N * 100


def eval_phi(S, z, with_error=False):
    """Phi(z): reduce |z| below the series radius, then lift with p.

    Returns the value, or (value, est_error) when with_error is set.  If a
    lift overflows the magnitude cap the value is a signed infinity and the
    error slot carries the step index.
    """
    p = S.poly
    z = mpc(z) if (isinstance(z, complex) or isinstance(z, mpc)) else mpf(z)
    lam = p.lam
    n = 0
    az = fabs(z)
    while az / lam ** n > S.reduce_radius:
        n += 1
    zr = z / lam ** n
    val = mpf(0)
    for c in reversed(S.coeffs):
        val = val * zr + c
    val = val * zr
    err = _series_tail(S, fabs(zr))
    for step in range(n):
        dval = fabs(eval_poly_deriv(p, val))
        val = eval_poly(p, val)
        err = err * dval + fabs(val) * tol10(0, mp.dps - 2)
        if val != 0 and mp.mag(val) > 3 * 10 ** 6:
            inf = mpf("inf") if (not isinstance(val, mpc) and val > 0) else mpf("-inf")
            return (inf, step) if with_error else inf
    if with_error:
        return val, err
    return val


def _lift_psi(p, psi):
    """One step of Psi(lambda x) = d Psi(x) + log a_d + log(p(Y)/(a_d Y^d)).

    The correction is evaluated as log1p(sum_{j<d} (a_j/a_d) e^{(j-d) Psi}),
    which never forms the astronomically large Y = e^Psi.
    """
    d, a_d = p.d, p.coeffs[-1]
    corr = mpf(0)
    for j in range(1, d):
        corr += (p.coeffs[j - 1] / a_d) * exp((j - d) * psi)
    return d * psi + log(a_d) + log1p(corr)


def eval_log_phi(S, x):
    """Psi(x) = log Phi(x) for x > 0, overflow-free.

    Requires Phi > 0 along the reduction path, which holds whenever p has
    nonnegative coefficients.
    """
    x = mpf(x)
    if x <= 0:
        raise ValueError("eval_log_phi needs x > 0")
    p = S.poly
    lam = p.lam
    n = 0
    while x / lam ** n > S.reduce_radius:
        n += 1
    psi = log(eval_phi(S, x / lam ** n))
    for _ in range(n):
        psi = _lift_psi(p, psi)
    return psi


class LogPhiSeries:
    """Taylor data b_1..b_N of log(1 - Phi(z)/w)  (w = 0: log(Phi(z)/z))."""

    def __init__(self, w, b, radius_lower_bound):
        self.w = w
        self.b = b
        self.N = len(b)
        self.radius_lower_bound = radius_lower_bound

    def coeff(self, l):
        if not 1 <= l <= self.N:
            raise IndexError("b_%d beyond truncation %d" % (l, self.N))
        return self.b[l - 1]


def smallest_root_estimate(S, w):
    """Smallest |zero| of Phi_w: the pure principal-branch limit.

    For w < 0 this is the root reached from the empty word; for w = 0 the
    zero root is skipped by seeding from the nonzero preimages of 0.
    """
    p = S.poly
    if w == 0:
        seeds = [q for q in preimages(p, 0) if fabs(q) > tol10(8, mp.dps)]
        cands = [p.lam * (-principal_limit(p, q)) for q in seeds]
        return min(cands)
    return -principal_limit(p, w)


def build_log_phi_series(S, w, N=None, radius_lower_bound=None):
    """Formal log of the composed series; exactness is checked by expm1-free
    exponentiation in the tests (see the b-series consistency invariant).

    With u(z) = -Phi(z)/w  (w < 0)  or  u(z) = Phi(z)/z - 1  (w = 0),
        b_n = u_n - (1/n) sum_{k=1}^{n-1} k b_k u_{n-k}.
    """
    w = mpf(w)
    if w > 0:
        raise ValueError("w must be <= 0")
    if N is None:
        N = S.N
    if N > S.N:
        raise ValueError("log series cannot exceed the Phi truncation")
    if w < 0:
        u = [-c / w for c in S.coeffs[:N]]
    else:
        u = list(S.coeffs[1:N + 1])
        if len(u) < N:
            u = u + [mpf(0)] * (N - len(u))
    b = []
    for n in range(1, N + 1):
        acc = u[n - 1]
        for k in range(1, n):
            acc -= (mpf(k) / n) * b[k - 1] * u[n - k - 1]
        b.append(acc)
    if radius_lower_bound is None:
        radius_lower_bound = smallest_root_estimate(S, w)
    return LogPhiSeries(w, b, radius_lower_bound)


class PeriodicAmplitude:
    """F over one period: samples, Fourier coefficients, and noise metadata."""

    def __init__(self, samples, est_error, n_lift):
        self.samples = samples            # list of (u, F(u))
        self.est_error = est_error        # sup-norm of the last lift update
        self.n_lift = n_lift
        self.fourier = {}                 # m -> f_m, filled by fourier_F
        self.M = 0
        self.decay_rate = None

    def f(self, m):
        if m in self.fourier:
            return self.fourier[m]
        raise KeyError("f_%d not computed (M = %d)" % (m, self.M))

    def F_truncated(self, u, M=None):
        """Real partial Fourier sum sum_{|m|<=M} f_m e^{2 pi i m u}."""
        M = self.M if M is None else min(M, self.M)
        val = mp.re(self.fourier[0])
        for m in range(1, M + 1):
            val += 2 * mp.re(self.fourier[m] * mp.expjpi(2 * m * u))
        return val


def build_periodic_F(S, grid_size=512, n_lift=None, lift_cap=200):
    """Sample F(u) = (Psi(lambda^(n+u)) + log(a_d)/(d-1)) / lambda^((n+u) rho).

    n is raised until successive lifts move no sample by more than
    10^(8 - D); with n_lift given, exactly that many lifts are used.
    """
    if grid_size & (grid_size - 1):
        raise ValueError("grid_size must be a power of two")
    p = S.poly
    d = p.d
    shift = log(p.coeffs[-1]) / (d - 1)
    target = tol10(8, mp.dps)
    us = [mpf(j) / grid_size for j in range(grid_size)]
    # Psi on the base interval [1, lambda); each lift multiplies x by lambda
    psis = [eval_log_phi(S, p.lam ** u) for u in us]
    # z^rho at z = lambda^(n+u) equals d^n * lambda^(u rho)
    base_pow = [p.lam ** (u * p.rho) for u in us]

    def samples_at(n, psis_n):
        scale = mpf(d) ** n
        return [(psis_n[j] + shift) / (scale * base_pow[j])
                for j in range(grid_size)]

    n = 0
    prev = samples_at(0, psis)
    last_delta = None
    while n < (n_lift if n_lift is not None else lift_cap):
        psis = [_lift_psi(p, ps) for ps in psis]
        n += 1
        cur = samples_at(n, psis)
        last_delta = max(fabs(cur[j] - prev[j]) for j in range(grid_size))
        prev = cur
        if n_lift is None and last_delta < target:
            break
    else:
        if n_lift is None:
            raise NonConvergenceError(
                "periodic amplitude lift did not converge within %d steps"
                % lift_cap)
    samples = list(zip(us, prev))
    return PeriodicAmplitude(samples, last_delta, n)


def fourier_F(A, M):
    """Fourier coefficients by plain DFT over the uniform grid.

    F restricted to the grid is a trigonometric sampling of an analytic
    periodic function, so the DFT is spectrally accurate; est_error is
    inherited from the lift convergence.
    """
    N = len(A.samples)
    if N < 8 * M:
        raise ValueError("need grid_size >= 8 M")
    for m in range(0, M + 1):
        acc = mpc(0)
        for (u, Fu) in A.samples:
            acc += Fu * mp.expjpi(-2 * m * u)
        fm = acc / N
        A.fourier[m] = fm
        if m:
            A.fourier[-m] = conj(fm)
    A.M = M
    # crude geometric-decay fit over the coefficients that clear the noise
    mags = [(m, fabs(A.fourier[m])) for m in range(1, M + 1)
            if fabs(A.fourier[m]) > 10 * A.est_error]
    if len(mags) >= 2:
        m0, a0 = mags[0]
        m1, a1 = mags[-1]
        if a1 > 0 and m1 > m0:
            A.decay_rate = float(log(a0 / a1) / (m1 - m0))
    return A


def certify_growth(S, x0=None, grid=256):
    """Certify Phi(x) >= a_d^(-1/(d-1)) exp(c x^rho) for x >= x0.

    With G(x) = Psi(x) + log(a_d)/(d-1) and p(y) >= a_d y^d for y >= 0
    (true when all coefficients are nonnegative), G(lambda x) >= d G(x), so
    a minimum of G(x)/x^rho over one multiplicative period [x0, lambda x0]
    propagates to all larger x.  Returns (c, x0).
    """
    p = S.poly
    if any(c < 0 for c in p.coeffs):
        raise NonConvergenceError(
            "growth certificate needs nonnegative coefficients")
    if x0 is None:
        x0 = mpf(p.coeffs_exact[0])  # lambda is a convenient period start
    shift = log(p.coeffs[-1]) / (p.d - 1)
    c = mpf("inf")
    for i in range(grid + 1):
        x = x0 * p.lam ** (mpf(i) / grid)
        g = (eval_log_phi(S, x) + shift) / x ** p.rho
        c = min(c, g)
    # shave a hair for the sampling gap; G/x^rho is smooth on the window
    return c * (1 - mpf("1e-6")), x0
