"""Eigenvalue enumeration and spectral statistics.

Eigenvalues of -Delta come in families lambda^m * mu where mu runs over the
solutions of Phi(-mu) = w for an offset w and m carries multiplicity
beta_m(w).  The mu are enumerated as accelerated limits over inverse-branch
words; on top of the records sit the counting function, smoothed counting,
the heat trace, log-periodic oscillation extraction, and the spectral
dimension read off the generating-function poles.
"""

import bisect
import warnings
from math import cos, sin, pi as fpi, exp as fexp

from mpmath import mp, mpf, fabs, log, ceil, gammainc

from .precision import NonConvergenceError, ModelValidationError, tol10
from .poly import preimages, principal_limit
from .poincare import eval_phi


class MuRoot:
    """One solution mu of Phi(-mu) = w, with its word and verification.

    `order` is the analytic multiplicity of -mu as a zero of Phi - w: the
    number of canonical branch words that land on the root.  It exceeds 1
    exactly when a backward orbit passes through a critical value of p
    (every branch collision merges two words); zeta ladders weight the
    root by it.
    """

    def __init__(self, mu, word, residual, verified, note="", order=1):
        self.mu = mu
        self.word = word
        self.residual = residual
        self.verified = verified
        self.note = note
        self.order = order

    def __iter__(self):           # behaves as the documented (mu, word) pair
        return iter((self.mu, self.word))

    def __repr__(self):
        flag = "" if self.verified else " UNVERIFIED"
        if self.order != 1:
            flag += " order=%d" % self.order
        return "MuRoot(%s, word=%s%s)" % (mp.nstr(self.mu, 17), self.word, flag)


class EigenvalueRecord:
    """lambda^m * mu with offset w, branch word, and multiplicity beta_m(w)."""

    __slots__ = ("w", "m", "word", "mu", "multiplicity", "eigenvalue")

    def __init__(self, w, m, word, mu, multiplicity, eigenvalue):
        self.w = w
        self.m = m
        self.word = word
        self.mu = mu
        self.multiplicity = multiplicity
        self.eigenvalue = eigenvalue

    def __repr__(self):
        return ("EigenvalueRecord(w=%s, m=%d, mu=%s, mult=%d, ev=%s)"
                % (self.w, self.m, mp.nstr(self.mu, 12), self.multiplicity,
                   mp.nstr(self.eigenvalue, 12)))


class EigenvalueList(list):
    """Sorted records plus the enumeration bound and exponent metadata."""

    def __init__(self, records, X, dS_half, model_name=""):
        super().__init__(records)
        self.X = X
        self.dS_half = dS_half
        self.model_name = model_name


class CountingSample:
    __slots__ = ("x", "L", "ratio", "smoothed")

    def __init__(self, x, L, ratio, smoothed):
        self.x = x
        self.L = L
        self.ratio = ratio
        self.smoothed = smoothed     # dict k -> sum_{mu<x} (1 - mu/x)^k


class HeatTraceSample:
    __slots__ = ("t", "P", "truncation_error", "warn")

    def __init__(self, t, P, truncation_error, warn):
        self.t = t
        self.P = P
        self.truncation_error = truncation_error
        self.warn = warn


def beta(model, w, m):
    """Multiplicity beta_m(w): coefficient of x^m in B_w."""
    if m < 0:
        raise ValueError("m must be >= 0")
    return model.offset(w).gf.coeff_int(m)


def mu_solutions(S, w, X, tol=None):
    """All mu in (0, X] with Phi(-mu) = w, sorted, as MuRoot records.

    Each root is the Richardson limit -lambda^n0 * lim lambda^k q_1^k(v)
    over a finite branch word v = q_{l_n0} o ... o q_{l_1}(w); canonical
    words do not end in branch 1 (trailing 1s belong to the tail), and for
    w = 0 the empty word is excluded because it gives mu = 0.

    Pruning uses lambda^k |v| <= root value (branch-1 contraction is slower
    than 1/lambda and the other branches stay away from 0), with a 1.1
    safety factor; a depth cap follows because a canonical word's last
    letter forces |v| >= delta > 0.  Critical-point collisions make
    distinct words land on one root, so near-equal values are merged within
    10^3 * tol, keeping the shortest word and accumulating the analytic
    order on the survivor.
    """
    p = S.poly
    w = mpf(w)
    if w > 0:
        raise ValueError("offset w must be <= 0")
    X = mpf(X)
    if X <= 0:
        raise ValueError("X must be > 0")
    if tol is None:
        tol = tol10(10, mp.dps)
    lam = p.lam
    margin = mpf("1.1")
    branch0 = preimages(p, mpf(0))
    delta = min(fabs(q) for q in branch0[1:]) / 2
    k_max = int(ceil(log(margin * X / delta) / log(lam))) + 1
    k_max = max(k_max, 1)

    cands = []

    def finish(depth, word, v):
        note = ""
        try:
            Lv = principal_limit(p, v)
            mu = -(lam ** depth) * Lv
        except NonConvergenceError as e:
            cands.append(MuRoot(mpf("nan"), word, mpf("inf"), False, str(e)))
            return
        if not (0 < mu <= X * (1 + tol)):
            return
        residual = fabs(eval_phi(S, -mu) - w)
        verified = residual <= tol * (1 + fabs(w))
        if not verified:
            note = "verification residual %s exceeds tolerance" % mp.nstr(residual, 3)
        cands.append(MuRoot(mu, word, residual, verified, note))

    stack = [(0, (), w)]
    while stack:
        depth, word, v = stack.pop()
        if (depth == 0 and w < 0) or (depth > 0 and word[-1] != 1):
            finish(depth, word, v)
        if depth >= k_max:
            continue
        qs = preimages(p, v)
        for i, q in enumerate(qs, start=1):
            q = mp.re(q) if abs(mp.im(q)) < tol10(6, mp.dps) else q
            if lam ** (depth + 1) * fabs(q) > margin * X:
                continue
            stack.append((depth + 1, word + (i,), q))

    cands.sort(key=lambda r: (mp.isnan(r.mu), r.mu))
    merged = []
    merge_tol = 1000 * tol
    for r in cands:
        if (merged and not mp.isnan(r.mu) and not mp.isnan(merged[-1].mu)
                and fabs(r.mu - merged[-1].mu) <= merge_tol * (1 + r.mu)):
            keep, drop = merged[-1], r
            if (len(drop.word), drop.word) < (len(keep.word), keep.word):
                keep, drop = drop, keep
            if not keep.verified and drop.verified:
                keep, drop = drop, keep
            keep.order += drop.order
            keep.note = (keep.note + " merged duplicate word %s" % (drop.word,)).strip()
            merged[-1] = keep
        else:
            merged.append(r)
    return merged


def eigenvalues(model, S, X):
    """All eigenvalues lambda^m * mu <= X assembled over offsets, sorted."""
    X = mpf(X)
    if X <= 0:
        raise ValueError("X must be > 0")
    p = model.poly
    lam = p.lam
    records = []
    for off in model.offsets:
        m_min = off.m_min
        fiber = [r for r in mu_solutions(S, off.w, X / lam ** m_min)
                 if r.verified]
        if not fiber:
            continue
        mu_lo = fiber[0].mu
        m = m_min
        while lam ** m * mu_lo <= X:
            b = off.gf.coeff_int(m)
            if b > 0:
                cap = X / lam ** m
                for r in fiber:
                    if r.mu > cap:
                        break
                    records.append(EigenvalueRecord(
                        off.w, m, r.word, r.mu, b, lam ** m * r.mu))
            m += 1
        # safety for offsets whose beta vanishes beyond a finite degree
        # is automatic: coeff_int just returns 0 there.
    records.sort(key=lambda rec: (rec.eigenvalue, rec.w, rec.m))
    return EigenvalueList(records, X, model.dS_half, model.name)


def _prepare_float(records):
    evs = [float(rec.eigenvalue) for rec in records]
    mults = [rec.multiplicity for rec in records]
    # prefix sums of mult * ev^j for j = 0..3 (binomial expansion of the
    # smoothed counting kernels)
    pre = [[0.0] * (len(evs) + 1) for _ in range(4)]
    for i, (e, m) in enumerate(zip(evs, mults)):
        pj = 1.0
        for j in range(4):
            pre[j][i + 1] = pre[j][i] + m * pj
            pj *= e
    return evs, pre


_BINOM = {1: (1.0, -1.0), 2: (1.0, -2.0, 1.0), 3: (1.0, -3.0, 3.0, -1.0)}


def counting(model, records, x_grid):
    """Counting function samples: L, ratio L x^(-dS_half), smoothed k=1,2,3."""
    bound = getattr(records, "X", None)
    if bound is None and len(records):
        bound = max(rec.eigenvalue for rec in records)
    alpha = float(getattr(records, "dS_half", model.dS_half))
    evs, pre = _prepare_float(records)
    out = []
    for x in x_grid:
        x = float(x)
        if bound is not None and x > float(bound) * (1 + 1e-12):
            raise ValueError(
                "x = %g beyond the enumeration bound %g" % (x, float(bound)))
        i = bisect.bisect_left(evs, x)
        L = int(round(pre[0][i]))
        ratio = L * x ** (-alpha) if x > 0 else 0.0
        smoothed = {}
        for k in (1, 2, 3):
            acc = 0.0
            xj = 1.0
            for j, cjk in enumerate(_BINOM[k]):
                acc += cjk * pre[j][i] / xj
                xj *= x
            smoothed[k] = acc
        out.append(CountingSample(x, L, ratio, smoothed))
    return out


def heat_trace(records, t_grid):
    """Partial heat trace P(t) with an x^dS_half-band truncation bound.

    The tail above the enumeration bound X is controlled by
    L(x) <= C x^alpha:  sum_{ev > X} e^(-ev t) <= C t^(-alpha) Gamma(alpha+1, X t).
    """
    bound = getattr(records, "X", None)
    alpha = getattr(records, "dS_half", None)
    if bound is None or alpha is None:
        raise ValueError("records must come from eigenvalues() (bound metadata)")
    alpha = float(alpha)
    evs, pre = _prepare_float(records)
    C = 0.0
    for i, e in enumerate(evs):
        if e > 0:
            C = max(C, pre[0][i + 1] / e ** alpha)
    Xf = float(bound)
    out = []
    warned = False
    for t in t_grid:
        t = float(t)
        if t <= 0:
            raise ValueError("t must be > 0")
        P = sum((pre[0][i + 1] - pre[0][i]) * _fexp(-e * t)
                for i, e in enumerate(evs))
        tail = C * float(t ** (-alpha) * gammainc(alpha + 1, Xf * t)) if evs else 0.0
        warn = P > 0 and tail / P > 1e-6
        warned = warned or warn
        out.append(HeatTraceSample(t, P, tail, warn))
    if warned:
        warnings.warn("heat-trace truncation error exceeds 1e-6 relative "
                      "on part of the t grid; extend the enumeration bound",
                      stacklevel=2)
    return out


def _fexp(x):
    # exp on floats with silent underflow to 0
    if x < -745:
        return 0.0
    try:
        return fexp(x)
    except OverflowError:
        return float("inf")


class OscillationReport:
    """Fourier data of a log-periodic signal: c_j, amplitudes, noise floor."""

    def __init__(self, c, J, n_periods, noise_floor, trend_coeffs):
        self.c = c
        self.J = J
        self.n_periods = n_periods
        self.noise_floor = noise_floor
        self.trend_coeffs = trend_coeffs

    def amplitude(self, j):
        """Real sinusoid amplitude at frequency 2*pi*j (A_j = 2|c_j|, j >= 1)."""
        base = abs(self.c[j])
        return base if j == 0 else 2 * base


def oscillation_spectrum(samples, dS_half, trend_rates=(), J=16,
                         noise_bins=None):
    """DFT amplitudes c_j (frequencies 2 pi j in u) of a log-periodic signal.

    samples: (u, y) pairs, uniform in u, covering a whole number >= 4 of
    unit periods.  trend_rates: exponential rates r (signal ~ e^(r u)) to
    deflate before reading amplitudes; the fit is done on the non-Fourier
    residual so band-limited inputs pass through exactly.
    """
    pts = [(float(u), float(y)) for (u, y) in samples]
    N = len(pts)
    if N < 16:
        raise ValueError("need at least 16 samples")
    us = [u for u, _ in pts]
    ys = [y for _, y in pts]
    du = (us[-1] - us[0]) / (N - 1)
    for i in range(1, N):
        if abs(us[i] - us[i - 1] - du) > 1e-9 * max(1.0, abs(du)):
            raise ValueError("samples must be uniform in u")
    span = N * du                      # grid treated as half-open [u0, u0+span)
    n_periods = span
    if n_periods < 4 - 1e-9:
        raise ValueError("need >= 4 periods of u-coverage, got %.3f" % n_periods)
    if abs(n_periods - round(n_periods)) > 1e-6:
        raise ValueError("u span must be a whole number of periods "
                         "(got %.6f)" % n_periods)
    n_periods = int(round(n_periods))
    J = min(J, (N // n_periods) // 2 - 1)

    def dft(vals):
        out = {}
        for j in range(0, J + 1):
            re_acc = 0.0
            im_acc = 0.0
            for u, v in zip(us, vals):
                ang = -2 * fpi * j * u
                re_acc += v * cos(ang)
                im_acc += v * sin(ang)
            out[j] = complex(re_acc / N, im_acc / N)
        return out

    trend_coeffs = {}
    resid = ys
    if trend_rates:
        cols = [[_fexp(r * u) for u in us] for r in trend_rates]
        # remove each column's low-frequency Fourier content so the fit only
        # sees what the DFT bins cannot represent
        def deflate(vals):
            cf = dft(vals)
            out = list(vals)
            for j in range(0, J + 1):
                cj = cf[j]
                for i, u in enumerate(us):
                    ang = 2 * fpi * j * u
                    contrib = cj.real * cos(ang) - cj.imag * sin(ang)
                    out[i] -= contrib if j == 0 else 2 * contrib
            return out
        dcols = [deflate(c) for c in cols]
        dy = deflate(ys)
        k = len(cols)
        G = [[sum(dcols[a][i] * dcols[b][i] for i in range(N))
              for b in range(k)] for a in range(k)]
        rhs = [sum(dcols[a][i] * dy[i] for i in range(N)) for a in range(k)]
        coef = _solve_small(G, rhs)
        trend_coeffs = {r: c for r, c in zip(trend_rates, coef)}
        resid = [ys[i] - sum(coef[a] * cols[a][i] for a in range(k))
                 for i in range(N)]
    c = dft(resid)
    if noise_bins is None:
        lo = max(9, (2 * J) // 3)
        noise_bins = range(lo, J + 1)
    floor_vals = [2 * abs(c[j]) for j in noise_bins if 0 < j <= J]
    noise_floor = max(floor_vals) if floor_vals else 0.0
    return OscillationReport(c, J, n_periods, noise_floor, trend_coeffs)


def _solve_small(G, rhs):
    """Gaussian elimination with partial pivoting for tiny dense systems."""
    n = len(G)
    A = [row[:] + [rhs[i]] for i, row in enumerate(G)]
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(A[r][col]))
        if abs(A[piv][col]) < 1e-300:
            raise ValueError("singular trend system")
        A[col], A[piv] = A[piv], A[col]
        for r in range(col + 1, n):
            f = A[r][col] / A[col][col]
            for cix in range(col, n + 1):
                A[r][cix] -= f * A[col][cix]
    x = [0.0] * n
    for r in range(n - 1, -1, -1):
        x[r] = (A[r][n] - sum(A[r][cix] * x[cix] for cix in range(r + 1, n))) / A[r][r]
    return x


class SpectralDimension:
    """dS_half with the generating-function pole lattice behind it."""

    def __init__(self, dS_half, rates, r, W, rho, log_lam):
        self.dS_half = dS_half
        self.rates = rates           # w -> -log r_w / log lambda (or None)
        self.r = r                   # w -> smallest-modulus pole of B_w
        self.W = W                   # offsets attaining dS_half
        self.rho = rho
        self.log_lam = log_lam
        self.lattice_spacing = 2 * mp.pi / log_lam   # imaginary period of poles


def spectral_dimension(model):
    """dS_half = max(rho, max_w -log r_w/log lambda) with simplicity check.

    r_w is the smallest-modulus pole of B_w; offsets attaining the max must
    carry a simple pole there, otherwise the model is rejected.
    """
    p = model.poly
    eps = tol10(12, mp.dps)
    rates, r_map, orders = {}, {}, {}
    for off in model.offsets:
        if off.gf.is_constant():
            rates[off.w], r_map[off.w] = None, None
            continue
        poles = off.gf.poles()
        if not poles:                 # polynomial B_w: no exponential rate
            rates[off.w], r_map[off.w] = None, None
            continue
        root, order = poles[0]
        r_mod = fabs(mpf(root.numerator) / root.denominator) \
            if hasattr(root, "numerator") else fabs(root)
        r_map[off.w] = r_mod
        rates[off.w] = -log(r_mod) / p.log_lam
        orders[off.w] = order
    best = max([p.rho] + [v for v in rates.values() if v is not None])
    W = [w for w, v in rates.items() if v is not None and fabs(v - best) <= eps]
    for w in W:
        if orders[w] != 1:
            raise ModelValidationError(
                "offset w = %s has a non-simple dominant pole (order %d); "
                "the counting exponent is not defined by a simple lattice"
                % (w, orders[w]))
    return SpectralDimension(best, rates, r_map, W, p.rho, p.log_lam)
