"""Entire solution of Phi(lam z) = p(Phi(z)): series, growth, periodic part."""

import pytest
from hypothesis import given, settings, strategies as st
from mpmath import mp, mpf, mpc, fabs, exp, log, pi, sinh, sqrt

from fractal_zeta.poly import eval_poly
from fractal_zeta.poincare import (build_series, eval_phi, eval_log_phi,
                                   build_log_phi_series, build_periodic_F,
                                   fourier_F, certify_growth,
                                   smallest_root_estimate)
from fractal_zeta.precision import working_precision, tol10

from conftest import DIGITS


def test_series_starts_with_identity(series):
    for S in series.values():
        assert S.coeffs[0] == 1          # phi_1 = 1 normalization
    # second coefficient solves lam^2 phi_2 = lam phi_2 + a_2
    with working_precision(DIGITS):
        S = series["sg2-neumann"]
        assert fabs(S.coeffs[1] - mpf(1) / 20) <= tol10(2, DIGITS)


def test_functional_equation_on_log_grid(series, models):
    # sup over log-spaced x in [1e-3, 1e6] of the scaled residual
    with working_precision(DIGITS):
        for name, S in series.items():
            lam = S.poly.lam
            worst = mpf(0)
            x = mpf("0.001")
            while x <= mpf("1e6"):
                lhs = eval_phi(S, lam * x)
                rhs = eval_poly(S.poly, eval_phi(S, x))
                worst = max(worst, fabs(lhs - rhs) / (1 + fabs(lhs)))
                x *= mpf(10) ** mpf("0.25")
            assert worst <= tol10(8, DIGITS), (name, worst)


def test_consistency_residual_recorded(series):
    for name, S in series.items():
        assert S.consistency_residual is not None
        assert S.consistency_residual <= tol10(8, DIGITS)


@given(st.floats(min_value=-50, max_value=50),
       st.floats(min_value=-50, max_value=50))
@settings(max_examples=25, deadline=None)
def test_functional_equation_on_complex_points(series, re, im):
    with working_precision(DIGITS):
        S = series["sg2-dirichlet"]
        z = mpc(re, im)
        if abs(z) > 50:
            z = z * 50 / abs(z)
        lhs = eval_phi(S, S.poly.lam * z)
        rhs = eval_poly(S.poly, eval_phi(S, z))
        assert fabs(lhs - rhs) <= tol10(8, DIGITS) * (1 + fabs(lhs))


def test_growth_order_reached_by_lambda_30(series):
    # log Psi(x) / log x approaches rho within 1% by x = lam^30
    with working_precision(DIGITS):
        for name, S in series.items():
            lam = S.poly.lam
            rho = S.poly.rho
            x = lam ** 30
            ratio = log(eval_log_phi(S, x)) / log(x)
            assert fabs(ratio / rho - 1) < mpf("0.01"), (name, ratio, rho)


def test_gasket_exponential_lower_bound(series):
    # Phi(x) >= exp(0.9 x^rho) on a dense grid of x in [5, 625]
    with working_precision(DIGITS):
        S = series["sg2-neumann"]
        rho = S.poly.rho
        for i in range(400):
            x = 5 + (625 - 5) * mpf(i) / 399
            assert eval_log_phi(S, x) >= mpf("0.9") * x ** rho


def test_certified_growth_bound_holds(series):
    # log Phi(x) + log(a_d)/(d-1) >= c x^rho for x >= x0, denser grid than
    # the certification used
    with working_precision(DIGITS):
        for name, S in series.items():
            c, x0 = certify_growth(S)
            assert c > 0
            p = S.poly
            shift = log(p.coeffs[-1]) / (p.d - 1)
            for i in range(257):
                x = x0 * (mpf(200) ** (mpf(i) / 256))
                assert eval_log_phi(S, x) + shift >= c * x ** p.rho, (name, x)


def test_sinh_closed_form_embedding(series):
    # p = x(4+x): Phi = 4 sinh^2(sqrt(z)/2) to 10^(10-D) for |z| <= 100
    with working_precision(DIGITS):
        S = series["sinh"]
        tol = tol10(10, DIGITS)
        for k in range(64):
            ang = 2 * pi * k / 64
            z = 100 * mpc(mp.cos(ang), mp.sin(ang)) * (k % 5 + 1) / 5
            ref = 4 * sinh(sqrt(z) / 2) ** 2
            val = eval_phi(S, z)
            assert fabs(val - ref) <= tol * max(1, fabs(ref))


def test_eval_phi_error_estimate_is_honest(series):
    with working_precision(DIGITS):
        S = series["sinh"]
        for z in (mpf(1), mpf(-30), mpc(20, 15)):
            val, err = eval_phi(S, z, with_error=True)
            ref = 4 * sinh(sqrt(mpc(z)) / 2) ** 2
            assert fabs(val - ref) <= 10 * err + tol10(5, DIGITS) * fabs(ref)


def test_log_phi_series_exponentiates_back(series):
    # exp(sum b_l x^l) = 1 - Phi(x)/w on |x| <= radius/2
    with working_precision(DIGITS):
        for name, w in (("sg2-neumann", mpf(-3)), ("sg3-dirichlet", mpf(-2)),
                        ("sinh", mpf(-4))):
            S = series[name]
            L = build_log_phi_series(S, w, N=120)
            radius = smallest_root_estimate(S, w)
            assert fabs(L.radius_lower_bound - radius) <= tol10(8, DIGITS) * radius
            for frac in (mpf("0.2"), mpf("0.45")):
                x = radius * frac
                acc = mpf(0)
                for ell in range(L.N, 0, -1):
                    acc = (acc + L.b[ell - 1]) * x
                lhs = exp(acc)
                rhs = 1 - eval_phi(S, x) / w
                assert fabs(lhs - rhs) <= tol10(12, DIGITS) * fabs(rhs), name


def test_smallest_root_estimates(series):
    # sinh fibers have exactly known smallest roots
    with working_precision(DIGITS):
        S = series["sinh"]
        assert fabs(smallest_root_estimate(S, mpf(0)) - 4 * pi ** 2) \
            <= tol10(20, DIGITS)
        assert fabs(smallest_root_estimate(S, mpf(-4)) - pi ** 2) \
            <= tol10(20, DIGITS)


def test_periodic_amplitude_reconstructs_lift(series):
    # F is genuinely periodic: log Phi(x) = x^rho F(log_lam x) for large x,
    # and the Fourier series reproduces the samples
    with working_precision(DIGITS):
        S = series["sg2-neumann"]
        A = build_periodic_F(S, grid_size=128)
        fourier_F(A, 10)
        rho = S.poly.rho
        lam = S.poly.lam
        worst = mpf(0)
        for j in range(16):
            u = mpf(j) / 16
            x = lam ** (25 + u)
            direct = eval_log_phi(S, x) / x ** rho
            recon = A.F_truncated(u, 10)
            worst = max(worst, fabs(direct - recon))
        assert worst <= max(mpf(100) * A.est_error, tol10(25, DIGITS))


def test_sinh_lift_is_constant(series):
    with working_precision(DIGITS):
        S = series["sinh"]
        A = build_periodic_F(S, grid_size=128)
        fourier_F(A, 8)
        assert fabs(A.fourier[0] - 1) <= tol10(25, DIGITS)
        for m in range(1, 9):
            assert fabs(A.fourier[m]) <= tol10(25, DIGITS)


def test_fourier_coefficients_decay(series):
    with working_precision(DIGITS):
        S = series["sg2-dirichlet"]
        A = build_periodic_F(S, grid_size=256)
        fourier_F(A, 12)
        mags = [fabs(A.fourier[m]) for m in range(1, 13)]
        assert mags[0] > mpf("1e-7")          # genuinely non-constant
        assert mags[11] < mags[0] / 10        # geometric decay
