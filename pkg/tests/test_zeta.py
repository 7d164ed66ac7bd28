"""Meromorphic continuation: fiber zetas, assembly, special values, poles."""

import pytest
from mpmath import mp, mpf, mpc, fabs, log, pi, exp, conj

from fractal_zeta.zeta import (mellin_split, mellin_M, validate_mellin_split,
                               zeta_phi, zeta_delta, zeta_consistency, H0,
                               special_values, poles,
                               boundary_product_samples)
from fractal_zeta.precision import (working_precision, tol10,
                                    PoleProximityError, ModelValidationError)

from conftest import DIGITS, GASKET_MODELS


# ------------------------------------------------------- continuation core

def test_split_validates_against_raw_integral(models):
    # independent quadrature of the raw Mellin integral on its strip
    with working_precision(DIGITS):
        for name, w in (("sg2-neumann", -3), ("sinh", -4)):
            split = mellin_split(models[name], w, digits=DIGITS)
            disc = validate_mellin_split(split)
            assert disc <= tol10(8, DIGITS), (name, disc)


def test_validate_split_rejects_points_off_strip(models):
    with working_precision(DIGITS):
        split = mellin_split(models["sg2-neumann"], -3, digits=DIGITS)
        with pytest.raises(ValueError):
            validate_mellin_split(split, s=mpf("-0.2"))


def test_mellin_M_pole_guard(models):
    split = mellin_split(models["sg2-neumann"], -3, digits=DIGITS)
    with pytest.raises(PoleProximityError):
        mellin_M(split, mpf("1e-9"))


def test_trivial_zeros(models):
    # negative offsets vanish at s = 0, -1, -2; the zero offset at -1, -2
    # and takes the value -1 at s = 0
    with working_precision(DIGITS):
        for name in GASKET_MODELS:
            model = models[name]
            for off in model.offsets:
                for m in (0, -1, -2):
                    v = zeta_phi(model, None, off.w, m, method="mellin",
                                 digits=DIGITS)
                    bound = max(10 * v.est_error, tol10(8, DIGITS))
                    assert fabs(v.value) <= bound, (name, off.w, m)
        sinh = models["sinh"]
        for m in (-1, -2):
            v = zeta_phi(sinh, None, 0, m, method="mellin", digits=DIGITS)
            assert fabs(v.value) <= max(10 * v.est_error, tol10(8, DIGITS))
        v0 = zeta_phi(sinh, None, 0, 0, method="mellin", digits=DIGITS)
        assert fabs(v0.value + 1) <= max(10 * v0.est_error, tol10(8, DIGITS))


def test_ladder_identities_all_offsets(models):
    # zeta_{Phi,w}(m) = (-1)^(m-1) m b_m(w), checked against the direct sum
    with working_precision(DIGITS):
        for name in GASKET_MODELS + ("sinh",):
            model = models[name]
            for off in model.offsets:
                split = mellin_split(model, off.w, digits=DIGITS)
                for m in range(1, 6):
                    coeff_route = (-1) ** (m - 1) * m * split.b[m - 1]
                    mel = zeta_phi(model, None, off.w, m, method="mellin",
                                   digits=DIGITS)
                    assert fabs(mel.value - coeff_route) \
                        <= tol10(20, DIGITS) * max(1, fabs(coeff_route))
                    drc = zeta_phi(model, None, off.w, m,
                                   method="direct-sum", digits=DIGITS)
                    rel = fabs(drc.value - coeff_route) / max(
                        fabs(coeff_route), tol10(0, DIGITS))
                    assert rel <= mpf("1e-8"), (name, off.w, m, rel)


def test_gasket_fiber_value_is_rational(models):
    # first ladder rung of the w = -3 fiber: zeta(2) = 7/90 exactly
    with working_precision(DIGITS):
        model = models["sg2-neumann"]
        ref = mpf(7) / 90
        for method in ("mellin", "direct-sum"):
            v = zeta_phi(model, None, -3, 2, method=method, digits=DIGITS)
            assert fabs(v.value - ref) <= tol10(20, DIGITS), method


def test_fiber_shift_identity(models):
    # zeta_{Phi,-lam}(s) = (lam^s - 1) zeta_{Phi,0}(s), also off the real axis
    with working_precision(DIGITS):
        for name in ("sg2-dirichlet", "sg3-dirichlet"):
            model = models[name]
            lam = model.poly.lam
            for s in (mpf("0.8"), mpf(2), mpc("1.3", "0.7"),
                      mpc("2.5", "-1.1")):
                lhs = zeta_phi(model, None, -lam, s, method="mellin",
                               digits=DIGITS)
                z0 = zeta_phi(model, None, 0, s, method="mellin",
                              digits=DIGITS)
                rhs = (lam ** s - 1) * z0.value
                assert fabs(lhs.value - rhs) \
                    <= tol10(8, DIGITS) * max(1, fabs(rhs)), (name, s)


def test_route_agreement(models):
    report = zeta_consistency(models["sg2-neumann"], digits=DIGITS)
    assert report["max_rel_discrepancy"] <= tol10(8, DIGITS)
    assert len(report["rows"]) == len(models["sg2-neumann"].offsets) * 5
    for row in report["rows"]:
        assert {"w", "s", "direct", "mellin", "rel_discrepancy",
                "direct_err", "mellin_err"} <= set(row)


def test_zeta_phi_method_tags(models):
    with working_precision(DIGITS):
        model = models["sg2-neumann"]
        hi = zeta_phi(model, None, -3, 3, method="auto", digits=DIGITS)
        assert hi.method == "direct-sum"      # converges cleanly up there
        lo = zeta_phi(model, None, -3, mpf("0.3"), method="auto",
                      digits=DIGITS)
        assert lo.method == "mellin"


# -------------------------------------------------------- special values

def test_special_values_neumann(models):
    with working_precision(DIGITS):
        rep = special_values(models["sg2-neumann"], digits=DIGITS)
        assert rep["supported"]
        assert rep["zeta0"]["matches_closed_form"]
        assert rep["zeta1"]["matches_closed_form"]
        assert rep["zeta2"]["matches_closed_form"]
        ref0 = mpf(3) / 2 * log(3) / log(5) - mpf(1) / 2
        assert fabs(rep["zeta0"]["value"] - ref0) <= tol10(10, DIGITS)
        refp = mpf("0.9685221499249245802332097809994593262672")
        assert fabs(rep["zeta_prime0"]["value"] - refp) <= tol10(25, DIGITS)
        assert fabs(rep["determinant"] - exp(-rep["zeta_prime0"]["value"])) \
            <= tol10(25, DIGITS)
        # H_w(0) equals the Mellin-side regular coefficient after the
        # logarithmic shift, for every negative offset
        assert rep["consistency_H_vs_mellin"] <= tol10(20, DIGITS)
        assert fabs(rep["H"]["-3.0"].value - mpf("5.23995515002348")) < mpf("1e-12")
        assert fabs(rep["H"]["-5.0"].value - mpf("9.06601637893082")) < mpf("1e-12")
        # both orientations present and opposite at s = 0
        assert fabs(rep["zeta0"]["value"]
                    + rep["zeta0"]["direct_orientation"]) <= tol10(25, DIGITS)


def test_special_values_dirichlet_variants(models):
    # the assembly matches the corrected closed forms, never the published
    # variant tabulations (which carry a factor-2 slip)
    with working_precision(DIGITS):
        for name, refp in (("sg2-dirichlet", mpf("4.29752595605433")),
                           ("sg3-dirichlet", mpf("4.45601336213077"))):
            rep = special_values(models[name], digits=DIGITS)
            assert rep["supported"]
            assert rep["zeta0"]["matches_closed_form"]
            assert rep["zeta0"]["variant_matches"] is False
            assert rep["zeta1"]["matches_closed_form"]
            assert rep["zeta1"]["variant_matches"] is False
            assert rep["zeta_prime0"]["variant_matches"] is False
            assert fabs(rep["zeta_prime0"]["value"] - refp) < mpf("1e-11")
            assert rep["consistency_H_vs_mellin"] <= tol10(20, DIGITS)


def test_H0_shift_identity(models):
    # H_w(0) - h_w = 4 log(-w) log lambda, the d = 2 logarithmic shift
    with working_precision(DIGITS):
        model = models["sg2-neumann"]
        split = mellin_split(model, -3, digits=DIGITS)
        Hv = H0(model, None, -3, digits=DIGITS)
        assert Hv.est_error < tol10(15, DIGITS)
        from fractal_zeta.zeta import _h_regular
        h = _h_regular(split)
        assert fabs(Hv.value - (mp.re(h) + 4 * log(3) * log(5))) \
            <= tol10(20, DIGITS)


# ------------------------------------------------------------------ poles

def test_pole_taxonomy_dirichlet_gasket(models):
    with working_precision(DIGITS):
        reps = poles(models["sg2-dirichlet"], m_max=1, digits=DIGITS)
        assert len(reps) == 9
        genuine = [r for r in reps if not r.cancelled]
        cancelled = [r for r in reps if r.cancelled]
        assert len(genuine) == 5 and len(cancelled) == 4

        sig = 2 * pi / log(5)
        dS2 = log(3) / log(5)
        rho = log(2) / log(5)

        # the real genuine pole sits at log 3 / log 5 with a positive real
        # residue
        real_gen = [r for r in genuine if fabs(mp.im(r.location)) < mpf("1e-20")]
        assert len(real_gen) == 1
        r0 = real_gen[0]
        assert fabs(r0.location - dS2) <= tol10(25, DIGITS)
        assert fabs(mp.im(r0.residue)) <= mpf("1e-40")
        assert fabs(mp.re(r0.residue)
                    - mpf("0.1327996190002714849143217179516796022654")) \
            <= tol10(25, DIGITS)
        assert mp.re(r0.residue) > 0

        # non-real genuine poles come in conjugate pairs with conjugate
        # residues; the dS-lattice pair matches its frozen residue
        uppers = [r for r in genuine if mp.im(r.location) > 0]
        assert len(uppers) == 2
        for up in uppers:
            mate = [r for r in genuine
                    if fabs(r.location - conj(up.location)) < mpf("1e-20")]
            assert len(mate) == 1
            assert fabs(mate[0].residue - conj(up.residue)) <= tol10(20, DIGITS)
        lattice_up = [r for r in uppers
                      if fabs(mp.re(r.location) - dS2) < mpf("1e-20")]
        assert len(lattice_up) == 1
        lu = lattice_up[0]
        assert fabs(mp.im(lu.location) - sig) <= tol10(25, DIGITS)
        frozen = mpc("0.05938093521516894096601291153092461172491",
                     "-0.006320884875789569909421139470850903308019")
        assert fabs(lu.residue - frozen) <= tol10(25, DIGITS)
        assert fabs(lu.residue) > 10 * lu.est_error

        # the fiber lattice at rho + 2 pi i m sigma cancels for Dirichlet
        fiber = [r for r in cancelled
                 if fabs(mp.re(r.location) - rho) < mpf("1e-20")]
        assert len(fiber) == 3
        for r in fiber:
            assert fabs(r.residue) <= mpf("1e-10")
            assert r.est_error <= mpf("1e-10")

        # the s = 0 multiplicity candidate is annihilated by trivial zeros
        zero = [r for r in cancelled if fabs(r.location) < mpf("1e-20")]
        assert len(zero) == 1
        assert any("trivial" in src for src in zero[0].sources)


def test_sinh_pole_residue(models):
    with working_precision(DIGITS):
        reps = poles(models["sinh"], m_max=1, digits=DIGITS)
        genuine = [r for r in reps if not r.cancelled]
        assert len(genuine) == 1
        g = genuine[0]
        assert fabs(g.location - mpf("0.5")) <= tol10(25, DIGITS)
        assert fabs(g.residue - 1 / (2 * pi)) <= tol10(20, DIGITS)
        for r in reps:
            if r.cancelled:
                assert fabs(r.residue) <= tol10(20, DIGITS)


# --------------------------------------------------------------- assembly

def test_sinh_assembly_matches_closed_form(models):
    # zeta_Delta = 2 (4 pi^2)^(-s) zeta(2s) for the embedded flat model
    with working_precision(DIGITS):
        model = models["sinh"]
        for s in (mpf("0.75"), mpf("1.5"), mpf(3), mpc(1, 1)):
            got = zeta_delta(model, s, digits=DIGITS)
            ref = 2 * (4 * pi ** 2) ** (-s) * mp.zeta(2 * s)
            assert fabs(got.value - ref) <= tol10(20, DIGITS) * max(1, fabs(ref))


def test_removable_point_recovered_by_circle_mean(models):
    # on-lattice but weightless points are analytic; the circle mean must
    # reproduce the closed form there.  mpmath's zeta loses ~50 digits when
    # evaluated exactly at 1 + 2 pi i k/log 2 (the eta-function cancellation
    # lattice, which 2s hits here), so the reference is itself taken as a
    # tiny circle mean of the closed form.
    with working_precision(DIGITS):
        model = models["sinh"]
        s = mpf("0.5") + mpc(0, 2 * pi / log(4))

        def closed(z):
            return 2 * (4 * pi ** 2) ** (-z) * mp.zeta(2 * z)

        got = zeta_delta(model, s, digits=DIGITS)
        ref = sum(closed(s + mpf("1e-8") * mp.expjpi(2 * mpf(j) / 8))
                  for j in range(8)) / 8
        # the 16-point recovery circle (radius 0.03) carries an a_16 r^16
        # discretization term of order 1e-28
        assert fabs(got.value - ref) <= mpf("1e-25") * max(1, fabs(ref))


def test_assembly_at_zero_carries_direct_orientation(models):
    with working_precision(DIGITS):
        got = zeta_delta(models["sg2-neumann"], 0, digits=DIGITS)
        ref = -(mpf(3) / 2 * log(3) / log(5) - mpf(1) / 2)
        assert fabs(got.value - ref) <= mpf("1e-9")


def test_pole_proximity_raises(models):
    with working_precision(DIGITS):
        s = log(3) / log(5) + mpf("1e-9")
        with pytest.raises(PoleProximityError):
            zeta_delta(models["sg2-dirichlet"], s, digits=DIGITS)


def test_zeta_phi_guards(models):
    model = models["sg2-neumann"]
    with pytest.raises(ModelValidationError):
        zeta_phi(model, None, 1, 2, digits=DIGITS)          # positive offset
    with pytest.raises(ValueError):
        zeta_phi(model, None, -3, 2, method="simpson", digits=DIGITS)
    with pytest.raises(TypeError):
        zeta_phi(model, None, -3, digits=DIGITS)            # missing s
    with pytest.raises(ValueError):
        zeta_phi(model, None, -3, mpf("0.5"), method="direct-sum",
                 digits=DIGITS)                             # below the strip


# ------------------------------------------------------- boundary product

def test_boundary_product_samples_structure(models):
    with working_precision(DIGITS):
        rows = boundary_product_samples(models["sg2-dirichlet"], w=-2,
                                        j_values=(4, 6, 8), u_grid=8,
                                        digits=DIGITS)
        assert len(rows) == 3 * 8
        for row in rows:
            assert {"j", "u", "x", "log_product"} <= set(row)
            assert mp.isfinite(row["log_product"])
            assert fabs(row["log_product"]) < 50
        # successive j-lines approach each other: the limit candidate exists
        by_j = {}
        for row in rows:
            by_j.setdefault(row["j"], []).append(row["log_product"])
        d46 = max(fabs(a - b) for a, b in zip(by_j[4], by_j[6]))
        d68 = max(fabs(a - b) for a, b in zip(by_j[6], by_j[8]))
        assert d68 <= d46 * mpf("1.5") + mpf("1e-6")
