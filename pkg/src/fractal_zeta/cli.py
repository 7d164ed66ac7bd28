"""Command-line front end: model ingestion, computation, CSV/JSON emission.

Conventions shared by every command:

* numbers in JSON become decimal strings once the working precision
  exceeds float range (D > 17); complex values are {"re": ..., "im": ...}
  objects in JSON and paired re/im columns in CSV;
* every emitted numeric carries an err field or column;
* outputs are deterministic for a fixed configuration and precision;
* exit codes: 0 success, 1 verification failure, 2 validation error,
  3 numerical non-convergence.
"""

import argparse
import csv
import json
import math
import os
import sys

from mpmath import mp, mpf, mpc, fabs

from .precision import (ModelValidationError, NonConvergenceError,
                        PoleProximityError, default_digits,
                        working_precision, tol10)
from .models import get_model, model_names, write_model_files
from .poincare import build_series, eval_phi
from .spectrum import (EigenvalueList, eigenvalues, counting, heat_trace,
                       oscillation_spectrum)
from .zeta import (zeta_phi, zeta_delta, zeta_consistency, special_values,
                   poles, boundary_product_samples, SpectralValue,
                   PoleReport)
from .oracle import verify_decimation, verify_sinh

EXIT_OK = 0
EXIT_VERIFY_FAIL = 1
EXIT_VALIDATION = 2
EXIT_NONCONVERGENCE = 3


# ----------------------------------------------------------------------
# formatting and parsing helpers

def _num(x, digits):
    """JSON-safe scalar; decimal strings above float precision."""
    if x is None or isinstance(x, (bool, str)):
        return x
    if isinstance(x, int):
        return x
    if isinstance(x, (mpc, complex)):
        z = mpc(x)
        if mp.im(z) == 0:
            return _num(mp.re(z), digits)
        return {"re": _num(mp.re(z), digits), "im": _num(mp.im(z), digits)}
    v = mpf(x)
    if digits > 17:
        return mp.nstr(v, digits)
    return float(v)


def _jsonify(obj, digits):
    if isinstance(obj, SpectralValue):
        return {"value": _num(obj.value, digits),
                "err": _num(obj.est_error, digits),
                "method": obj.method}
    if isinstance(obj, PoleReport):
        return {"location": _num(obj.location, digits),
                "residue": _num(obj.residue, digits),
                "err": _num(obj.est_error, digits),
                "cancelled": obj.cancelled,
                "sources": list(obj.sources)}
    if isinstance(obj, dict):
        return {str(k): _jsonify(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v, digits) for v in obj]
    return _num(obj, digits)


def _cell(x, digits):
    """One CSV cell ('.' decimal separator, full working precision)."""
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, str):
        return x
    return mp.nstr(mpf(x), digits)


def _write_csv(path, header, rows, digits):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(x, digits) for x in row])
    return path


def _write_json(path, obj, digits):
    with open(path, "w") as fh:
        json.dump(_jsonify(obj, digits), fh, indent=2)
        fh.write("\n")
    return path


def _parse_grid(spec):
    """'log:a:b:n' (geometric), 'lin:a:b:n' (arithmetic), or 'v1,v2,...'."""
    parts = spec.split(":")
    if len(parts) == 4 and parts[0] in ("log", "lin"):
        a, b, n = mpf(parts[1]), mpf(parts[2]), int(parts[3])
        if n < 1:
            raise ValueError("grid needs at least one point: %r" % spec)
        if n == 1:
            return [a]
        if parts[0] == "log":
            if a <= 0 or b <= 0:
                raise ValueError("log grid endpoints must be positive")
            lr = (mp.log(b) - mp.log(a)) / (n - 1)
            return [a] + [a * mp.exp(lr * i) for i in range(1, n - 1)] + [b]
        step = (b - a) / (n - 1)
        return [a] + [a + step * i for i in range(1, n - 1)] + [b]
    try:
        return [mpf(t) for t in spec.split(",") if t.strip() != ""]
    except Exception:
        raise ValueError("cannot parse grid spec %r (use log:a:b:n, "
                         "lin:a:b:n, or a comma list)" % spec)


def _parse_scalar(txt):
    """Real or complex from '1.5', '2+0i', '-3j', '0.68-3.9i'."""
    t = txt.strip().replace(" ", "")
    if t and t[-1] in "ij":
        body = t[:-1]
        for k in range(len(body) - 1, 0, -1):
            if body[k] in "+-" and body[k - 1] not in "eE":
                re_part, im_part = body[:k], body[k:]
                if im_part in ("+", "-"):
                    im_part += "1"
                z = mpc(mpf(re_part), mpf(im_part))
                return mp.re(z) if mp.im(z) == 0 else z
        if body in ("", "+", "-"):
            body += "1"
        return mpc(0, mpf(body))
    return mpf(t)


def _word_str(word):
    return ".".join(str(int(b)) for b in word)


def _summary(payload):
    print(json.dumps(payload, indent=2))


def _outdir(args):
    d = args.output
    os.makedirs(d, exist_ok=True)
    return d


def _digits(args):
    return args.precision if args.precision else default_digits()


def _load_model(args):
    try:
        return get_model(args.model)
    except FileNotFoundError as exc:
        raise ModelValidationError(str(exc))


def _series_for(model, digits, extra=0):
    # sized like the zeta module's cached base: enough terms that the
    # truncated tail sits below the precision target at the series radius
    return build_series(model.poly, N=max(80, digits + 40, extra))


# ----------------------------------------------------------------------
# commands

def cmd_models(args):
    written = []
    if args.write:
        written = write_model_files(args.write)
    _summary({"command": "models", "models": model_names(),
              "written": written})
    return EXIT_OK


def cmd_phi(args):
    digits = _digits(args)
    model = _load_model(args)
    if args.coeffs is None and args.eval is None and args.grid is None:
        raise ValueError("phi needs at least one of --coeffs, --eval, --grid")
    out = _outdir(args)
    files = []
    headline = {"command": "phi", "model": model.name, "precision": digits}
    with working_precision(digits):
        S = _series_for(model, digits, extra=(args.coeffs or 0) + 10)
        if args.coeffs is not None:
            n = int(args.coeffs)
            if n < 0 or n > S.N:
                raise ValueError("--coeffs must be in [0, %d]" % S.N)
            rows = [(0, mpf(0), mpf(0))]     # Phi(0) = 0 exactly
            for k in range(1, n + 1):
                c = S.coeffs[k - 1]          # stored as phi_1..phi_N
                rows.append((k, c, fabs(c) * tol10(0, digits)))
            files.append(_write_csv(os.path.join(out, "phi-coeffs.csv"),
                                    ("k", "coeff", "err"), rows, digits))
        if args.eval is not None:
            z = _parse_scalar(args.eval)
            value, err = eval_phi(S, z, with_error=True)
            headline["eval"] = {"z": _num(z, digits),
                                "value": _num(value, digits),
                                "err": _num(err, digits)}
            files.append(_write_json(os.path.join(out, "phi-eval.json"),
                                     headline["eval"], digits))
        if args.grid is not None:
            rows = []
            for z in _parse_grid(args.grid):
                value, err = eval_phi(S, z, with_error=True)
                value = mpc(value)
                rows.append((z, mp.re(value), mp.im(value), err))
            files.append(_write_csv(os.path.join(out, "phi-grid.csv"),
                                    ("z", "phi_re", "phi_im", "err"),
                                    rows, digits))
    headline["files"] = files
    _summary(headline)
    return EXIT_OK


def cmd_spectrum(args):
    digits = _digits(args)
    model = _load_model(args)
    if args.X is None and args.count_grid is None and args.heat_grid is None:
        raise ValueError("spectrum needs --X, --count-grid, or --heat-grid")
    out = _outdir(args)
    files = []
    with working_precision(digits):
        count_grid = _parse_grid(args.count_grid) if args.count_grid else None
        heat_grid = _parse_grid(args.heat_grid) if args.heat_grid else None
        X = mpf(args.X) if args.X is not None else mpf(0)
        if count_grid:
            X = max(X, max(count_grid))
        if heat_grid:
            # resolve the trace to ~1e-12 relative at the smallest t
            tmin = min(t for t in heat_grid if t > 0)
            X = max(X, 30 / tmin)
        S = _series_for(model, digits)
        if X > 0:
            records = eigenvalues(model, S, X)
        else:
            records = EigenvalueList([], mpf(0), model.dS_half, model.name)
        rows = []
        for rec in records:
            rows.append((rec.w, rec.m, _word_str(rec.word), rec.mu,
                         rec.multiplicity, rec.eigenvalue,
                         fabs(rec.eigenvalue) * tol10(10, digits)))
        files.append(_write_csv(
            os.path.join(out, "spectrum-records.csv"),
            ("w", "m", "word", "mu", "multiplicity", "eigenvalue", "err"),
            rows, digits))
        if count_grid:
            samples = counting(model, records, count_grid)
            crows = []
            for smp in samples:
                err = mpf("1e-9") * max(1, smp.L)
                crows.append((smp.x, smp.L, smp.ratio, smp.smoothed[1],
                              smp.smoothed[2], smp.smoothed[3], err))
            files.append(_write_csv(
                os.path.join(out, "spectrum-counting.csv"),
                ("x", "count", "ratio", "smoothed_k1", "smoothed_k2",
                 "smoothed_k3", "err"), crows, digits))
        if heat_grid:
            hrows = [(smp.t, smp.P,
                      smp.truncation_error + mpf("1e-12") * smp.P)
                     for smp in heat_trace(records, heat_grid)]
            files.append(_write_csv(
                os.path.join(out, "spectrum-heat.csv"),
                ("t", "trace", "err"), hrows, digits))
    _summary({"command": "spectrum", "model": model.name,
              "precision": digits, "records": len(records),
              "X": _num(X, digits), "files": files})
    return EXIT_OK


def cmd_zeta(args):
    digits = _digits(args)
    model = _load_model(args)
    actions = [args.special, args.s is not None, args.poles,
               args.consistency, args.boundary_product]
    if not any(actions):
        raise ValueError("zeta needs one of --special, --s, --poles, "
                         "--consistency, --boundary-product")
    out = _outdir(args)
    files = []
    headline = {"command": "zeta", "model": model.name, "precision": digits}
    # serialization must run at full precision too: _num/_cell round-trip
    # through mpf at the ambient precision, which would truncate digits
    with working_precision(digits):
        if args.special:
            sv = special_values(model, digits=digits)
            files.append(_write_json(os.path.join(out, "zeta-special.json"),
                                     sv, digits))
            if sv.get("supported", True):
                headline["special"] = {
                    "zeta0": _num(sv["zeta0"]["value"], digits),
                    "zeta_prime0": _num(sv["zeta_prime0"]["value"], digits),
                    "zeta1": _num(sv["zeta1"]["value"], digits),
                    "zeta2": _num(sv["zeta2"]["value"], digits),
                    "determinant": _num(sv["determinant"], digits),
                }
            else:
                headline["special"] = {"supported": False,
                                       "reason": sv.get("reason", "")}
        if args.s is not None:
            s = _parse_scalar(args.s)
            if args.w is not None:
                w = mpf(args.w)
                routes = {}
                mell = zeta_phi(model, w=w, s=s, method="mellin",
                                digits=digits)
                routes["mellin"] = mell
                try:
                    routes["direct-sum"] = zeta_phi(model, w=w, s=s,
                                                    method="direct-sum",
                                                    digits=digits)
                except (NonConvergenceError, ValueError) as exc:
                    routes["direct-sum"] = {"unavailable": str(exc)}
                obj = {"s": s, "w": w, "routes": routes}
                if isinstance(routes["direct-sum"], SpectralValue):
                    obj["route_discrepancy"] = fabs(
                        routes["direct-sum"].value - mell.value)
                headline["value"] = _num(mell.value, digits)
            else:
                val = zeta_delta(model, s, digits=digits)
                obj = {"s": s, "assembled": val}
                headline["value"] = _num(val.value, digits)
            files.append(_write_json(os.path.join(out, "zeta-value.json"),
                                     obj, digits))
        if args.poles:
            reps = poles(model, m_max=args.mmax, digits=digits)
            files.append(_write_json(os.path.join(out, "zeta-poles.json"),
                                     reps, digits))
            headline["poles"] = {
                "candidates": len(reps),
                "genuine": sum(1 for r in reps if not r.cancelled),
                "cancelled": sum(1 for r in reps if r.cancelled),
            }
        if args.consistency:
            rep = zeta_consistency(model, digits=digits)
            files.append(_write_json(
                os.path.join(out, "zeta-consistency.json"), rep, digits))
            headline["max_route_discrepancy"] = _num(
                rep["max_rel_discrepancy"], digits)
        if args.boundary_product:
            w = mpf(args.w) if args.w is not None else None
            rows = boundary_product_samples(model, w=w, digits=digits)
            err = tol10(5, digits)
            crows = [(r["j"], r["u"], r["x"], r["log_product"], err)
                     for r in rows]
            files.append(_write_csv(
                os.path.join(out, "zeta-boundary-product.csv"),
                ("j", "u", "x", "log_product", "err"), crows, digits))
    headline["files"] = files
    _summary(headline)
    return EXIT_OK


def cmd_verify(args):
    digits = _digits(args)
    out = _outdir(args)
    if args.oracle is not None:
        if args.oracle != "sinh":
            raise ValueError("--oracle supports only 'sinh'")
        with working_precision(digits):
            rep = verify_sinh(n_points=args.points, digits=digits)
            path = _write_json(os.path.join(out, "verify-sinh.json"),
                               rep, digits)
        _summary({"command": "verify", "oracle": "sinh",
                  "passed": rep["passed"],
                  "checks": [{"name": c["name"], "passed": c["passed"],
                              "detail": c["detail"]} for c in rep["checks"]],
                  "files": [path]})
        return EXIT_OK if rep["passed"] else EXIT_VERIFY_FAIL
    if args.decimation:
        model = _load_model(args)
        with working_precision(digits):
            rep = verify_decimation(model, levels=args.levels)
            path = _write_json(os.path.join(out, "verify-decimation.json"),
                               rep, digits)
            summary = {"command": "verify", "decimation": model.name,
                       "passed": rep["passed"],
                       "levels": rep["levels"],
                       "closure_rates": [pl["closure_rate"]
                                         for pl in rep["per_level"]],
                       "mismatches": _jsonify(rep["mismatches"], digits),
                       "renormalization": _jsonify(rep["renormalization"],
                                                   digits),
                       "files": [path]}
        _summary(summary)
        return EXIT_OK if rep["passed"] else EXIT_VERIFY_FAIL
    raise ValueError("verify needs --oracle sinh or --decimation")


def cmd_report(args):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    digits = _digits(args)
    model = _load_model(args)
    out = _outdir(args)
    sections = [s.strip() for s in args.sections.split(",") if s.strip()]
    unknown = set(sections) - {"counting", "poles", "boundary"}
    if unknown:
        raise ValueError("unknown report sections: %s" % sorted(unknown))
    files = []
    headline = {"command": "report", "model": model.name,
                "precision": digits}
    png_meta = {"Software": None}

    if "counting" in sections:
        alpha = float(model.dS_half)
        lam = float(model.poly.lam)
        u0, P, nper = args.u0, args.periods, 32
        with working_precision(digits):
            S = _series_for(model, digits)
            X = mpf(lam) ** (u0 + P) * mpf("1.0001")
            records = eigenvalues(model, S, X)
            N = P * nper
            us = [u0 + P * i / N for i in range(N)]
            xs = [lam ** u for u in us]
            samples = counting(model, records, xs)
        ys = [smp.smoothed[2] * smp.x ** (-alpha) for smp in samples]
        rep = oscillation_spectrum(
            list(zip(us, ys)), alpha,
            trend_rates=(-alpha * math.log(lam),), J=12)
        crows = [(u, x, y, 1e-9 * max(1.0, abs(y)))
                 for u, x, y in zip(us, xs, ys)]
        files.append(_write_csv(
            os.path.join(out, "report-counting.csv"),
            ("u", "x", "smoothed_ratio", "err"), crows, digits))
        arows = [(j, abs(rep.c[j]), rep.c[j].real, rep.c[j].imag,
                  rep.noise_floor) for j in sorted(rep.c)]
        files.append(_write_csv(
            os.path.join(out, "report-counting-fourier.csv"),
            ("j", "abs_c", "c_re", "c_im", "noise_floor"), arows, digits))
        fig, ax = plt.subplots(figsize=(8, 4.5))
        ax.plot(us, ys, ".", ms=3, label="smoothed counting ratio")
        mean = rep.c[0].real
        recon = [mean + sum(2 * (rep.c[j].real * math.cos(2 * math.pi * j * u)
                                 - rep.c[j].imag * math.sin(2 * math.pi * j * u))
                            for j in range(1, 4)) for u in us]
        ax.plot(us, recon, "-", lw=1,
                label="mean + first 3 harmonics")
        ax.set_xlabel("u = log_lam x")
        ax.set_ylabel("x^(-dS/2) * smoothed N(x)")
        ax.set_title("%s: log-periodic counting oscillation" % model.name)
        ax.legend()
        fig.tight_layout()
        path = os.path.join(out, "report-counting.png")
        fig.savefig(path, dpi=130, metadata=png_meta)
        plt.close(fig)
        files.append(path)
        headline["counting"] = {
            "j1_amplitude": _num(2 * abs(rep.c[1]), digits),
            "noise_floor": _num(rep.noise_floor, digits)}

    if "poles" in sections:
        with working_precision(digits):
            reps = poles(model, m_max=args.mmax, digits=digits)
            prows = []
            for r in reps:
                loc, res = mpc(r.location), mpc(r.residue)
                prows.append((mp.re(loc), mp.im(loc), mp.re(res),
                              mp.im(res), r.est_error, r.cancelled))
            files.append(_write_csv(
                os.path.join(out, "report-poles.csv"),
                ("s_re", "s_im", "residue_re", "residue_im", "err",
                 "cancelled"), prows, digits))
        fig, ax = plt.subplots(figsize=(6, 5))
        gen = [r for r in reps if not r.cancelled]
        can = [r for r in reps if r.cancelled]
        if can:
            ax.scatter([float(mp.re(mpc(r.location))) for r in can],
                       [float(mp.im(mpc(r.location))) for r in can],
                       facecolors="none", edgecolors="gray", s=40,
                       label="cancelled")
        if gen:
            sizes = [30 + 400 * float(fabs(r.residue)) for r in gen]
            ax.scatter([float(mp.re(mpc(r.location))) for r in gen],
                       [float(mp.im(mpc(r.location))) for r in gen],
                       s=sizes, color="crimson", label="genuine")
        ax.axvline(0, color="k", lw=0.4)
        ax.set_xlabel("Re s")
        ax.set_ylabel("Im s")
        ax.set_title("%s: pole candidates (size ~ |residue|)" % model.name)
        ax.legend()
        fig.tight_layout()
        path = os.path.join(out, "report-poles.png")
        fig.savefig(path, dpi=130, metadata=png_meta)
        plt.close(fig)
        files.append(path)
        headline["poles"] = {"genuine": len(gen), "cancelled": len(can)}

    if "boundary" in sections:
        with working_precision(digits):
            w = mpf(args.w) if args.w is not None else None
            rows = boundary_product_samples(model, w=w, digits=digits)
            err = tol10(5, digits)
            crows = [(r["j"], r["u"], r["x"], r["log_product"], err)
                     for r in rows]
            files.append(_write_csv(
                os.path.join(out, "report-boundary.csv"),
                ("j", "u", "x", "log_product", "err"), crows, digits))
        fig, ax = plt.subplots(figsize=(8, 4.5))
        by_j = {}
        for r in rows:
            by_j.setdefault(r["j"], []).append(
                (float(r["u"]), float(r["log_product"])))
        for j, pts in sorted(by_j.items()):
            ax.plot([u for u, _ in pts], [v for _, v in pts],
                    marker=".", ms=4, lw=1, label="j = %d" % j)
        ax.set_xlabel("u (x = lam^(j+u))")
        ax.set_ylabel("log product")
        ax.set_title("%s: boundary Hadamard-product samples" % model.name)
        ax.legend()
        fig.tight_layout()
        path = os.path.join(out, "report-boundary.png")
        fig.savefig(path, dpi=130, metadata=png_meta)
        plt.close(fig)
        files.append(path)

    headline["files"] = files
    _summary(headline)
    return EXIT_OK


# ----------------------------------------------------------------------
# parser

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", default="sg2-neumann",
                        help="builtin model name or model JSON path "
                             "(default: sg2-neumann)")
    common.add_argument("--precision", type=int, default=None,
                        help="working decimal digits (default: "
                             "FRACTAL_ZETA_PRECISION or 60)")
    common.add_argument("--output", default=".",
                        help="directory for emitted files (default: .)")

    parser = argparse.ArgumentParser(
        prog="fractal-zeta",
        description="Spectral zeta functions of fractal Laplacians via "
                    "polynomial spectral decimation.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("models", parents=[common],
                       help="list builtin models / write their JSON files")
    p.add_argument("--write", metavar="DIR", default=None,
                   help="write canonical model JSONs into DIR")
    p.set_defaults(func=cmd_models)

    p = sub.add_parser("phi", parents=[common],
                       help="Taylor coefficients and values of Phi")
    p.add_argument("--coeffs", type=int, default=None, metavar="N",
                   help="emit coefficients phi_0..phi_N as CSV")
    p.add_argument("--eval", default=None, metavar="Z",
                   help="evaluate Phi at Z (real or complex like 1+2i)")
    p.add_argument("--grid", default=None, metavar="SPEC",
                   help="sample Phi on a grid (log:a:b:n, lin:a:b:n, "
                        "or comma list)")
    p.set_defaults(func=cmd_phi)

    p = sub.add_parser("spectrum", parents=[common],
                       help="eigenvalue records, counting, heat trace")
    p.add_argument("--X", default=None, metavar="BOUND",
                   help="enumerate eigenvalues up to BOUND")
    p.add_argument("--count-grid", default=None, metavar="SPEC",
                   help="counting-function samples on the grid")
    p.add_argument("--heat-grid", default=None, metavar="SPEC",
                   help="heat-trace samples on the t grid")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("zeta", parents=[common],
                       help="fiber/assembled zeta values, poles, "
                            "special values")
    p.add_argument("--special", action="store_true",
                   help="special values and Laurent data at s = 0")
    p.add_argument("--s", default=None,
                   help="evaluate at s (with --w: fiber zeta, both routes; "
                        "alone: assembled zeta)")
    p.add_argument("--w", default=None,
                   help="offset for --s or --boundary-product")
    p.add_argument("--poles", action="store_true",
                   help="pole candidates with residues")
    p.add_argument("--mmax", type=int, default=5,
                   help="lattice range for --poles (default 5)")
    p.add_argument("--consistency", action="store_true",
                   help="direct-sum vs Mellin route comparison")
    p.add_argument("--boundary-product", action="store_true",
                   help="exploratory boundary Hadamard-product samples")
    p.set_defaults(func=cmd_zeta)

    p = sub.add_parser("verify", parents=[common],
                       help="run an independent oracle; exit 1 on mismatch")
    p.add_argument("--oracle", default=None, metavar="NAME",
                   help="closed-form oracle to run (sinh)")
    p.add_argument("--points", type=int, default=200,
                   help="sample count for --oracle sinh (default 200)")
    p.add_argument("--decimation", action="store_true",
                   help="check the model against discrete gasket "
                        "eigensolves")
    p.add_argument("--levels", type=int, default=3,
                   help="graph depth for --decimation (default 3)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("report", parents=[common],
                       help="render figures (PNG) plus the CSV data "
                            "behind them")
    p.add_argument("--sections", default="counting,poles,boundary",
                   help="comma list from counting,poles,boundary")
    p.add_argument("--mmax", type=int, default=3,
                   help="lattice range for the pole section")
    p.add_argument("--periods", type=int, default=4,
                   help="whole log-periods for the counting section")
    p.add_argument("--u0", type=float, default=4.0,
                   help="starting exponent for the counting section")
    p.add_argument("--w", default=None,
                   help="offset for the boundary section")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ModelValidationError, ValueError, KeyError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_VALIDATION
    except (NonConvergenceError, PoleProximityError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_NONCONVERGENCE


if __name__ == "__main__":
    sys.exit(main())
