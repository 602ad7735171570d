"""Batch command-line front end.

Subcommands: check, map, radius, eta, mu, sample. Matrices travel as JSON
documents; reports are emitted with 17-significant-digit floats so that a
rerun with identical inputs and flags produces a byte-identical body.

Exit codes: 0 ok, 1 usage/I-O, 2 invalid structure, 3 marginal or not
applicable, 4 infeasible mapping, 5 not-finite radius.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys as _sys

import numpy as np

from . import __version__, radii
from .dhsys import DHSystem, Restriction, random_dh, stability_class, validate_dh
from .errors import (
    DefinitenessError,
    DissmapError,
    FeasibilityError,
    FrequencyError,
    NoCandidateError,
    NotApplicableError,
    NumericError,
    ParameterError,
    ShapeError,
    StructureError,
)
from .mappings import (
    FamilyParams,
    family_member_first,
    mapping_problem,
    min_norm_dissipative,
    minimal_first_params,
    real_min_norm_dissipative,
    second_char_base,
    second_char_member,
)
from .numkit import TolerancePolicy, as_matrix

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_STRUCTURE = 2
EXIT_MARGINAL = 3
EXIT_INFEASIBLE = 4
EXIT_NOT_FINITE = 5


# ---------------------------------------------------------------------------
# matrix file I/O
# ---------------------------------------------------------------------------

def load_matrix(path: str) -> np.ndarray:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict) or not {"rows", "cols", "data"} <= set(doc):
        raise ValueError(f"{path}: expected keys rows, cols, data")
    rows, cols, data = doc["rows"], doc["cols"], doc["data"]
    if not (isinstance(rows, int) and isinstance(cols, int)) or rows < 1 or cols < 1:
        raise ValueError(f"{path}: rows/cols must be positive integers")
    if len(data) != rows * cols:
        raise ValueError(f"{path}: data has {len(data)} entries, expected {rows * cols}")
    out = np.empty(rows * cols, dtype=complex)
    for i, e in enumerate(data):
        if isinstance(e, (int, float)):
            out[i] = float(e)
        elif isinstance(e, list) and len(e) == 2:
            out[i] = float(e[0]) + 1j * float(e[1])
        else:
            raise ValueError(f"{path}: entry {i} is neither a float nor an [re, im] pair")
    return out.reshape(rows, cols)


def matrix_obj(M) -> dict:
    """Matrix as a JSON-ready document; real matrices use the flat form."""
    M = np.asarray(M)
    rows, cols = M.shape
    flat = M.reshape(-1)
    if np.iscomplexobj(M) and np.any(flat.imag != 0.0):
        data = [[float(z.real), float(z.imag)] for z in flat]
    else:
        data = [float(np.real(z)) for z in flat]
    return {"rows": int(rows), "cols": int(cols), "data": data}


def file_sha256(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        h.update(fh.read())
    return h.hexdigest()


# ---------------------------------------------------------------------------
# deterministic JSON serialization (17 significant digits)
# ---------------------------------------------------------------------------

def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    s = format(float(x), ".17g")
    # keep floats recognizably floats on the round trip
    if "." not in s and "e" not in s and "E" not in s and s not in ("inf", "-inf"):
        s += ".0"
    return s


def _ser(obj) -> str:
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _fmt_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(_ser(v) for v in obj) + "]"
    if isinstance(obj, dict):
        return "{" + ",".join(json.dumps(str(k)) + ":" + _ser(v) for k, v in obj.items()) + "}"
    if isinstance(obj, np.ndarray):
        return _ser(matrix_obj(obj))
    raise TypeError(f"cannot serialize {type(obj)!r}")


def emit_report(report: dict, output: str | None):
    text = _ser(report) + "\n"
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        _sys.stdout.write(text)


# ---------------------------------------------------------------------------
# shared argument plumbing
# ---------------------------------------------------------------------------

def _tol_from_args(args) -> TolerancePolicy:
    kw = {}
    if args.tol_psd is not None:
        kw["psd_tol"] = args.tol_psd
    if args.tol_rank is not None:
        kw["rank_rtol"] = args.tol_rank
    if args.tol_res is not None:
        kw["residual_tol"] = args.tol_res
    return TolerancePolicy(**kw)


def _sweep_from_args(args) -> radii.SweepConfig:
    kw = {}
    if getattr(args, "wmax", None) is not None:
        kw["w_max"] = args.wmax
    if getattr(args, "grid", None) is not None:
        kw["grid_points"] = args.grid
    if getattr(args, "seed", None) is not None:
        kw["rng_seed"] = args.seed
    if getattr(args, "starts", None) is not None:
        kw["multistarts"] = args.starts
    if getattr(args, "refine", None) is not None:
        kw["refine_iters"] = args.refine
    if getattr(args, "gamma_min", None) is not None:
        kw["gamma_min"] = args.gamma_min
    if getattr(args, "gamma_points", None) is not None:
        kw["gamma_points"] = args.gamma_points
    return radii.SweepConfig(**kw)


def _tol_obj(tol: TolerancePolicy) -> dict:
    return {
        "rank_rtol": tol.rank_rtol,
        "psd_tol": float(tol.psd_tol),
        "residual_tol": float(tol.residual_tol),
    }


def _sweep_obj(cfg: radii.SweepConfig) -> dict:
    return {
        "w_max": cfg.w_max,
        "grid_points": cfg.grid_points,
        "refine_iters": cfg.refine_iters,
        "multistarts": cfg.multistarts,
        "rng_seed": cfg.rng_seed,
        "gamma_min": float(cfg.gamma_min),
        "gamma_points": cfg.gamma_points,
    }


def _inputs_obj(paths: dict) -> dict:
    return {name: {"path": p, "sha256": file_sha256(p)} for name, p in paths.items()}


def _base_report(command: str, paths: dict, tol: TolerancePolicy,
                 cfg: radii.SweepConfig | None = None) -> dict:
    rep = {
        "command": command,
        "inputs": _inputs_obj(paths),
        "tolerances": _tol_obj(tol),
    }
    if cfg is not None:
        rep["sweep"] = _sweep_obj(cfg)
    return rep


def _load_system(args, tol) -> DHSystem:
    J = load_matrix(args.J)
    R = load_matrix(args.R)
    Q = load_matrix(args.Q)
    return validate_dh(J, R, Q, real_flag=args.real, tol=tol)


def _cert_obj(cert: dict | None) -> dict | None:
    if cert is None:
        return None
    out = {}
    for key in ("delta_J", "delta_R", "x_hat"):
        v = cert.get(key)
        out[key] = matrix_obj(np.atleast_2d(v).T if np.ndim(v) == 1 else v) if v is not None else None
    out["eig_residual"] = cert.get("eig_residual")
    return out


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_check(args) -> int:
    tol = _tol_from_args(args)
    rep = _base_report("check", {"J": args.J, "R": args.R, "Q": args.Q}, tol)
    try:
        sys_ = _load_system(args, tol)
        cls = stability_class(sys_)
    except (StructureError, DefinitenessError) as exc:
        rep["result"] = {"valid": False, "reason": str(exc)}
        rep["version"] = __version__
        emit_report(rep, args.output)
        return EXIT_STRUCTURE
    rep["result"] = {"valid": True, "stability": cls, "n": sys_.n}
    rep["version"] = __version__
    emit_report(rep, args.output)
    return EXIT_OK if cls == "asymptotically_stable" else EXIT_MARGINAL


def cmd_map(args) -> int:
    tol = _tol_from_args(args)
    paths = {"X": args.X, "Y": args.Y}
    if args.params:
        paths["params"] = args.params
    rep = _base_report("map", paths, tol)
    X = load_matrix(args.X)
    Y = load_matrix(args.Y)
    try:
        if args.real:
            sol = real_min_norm_dissipative(X, Y, tol)
        elif args.family is None:
            prob = mapping_problem(X, Y, tol)
            sol = min_norm_dissipative(prob)
        elif args.family == "first":
            prob = mapping_problem(X, Y, tol)
            if args.params:
                with open(args.params, "r", encoding="utf-8") as fh:
                    doc = json.load(fh)
                params = FamilyParams(
                    K=_matrix_from_obj(doc["K"]),
                    G=_matrix_from_obj(doc["G"]),
                    Z=_matrix_from_obj(doc["Z"]),
                    variant="first",
                )
            else:
                params = minimal_first_params(prob)
            sol = family_member_first(prob, params)
        else:  # second
            prob = mapping_problem(X, Y, tol)
            base = second_char_base(prob)
            if args.params:
                with open(args.params, "r", encoding="utf-8") as fh:
                    doc = json.load(fh)
                params = FamilyParams(
                    K=_matrix_from_obj(doc["K"]),
                    G=_matrix_from_obj(doc["G"]),
                    Z=_matrix_from_obj(doc["Z"]),
                    variant="second",
                )
            else:
                Zn = np.zeros((prob.n, prob.n))
                params = FamilyParams(K=Zn, G=Zn, Z=Zn, variant="second")
            sol = second_char_member(base, prob, params)
    except FeasibilityError as exc:
        diag = exc.diagnostics if exc.diagnostics else {"message": str(exc)}
        rep["result"] = {"feasible": False, "diagnostics": _plain(diag)}
        rep["version"] = __version__
        emit_report(rep, args.output)
        return EXIT_INFEASIBLE
    rep["result"] = {
        "feasible": True,
        "delta": matrix_obj(sol.delta),
        "frob_norm_sq": float(sol.frob_norm_sq),
        "residual": float(sol.residual),
        "lambda_min": float(sol.lambda_min),
    }
    rep["version"] = __version__
    emit_report(rep, args.output)
    return EXIT_OK


def _matrix_from_obj(doc) -> np.ndarray:
    rows, cols, data = doc["rows"], doc["cols"], doc["data"]
    out = np.empty(rows * cols, dtype=complex)
    for i, e in enumerate(data):
        out[i] = float(e) if isinstance(e, (int, float)) else float(e[0]) + 1j * float(e[1])
    return out.reshape(rows, cols)


def _plain(obj):
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    return obj


def _radius_result(rep: dict, report: radii.RadiusReport, output) -> int:
    if report.kind == "not_finite":
        rep["result"] = {"kind": "not_finite"}
        rep["certificate"] = None
        rep["flags"] = {"equality_certified": False, "boundary_limit": False,
                        "skipped_frequencies": report.skipped_frequencies}
        rep["version"] = __version__
        emit_report(rep, output)
        return EXIT_NOT_FINITE
    res = {"kind": report.kind, "w_star": report.w_star}
    if report.value is not None:
        res["value"] = float(report.value)
        if report.kind.startswith("structured"):
            res["label"] = "certified" if report.certified else "lower_bound"
    if report.lower is not None:
        res["lower"] = float(report.lower)
        res["upper"] = float(report.upper)
    rep["result"] = res
    rep["certificate"] = _cert_obj(report.certificate)
    rep["flags"] = {
        "equality_certified": report.certified,
        "boundary_limit": False,
        "skipped_frequencies": report.skipped_frequencies,
        "omega_nontrivial_assumed": report.omega_nontrivial_assumed,
    }
    rep["version"] = __version__
    emit_report(rep, output)
    return EXIT_OK


def cmd_radius(args) -> int:
    tol = _tol_from_args(args)
    cfg = _sweep_from_args(args)
    paths = {"J": args.J, "R": args.R, "Q": args.Q, "B": args.B}
    if args.C:
        paths["C"] = args.C
    rep = _base_report("radius", paths, tol, cfg)
    sys_ = _load_system(args, tol)
    B = load_matrix(args.B)
    C = load_matrix(args.C) if args.C else None
    if args.kind == "structured" and C is not None and not np.array_equal(C, B.conj().T):
        raise UsageError("--kind structured requires C = B* (omit --C or pass B*)")
    rst = Restriction(B=B, C=C)
    if args.kind == "unstructured":
        if args.real:
            report = radii.unstructured_radius_real(sys_, rst, cfg)
        else:
            report = radii.unstructured_radius_complex(sys_, rst, cfg)
    else:
        if args.real:
            report = radii.structured_radius_real(sys_, rst, cfg)
        else:
            report = radii.structured_radius_complex(sys_, rst, cfg)
    return _radius_result(rep, report, args.output)


def cmd_eta(args) -> int:
    tol = _tol_from_args(args)
    cfg = _sweep_from_args(args)
    rep = _base_report("eta", {"J": args.J, "R": args.R, "Q": args.Q, "B": args.B},
                       tol, cfg)
    sys_ = _load_system(args, tol)
    rst = Restriction(B=load_matrix(args.B))
    fn = radii.eta_real if args.real else radii.eta_complex
    eta = fn(sys_, rst, args.w, cfg)
    rep["result"] = {
        "w": eta.w,
        "lower_bound": eta.lower_bound,
        "upper_bound": eta.upper_bound,
        "optimized_value": eta.optimized_value,
        "no_candidate": eta.no_candidate,
    }
    if eta.no_candidate:
        rep["certificate"] = None
    else:
        rep["certificate"] = _cert_obj({
            "delta_J": eta.delta_J, "delta_R": eta.delta_R,
            "x_hat": eta.x_hat, "eig_residual": eta.eig_residual,
        })
    rep["flags"] = {
        "equality_certified": eta.equality_certified,
        "boundary_limit": False,
        "skipped_frequencies": 0,
    }
    if args.real:
        # side condition applied literally as printed (x* on the left form,
        # x^T inside the modulus); flagged for auditability
        rep["flags"]["side_condition_literal"] = True
    rep["version"] = __version__
    emit_report(rep, args.output)
    return EXIT_OK


def cmd_mu(args) -> int:
    tol = _tol_from_args(args)
    cfg = _sweep_from_args(args)
    rep = _base_report("mu", {"M": args.M}, tol, cfg)
    M = load_matrix(args.M)
    mu = radii.mu_real_2(M, cfg)
    lo, hi = mu.value / math.sqrt(2.0), mu.value
    rep["result"] = {
        "mu_2": mu.value,
        "gamma_star": mu.gamma_star,
        "mu_F_lower": lo,
        "mu_F_upper": hi,
    }
    rep["certificate"] = None
    rep["flags"] = {"equality_certified": False, "boundary_limit": mu.boundary_limit,
                    "skipped_frequencies": 0}
    rep["version"] = __version__
    emit_report(rep, args.output)
    return EXIT_OK


def cmd_sample(args) -> int:
    import os

    sys_ = random_dh(args.seed, args.n, real_flag=args.real)
    os.makedirs(args.outdir, exist_ok=True)
    written = {}
    for name, M in (("J", sys_.J), ("R", sys_.R), ("Q", sys_.Q)):
        path = os.path.join(args.outdir, f"{name}.json")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(_ser(matrix_obj(M)) + "\n")
        written[name] = path
    rep = {
        "command": "sample",
        "inputs": {"seed": args.seed, "n": args.n, "real": args.real},
        "result": {"written": written},
        "version": __version__,
    }
    emit_report(rep, args.output)
    return EXIT_OK


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# parser / entry point
# ---------------------------------------------------------------------------

def _add_tol_flags(p):
    p.add_argument("--tol-psd", type=float, default=None)
    p.add_argument("--tol-rank", type=float, default=None)
    p.add_argument("--tol-res", type=float, default=None)
    p.add_argument("--output", default=None)


def _add_sweep_flags(p):
    p.add_argument("--wmax", type=float, default=None)
    p.add_argument("--grid", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--starts", type=int, default=None)
    p.add_argument("--refine", type=int, default=None)
    p.add_argument("--gamma-min", type=float, default=None)
    p.add_argument("--gamma-points", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dissmap",
                                 description="Dissipative mappings and DH stability distances")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("check", help="validate a DH triple and classify stability")
    p.add_argument("--J", required=True)
    p.add_argument("--R", required=True)
    p.add_argument("--Q", required=True)
    p.add_argument("--real", action="store_true")
    _add_tol_flags(p)
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("map", help="minimal or family dissipative mapping for (X, Y)")
    p.add_argument("--X", required=True)
    p.add_argument("--Y", required=True)
    p.add_argument("--real", action="store_true")
    p.add_argument("--family", choices=["first", "second"], default=None)
    p.add_argument("--params", default=None)
    _add_tol_flags(p)
    p.set_defaults(fn=cmd_map)

    p = sub.add_parser("radius", help="stability radius under restricted perturbations")
    p.add_argument("--J", required=True)
    p.add_argument("--R", required=True)
    p.add_argument("--Q", required=True)
    p.add_argument("--B", required=True)
    p.add_argument("--C", default=None)
    p.add_argument("--kind", choices=["unstructured", "structured"], required=True)
    p.add_argument("--real", action="store_true")
    _add_sweep_flags(p)
    _add_tol_flags(p)
    p.set_defaults(fn=cmd_radius)

    p = sub.add_parser("eta", help="eigenvalue backward error at one frequency")
    p.add_argument("--J", required=True)
    p.add_argument("--R", required=True)
    p.add_argument("--Q", required=True)
    p.add_argument("--B", required=True)
    p.add_argument("--w", type=float, required=True)
    p.add_argument("--real", action="store_true")
    _add_sweep_flags(p)
    _add_tol_flags(p)
    p.set_defaults(fn=cmd_eta)

    p = sub.add_parser("mu", help="real structured singular value of a matrix")
    p.add_argument("--M", required=True)
    _add_sweep_flags(p)
    _add_tol_flags(p)
    p.set_defaults(fn=cmd_mu)

    p = sub.add_parser("sample", help="write a seeded random DH triple")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--real", action="store_true")
    p.add_argument("--outdir", default=".")
    _add_tol_flags(p)
    p.set_defaults(fn=cmd_sample)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except (OSError, json.JSONDecodeError, ValueError, UsageError, ShapeError,
            ParameterError) as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return EXIT_USAGE
    except (StructureError, DefinitenessError) as exc:
        print(f"invalid structure: {exc}", file=_sys.stderr)
        return EXIT_STRUCTURE
    except (NotApplicableError, NoCandidateError) as exc:
        print(f"not applicable: {exc}", file=_sys.stderr)
        return EXIT_MARGINAL
    except FeasibilityError as exc:
        print(f"infeasible: {exc}", file=_sys.stderr)
        return EXIT_INFEASIBLE
    except (NumericError, FrequencyError) as exc:
        print(f"not finite: {exc}", file=_sys.stderr)
        return EXIT_NOT_FINITE
    except DissmapError as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    _sys.exit(main())
