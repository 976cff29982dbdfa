"""Command line front end: bound tables, witness densities and sharpness reports."""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .cdd_bound import (BoundResult, CDDParams, CaseId, InvalidParameterError, NumericalFailure,
                        bound_at, bound_oracle_grid)
from .model_density import eval_j, support_j
from .quadrature import DEFAULT_REL_TOL, IntegrationError, integrate
from .sharpness import WarpedProduct, check_cdd, slab_profile

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERICAL = 3
EXIT_VERIFY_FAILED = 4

TABLE_COLUMNS = ("v", "bound", "case_id", "h_star", "a_star")
MODEL_COLUMNS = ("t", "j", "density")
ORACLE_TOL = 1e-4
SLAB_TOL = 1e-6


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class ProfileTableRow:
    v: float
    bound: float
    case_id: CaseId
    h_star: float
    a_star: float

    @classmethod
    def from_result(cls, v: float, r: BoundResult) -> "ProfileTableRow":
        return cls(v, r.value, r.case_id, r.h_star, r.a_star)


def _extended(text: str) -> float:
    if text.strip().lower() in ("inf", "+inf", "infinity"):
        return math.inf
    value = float(text)
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"expected a number or 'inf', got {text!r}")
    return value


def _finite(text: str) -> float:
    value = float(text)
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"expected a finite number, got {text!r}")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return value


def rel_tol_from_env() -> float:
    raw = os.environ.get("CDD_ISO_TOL")
    if raw is None or raw == "":
        return DEFAULT_REL_TOL
    try:
        tol = float(raw)
    except ValueError:
        raise UsageError(f"CDD_ISO_TOL must be a number, got {raw!r}") from None
    if not 0 < tol < 1:
        raise UsageError("CDD_ISO_TOL must lie in (0, 1)")
    return tol


def _json_number(x: float):
    if math.isnan(x):
        return None
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def _csv_number(x: float) -> str:
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.9g}"


def format_table(rows: list[dict], columns, fmt: str) -> str:
    if fmt == "json":
        out = [{k: (_json_number(r[k]) if isinstance(r[k], float) else r[k]) for k in columns}
               for r in rows]
        return json.dumps(out, allow_nan=False) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in rows:
        writer.writerow([_csv_number(r[k]) if isinstance(r[k], float) else r[k] for k in columns])
    return buf.getvalue()


def _row_dict(row: ProfileTableRow) -> dict:
    return {"v": float(row.v), "bound": float(row.bound), "case_id": row.case_id.value,
            "h_star": float(row.h_star), "a_star": float(row.a_star)}


def _v_values(args) -> list[float]:
    if args.v is not None:
        if not 0.0 <= args.v <= 1.0:
            raise UsageError(f"--v must lie in [0, 1], got {args.v}")
        return [args.v]
    count = args.v_grid
    return [k / (count + 1) for k in range(1, count + 1)]


def _params(args) -> CDDParams:
    return CDDParams(args.rho, args.n, args.q, args.D)


def _bound_task(job):
    cdd, v, tol = job
    return ProfileTableRow.from_result(v, bound_at(cdd, v, tol))


def _bound_rows(cdd: CDDParams, vs: list[float], tol: float, jobs: int) -> list[ProfileTableRow]:
    tasks = [(cdd, v, tol) for v in vs]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_bound_task, tasks))
    return [_bound_task(t) for t in tasks]


def cmd_bound(args) -> int:
    cdd = _params(args)
    tol = rel_tol_from_env()
    rows = _bound_rows(cdd, _v_values(args), tol, args.jobs)
    _emit(args, format_table([_row_dict(r) for r in rows], TABLE_COLUMNS, args.format))
    return EXIT_OK


def _witness_window(cdd: CDDParams, r: BoundResult) -> tuple[float, float]:
    params = cdd.model(r.h_star)
    if math.isfinite(cdd.D):
        return -r.a_star, cdd.D - r.a_star
    if math.isinf(cdd.m):
        centre = r.h_star / cdd.rho
        half = 6.0 / math.sqrt(cdd.rho)
        return centre - half, centre + half
    sup = support_j(params)
    return sup.lo, sup.hi


def cmd_model(args) -> int:
    cdd = _params(args)
    vs = _v_values(args)
    if len(vs) != 1:
        raise UsageError("model needs a single --v")
    if args.samples < 2:
        raise UsageError("--samples must be at least 2")
    tol = rel_tol_from_env()
    r = bound_at(cdd, vs[0], tol)
    if math.isnan(r.h_star):
        raise UsageError("no minimizing model density: the bound is trivially 0 here")
    lo, hi = _witness_window(cdd, r)
    params = cdd.model(r.h_star)
    f = lambda t: eval_j(params, t)
    sup = support_j(params)
    Z = integrate(f, max(lo, sup.lo), min(hi, sup.hi), tol).value
    ts = np.linspace(lo, hi, args.samples)
    js = np.asarray(f(ts), dtype=float)
    rows = [{"t": float(t), "j": float(j), "density": float(j / Z)} for t, j in zip(ts, js)]
    _emit(args, format_table(rows, MODEL_COLUMNS, args.format))
    return EXIT_OK


def verify_report(cdd: CDDParams, v: float, eps: float, tol: float = DEFAULT_REL_TOL) -> dict:
    """Cross-check the solver against the grid oracle and the warped-product witness."""
    if math.isinf(cdd.D):
        raise UsageError("verify needs a finite --D")
    if cdd.n < 3 or not 0 < cdd.q < math.inf:
        raise UsageError("verify needs n >= 3 and 0 < q < inf for the warped product")
    if not eps > 0:
        raise UsageError("--eps must be positive")
    r = bound_at(cdd, v, tol)
    report = {"v": v, "eps": eps, "bound": r.value, "case_id": r.case_id.value,
              "h_star": _json_number(r.h_star), "a_star": _json_number(r.a_star)}
    if math.isnan(r.h_star):
        report.update(oracle=0.0, oracle_gap=0.0, curvature_margin=None,
                      slab_profile=None, slab_gap=0.0, passed=True)
        return report
    oracle = bound_oracle_grid(cdd, v, rel_tol=tol)
    wp = WarpedProduct.canonical(cdd.rho, cdd.n, cdd.q, r.h_star, r.a_star, cdd.D - r.a_star, eps)
    margin = check_cdd(wp, cdd.rho)
    slab = slab_profile(wp, v)
    oracle_gap = abs(oracle - r.value) / r.value
    slab_gap = abs(slab - r.value) / r.value
    report.update(oracle=oracle, oracle_gap=oracle_gap, curvature_margin=margin,
                  slab_profile=slab, slab_gap=slab_gap,
                  passed=bool(oracle_gap <= ORACLE_TOL and margin >= 0.0 and slab_gap <= SLAB_TOL))
    return report


def cmd_verify(args) -> int:
    cdd = _params(args)
    vs = _v_values(args)
    if len(vs) != 1:
        raise UsageError("verify needs a single --v")
    report = verify_report(cdd, vs[0], args.eps, rel_tol_from_env())
    _emit(args, json.dumps(report, allow_nan=False) + "\n")
    return EXIT_OK if report["passed"] else EXIT_VERIFY_FAILED


def _emit(args, text: str) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cddiso", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--rho", type=_finite, required=True)
    common.add_argument("--n", type=_positive_int, required=True)
    common.add_argument("--q", type=_extended, required=True)
    common.add_argument("--D", type=_extended, required=True)
    vgroup = common.add_mutually_exclusive_group(required=True)
    vgroup.add_argument("--v", type=_finite)
    vgroup.add_argument("--v-grid", type=_positive_int, metavar="COUNT")
    common.add_argument("--out", default=None)

    p = sub.add_parser("bound", parents=[common], help="bound table over v")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--jobs", type=_positive_int, default=1)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("model", parents=[common], help="samples of the minimizing model density")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--samples", type=int, default=101)
    p.set_defaults(func=cmd_model)

    p = sub.add_parser("verify", parents=[common], help="oracle and warped-product cross-checks")
    p.add_argument("--eps", type=_finite, default=0.01)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InvalidParameterError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (NumericalFailure, IntegrationError, RuntimeError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
