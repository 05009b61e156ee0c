"""Command-line interface: metrics, distances, suites, the path oracle and reports.

Exit codes: 0 success, 1 suite violation, 2 usage or domain error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

import numpy as np

from .audit import normalization_audit
from .ball import kob_dist_ball, kob_norm_ball
from .domains import Ball, PlanarDomain, ProductDomain, parse_domain, parse_space
from .errors import InvMetricError
from .maps import HarmonicMap, map_from_dict
from .oracle import closed_form_distance, path_oracle
from .planar import Norm, hyp_density, hyp_distance
from .product import finsler_product, kob_dist_product
from .suites import DEFAULT_TOLERANCE, VerificationReport, run_all, run_suite, suite_ids

__all__ = ["main", "parse_complex", "parse_vector"]

SEED_ENV = "INVMETRIC_SEED"


class UsageError(InvMetricError):
    pass


class _Parser(argparse.ArgumentParser):
    """Reports usage errors as a single line and exit code 2."""

    def error(self, message):
        raise UsageError(message)


# -- parsing --------------------------------------------------------------------

def parse_complex(text: str) -> complex:
    """``RE`` or ``RE,IM``."""
    parts = text.strip().split(",")
    if len(parts) > 2 or not parts[0].strip():
        raise UsageError(f"malformed complex number {text!r} (use RE or RE,IM)")
    try:
        vals = [float(p) for p in parts]
    except ValueError:
        raise UsageError(f"malformed complex number {text!r} (use RE or RE,IM)") from None
    if not all(np.isfinite(vals)):
        raise UsageError(f"non-finite complex number {text!r}")
    return complex(vals[0], vals[1] if len(vals) == 2 else 0.0)


def parse_vector(text: str) -> np.ndarray:
    """Semicolon-separated complex entries, e.g. ``0.5;0,0.2``."""
    return np.array([parse_complex(p) for p in text.split(";")], dtype=complex)


def _point(space, text: str) -> np.ndarray:
    v = parse_vector(text)
    dim = 1 if isinstance(space, PlanarDomain) else space.dim
    if v.size != dim:
        raise UsageError(f"{text!r} has {v.size} entries; {space} needs {dim}")
    if not np.all(space.contains(v if dim > 1 else v[0])):
        raise UsageError(f"point {text!r} lies outside {space}")
    return v


def _env_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 42
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV}={raw!r} is not an integer") from None


# -- output ---------------------------------------------------------------------

def _num(x: float) -> str:
    r = repr(float(x))
    return r[:-2] if r.endswith(".0") else r


def _enc(v) -> list:
    return [[float(z.real), float(z.imag)] for z in np.atleast_1d(np.asarray(v, dtype=complex))]


def _emit(args, config: dict, result: dict, plain: str, csv_rows=None) -> None:
    fmt = args.format
    if fmt == "json":
        out = json.dumps({"config": config, "result": result}, indent=2)
    elif fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        rows = csv_rows if csv_rows is not None else [list(result.keys()), list(result.values())]
        w.writerows(rows)
        out = buf.getvalue().rstrip("\n")
    else:
        out = plain
    sys.stdout.write(out + "\n")


def _config(args, **extra) -> dict:
    d = {"command": args.command, "format": args.format}
    d.update(extra)
    return d


# -- commands -------------------------------------------------------------------

def _cmd_density(args) -> int:
    dom = parse_domain(args.domain)
    z = _point(dom, args.point)[0]
    norm = Norm.parse(args.norm)
    value = float(hyp_density(dom, z)) * (1.0 if norm is Norm.HYP else 0.5)
    cfg = _config(args, domain=str(dom), point=_enc(z), norm=norm.value)
    _emit(args, cfg, {"density": value}, _num(value))
    return 0


def _distance(space, a, b, norm: Norm) -> float:
    if isinstance(space, PlanarDomain):
        return hyp_distance(space, a[0], b[0], norm)
    if isinstance(space, Ball):
        return kob_dist_ball(a, b, norm)
    return kob_dist_product(space, a, b, norm)


def _cmd_dist(args) -> int:
    space = parse_space(args.space)
    if isinstance(space, PlanarDomain) and not space.simply_connected:
        raise UsageError("no closed-form distance on the punctured disk; use the oracle command")
    a, b = _point(space, args.from_), _point(space, args.to)
    norm = Norm.parse(args.norm)
    value = _distance(space, a, b, norm)
    cfg = _config(args, space=str(space), **{"from": _enc(a)}, to=_enc(b), norm=norm.value)
    _emit(args, cfg, {"distance": value}, _num(value))
    return 0


def _cmd_finsler(args) -> int:
    space = parse_space(args.space)
    if isinstance(space, PlanarDomain):
        space = ProductDomain((space,))
    p = _point(space, args.point)
    u = parse_vector(args.vector)
    if u.size != p.size:
        raise UsageError(f"vector has {u.size} entries; point has {p.size}")
    norm = Norm.parse(args.norm)
    if isinstance(space, Ball):
        if norm is Norm.HYP:
            raise UsageError("ball Finsler values are defined in the kob normalization only")
        value = float(kob_norm_ball(p, u))
    else:
        value = float(finsler_product(space, p, u, norm))
    cfg = _config(args, space=str(space), point=_enc(p), vector=_enc(u), norm=norm.value)
    _emit(args, cfg, {"finsler": value}, _num(value))
    return 0


def _cmd_oracle(args) -> int:
    space = parse_space(args.space)
    a, b = _point(space, args.from_), _point(space, args.to)
    if args.segments < 2:
        raise UsageError("--segments must be >= 2")
    res = path_oracle(space, a, b, segments=args.segments, max_iters=args.max_iters)
    closed = None
    if not (isinstance(space, PlanarDomain) and not space.simply_connected) and not (
            isinstance(space, ProductDomain) and not all(f.simply_connected for f in space.factors)):
        closed = closed_form_distance(space, a, b)
    cfg = _config(args, space=str(space), **{"from": _enc(a)}, to=_enc(b), segments=args.segments,
                  max_iters=args.max_iters)
    result = {"value": res.value, "closed_form": closed, "converged": res.converged,
              "iterations": res.iterations, "segments": res.segments}
    _emit(args, cfg, result, _num(res.value))
    return 0


def _verify_config(args, seed, tolerance) -> dict:
    return _config(args, suite=args.suite, samples=args.samples, seed=seed, tolerance=tolerance,
                   workers=args.workers)


def _reports_json(config: dict, reports: list, runtime: bool) -> str:
    doc = {"config": config, "reports": [r.to_dict(runtime) for r in reports]}
    return json.dumps(doc, indent=2)


def _summary_rows(reports: list) -> list:
    rows = [["suite", "seed", "samples", "rows", "violations", "witnesses", "min_slack", "max_slack",
             "mean_slack", "passed"]]
    for r in reports:
        rows.append([r.suite, r.seed, r.samples, r.rows, len(r.violations), len(r.equality_witnesses),
                     repr(r.min_slack), repr(r.max_slack), repr(r.mean_slack), r.passed])
    return rows


def _summary_plain(reports: list) -> str:
    lines = []
    for r in reports:
        lines.append(f"{r.suite}: {'PASS' if r.passed else 'FAIL'} rows={r.rows} "
                     f"violations={len(r.violations)} witnesses={len(r.equality_witnesses)} "
                     f"min_slack={r.min_slack!r}")
    return "\n".join(lines)


def _print_reports(args, config, reports, runtime=True) -> None:
    if args.format == "json":
        sys.stdout.write(_reports_json(config, reports, runtime) + "\n")
    elif args.format == "csv":
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows(_summary_rows(reports))
        sys.stdout.write(buf.getvalue())
    else:
        sys.stdout.write(_summary_plain(reports) + "\n")


def _cmd_verify(args) -> int:
    seed = _env_seed() if args.seed is None else args.seed
    tolerance = DEFAULT_TOLERANCE if args.tolerance is None else args.tolerance
    if args.samples < 1:
        raise UsageError("--samples must be >= 1")
    if args.workers < 1:
        raise UsageError("--workers must be >= 1")
    keep = args.csv is not None
    if args.suite == "all":
        reports = run_all(args.samples, seed, tolerance, args.workers, keep)
    else:
        if args.suite not in suite_ids():
            raise UsageError(f"unknown suite {args.suite!r}; choose from all, {', '.join(suite_ids())}")
        reports = [run_suite(args.suite, args.samples, seed, tolerance, args.workers, keep)]
    config = _verify_config(args, seed, tolerance)
    runtime = not args.omit_runtime
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(_reports_json(config, reports, runtime) + "\n")
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            for r in reports:
                fh.write(f"# suite={r.suite}\n")
                fh.write(r.slack_csv())
    _print_reports(args, config, reports, runtime)
    return 0 if all(r.passed for r in reports) else 1


def _cmd_audit(args) -> int:
    seed = _env_seed() if args.seed is None else args.seed
    rep = normalization_audit(seed=seed)
    d = rep.to_dict()
    cfg = _config(args, seed=seed, cases=len(rep.cases), step=rep.step)
    rows = [["space", "kob", "hyp", "oracle", "hyp_over_kob", "kob_error"]]
    rows += [[c.space, repr(c.kob), repr(c.hyp), repr(c.oracle), repr(c.hyp_over_kob), repr(c.kob_error)]
             for c in rep.cases]
    lo, hi = rep.hyp_factor_range
    plain = (f"matches={rep.matches} kob_max_error={rep.kob_max_error:.3e} "
             f"hyp/kob in [{lo!r}, {hi!r}] passed={rep.passed}")
    _emit(args, cfg, d, plain, rows)
    return 0 if rep.passed else 1


def _cmd_replay(args) -> int:
    try:
        with open(args.file, encoding="utf-8") as fh:
            m = map_from_dict(json.load(fh))
    except OSError as exc:
        raise UsageError(f"cannot read {args.file}: {exc.strerror}") from None
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"{args.file} is not a serialized map: {exc}") from None
    dim = m.analytic.dim_in if isinstance(m, HarmonicMap) else m.dim_in
    z = parse_vector(args.point)
    if z.size != dim:
        raise UsageError(f"{args.point!r} has {z.size} entries; the map takes {dim}")
    z = z if dim > 1 else z[0]
    if isinstance(m, HarmonicMap):
        value = np.atleast_1d(m(z)).astype(float)
        jac = np.asarray(m.real_jacobian(z), dtype=float)
        result = {"value": value.tolist(), "real_jacobian": jac.tolist()}
        plain = " ".join(_num(v) for v in value)
    else:
        value = np.atleast_1d(m(z))
        jac = m.jacobian(z)
        result = {"value": _enc(value), "jacobian": [_enc(row) for row in jac]}
        plain = " ".join(_num(v.real) if v.imag == 0 else f"{_num(v.real)},{_num(v.imag)}" for v in value)
    cfg = _config(args, file=args.file, label=m.label, point=_enc(z))
    _emit(args, cfg, result, plain)
    return 0


def _cmd_report(args) -> int:
    try:
        with open(args.file, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {args.file}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{args.file} is not JSON: {exc.msg}") from None
    if not isinstance(doc, dict) or "reports" not in doc:
        raise UsageError(f"{args.file} is not a verify report")
    try:
        reports = [VerificationReport.from_dict(r) for r in doc["reports"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"malformed report in {args.file}: {exc}") from None
    runtime = all("runtime_ms" in r for r in doc["reports"])
    config = doc.get("config", {})
    if args.format == "json":
        sys.stdout.write(_reports_json(config, reports, runtime) + "\n")
    else:
        _print_reports(args, config, reports, runtime)
    return 0 if all(r.passed for r in reports) else 1


# -- parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    fmt = _Parser(add_help=False)
    fmt.add_argument("--format", choices=["json", "csv", "plain"], default=None)

    p = _Parser(prog="invmetric", description="Invariant metrics, Schwarz-type inequalities and their checks.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("density", parents=[fmt], help="hyperbolic density of a planar domain")
    s.add_argument("--domain", required=True, help="disk | halfplane | strip:a:b | punctured")
    s.add_argument("--point", required=True, help="RE or RE,IM")
    s.add_argument("--norm", default="hyp", choices=["hyp", "kob"])

    s = sub.add_parser("dist", parents=[fmt], help="closed-form hyperbolic/Kobayashi distance")
    s.add_argument("--space", required=True, help="disk | halfplane | strip:a:b | ball:n | polydisk:n | product:...")
    s.add_argument("--from", dest="from_", required=True)
    s.add_argument("--to", required=True)
    s.add_argument("--norm", default="kob", choices=["hyp", "kob"])

    s = sub.add_parser("finsler", parents=[fmt], help="Kobayashi-Finsler norm")
    s.add_argument("--space", required=True, help="ball:n | polydisk:n | product:D1,D2,...")
    s.add_argument("--point", required=True, help="semicolon-separated complex entries")
    s.add_argument("--vector", required=True, help="semicolon-separated complex entries")
    s.add_argument("--norm", default="kob", choices=["hyp", "kob"],
                   help="product spaces only: hyp uses the curvature -1 factor densities")

    s = sub.add_parser("verify", parents=[fmt], help="run inequality suites")
    s.add_argument("--suite", required=True, help="suite id or 'all'")
    s.add_argument("--samples", type=int, default=1000)
    s.add_argument("--seed", type=int, default=None, help=f"default ${SEED_ENV} or 42")
    s.add_argument("--tolerance", type=float, default=None)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--out", default=None, help="write the JSON report to FILE")
    s.add_argument("--csv", default=None, help="write per-row slacks to FILE")
    s.add_argument("--omit-runtime", action="store_true", help="drop runtime_ms from reports")

    s = sub.add_parser("oracle", parents=[fmt], help="numerical Kobayashi distance by path minimization")
    s.add_argument("--space", required=True)
    s.add_argument("--from", dest="from_", required=True)
    s.add_argument("--to", required=True)
    s.add_argument("--segments", type=int, default=256)
    s.add_argument("--max-iters", type=int, default=500)

    s = sub.add_parser("audit-normalization", parents=[fmt], help="product max formula vs the path oracle")
    s.add_argument("--seed", type=int, default=None)

    s = sub.add_parser("replay", parents=[fmt], help="evaluate a serialized map and its Jacobian")
    s.add_argument("file", help="JSON written by HoloMap.to_json or HarmonicMap.to_dict")
    s.add_argument("--point", required=True, help="semicolon-separated complex entries")

    s = sub.add_parser("report", help="report utilities")
    rsub = s.add_subparsers(dest="action", required=True, parser_class=_Parser)
    r = rsub.add_parser("inspect", parents=[fmt], help="re-parse a report written by verify --out")
    r.add_argument("file")
    return p


_COMMANDS = {
    "density": _cmd_density,
    "dist": _cmd_dist,
    "finsler": _cmd_finsler,
    "verify": _cmd_verify,
    "oracle": _cmd_oracle,
    "audit-normalization": _cmd_audit,
    "replay": _cmd_replay,
    "report": _cmd_report,
}

_DEFAULT_FORMAT = {"verify": "json", "audit-normalization": "json", "report": "json"}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.format is None:
            args.format = _DEFAULT_FORMAT.get(args.command, "plain")
        return _COMMANDS[args.command](args)
    except InvMetricError as exc:
        msg = " ".join(str(exc).split())
        sys.stderr.write(f"invmetric: error: {msg}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
