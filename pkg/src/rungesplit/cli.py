"""Command-line front end: ``runge-split <command> [options]``.

Exit codes: 0 all checks pass, 1 a verification failed, 2 usage or
configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction

from sympy import isprime, primerange

from . import __version__, checks
from .config import ConfigError, RunConfig
from .galois import (
    CurveModel,
    SingularCurveError,
    classify_point_image,
    cm_split_primes,
    cm_table,
    verify_cm_entry,
)
from .modular_unit import default_pana_grid, default_pu_grid, in_d_plus_z, pu_envelope, unit_eval_report, unit_log_abs
from .qnum import BudgetExhausted, HalfPlanePoint, TruncationBudget
from .runge import IsogenyChainConstants, bound_report, p0_bracket, pubo_lower_bound
from .siegel import IndexPair, pga_residual, siegel_log_abs

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# --- argument parsing helpers ---------------------------------------------------


def _pair(text: str, kind=float):
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected two comma-separated values, got {text!r}")
    try:
        return tuple(kind(s.strip()) for s in parts)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _tau(text: str) -> HalfPlanePoint:
    x, y = _pair(text)
    try:
        return HalfPlanePoint(x, y)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def parse_grid(spec: str | None):
    """'default' (or None) -> None; otherwise 'x:y,x:y,...' -> list of points."""
    if spec is None or spec == "default":
        return None
    points = []
    for item in spec.split(","):
        try:
            x, y = (float(s) for s in item.split(":"))
            points.append(HalfPlanePoint(x, y))
        except ValueError:
            raise UsageError(f"malformed grid entry {item!r}; expected RE:IM") from None
    if not points:
        raise UsageError("empty grid")
    return points


def parse_prime_range(spec: str) -> list[int]:
    """'13', '17..499' or '5,13,17' -> odd primes."""
    try:
        if ".." in spec:
            lo, hi = (int(s) for s in spec.split(".."))
            primes = [int(p) for p in primerange(max(lo, 3), hi + 1)]
        else:
            primes = [int(s) for s in spec.split(",")]
    except ValueError:
        raise UsageError(f"malformed prime range {spec!r}") from None
    bad = [p for p in primes if p < 3 or not isprime(p)]
    if bad:
        raise UsageError(f"not odd primes: {bad}")
    if not primes:
        raise UsageError(f"no odd primes in {spec!r}")
    return primes


def _require_odd_prime(p: int) -> int:
    if p < 3 or not isprime(p):
        raise UsageError(f"--p {p} is not an odd prime")
    return p


# --- output --------------------------------------------------------------------


def _clean(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def render(command: str, config: RunConfig, records: list[dict], summary: dict, fmt: str) -> str:
    doc = _clean({
        "command": command,
        "config": config.as_dict(),
        "records": records,
        "summary": summary,
        "version": __version__,
    })
    if fmt == "json":
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        fields = sorted({k for r in doc["records"] for k in r})
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        writer.writeheader()
        for r in doc["records"]:
            writer.writerow({k: json.dumps(v) if isinstance(v, (list, dict)) else v for k, v in r.items()})
        return buf.getvalue()
    lines = [f"# {command}"]
    for r in doc["records"]:
        lines.append("  ".join(f"{k}={_fmt_text(v)}" for k, v in r.items()))
    lines.append("# summary")
    lines.extend(f"{k}: {_fmt_text(v)}" for k, v in doc["summary"].items())
    return "\n".join(lines) + "\n"


def _fmt_text(v) -> str:
    if isinstance(v, float):
        return f"{v:.10g}"
    if isinstance(v, (list, tuple)):
        return "[" + ",".join(_fmt_text(x) for x in v) + "]"
    return str(v)


# --- commands --------------------------------------------------------------------


def cmd_bound(args, config):
    p = _require_odd_prime(args.p)
    report = bound_report(p, config.C_runge)
    records = [report.as_record()]
    if config.kappa2 is not None:
        records.append(pubo_lower_bound(p, IsogenyChainConstants(config.kappa2)).as_record())
    summary = {
        "runge_bound": report.runge_bound,
        "pari_bound": report.pari_bound,
        "combine_margin": report.combine_margin,
        "passed": report.combine_margin <= report.combine_slack,
    }
    return records, summary


def cmd_verify(args, config):
    prop = args.proposition
    target = config.precision_target
    w = config.workers
    grid = parse_grid(args.grid)
    if prop == "pga":
        records, summary = checks.run_pga(config.S_pga, q_max=args.q_max, target=target, workers=w)
    elif prop == "llogz":
        records, summary = checks.run_llogz(config.C0, workers=w)
    elif prop in ("pu", "pana"):
        if args.p is None:
            raise UsageError(f"verify {prop} needs --p")
        p = _require_odd_prime(args.p)
        if prop == "pu":
            if grid is not None:
                bad = [t for t in grid if t.q_abs > 1.0 / p]
                if bad:
                    raise UsageError(f"grid point {bad[0]} violates |q| <= 1/{p}")
            cs = args.c if args.c is not None else list(checks.PU_CS)
            records, summary = checks.run_pu(
                [p], cs, config.S1, config.S2,
                grid=(lambda _p: grid) if grid is not None else default_pu_grid,
                target=target, workers=w,
            )
        else:
            if grid is not None:
                bad = [t for t in grid if not in_d_plus_z(t)]
                if bad:
                    raise UsageError(f"grid point {bad[0]} is not in D + Z")
            records, summary = checks.run_pana(
                [p], config.C_runge, config.pana_slack,
                grid=(lambda _p: grid) if grid is not None else default_pana_grid,
                target=target, workers=w,
            )
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(f"unknown proposition {prop}")
    summary = {"proposition": prop, **summary}
    return records, summary


def cmd_galois(args, config):
    if args.curve is not None:
        try:
            curve = CurveModel.parse(args.curve)
        except SingularCurveError as exc:
            raise UsageError(str(exc)) from None
        except ValueError as exc:
            raise UsageError(f"bad --curve: {exc}") from None
    elif args.j is not None:
        curve = CurveModel.from_j(args.j)
    else:
        raise UsageError("galois needs --curve or --j")
    primes = parse_prime_range(args.p)
    records = []
    for p in primes:
        rec = classify_point_image(curve, p, args.lmax).as_record()
        rec["curve"] = list(curve.ainvs)
        records.append(rec)
    j = curve.j_invariant
    summary = {
        "curve": list(curve.ainvs),
        "j": str(j),
        "lmax": args.lmax,
        "ruled_out": sum(r["status"] == "ruled-out" for r in records),
        "possibly_contained": sum(r["status"] == "possibly-contained" for r in records),
        "model_caveat": "traces depend on the chosen twist when j is 0 or 1728" if j in (0, 1728) else "",
    }
    return records, summary


def cmd_p0(args, config):
    if not args.kappa > 0:
        raise UsageError("--kappa must be positive")
    record = p0_bracket(args.kappa, config.C_runge)
    summary = {"p0": record["p0"], "note": "conditional on kappa_eff and C_runge"}
    return [record], summary


def cmd_siegel_eval(args, config):
    a = IndexPair(*args.a)
    tau = args.tau
    budget = TruncationBudget(config.precision_target)
    rec = {"a": [str(a.a1), str(a.a2)], "tau": [tau.x, tau.y], "log_abs_g": siegel_log_abs(a, tau, budget)}
    if tau.q_abs <= 0.1:
        res = pga_residual(a, tau, budget)
        rec.update(pga_residual=res, pga_bound=config.S_pga * tau.q_abs)
    return [rec], {"passed": abs(rec.get("pga_residual", 0.0)) <= rec.get("pga_bound", math.inf)}


def cmd_unit_eval(args, config):
    p = _require_odd_prime(args.p)
    tau = args.tau
    budget = TruncationBudget(config.precision_target)
    if tau.q_abs <= 1.0 / p:
        slack = config.S1 if args.c % p == 0 else config.S2
        rec = unit_eval_report(p, args.c, tau, slack, budget).as_record()
        return [rec], {"passed": rec["passed"]}
    value = unit_log_abs(p, args.c, tau, budget)
    envelope, _ = pu_envelope(p, args.c, tau)
    rec = {"p": p, "c": args.c % p, "tau": [tau.x, tau.y], "log_abs_u": value,
           "note": f"|q| > 1/{p}: envelope not applicable"}
    return [rec], {"passed": True}


def cmd_cm_table(args, config):
    records = []
    for d, j in cm_table():
        records.append({
            "discriminant": d,
            "j": j,
            "log_abs_j": math.log(abs(j)) if j else -math.inf,
            "verified": verify_cm_entry(d, j),
            "split_primes_below_100": cm_split_primes(d, 100),
        })
    summary = {"entries": len(records), "passed": all(r["verified"] for r in records)}
    return records, summary


# --- parser ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "text"), default="json")
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--constants", default=None, help="constants file (overrides $RUNGE_CONSTANTS)")
    common.add_argument("--c-runge", type=float, default=None, dest="c_runge")
    common.add_argument("--kappa2", type=float, default=None)

    parser = argparse.ArgumentParser(prog="runge-split", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bound", parents=[common], help="Runge and integrality bounds for one prime")
    p.add_argument("--p", type=int, required=True)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("verify", parents=[common], help="grid verification of an envelope")
    p.add_argument("proposition", choices=("pga", "llogz", "pu", "pana"))
    p.add_argument("--p", type=int)
    p.add_argument("--c", type=int, action="append")
    p.add_argument("--grid", default="default")
    p.add_argument("--q-max", type=float, default=0.1, dest="q_max")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("galois", parents=[common], help="split-Cartan test from Frobenius traces")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--curve", help="A1,A2,A3,A4,A6")
    g.add_argument("--j", type=_fraction, help="NUM or NUM/DEN")
    p.add_argument("--p", default="17..499")
    p.add_argument("--lmax", type=int, default=1000)
    p.set_defaults(func=cmd_galois)

    p = sub.add_parser("p0", parents=[common], help="crossing prime of kappa p against the Runge bound")
    p.add_argument("--kappa", type=float, required=True)
    p.set_defaults(func=cmd_p0)

    p = sub.add_parser("siegel-eval", parents=[common], help="log|g_a(tau)|")
    p.add_argument("--a", type=lambda s: _pair(s, _fraction), required=True)
    p.add_argument("--tau", type=_tau, required=True)
    p.set_defaults(func=cmd_siegel_eval)

    p = sub.add_parser("unit-eval", parents=[common], help="log|U_c(tau)| with its envelope")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--c", type=int, default=0)
    p.add_argument("--tau", type=_tau, required=True)
    p.set_defaults(func=cmd_unit_eval)

    p = sub.add_parser("cm-table", parents=[common], help="class-number-one CM j-invariants")
    p.set_defaults(func=cmd_cm_table)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = RunConfig.load(
            args.constants,
            C_runge=args.c_runge,
            kappa2=args.kappa2,
            output_format=args.format,
            workers=args.workers,
        )
        records, summary = args.func(args, config)
    except (UsageError, ConfigError) as exc:
        print(f"runge-split: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (BudgetExhausted, ValueError) as exc:
        print(f"runge-split: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    sys.stdout.write(render(args.command, config, records, summary, config.output_format))
    return EXIT_OK if summary.get("passed", True) else EXIT_FAILED


if __name__ == "__main__":
    raise SystemExit(main())
