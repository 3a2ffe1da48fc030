"""Grid drivers for the envelope checks.

Each driver returns ``(records, summary)``: one plain-dict record per grid
point, in grid order, and a summary with the worst case and an overall
pass flag. Work is farmed out per grid point when ``workers > 1``; results
come back in submission order so output does not depend on scheduling.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from typing import Callable, Iterable, Sequence, TypeVar

import numpy as np

from .modular_unit import (
    default_pana_grid,
    default_pu_grid,
    llogz_main_term,
    sum_log_one_minus_powers,
    unit_eval_report,
    verify_prop_pana,
)
from .qnum import HalfPlanePoint, TruncationBudget
from .siegel import index_pairs_up_to, pga_residual_many

T = TypeVar("T")
R = TypeVar("R")

PGA_Q_MIN = 1e-6
PGA_POINTS = 50
PGA_MAX_DEN = 13
PGA_XS = (0.0, 0.3)

LLOGZ_MODULI = tuple(float(r) for r in np.geomspace(0.01, 0.99, 50))
LLOGZ_PHASES = 16
LLOGZ_NS = (10, 100, 10_000)

PU_PRIMES = (5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)
PU_CS = (0, 1, 2)
PANA_PRIMES = (11, 17, 23)


def parallel_map(fn: Callable[[T], R], items: Iterable[T], workers: int = 1) -> list[R]:
    items = list(items)
    if workers <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    chunk = max(1, len(items) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=chunk))


# --- Siegel residual --------------------------------------------------------


def pga_grid(q_max: float = 0.1, n: int = PGA_POINTS, q_min: float = PGA_Q_MIN,
             xs: Sequence[float] = PGA_XS) -> list[HalfPlanePoint]:
    return [
        HalfPlanePoint(x, -math.log(q) / (2 * math.pi))
        for q in np.geomspace(q_min, q_max, n)
        for x in xs
    ]


def _pga_point(tau: HalfPlanePoint, max_den: int, s_pga: float, target: float) -> dict:
    pairs = index_pairs_up_to(max_den)
    res = np.abs(pga_residual_many(pairs, tau, TruncationBudget(target)))
    worst = int(np.argmax(res))
    q = tau.q_abs
    return {
        "tau": [tau.x, tau.y],
        "q_abs": q,
        "n_pairs": len(pairs),
        "max_abs_residual": float(res[worst]),
        "worst_pair": [str(pairs[worst].a1), str(pairs[worst].a2)],
        "ratio": float(res[worst]) / q,
        "bound": s_pga * q,
        "passed": bool(res[worst] <= s_pga * q),
    }


def run_pga(s_pga: float, q_max: float = 0.1, max_den: int = PGA_MAX_DEN,
            target: float = 1e-12, workers: int = 1):
    if not 0 < q_max <= 0.1:
        raise ValueError("q_max must lie in (0, 0.1]")
    grid = pga_grid(q_max, q_min=min(PGA_Q_MIN, q_max))
    records = parallel_map(partial(_pga_point, max_den=max_den, s_pga=s_pga, target=target), grid, workers)
    summary = {
        "points": len(records),
        "max_ratio": max(r["ratio"] for r in records),
        "S_pga": s_pga,
        "passed": all(r["passed"] for r in records),
    }
    return records, summary


# --- log|1 - z^k| sums ---------------------------------------------------------


def _llogz_modulus(r: float, c0: float) -> list[dict]:
    out = []
    for k in range(LLOGZ_PHASES):
        z = r * complex(math.cos(2 * math.pi * k / LLOGZ_PHASES), math.sin(2 * math.pi * k / LLOGZ_PHASES))
        main = llogz_main_term(z)
        for n in LLOGZ_NS:
            s = sum_log_one_minus_powers(z, n)
            out.append({
                "modulus": r,
                "phase_index": k,
                "N": n,
                "sum": s,
                "envelope": main,
                "excess": abs(s) - main,
                "passed": abs(s) <= main + c0,
            })
    return out


def run_llogz(c0: float, workers: int = 1):
    chunks = parallel_map(partial(_llogz_modulus, c0=c0), LLOGZ_MODULI, workers)
    records = [r for chunk in chunks for r in chunk]
    summary = {
        "points": len(records),
        "max_excess": max(r["excess"] for r in records),
        "C0": c0,
        "passed": all(r["passed"] for r in records),
    }
    return records, summary


# --- unit envelopes -----------------------------------------------------------


def _pu_point(job, s1: float, s2: float, target: float) -> dict:
    p, c, tau = job
    slack = s1 if c % p == 0 else s2
    return unit_eval_report(p, c, tau, slack, TruncationBudget(target)).as_record()


def run_pu(primes: Sequence[int], cs: Sequence[int], s1: float, s2: float,
           grid: Callable[[int], list[HalfPlanePoint]] = default_pu_grid,
           target: float = 1e-12, workers: int = 1):
    jobs = [(p, c, tau) for p in primes for c in cs for tau in grid(p)]
    records = parallel_map(partial(_pu_point, s1=s1, s2=s2, target=target), jobs, workers)

    def worst_slack(divisible: bool) -> float:
        vals = [
            max(0.0, (abs(r["residual"]) - r["envelope"]) / r["slack_normalizer"])
            for r in records
            if (r["c"] % r["p"] == 0) == divisible
        ]
        return max(vals, default=0.0)

    summary = {
        "points": len(records),
        "S1": s1,
        "S2": s2,
        "max_slack_used_S1": worst_slack(True),
        "max_slack_used_S2": worst_slack(False),
        "passed": all(r["passed"] for r in records),
    }
    return records, summary


def _pana_point(job, c_runge: float, slack: float, target: float) -> list[dict]:
    p, tau = job
    return [v.as_record() for v in verify_prop_pana(p, [tau], c_runge, slack, TruncationBudget(target))]


def run_pana(primes: Sequence[int], c_runge: float, slack: float,
             grid: Callable[[int], list[HalfPlanePoint]] = default_pana_grid,
             target: float = 1e-12, workers: int = 1):
    jobs = [(p, tau) for p in primes for tau in grid(p)]
    chunks = parallel_map(partial(_pana_point, c_runge=c_runge, slack=slack, target=target), jobs, workers)
    records = [r for chunk in chunks for r in chunk]
    shortfalls = [r["log_abs_j"] - max(r["first_bound"], r["second_bound"]) for r in records]
    summary = {
        "points": len(records),
        "c_runge": c_runge,
        "pana_slack": slack,
        "max_shortfall": max(shortfalls),
        "unit_branch_only": sum(1 for r in records if r["branch"] == "unit"),
        "passed": all(r["passed"] for r in records),
    }
    return records, summary
