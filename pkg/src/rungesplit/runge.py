"""Explicit bounds: the Runge bound on log|j|, the integrality bound on
log|U|, and the isogeny-height chain that turns them into a crossing prime.

The isogeny constants (kappa(2) in particular) are inputs. Every number
derived from them is conditional on those inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from sympy import isprime, nextprime, prevprime

DEFAULT_C_RUNGE = 10.0

# sup over primes p >= 3 of 12 log p / (p - 1), attained at p = 3.
COMBINE_SLACK = 6.0 * math.log(3.0)


class ConsistencyError(AssertionError):
    """Substituting the integrality bound into the unit branch overshot."""


def runge_bound(p: float, c_runge: float = DEFAULT_C_RUNGE) -> float:
    """2 pi sqrt(p) + 6 log p + C. Primality is the caller's business."""
    if p < 2:
        raise ValueError(f"runge_bound needs p >= 2, got {p}")
    return 2 * math.pi * math.sqrt(p) + 6 * math.log(p) + c_runge


def pari_bound(p: int) -> float:
    """Upper bound 24 p log p on log|U(P)| at an integral point."""
    if p < 3:
        raise ValueError(f"pari_bound needs p >= 3, got {p}")
    return 24 * p * math.log(p)


def unit_value_admissible(value: int, p: int) -> bool:
    """True iff value = +-p^m with 0 <= m <= 24p.

    At an integral point U(P) is a nonzero integer whose (p-1)-th power
    divides p^{24p(p-1)}.
    """
    value = abs(int(value))
    if value == 0:
        return False
    m = 0
    while value % p == 0:
        value //= p
        m += 1
        if m > 24 * p:
            return False
    return value == 1


def combine_margin(p: int) -> float:
    """How far the integrality bound pushed through the unit branch exceeds
    the Runge bound: 12 p log p / (p - 1) - 12 log p = 12 log p / (p - 1)."""
    return pari_bound(p) / (2 * (p - 1)) - 12 * math.log(p)


def combine_theorem1(p: int, c_runge: float = DEFAULT_C_RUNGE, slack: float = COMBINE_SLACK) -> float:
    """Final log|j| bound at integral points, with the substitution checked."""
    if p < 3:
        raise ValueError(f"combine_theorem1 needs p >= 3, got {p}")
    margin = combine_margin(p)
    if margin > slack:
        raise ConsistencyError(f"p={p}: margin {margin:.6g} exceeds slack {slack:.6g}")
    return runge_bound(p, c_runge)


@dataclass
class BoundReport:
    p: int
    c_runge: float
    runge_bound: float
    pari_bound: float
    combine_margin: float
    combine_slack: float
    notes: list[str] = field(default_factory=list)

    def as_record(self) -> dict:
        return {
            "p": self.p,
            "c_runge": self.c_runge,
            "runge_bound": self.runge_bound,
            "pari_bound": self.pari_bound,
            "combine_margin": self.combine_margin,
            "combine_slack": self.combine_slack,
            "combine_ok": self.combine_margin <= self.combine_slack,
            "notes": list(self.notes),
        }


def bound_report(p: int, c_runge: float = DEFAULT_C_RUNGE) -> BoundReport:
    if not isprime(p) or p < 3:
        raise ValueError(f"p must be an odd prime, got {p}")
    notes = [f"C_runge = {c_runge:g} is a configuration value, not a proved constant"]
    return BoundReport(
        p=p,
        c_runge=c_runge,
        runge_bound=combine_theorem1(p, c_runge),
        pari_bound=pari_bound(p),
        combine_margin=combine_margin(p),
        combine_slack=COMBINE_SLACK,
        notes=notes,
    )


# --- isogeny chain ----------------------------------------------------------


@dataclass(frozen=True)
class IsogenyChainConstants:
    kappa2: float
    faltings_step: float = 0.5
    silverman_slack: float = 47.15
    height_log_coeff: float = 6.0

    def __post_init__(self):
        if not self.kappa2 > 0:
            raise ValueError("kappa2 must be positive")
        if not self.silverman_slack > 0:
            raise ValueError("silverman_slack must be positive")


def isogeny_degree_bound(h_j: float, constants: IsogenyChainConstants) -> float:
    """Largest cyclic isogeny degree kappa(2) (1 + h)^2 allowed at height h."""
    if h_j < 0:
        raise ValueError("height must be nonnegative")
    return constants.kappa2 * (1.0 + h_j) ** 2


def _faltings_lower_from_height(h_lower: float, k: IsogenyChainConstants) -> float:
    """min over h >= h_lower of (h - c log(1+h) - s) / 12.

    h - c log(1+h) is decreasing below h = c - 1 and increasing above it.
    """
    h = max(h_lower, k.height_log_coeff - 1.0, 0.0)
    return (h - k.height_log_coeff * math.log1p(h) - k.silverman_slack) / 12.0


def _solve_height(target: float, k: IsogenyChainConstants, hi: float = 1e9, tol: float = 1e-6) -> float:
    """Least h >= 0 with h + c log(1+h) >= target, by bisection."""
    g = lambda h: h + k.height_log_coeff * math.log1p(h)
    if target <= 0:
        return 0.0
    lo = 0.0
    if g(hi) < target:
        raise ValueError(f"target {target} beyond bisection range")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if g(mid) >= target:
            hi = mid
        else:
            lo = mid
    return lo


@dataclass(frozen=True)
class PuboChain:
    """Lower bound on h(j_E) for a split-Cartan curve, step by step."""

    p: int
    constants: IsogenyChainConstants
    h_isogenous_lower: float  # h(j_{E_1}) from the p^2-isogeny
    faltings_isogenous_lower: float  # h_F(E_1)
    faltings_lower: float  # h_F(E)
    height_lower: float  # h(j_E)

    @property
    def reached(self) -> bool:
        return self.h_isogenous_lower > 0 and self.height_lower > 0

    def as_record(self) -> dict:
        return {
            "p": self.p,
            "kappa2": self.constants.kappa2,
            "silverman_slack": self.constants.silverman_slack,
            "h_isogenous_lower": self.h_isogenous_lower,
            "faltings_isogenous_lower": self.faltings_isogenous_lower,
            "faltings_lower": self.faltings_lower,
            "height_lower": self.height_lower,
            "reached": self.reached,
            "note": "conditional on constants",
        }


def pubo_lower_bound(p: int, constants: IsogenyChainConstants) -> PuboChain:
    """Run the three-step chain; `reached` is False when p is out of range."""
    if p < 3:
        raise ValueError("p must be >= 3")
    k = constants
    # (i) p^2 <= kappa (1 + h1)^2
    h1 = p / math.sqrt(k.kappa2) - 1.0
    # Silverman on E_1, then Faltings' isogeny step
    hf1 = _faltings_lower_from_height(max(h1, 0.0), k)
    hf = hf1 - k.faltings_step * math.log(p)
    # Silverman on E: h + c log(1+h) + s >= 12 h_F(E)
    h = _solve_height(12.0 * hf - k.silverman_slack, k)
    return PuboChain(p, k, h1, hf1, hf, h)


# --- crossing prime -----------------------------------------------------------


def crossing_gap(p: float, kappa_eff: float, c_runge: float) -> float:
    """kappa p - (2 pi sqrt p + 6 log p + C); positive means p is past the crossing."""
    return kappa_eff * p - runge_bound(p, c_runge)


def p0_crossing(kappa_eff: float, c_runge: float = 0.0) -> int:
    """Least prime p with kappa p > Runge bound at every prime >= p.

    The gap is convex in p, so past its minimiser it only grows; if the gap
    is already positive at the minimiser every prime qualifies.
    """
    if not kappa_eff > 0:
        raise ValueError("kappa_eff must be positive")
    # gap'(p) = kappa - pi/sqrt(p) - 6/p; find its zero by bisection
    lo, hi = 1e-12, 1.0
    while kappa_eff - math.pi / math.sqrt(hi) - 6 / hi <= 0:
        hi *= 2
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if kappa_eff - math.pi / math.sqrt(mid) - 6 / mid > 0:
            hi = mid
        else:
            lo = mid
    p_min = hi
    p = 2 if p_min <= 2 else nextprime(math.floor(p_min))
    while crossing_gap(p, kappa_eff, c_runge) <= 0:
        p = nextprime(p)
    # left of the minimiser the gap grows as p shrinks, so keep stepping back
    # while the previous prime still passes
    while p > 2 and crossing_gap(prevprime(p), kappa_eff, c_runge) > 0:
        p = prevprime(p)
    return p


def p0_bracket(kappa_eff: float, c_runge: float = 0.0) -> dict:
    """Crossing prime with the gap evaluated there and at the prime below."""
    p = p0_crossing(kappa_eff, c_runge)
    out = {
        "p0": p,
        "kappa_eff": kappa_eff,
        "c_runge": c_runge,
        "lhs_at_p0": kappa_eff * p,
        "rhs_at_p0": runge_bound(p, c_runge),
    }
    if p > 2:
        q = prevprime(p)
        out.update(previous_prime=q, lhs_at_previous=kappa_eff * q, rhs_at_previous=runge_bound(q, c_runge))
    return out
