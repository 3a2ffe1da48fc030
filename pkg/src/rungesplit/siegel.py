"""Siegel functions: exact index algebra and log-modulus evaluation.

Only |g_a| is ever computed. The roots of unity in the transformation
laws have modulus one, so dropping phases loses nothing that the bounds
downstream can see.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .qnum import (
    DEFAULT_BUDGET,
    TWO_PI,
    BudgetExhausted,
    HalfPlanePoint,
    TruncationBudget,
    UnimodularMatrix,
    log_abs_one_minus,
)

# The leading-term residual is studied on |q| <= 0.1; certified truncation wants |q| <= 0.99.
PGA_Q_MAX = 0.1
CERTIFIED_Q_MAX = 0.99


class PoleAtNode(ArithmeticError):
    """A product factor vanishes exactly (index congruent to 0 mod Z^2)."""


def _frac_mod1(t) -> Fraction:
    t = Fraction(t)
    return t - math.floor(t)


@dataclass(frozen=True, order=True)
class IndexPair:
    """A nonzero class a = (a1, a2) in (Q/Z)^2, stored with 0 <= ai < 1."""

    a1: Fraction
    a2: Fraction

    def __post_init__(self):
        object.__setattr__(self, "a1", _frac_mod1(self.a1))
        object.__setattr__(self, "a2", _frac_mod1(self.a2))
        if self.a1 == 0 and self.a2 == 0:
            raise ValueError("index pair must not lie in Z^2")

    @property
    def N(self) -> int:
        """Common denominator (order of a in (Q/Z)^2)."""
        return math.lcm(self.a1.denominator, self.a2.denominator)

    def __neg__(self) -> "IndexPair":
        return IndexPair(-self.a1, -self.a2)

    def __str__(self):
        return f"({self.a1}, {self.a2})"


def all_index_pairs(n: int) -> list[IndexPair]:
    """Every nonzero element of (n^{-1} Z / Z)^2, sorted."""
    return [
        IndexPair(Fraction(i, n), Fraction(k, n))
        for i in range(n)
        for k in range(n)
        if i or k
    ]


def index_pairs_up_to(max_den: int) -> list[IndexPair]:
    """Distinct nonzero classes whose order divides some N <= max_den."""
    seen = set()
    for n in range(2, max_den + 1):
        seen.update(all_index_pairs(n))
    return sorted(seen)


def bernoulli_b2(t) -> Fraction:
    """Second Bernoulli polynomial T^2 - T + 1/6 at an exact rational."""
    t = Fraction(t)
    if not 0 <= t < 1:
        raise ValueError(f"bernoulli_b2 expects 0 <= t < 1, got {t}")
    return t * t - t + Fraction(1, 6)


def act_on_index(a: IndexPair, gamma: UnimodularMatrix) -> IndexPair:
    """Right action of SL2(Z) on row vectors, reduced mod Z^2."""
    return IndexPair(
        a.a1 * gamma.a + a.a2 * gamma.c,
        a.a1 * gamma.b + a.a2 * gamma.d,
    )


def siegel_log_abs_many(
    a1: Sequence[float],
    a2: Sequence[float],
    tau: HalfPlanePoint,
    budget: TruncationBudget = DEFAULT_BUDGET,
) -> np.ndarray:
    """log|g_a(tau)| for a batch of representatives (a1, a2) in Q^2.

    The representatives need not be reduced: the product formula holds for
    any a not in Z^2, which is how the mod Z^2 invariance gets tested. Each
    entry is truncated so that its own tail is at most the budget target.
    """
    a1 = np.atleast_1d(np.asarray(a1, dtype=float))
    a2 = np.atleast_1d(np.asarray(a2, dtype=float))
    r = tau.q_abs
    if r > CERTIFIED_Q_MAX:
        raise BudgetExhausted(f"|q| = {r:.4g} exceeds {CERTIFIED_Q_MAX} for certified truncation")
    log_r = tau.log_q_abs
    target = budget.target_abs_error

    # n runs from 0; both exponents n + a1 and n + 1 - a1 must be positive
    # before the geometric majorant applies.
    n_start = int(max(0.0, math.ceil(float(np.max(np.maximum(-a1, a1 - 1.0))) + 1e-9)))
    lo = float(np.min(np.minimum(a1, 1.0 - a1)))  # smallest fractional offset
    n = n_start
    while True:
        # tail after terms 0..n-1: exponents >= n + lo
        w_max = math.exp((n + lo) * log_r) if n + lo > 0 else 1.0
        if w_max < 1.0:
            tail = 2.0 * w_max / ((1.0 - r) * (1.0 - w_max))
            if tail <= target:
                break
        n += 1
        if n > budget.max_terms:
            raise BudgetExhausted(f"siegel product at {tau} exceeds {budget.max_terms} terms")

    ns = np.arange(n, dtype=float)[None, :]
    phase = TWO_PI * a2[:, None]
    e1 = ns + a1[:, None]
    e2 = ns + 1.0 - a1[:, None]
    w1 = np.exp(e1 * log_r + 1j * (TWO_PI * e1 * tau.x + phase))
    w2 = np.exp(e2 * log_r + 1j * (TWO_PI * e2 * tau.x - phase))
    f1 = log_abs_one_minus(w1)
    f2 = log_abs_one_minus(w2)
    if np.isneginf(f1).any() or np.isneginf(f2).any():
        raise PoleAtNode(f"a product factor vanishes at {tau}")

    b2 = a1 * a1 - a1 + 1.0 / 6.0
    return 0.5 * b2 * log_r + f1.sum(axis=1) + f2.sum(axis=1)


def siegel_log_abs(
    a: IndexPair, tau: HalfPlanePoint, budget: TruncationBudget = DEFAULT_BUDGET
) -> float:
    """log|g_a(tau)| from the infinite product, with a1 lifted to [0, 1)."""
    if a.a1 == 0 and a.a2 == 0:
        raise PoleAtNode("g_a has no meaning for a in Z^2")
    return float(siegel_log_abs_many([float(a.a1)], [float(a.a2)], tau, budget)[0])


def siegel_log_abs_representative(
    a1, a2, tau: HalfPlanePoint, budget: TruncationBudget = DEFAULT_BUDGET
) -> float:
    """Same product evaluated at an arbitrary representative of a mod Z^2."""
    a1, a2 = Fraction(a1), Fraction(a2)
    if a1.denominator == 1 and a2.denominator == 1:
        raise PoleAtNode(f"({a1}, {a2}) lies in Z^2")
    return float(siegel_log_abs_many([float(a1)], [float(a2)], tau, budget)[0])


def _leading_terms(a1: np.ndarray, a2: np.ndarray, tau: HalfPlanePoint) -> np.ndarray:
    log_r = tau.log_q_abs
    phase = TWO_PI * a2
    w1 = np.exp(a1 * log_r + 1j * (TWO_PI * a1 * tau.x + phase))
    w2 = np.exp((1.0 - a1) * log_r + 1j * (TWO_PI * (1.0 - a1) * tau.x - phase))
    b2 = a1 * a1 - a1 + 1.0 / 6.0
    return 0.5 * b2 * log_r + log_abs_one_minus(w1) + log_abs_one_minus(w2)


def pga_residual_many(
    pairs: Iterable[IndexPair], tau: HalfPlanePoint, budget: TruncationBudget = DEFAULT_BUDGET
) -> np.ndarray:
    if tau.q_abs > PGA_Q_MAX * (1 + 1e-12):
        raise ValueError(f"pga_residual needs |q| <= {PGA_Q_MAX}, got {tau.q_abs:.6g}")
    pairs = list(pairs)
    a1 = np.array([float(a.a1) for a in pairs])
    a2 = np.array([float(a.a2) for a in pairs])
    return siegel_log_abs_many(a1, a2, tau, budget) - _leading_terms(a1, a2, tau)


def pga_residual(
    a: IndexPair, tau: HalfPlanePoint, budget: TruncationBudget = DEFAULT_BUDGET
) -> float:
    """log|g_a| minus its n = 0 approximation; O(|q|) for |q| <= 0.1."""
    return float(pga_residual_many([a], tau, budget)[0])


def pga_analytic_constant(q_max: float = PGA_Q_MAX) -> float:
    """Provable S with |pga_residual| <= S |q| on |q| <= q_max.

    Each dropped factor obeys |log|1-w|| <= |w|/(1-|w|); the two families
    have moduli r^{n+a1}, r^{n+1-a1} <= r^n for n >= 1, giving at most
    2 sum_{n>=1} r^n / (1 - r) = 2 r / (1 - r)^2.
    """
    return 2.0 / (1.0 - q_max) ** 2
