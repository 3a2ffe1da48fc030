"""The modular unit U = prod_{a in A} g_a^{12p} on X_split(p) and its translates U_c."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from fractions import Fraction
from typing import Sequence

import numpy as np
from sympy import isprime

from .qnum import (
    DEFAULT_BUDGET,
    HalfPlanePoint,
    TruncationBudget,
    UnimodularMatrix,
    j_invariant,
    log_abs_one_minus,
)
from .siegel import IndexPair, siegel_log_abs_many


def _check_odd_prime(p: int) -> None:
    if p < 3 or not isprime(p):
        raise ValueError(f"p must be an odd prime, got {p}")


def beta(c: int) -> UnimodularMatrix:
    return UnimodularMatrix(1, 0, c, 1)


@dataclass(frozen=True)
class UnitIndexSet:
    """A beta_c for a fixed odd prime p.

    Every element has denominator p, so the set is stored as sorted integer
    numerator pairs (x, y) standing for (x/p, y/p) with 0 <= x, y < p.
    """

    p: int
    c: int
    numerators: tuple[tuple[int, int], ...]

    @cached_property
    def elements(self) -> tuple[IndexPair, ...]:
        return tuple(IndexPair(Fraction(x, self.p), Fraction(y, self.p)) for x, y in self.numerators)

    def __len__(self):
        return len(self.numerators)

    def __iter__(self):
        return iter(self.elements)


def base_index_set(p: int) -> list[IndexPair]:
    """A = {(k/p, 0)} u {(0, k/p)}, k = 1..p-1."""
    return [IndexPair(Fraction(k, p), 0) for k in range(1, p)] + [
        IndexPair(0, Fraction(k, p)) for k in range(1, p)
    ]


def _base_numerators(p: int) -> list[tuple[int, int]]:
    return [(k, 0) for k in range(1, p)] + [(0, k) for k in range(1, p)]


@lru_cache(maxsize=512)
def build_index_set(p: int, c: int) -> UnitIndexSet:
    """A beta_c, reduced into [0,1)^2. Only c mod p matters.

    Row vectors act on the right: (x, y) beta_c = (x + c y, y).
    """
    _check_odd_prime(p)
    c %= p
    numerators = tuple(sorted(((x + c * y) % p, y) for x, y in _base_numerators(p)))
    return UnitIndexSet(p, c, numerators)


def b2_sum(index_set: UnitIndexSet) -> Fraction:
    """Exact sum of B2(a1) over the set.

    With a1 = x/p, B2(x/p) = (6x^2 - 6xp + p^2) / (6p^2).
    """
    p = index_set.p
    total = sum(6 * x * x - 6 * x * p + p * p for x, _ in index_set.numerators)
    return Fraction(total, 6 * p * p)


def b2_closed_form(p: int, c: int) -> Fraction:
    if c % p == 0:
        return Fraction((p - 1) ** 2, 6 * p)
    return Fraction(-(p - 1), 3 * p)


def main_term_slope(p: int, c: int) -> int:
    """Coefficient of log|q| in the leading behaviour of log|U_c|."""
    return (p - 1) ** 2 if c % p == 0 else -2 * (p - 1)


@lru_cache(maxsize=512)
def _index_arrays(p: int, c: int) -> tuple[np.ndarray, np.ndarray]:
    nums = np.array(build_index_set(p, c).numerators, dtype=float)
    a1, a2 = nums[:, 0] / p, nums[:, 1] / p
    a1.flags.writeable = a2.flags.writeable = False
    return a1, a2


def unit_log_abs(
    p: int, c: int, tau: HalfPlanePoint, budget: TruncationBudget = DEFAULT_BUDGET
) -> float:
    """log|U_c(tau)| = 12p sum_{a in A beta_c} log|g_a(tau)|."""
    a1, a2 = _index_arrays(p, c % p)
    return 12.0 * p * float(np.sum(siegel_log_abs_many(a1, a2, tau, budget)))


def sum_log_one_minus_powers(z: complex, n: int) -> float:
    """sum_{k=1}^{n} log|1 - z^k| for |z| < 1."""
    z = complex(z)
    r = abs(z)
    if r >= 1.0:
        raise ValueError(f"|z| must be < 1, got {r}")
    if n < 1:
        raise ValueError("n must be positive")
    if r == 0.0:
        return 0.0
    k = np.arange(1, n + 1, dtype=float)
    w = np.exp(k * complex(math.log(r), math.atan2(z.imag, z.real)))
    return float(np.sum(log_abs_one_minus(w)))


def llogz_main_term(z: complex) -> float:
    """(pi^2/6) / log|z^{-1}|."""
    return (math.pi**2 / 6.0) / -math.log(abs(z))


# --- double cosets Gamma \ SL2(Z) / Gamma_inf -------------------------------


def _mat_mod(m: tuple[int, int, int, int], p: int) -> tuple[int, int, int, int]:
    return tuple(x % p for x in m)


def _mul_mod(m, n, p):
    a, b, c, d = m
    e, f, g, h = n
    return ((a * e + b * g) % p, (a * f + b * h) % p, (c * e + d * g) % p, (c * f + d * h) % p)


def in_split_normalizer(m: tuple[int, int, int, int], p: int) -> bool:
    """Diagonal or anti-diagonal modulo p."""
    a, b, c, d = (x % p for x in m)
    return (b == 0 and c == 0) or (a == 0 and d == 0)


def double_coset_hits(m: tuple[int, int, int, int], p: int) -> list[int]:
    """Every c in {0..(p-1)/2} with m in Gamma beta_c Gamma_inf (mod p)."""
    m = _mat_mod(m, p)
    hits = []
    for c in range((p - 1) // 2 + 1):
        beta_c_inv = (1, 0, (-c) % p, 1)
        for n in range(p):
            for sign in (1, p - 1):
                # (sign * T^n)^{-1} = sign * T^{-n}
                kappa_inv = (sign, (sign * -n) % p, 0, sign)
                if in_split_normalizer(_mul_mod(_mul_mod(m, kappa_inv, p), beta_c_inv, p), p):
                    hits.append(c)
                    break
            else:
                continue
            break
    return hits


def double_coset_class(b: UnimodularMatrix, p: int) -> int:
    """The representative c of the double class Gamma b Gamma_inf."""
    _check_odd_prime(p)
    hits = double_coset_hits(b.entries(), p)
    if len(hits) != 1:
        raise RuntimeError(f"{b.entries()} matched classes {hits} mod {p}; expected exactly one")
    return hits[0]


# --- envelopes --------------------------------------------------------------


@dataclass(frozen=True)
class UnitEvalReport:
    p: int
    c: int
    tau: HalfPlanePoint
    log_abs_u: float
    main_term: float
    envelope: float
    residual: float
    slack_normalizer: float
    slack: float

    @property
    def bound(self) -> float:
        return self.envelope + self.slack * self.slack_normalizer

    @property
    def passed(self) -> bool:
        return abs(self.residual) <= self.bound

    @property
    def slack_used(self) -> float:
        """Smallest slack that would make this point pass."""
        return max(0.0, (abs(self.residual) - self.envelope) / self.slack_normalizer)

    def as_record(self) -> dict:
        return {
            "p": self.p,
            "c": self.c,
            "tau": [self.tau.x, self.tau.y],
            "log_abs_u": self.log_abs_u,
            "main_term": self.main_term,
            "residual": self.residual,
            "envelope": self.envelope,
            "slack": self.slack,
            "slack_normalizer": self.slack_normalizer,
            "bound": self.bound,
            "passed": self.passed,
        }


def pu_envelope(p: int, c: int, tau: HalfPlanePoint) -> tuple[float, float]:
    """(envelope, slack normaliser) of the unit envelope at tau."""
    log_q_inv = -tau.log_q_abs
    if c % p == 0:
        return 4 * math.pi**2 * p * p / log_q_inv, p * math.log(p)
    return 8 * math.pi**2 * p * p / log_q_inv, float(p)


def unit_eval_report(
    p: int,
    c: int,
    tau: HalfPlanePoint,
    slack: float,
    budget: TruncationBudget = DEFAULT_BUDGET,
) -> UnitEvalReport:
    if tau.q_abs > 1.0 / p * (1 + 1e-12):
        raise ValueError(f"grid point {tau} violates |q| <= 1/{p}")
    value = unit_log_abs(p, c, tau, budget)
    main = main_term_slope(p, c) * tau.log_q_abs
    envelope, normalizer = pu_envelope(p, c, tau)
    return UnitEvalReport(p, c % p, tau, value, main, envelope, value - main, normalizer, slack)


def default_pu_grid(p: int, xs: Sequence[float] = (0.0, 1 / 3, 0.5), ratio: float = 1.3) -> list[HalfPlanePoint]:
    """Geometric ladder in Im(tau) from the |q| = 1/p boundary past 3 sqrt(p).

    The ladder stops at the first rung above 3 sqrt(p); each rung is used at
    every real part in xs.
    """
    y0 = math.log(p) / (2 * math.pi)
    ys = [y0]
    while ys[-1] <= 3 * math.sqrt(p):
        ys.append(ys[-1] * ratio)
    return [HalfPlanePoint(x, y) for y in ys for x in xs]


def verify_prop_pu(
    p: int,
    c: int,
    grid: Sequence[HalfPlanePoint],
    slacks: tuple[float, float],
    budget: TruncationBudget = DEFAULT_BUDGET,
) -> list[UnitEvalReport]:
    """Reports for every grid point; slacks = (S1, S2) for p | c and p does not divide c."""
    _check_odd_prime(p)
    slack = slacks[0] if c % p == 0 else slacks[1]
    return [unit_eval_report(p, c, tau, slack, budget) for tau in grid]


@dataclass(frozen=True)
class PanaVerdict:
    p: int
    c: int
    tau: HalfPlanePoint
    log_abs_j: float
    log_abs_u: float
    first_bound: float
    second_bound: float
    slack: float

    @property
    def first_holds(self) -> bool:
        return self.log_abs_j <= self.first_bound + self.slack

    @property
    def second_holds(self) -> bool:
        return self.log_abs_j <= self.second_bound + self.slack

    @property
    def passed(self) -> bool:
        return self.first_holds or self.second_holds

    @property
    def branch(self) -> str:
        if self.first_holds:
            return "runge"
        return "unit" if self.second_holds else "none"

    @property
    def shortfall(self) -> float:
        """How far the better branch misses without slack (<= 0 when it holds)."""
        return self.log_abs_j - max(self.first_bound, self.second_bound)

    def as_record(self) -> dict:
        return {
            "p": self.p,
            "c": self.c,
            "tau": [self.tau.x, self.tau.y],
            "log_abs_j": self.log_abs_j,
            "log_abs_u": self.log_abs_u,
            "first_bound": self.first_bound,
            "second_bound": self.second_bound,
            "slack": self.slack,
            "branch": self.branch,
            "passed": self.passed,
        }


def in_d_plus_z(tau: HalfPlanePoint, eps: float = 1e-12) -> bool:
    x = tau.x - math.floor(tau.x + 0.5)
    return x * x + tau.y * tau.y >= 1.0 - eps


def default_pana_grid(
    p: int,
    xs: Sequence[float] = (-0.5, -0.25, 0.0, 0.2, 0.4),
    ratio: float = 1.3,
) -> list[HalfPlanePoint]:
    """Points of D + Z: a ladder in Im(tau) from the floor of D to beyond the
    Runge threshold, at several real parts, translated by 0..p-1."""
    y_top = (2 * math.pi * math.sqrt(p) + 6 * math.log(p) + 20.0) / (2 * math.pi)
    grid = []
    for x in xs:
        y = math.sqrt(1.0 - x * x)
        ys = [y]
        while ys[-1] <= y_top:
            ys.append(ys[-1] * ratio)
        for shift in range(p):
            grid.extend(HalfPlanePoint(x + shift, yy) for yy in ys)
    return grid


def verify_prop_pana(
    p: int,
    grid: Sequence[HalfPlanePoint],
    c_runge: float,
    slack: float,
    budget: TruncationBudget = DEFAULT_BUDGET,
) -> list[PanaVerdict]:
    _check_odd_prime(p)
    sqrt_p, log_p = math.sqrt(p), math.log(p)
    first = 2 * math.pi * sqrt_p + 6 * log_p + c_runge
    out = []
    for tau in grid:
        if not in_d_plus_z(tau):
            raise ValueError(f"{tau} is not in D + Z")
        abs_j = abs(j_invariant(tau, budget))
        log_j = math.log(abs_j) if abs_j > 0 else -math.inf
        for c in range((p - 1) // 2 + 1):
            log_u = unit_log_abs(p, c, tau, budget)
            second = abs(log_u) / (2 * (p - 1)) + 2 * math.pi * sqrt_p - 6 * log_p + c_runge
            out.append(PanaVerdict(p, c, tau, log_j, log_u, first, second, slack))
    return out
