"""q-expansion numerics on the upper half-plane.

Everything here works in double precision and returns log-moduli where a
modulus is all that downstream code needs. Truncated series carry explicit
geometric tail majorants, and a :class:`BudgetExhausted` is raised rather
than returning an uncertified value.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

TWO_PI = 2.0 * math.pi

# Snapping tolerance for the fundamental-domain boundary convention.
BOUNDARY_EPS = 1e-12


class BudgetExhausted(ArithmeticError):
    """A truncated series could not meet its tail target within max_terms."""


@dataclass(frozen=True)
class HalfPlanePoint:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite point ({self.x}, {self.y})")
        if self.y <= 0:
            raise ValueError(f"Im(tau) must be positive, got {self.y}")

    @classmethod
    def from_complex(cls, tau: complex) -> "HalfPlanePoint":
        return cls(float(tau.real), float(tau.imag))

    @property
    def tau(self) -> complex:
        return complex(self.x, self.y)

    @property
    def log_q_abs(self) -> float:
        return -TWO_PI * self.y

    @property
    def q_abs(self) -> float:
        return math.exp(-TWO_PI * self.y)

    @property
    def q(self) -> complex:
        return cmath.exp(2j * math.pi * self.tau)

    def __str__(self):
        return f"{self.x:.6g}{self.y:+.6g}i"


@dataclass(frozen=True)
class UnimodularMatrix:
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.a * self.d - self.b * self.c != 1:
            raise ValueError(f"determinant of {self.entries()} is not 1")

    def entries(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    def __matmul__(self, other: "UnimodularMatrix") -> "UnimodularMatrix":
        return UnimodularMatrix(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "UnimodularMatrix":
        return UnimodularMatrix(self.d, -self.b, -self.c, self.a)

    def __neg__(self) -> "UnimodularMatrix":
        return UnimodularMatrix(-self.a, -self.b, -self.c, -self.d)

    def act(self, point: HalfPlanePoint) -> HalfPlanePoint:
        """Moebius action tau -> (a tau + b)/(c tau + d)."""
        t = point.tau
        return HalfPlanePoint.from_complex((self.a * t + self.b) / (self.c * t + self.d))

    def same_mobius(self, other: "UnimodularMatrix") -> bool:
        return self == other or self == -other

    @classmethod
    def identity(cls) -> "UnimodularMatrix":
        return cls(1, 0, 0, 1)

    @classmethod
    def translation(cls, n: int = 1) -> "UnimodularMatrix":
        return cls(1, n, 0, 1)

    @classmethod
    def inversion(cls) -> "UnimodularMatrix":
        return cls(0, -1, 1, 0)


@dataclass(frozen=True)
class TruncationBudget:
    target_abs_error: float = 1e-12
    max_terms: int = 200_000

    def __post_init__(self):
        if not self.target_abs_error > 0:
            raise ValueError("target_abs_error must be positive")
        if self.max_terms < 1:
            raise ValueError("max_terms must be a positive integer")


DEFAULT_BUDGET = TruncationBudget()


def log_abs_one_minus(w):
    """log|1 - w|, accurate for small |w|. Works on scalars and numpy arrays."""
    w = np.asarray(w, dtype=complex)
    # |1-w|^2 = 1 - 2 Re w + |w|^2
    return 0.5 * np.log1p(w.real * (w.real - 2.0) + w.imag * w.imag)


def q_pow(tau: HalfPlanePoint, alpha) -> complex:
    """e^{2 pi i alpha tau} for a rational (or real) exponent alpha."""
    alpha = float(Fraction(alpha)) if not isinstance(alpha, float) else alpha
    modulus = math.exp(alpha * tau.log_q_abs)
    phase = TWO_PI * alpha * tau.x
    return cmath.rect(modulus, math.fmod(phase, TWO_PI))


def _geometric_terms_needed(r: float, target: float, max_terms: int) -> int:
    """Smallest N with r^N / ((1-r)(1-r^N)) <= target.

    This majorises sum_{k>=N} |log|1 - w_k|| whenever |w_k| <= r^k.
    """
    if r == 0.0:
        return 1
    log_r = math.log(r)
    n = max(1, math.ceil(math.log(target * (1.0 - r) * 0.5) / log_r))
    while r**n / ((1.0 - r) * (1.0 - r**n)) > target:
        n += 1
        if n > max_terms:
            break
    if n > max_terms:
        raise BudgetExhausted(
            f"|q| = {r:.6g} needs more than {max_terms} terms for target {target:g}"
        )
    return n


def sum_log_abs_one_minus_q_powers(tau: HalfPlanePoint, budget: TruncationBudget) -> float:
    """sum_{k>=1} log|1 - q^k| with certified truncation."""
    r = tau.q_abs
    n_terms = _geometric_terms_needed(r, budget.target_abs_error, budget.max_terms)
    k = np.arange(1, n_terms, dtype=float)
    w = np.exp(k * (2j * math.pi * tau.x - TWO_PI * tau.y))
    return float(np.sum(log_abs_one_minus(w)))


def eta_log_abs(tau: HalfPlanePoint, budget: TruncationBudget = DEFAULT_BUDGET) -> float:
    """log|eta(tau)| = log|q|/24 + sum_k log|1 - q^k|."""
    return tau.log_q_abs / 24.0 + sum_log_abs_one_minus_q_powers(tau, budget)


def delta_log_abs(tau: HalfPlanePoint, budget: TruncationBudget = DEFAULT_BUDGET) -> float:
    """log|Delta(tau)| from Delta = q prod (1 - q^n)^24."""
    return tau.log_q_abs + 24.0 * sum_log_abs_one_minus_q_powers(tau, budget)


def _e4(tau: HalfPlanePoint, budget: TruncationBudget) -> complex:
    # E4 = 1 + 240 sum n^3 q^n / (1 - q^n); tail <= 240 N^3 r^N / ((1-r)(1-rho))
    r = tau.q_abs
    target = budget.target_abs_error
    n = 1
    while True:
        rho = ((n + 1) / n) ** 3 * r
        if rho < 1 and 240.0 * n**3 * r**n / ((1.0 - r) * (1.0 - rho)) <= target:
            break
        n += 1
        if n > budget.max_terms:
            raise BudgetExhausted(f"E4 at {tau} exceeds {budget.max_terms} terms")
    k = np.arange(1, n, dtype=float)
    qk = np.exp(k * (2j * math.pi * tau.x - TWO_PI * tau.y))
    return complex(1.0 + 240.0 * np.sum(k**3 * qk / (1.0 - qk)))


def j_invariant(tau: HalfPlanePoint, budget: TruncationBudget = DEFAULT_BUDGET) -> complex:
    """Klein's j as E4^3 / Delta.

    Delta^{-1} is formed as exp(-2 pi i tau - 24 sum Log(1 - q^n)) so that
    1/q never underflows through q.
    """
    r = tau.q_abs
    n_terms = _geometric_terms_needed(r, budget.target_abs_error, budget.max_terms)
    k = np.arange(1, n_terms, dtype=float)
    qk = np.exp(k * (2j * math.pi * tau.x - TWO_PI * tau.y))
    log_prod = complex(np.sum(np.log(1.0 - qk)))
    inv_delta = cmath.exp(-2j * math.pi * tau.tau - 24.0 * log_prod)
    return _e4(tau, budget) ** 3 * inv_delta


def in_fundamental_domain(tau: HalfPlanePoint, eps: float = BOUNDARY_EPS) -> bool:
    """Region predicate for D with the Re <= 0 boundary convention."""
    x, y = tau.x, tau.y
    norm = x * x + y * y
    if x < -0.5 - eps or x > 0.5 + eps or norm < 1.0 - eps:
        return False
    on_side = abs(x - 0.5) <= eps
    on_arc = abs(norm - 1.0) <= eps
    if (on_side or on_arc) and x > eps:
        return False
    return True


def fundamental_domain_reduce(tau: HalfPlanePoint) -> tuple[HalfPlanePoint, UnimodularMatrix]:
    """Return (tau', gamma) with tau' in D and gamma(tau') = tau."""
    t = tau.tau
    gamma = UnimodularMatrix.identity()
    s_inv = UnimodularMatrix(0, 1, -1, 0)
    for _ in range(10_000):
        n = math.floor(t.real + 0.5)
        if n:
            t -= n
            gamma = gamma @ UnimodularMatrix.translation(n)
        if abs(t) ** 2 < 1.0 - BOUNDARY_EPS:
            t = -1.0 / t
            gamma = gamma @ s_inv
            continue
        break
    else:  # pragma: no cover - reduction converges geometrically
        raise RuntimeError(f"reduction of {tau} did not converge")

    # Boundary convention: the right-hand side and right half of the arc map left.
    # Rounding in the real part grows with |t|, so the snap tolerance does too.
    tol = BOUNDARY_EPS * max(1.0, abs(t))
    if abs(t.real - 0.5) <= tol:
        t -= 1
        gamma = gamma @ UnimodularMatrix.translation(1)
    elif abs(abs(t) ** 2 - 1.0) <= BOUNDARY_EPS and t.real > BOUNDARY_EPS:
        t = -1.0 / t
        gamma = gamma @ s_inv
    return HalfPlanePoint.from_complex(t), gamma
