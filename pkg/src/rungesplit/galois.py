"""Frobenius traces and a split-Cartan-normalizer test for mod-p images."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from sympy import isprime, legendre_symbol, primerange


class SingularCurveError(ValueError):
    pass


class BadReductionError(ValueError):
    pass


@dataclass(frozen=True)
class CurveModel:
    """Long Weierstrass model y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6."""

    a1: int
    a2: int
    a3: int
    a4: int
    a6: int

    def __post_init__(self):
        for name in ("a1", "a2", "a3", "a4", "a6"):
            object.__setattr__(self, name, int(getattr(self, name)))
        if self.discriminant == 0:
            raise SingularCurveError(f"curve {self.ainvs} is singular")

    @property
    def ainvs(self) -> tuple[int, int, int, int, int]:
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    @property
    def b_invariants(self) -> tuple[int, int, int, int]:
        a1, a2, a3, a4, a6 = self.ainvs
        b2 = a1 * a1 + 4 * a2
        b4 = 2 * a4 + a1 * a3
        b6 = a3 * a3 + 4 * a6
        b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
        return b2, b4, b6, b8

    @property
    def c4(self) -> int:
        b2, b4, _, _ = self.b_invariants
        return b2 * b2 - 24 * b4

    @property
    def discriminant(self) -> int:
        b2, b4, b6, b8 = self.b_invariants
        return -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6

    @property
    def j_invariant(self) -> Fraction:
        return Fraction(self.c4**3, self.discriminant)

    @classmethod
    def short(cls, a: int, b: int) -> "CurveModel":
        return cls(0, 0, 0, a, b)

    @classmethod
    def from_j(cls, j) -> "CurveModel":
        """A model with the given rational j.

        j = 0 -> y^2 = x^3 + 1, j = 1728 -> y^2 = x^3 + x, otherwise
        y^2 = x^3 + 3j(1728-j) x + 2j(1728-j)^2 after clearing denominators
        by a sixth-power scaling.
        """
        j = Fraction(j)
        if j == 0:
            return cls.short(0, 1)
        if j == 1728:
            return cls.short(1, 0)
        k = 1728 - j
        a = 3 * j * k
        b = 2 * j * k * k
        # (a, b) -> (a d^4, b d^6) keeps j and makes both integral
        d = a.denominator * b.denominator
        return cls.short(int(a * d**4), int(b * d**6))

    @classmethod
    def parse(cls, text: str) -> "CurveModel":
        parts = [s.strip() for s in text.split(",")]
        if len(parts) != 5:
            raise ValueError(f"expected five comma-separated integers, got {text!r}")
        return cls(*(int(s) for s in parts))


def _count_points_brute(E: CurveModel, ell: int) -> int:
    a1, a2, a3, a4, a6 = (x % ell for x in E.ainvs)
    count = 1
    for x in range(ell):
        rhs = (x * x * x + a2 * x * x + a4 * x + a6) % ell
        for y in range(ell):
            if (y * y + a1 * x * y + a3 * y - rhs) % ell == 0:
                count += 1
    return count


def _count_points_odd(E: CurveModel, ell: int) -> int:
    # (2y + a1 x + a3)^2 = 4x^3 + b2 x^2 + 2 b4 x + b6
    b2, b4, b6, _ = (v % ell for v in E.b_invariants)
    x = np.arange(ell, dtype=np.int64)
    f = (((4 * x + b2) % ell * x + 2 * b4) % ell * x + b6) % ell
    chi = np.full(ell, -1, dtype=np.int64)
    chi[(x * x) % ell] = 1
    chi[0] = 0
    return int(1 + ell + chi[f].sum())


@lru_cache(maxsize=1 << 16)
def trace_of_frobenius(E: CurveModel, ell: int) -> int:
    """a_ell = ell + 1 - #E(F_ell), point at infinity included."""
    if not isprime(ell):
        raise ValueError(f"{ell} is not prime")
    if E.discriminant % ell == 0:
        raise BadReductionError(f"{E.ainvs} has bad reduction at {ell}")
    n = _count_points_brute(E, ell) if ell <= 3 else _count_points_odd(E, ell)
    return ell + 1 - n


def split_cartan_compatible(a_ell: int, ell: int, p: int) -> bool:
    """Could Frob_ell lie in the normalizer of a split Cartan mod p?

    Anti-diagonal elements have trace 0; diagonal ones have characteristic
    polynomial x^2 - a x + ell with square discriminant.
    """
    if ell == p:
        raise ValueError("the test says nothing at ell = p")
    if a_ell % p == 0:
        return True
    disc = (a_ell * a_ell - 4 * ell) % p
    return disc == 0 or legendre_symbol(disc, p) == 1


@dataclass(frozen=True)
class ImageVerdict:
    p: int
    status: str  # "ruled-out" | "possibly-contained"
    witness_ell: int | None
    traces_used: int
    bad_primes_skipped: int

    def as_record(self) -> dict:
        return {
            "p": self.p,
            "status": self.status,
            "witness_ell": self.witness_ell,
            "traces_used": self.traces_used,
            "bad_primes_skipped": self.bad_primes_skipped,
        }


RULED_OUT = "ruled-out"
POSSIBLY_CONTAINED = "possibly-contained"


def classify_point_image(E: CurveModel, p: int, ell_max: int) -> ImageVerdict:
    if p < 3 or not isprime(p):
        raise ValueError(f"p must be an odd prime, got {p}")
    used = skipped = 0
    for ell in primerange(2, ell_max + 1):
        if ell == p:
            continue
        if E.discriminant % ell == 0:
            skipped += 1
            continue
        used += 1
        if not split_cartan_compatible(trace_of_frobenius(E, ell), ell, p):
            return ImageVerdict(p, RULED_OUT, int(ell), used, skipped)
    return ImageVerdict(p, POSSIBLY_CONTAINED, None, used, skipped)


# Class-number-one CM j-invariants with their discriminants.
_CM_TABLE = (
    (-3, 0),
    (-4, 1728),
    (-7, -3375),
    (-8, 8000),
    (-11, -32768),
    (-12, 54000),
    (-16, 287496),
    (-19, -884736),
    (-27, -12288000),
    (-28, 16581375),
    (-43, -884736000),
    (-67, -147197952000),
    (-163, -262537412640768000),
)


def cm_table() -> list[tuple[int, int]]:
    """(discriminant, j) for the 13 rational CM j-invariants."""
    return list(_CM_TABLE)


def cm_j_invariants() -> list[int]:
    return [j for _, j in _CM_TABLE]


def cm_split_primes(discriminant: int, p_max: int) -> list[int]:
    """Odd primes p <= p_max, p not dividing D, with (D | p) = +1."""
    if discriminant >= 0:
        raise ValueError("discriminant must be negative")
    return [
        int(p)
        for p in primerange(3, p_max + 1)
        if discriminant % p != 0 and legendre_symbol(discriminant % p, p) == 1
    ]


def verify_cm_entry(discriminant: int, j: int, n_primes: int = 6, ell_max: int = 2000) -> bool:
    """Check a_ell = 0 at the first few inert primes of good reduction.

    Supersingular reduction at every inert prime is what CM by an order of
    discriminant D forces; a wrong j fails this almost immediately.
    """
    E = CurveModel.from_j(j)
    checked = 0
    for ell in primerange(5, ell_max):
        if discriminant % ell == 0 or E.discriminant % ell == 0:
            continue
        if legendre_symbol(discriminant % ell, ell) != -1:
            continue
        if trace_of_frobenius(E, ell) != 0:
            return False
        checked += 1
        if checked >= n_primes:
            return True
    return False
