"""Shared generators for the test suite."""

from __future__ import annotations

import itertools

import numpy as np

from rungesplit.qnum import HalfPlanePoint, UnimodularMatrix

S = UnimodularMatrix(0, -1, 1, 0)


def random_word(rng: np.random.Generator, length: int = 6, t_range: int = 3) -> UnimodularMatrix:
    """A random product of S and T^k with |k| <= t_range."""
    g = UnimodularMatrix.identity()
    for _ in range(length):
        if rng.random() < 0.5:
            g = g @ S
        else:
            g = g @ UnimodularMatrix.translation(int(rng.integers(-t_range, t_range + 1)))
    return g


def random_point_pair(rng: np.random.Generator, min_im: float = 0.03):
    """(gamma, tau) with both tau and gamma(tau) at least min_im above the axis."""
    while True:
        gamma = random_word(rng)
        tau = HalfPlanePoint(float(rng.uniform(-1.0, 1.0)), float(rng.uniform(0.4, 2.0)))
        image = gamma.act(tau)
        if image.y >= min_im:
            return gamma, tau


def normalizer_lift(rng: np.random.Generator, p: int) -> UnimodularMatrix:
    """An element of SL2(Z) reducing into the split-Cartan normalizer mod p.

    diag(u, u^-1) lifts to [[u, (ud-1)/p], [p, d]] with d = u^-1 mod p^2;
    the anti-diagonal coset is reached through w = [[0,-1],[1,0]], and the
    congruence kernel is sampled through its two unipotent generators.
    """
    u = int(rng.integers(1, p))
    d = pow(u, -1, p * p)
    g = UnimodularMatrix(u, (u * d - 1) // p, p, d)
    if rng.random() < 0.5:
        g = g @ S
    for _ in range(int(rng.integers(0, 4))):
        k = int(rng.integers(-2, 3))
        gen = UnimodularMatrix(1, k * p, 0, 1) if rng.random() < 0.5 else UnimodularMatrix(1, 0, k * p, 1)
        g = gen @ g if rng.random() < 0.5 else g @ gen
    return g


def kappa(sign: int, n: int) -> UnimodularMatrix:
    t = UnimodularMatrix.translation(n)
    return t if sign > 0 else -t


def expected_class(c: int, p: int) -> int:
    c %= p
    return min(c, p - c) if c else 0


def sl2_mod_p(p: int):
    """Every element of SL2(F_p) as an entry 4-tuple."""
    return [
        (a, b, c, d)
        for a, b, c, d in itertools.product(range(p), repeat=4)
        if (a * d - b * c) % p == 1
    ]
