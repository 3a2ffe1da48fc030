"""The twelve acceptance criteria, each at its stated tolerance and time limit.

Run alone with ``pytest tests/test_acceptance.py -v``; the terminal summary
prints one PASS/FAIL line per criterion.
"""

import math
from fractions import Fraction

import numpy as np
import pytest
from sympy import primerange

from helpers import expected_class, kappa, normalizer_lift, random_point_pair, sl2_mod_p
from rungesplit import checks
from rungesplit.config import RunConfig
from rungesplit.galois import (
    POSSIBLY_CONTAINED,
    RULED_OUT,
    CurveModel,
    classify_point_image,
    cm_split_primes,
    cm_table,
)
from rungesplit.modular_unit import b2_sum, beta, build_index_set, double_coset_class, double_coset_hits
from rungesplit.qnum import HalfPlanePoint, eta_log_abs, j_invariant
from rungesplit.runge import combine_theorem1, p0_bracket, runge_bound
from rungesplit.siegel import (
    IndexPair,
    act_on_index,
    bernoulli_b2,
    siegel_log_abs,
    siegel_log_abs_representative,
)

pytestmark = pytest.mark.acceptance

CONFIG = RunConfig.load()


def test_01_bernoulli_identities(criterion):
    with criterion(1, "exact Bernoulli identities", 1.0) as c:
        for p in primerange(2, 500):
            total = sum((bernoulli_b2(Fraction(k, p)) for k in range(1, p)), Fraction(0))
            assert total == Fraction(-(p - 1), 6 * p), p
        checked = 0
        for p in primerange(3, 98):
            for cc in range(p):
                expected = Fraction((p - 1) ** 2, 6 * p) if cc == 0 else Fraction(-(p - 1), 3 * p)
                assert b2_sum(build_index_set(p, cc)) == expected, (p, cc)
                checked += 1
        c.detail = f"{checked} (p, c) pairs"


def test_02_siegel_transformation_suite(criterion):
    rng = np.random.default_rng(20240602)
    worst_law = worst_sym = 0.0
    with criterion(2, "Siegel transformation suite", 10.0) as c:
        for _ in range(200):
            n = int(rng.choice([5, 7, 11, 13]))
            i, k = (int(v) for v in rng.integers(0, n, size=2))
            if i == 0 and k == 0:
                k = 1
            a = IndexPair(Fraction(i, n), Fraction(k, n))
            gamma, tau = random_point_pair(rng)
            law = abs(siegel_log_abs(a, gamma.act(tau)) - siegel_log_abs(act_on_index(a, gamma), tau))
            base = siegel_log_abs(a, tau)
            m1, m2 = (int(v) for v in rng.integers(-3, 4, size=2))
            sym = max(
                abs(siegel_log_abs(-a, tau) - base),
                abs(siegel_log_abs_representative(a.a1 + m1, a.a2 + m2, tau) - base),
            )
            worst_law, worst_sym = max(worst_law, law), max(worst_sym, sym)
        c.detail = f"law {worst_law:.2e}, symmetry {worst_sym:.2e}"
        assert worst_law <= 1e-8
        assert worst_sym <= 1e-10


def test_03_pga_envelope(criterion):
    with criterion(3, "Siegel leading-term envelope", 30.0) as c:
        _, summary = checks.run_pga(CONFIG.S_pga, q_max=0.1)
        c.detail = f"max |residual|/|q| = {summary['max_ratio']:.4f} vs S_pga = {CONFIG.S_pga}"
        assert summary["passed"]


def test_04_llogz_envelope(criterion):
    with criterion(4, "log|1-z^k| sum envelope", 30.0) as c:
        _, summary = checks.run_llogz(CONFIG.C0)
        c.detail = f"max excess {summary['max_excess']:.4f} vs C0 = {CONFIG.C0}"
        assert summary["passed"]


def test_05_unit_envelopes(criterion):
    with criterion(5, "modular unit envelopes", 300.0) as c:
        _, summary = checks.run_pu(checks.PU_PRIMES, checks.PU_CS, CONFIG.S1, CONFIG.S2)
        c.detail = (
            f"{summary['points']} points; slack used S1 {summary['max_slack_used_S1']:.3f}/{CONFIG.S1}, "
            f"S2 {summary['max_slack_used_S2']:.3f}/{CONFIG.S2}"
        )
        assert summary["passed"]


def test_06_dichotomy(criterion):
    with criterion(6, "Runge/unit dichotomy on D+Z", 300.0) as c:
        _, summary = checks.run_pana(checks.PANA_PRIMES, CONFIG.C_runge, CONFIG.pana_slack)
        c.detail = f"{summary['points']} (tau, c) checks; worst shortfall {summary['max_shortfall']:.3f}"
        assert summary["passed"]


def test_07_cm_consistency(criterion):
    with criterion(7, "Runge bound on CM j-invariants", 10.0) as c:
        checked, near_misses = 0, []
        for d, j in cm_table():
            log_j = math.log(abs(j)) if j else -math.inf
            for p in cm_split_primes(d, 500):
                bound = runge_bound(p, 10.0)
                if p < 11:
                    if log_j > bound:
                        near_misses.append((d, p))
                    continue
                assert log_j <= bound, (d, j, p)
                checked += 1
        c.detail = f"{checked} (d, p) pairs; small-p near misses {near_misses}"


def test_08_galois_ruling_out(criterion):
    curves = {
        "11a": CurveModel(0, -1, 1, -10, -20),
        "37a": CurveModel(0, 0, 1, -1, 0),
        "14a": CurveModel(1, 0, 1, 4, -6),
    }
    with criterion(8, "split-Cartan ruled out for non-CM curves", 120.0) as c:
        worst = 0
        for label, E in curves.items():
            for p in primerange(17, 500):
                v = classify_point_image(E, p, 1000)
                assert v.status == RULED_OUT, (label, p)
                assert v.witness_ell <= 1000
                worst = max(worst, v.witness_ell)
        c.detail = f"largest witness ell {worst}"


def test_09_cm_containment(criterion):
    cases = [(1728, p) for p in (5, 13, 17, 29)] + [(-262537412640768000, p) for p in (41, 43, 47)]
    with criterion(9, "CM images stay possibly-contained", 60.0) as c:
        for j, p in cases:
            assert classify_point_image(CurveModel.from_j(j), p, 500).status == POSSIBLY_CONTAINED, (j, p)
        c.detail = f"{len(cases)} cases"


def test_10_crossing_prime(criterion):
    with criterion(10, "crossing prime and combine consistency", 5.0) as c:
        br = p0_bracket(1, 0)
        assert br["p0"] == 89
        assert br["previous_prime"] == 83
        assert br["lhs_at_previous"] <= br["rhs_at_previous"]
        assert br["lhs_at_p0"] > br["rhs_at_p0"]
        n = 0
        for p in primerange(3, 10_001):
            combine_theorem1(p)
            n += 1
        c.detail = f"p0 = 89, 83 fails ({br['lhs_at_previous']:.0f} <= {br['rhs_at_previous']:.3f}); {n} primes combined"


def test_11_double_coset_round_trip(criterion):
    rng = np.random.default_rng(11)
    with criterion(11, "double-coset round trip", 30.0) as c:
        for p in (7, 11, 13, 23):
            for _ in range(50):
                cc = int(rng.integers(0, p))
                b = normalizer_lift(rng, p) @ beta(cc) @ kappa(int(rng.choice([-1, 1])), int(rng.integers(0, p)))
                assert double_coset_class(b, p) == expected_class(cc, p), (p, cc)
        sizes = {}
        for m in sl2_mod_p(7):
            hits = double_coset_hits(m, 7)
            assert len(hits) == 1, m
            sizes[hits[0]] = sizes.get(hits[0], 0) + 1
        assert sizes == {0: 84, 1: 84, 2: 84, 3: 84}
        c.detail = "200 constructions; 336 elements of SL2(F_7) in 4 classes of 84"


def test_12_numeric_oracles(criterion):
    rng = np.random.default_rng(12)
    with criterion(12, "j and eta numeric oracles", 5.0) as c:
        j_i = j_invariant(HalfPlanePoint(0, 1))
        j_2i = j_invariant(HalfPlanePoint(0, 2))
        j_rho = j_invariant(HalfPlanePoint(-0.5, math.sqrt(3) / 2))
        assert abs(j_i - 1728) <= 1e-6 * 1728
        assert abs(j_2i - 287496) <= 1e-6 * 287496
        assert abs(j_rho) <= 1e-6
        worst = 0.0
        for _ in range(100):
            tau = HalfPlanePoint(float(rng.uniform(-2, 2)), float(rng.uniform(0.2, 3)))
            inv = HalfPlanePoint.from_complex(-1 / tau.tau)
            worst = max(worst, abs(eta_log_abs(inv) - 0.5 * math.log(abs(tau.tau)) - eta_log_abs(tau)))
        assert worst <= 1e-9
        c.detail = f"eta residual {worst:.2e}"


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
