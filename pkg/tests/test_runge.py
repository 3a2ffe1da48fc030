import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy import isprime, nextprime, prevprime, primerange

from rungesplit.runge import (
    COMBINE_SLACK,
    ConsistencyError,
    IsogenyChainConstants,
    bound_report,
    combine_margin,
    combine_theorem1,
    crossing_gap,
    isogeny_degree_bound,
    p0_bracket,
    p0_crossing,
    pari_bound,
    pubo_lower_bound,
    runge_bound,
    unit_value_admissible,
)


def test_runge_bound_values():
    assert runge_bound(37, 0) == pytest.approx(59.8846, abs=1e-4)
    assert runge_bound(37) == pytest.approx(69.8846, abs=1e-4)
    with pytest.raises(ValueError):
        runge_bound(1)


def test_pari_bound():
    assert pari_bound(11) == pytest.approx(24 * 11 * math.log(11))
    with pytest.raises(ValueError):
        pari_bound(2)


def test_bound_report_rejects_non_primes():
    for p in (1, 2, 4, 9, 91):
        with pytest.raises(ValueError):
            bound_report(p)
    r = bound_report(37, 0)
    assert r.as_record()["combine_ok"]
    assert r.runge_bound == pytest.approx(59.8846, abs=1e-4)


@pytest.mark.parametrize("value, p, ok", [
    (1, 5, True), (-125, 5, True), (5**120, 5, True), (5**121, 5, False),
    (0, 5, False), (10, 5, False), (-7, 7, True),
])
def test_unit_value_admissible(value, p, ok):
    assert unit_value_admissible(value, p) is ok


def test_combine_margin_closed_form():
    for p in primerange(3, 2000):
        assert combine_margin(p) == pytest.approx(12 * math.log(p) / (p - 1), rel=1e-9, abs=1e-12)
    assert combine_margin(11) == pytest.approx(2.877, abs=1e-3)


def test_combine_theorem1_over_range():
    for p in primerange(3, 10_001):
        assert combine_theorem1(p, 10.0) == runge_bound(p, 10.0)
    with pytest.raises(ConsistencyError):
        combine_theorem1(3, 10.0, slack=1.0)
    assert combine_margin(3) <= COMBINE_SLACK


def test_p0_examples():
    assert p0_crossing(1, 0) == 89
    assert p0_crossing(100, 0) == 2
    assert [p0_crossing(k, 0) for k in (0.1, 0.5, 1, 2, 10)] == [4919, 277, 89, 29, 2]
    br = p0_bracket(1, 0)
    assert br["previous_prime"] == 83
    assert br["rhs_at_previous"] > br["lhs_at_previous"]
    assert br["lhs_at_p0"] > br["rhs_at_p0"]
    with pytest.raises(ValueError):
        p0_crossing(0)
    with pytest.raises(ValueError):
        p0_crossing(-1)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.05, 50), st.floats(0, 30))
def test_p0_is_the_last_crossing(kappa, c):
    p0 = p0_crossing(kappa, c)
    assert isprime(p0)
    p = p0
    for _ in range(200):
        assert crossing_gap(p, kappa, c) > 0
        p = nextprime(p)
    if p0 > 2:
        assert crossing_gap(prevprime(p0), kappa, c) <= 0


def test_isogeny_chain_example():
    k = IsogenyChainConstants(kappa2=1.0)
    chain = pubo_lower_bound(89, k)
    assert chain.h_isogenous_lower == pytest.approx(88)
    assert not chain.reached
    first = next(p for p in primerange(3, 1000) if pubo_lower_bound(p, k).reached)
    assert first == 157
    assert chain.as_record()["note"] == "conditional on constants"


@settings(max_examples=50, deadline=None)
@given(st.floats(0.1, 10), st.integers(3, 5000))
def test_isogeny_chain_monotone_in_p(kappa2, p):
    k = IsogenyChainConstants(kappa2)
    assert pubo_lower_bound(p + 1, k).height_lower >= pubo_lower_bound(p, k).height_lower - 1e-5


def test_isogeny_constants_validated():
    with pytest.raises(ValueError):
        IsogenyChainConstants(0)
    assert isogeny_degree_bound(3.0, IsogenyChainConstants(2.0)) == 32.0
    with pytest.raises(ValueError):
        isogeny_degree_bound(-1.0, IsogenyChainConstants(2.0))
