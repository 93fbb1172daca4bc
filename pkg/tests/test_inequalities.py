import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from carnot_heat.errors import InvalidArgument
from carnot_heat.inequalities import (
    GronwallSample,
    gronwall_check,
    lindqvist_lower_bound,
    nonneg_power,
    odd_power_gap,
    pairing_gap,
    signed_power,
    vector_signed_power,
)

finite = st.floats(-50, 50, allow_nan=False)


def test_pairing_gap_examples():
    assert pairing_gap([1, 0], [0, 0], 4) == pytest.approx(1.0)
    assert pairing_gap([3, 0], [1, 0], 2) == pytest.approx(4.0)
    assert pairing_gap([0.3, -2.0, 1.0], [0.3, -2.0, 1.0], 3.5) == 0.0
    with pytest.raises(InvalidArgument):
        pairing_gap([1, 0], [1, 0, 0], 2)


def test_lindqvist_examples():
    assert lindqvist_lower_bound([1, 0], [0, 0], 4) == pytest.approx(0.25)
    # p = 2: both branches collapse to |c - d|^2
    assert lindqvist_lower_bound([3, 0], [1, 0], 2) == pytest.approx(4.0)
    assert lindqvist_lower_bound([1.0], [-1.0], 1.5) == pytest.approx(0.5 * 4 * 3**-0.25)


def test_odd_power_gap_examples():
    assert odd_power_gap(2.0, 1.0, 3) == pytest.approx(7.0)
    assert odd_power_gap(-1.0, -2.0, 2) == pytest.approx(3.0)
    assert odd_power_gap(0.7, 0.7, 0.4) == 0.0


@pytest.mark.parametrize("s", [0.25, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.5, 1.3])
def test_signed_power_matches_definition(s):
    u = np.linspace(-3, 3, 101)
    expected = np.sign(u) * np.abs(u) ** s
    assert np.allclose(signed_power(u, s), expected, rtol=1e-14, atol=0)
    assert signed_power(0.0, s) == 0.0


def test_signed_power_array_exponent():
    u = np.array([-2.0, 0.0, 3.0])
    s = np.array([2.0, 0.5, 1.5])
    assert np.allclose(signed_power(u, s), [-4.0, 0.0, 3**1.5])


@pytest.mark.parametrize("e", [0, 0.25, 0.5, 0.75, 1, 1.25, 2.5, 3.75, 8, 0.3, 9.0])
def test_nonneg_power(e):
    a = np.linspace(0, 4, 33)
    assert np.allclose(nonneg_power(a, e), a**e, rtol=1e-14, atol=0)


def test_vector_signed_power_zero():
    assert np.array_equal(vector_signed_power(np.zeros((4, 3)), 0.5), np.zeros((4, 3)))


@settings(max_examples=300, deadline=None)
@given(st.lists(finite, min_size=6, max_size=6), st.sampled_from([1.5, 2.0, 3.0, 4.5]))
def test_pairing_gap_symmetric_and_nonnegative(vals, p):
    c, d = np.array(vals[:3]), np.array(vals[3:])
    a, b = pairing_gap(c, d, p), pairing_gap(d, c, p)
    scale = 1e-12 * (1 + np.linalg.norm(c) + np.linalg.norm(d)) ** (2 * p)
    assert a == pytest.approx(b, rel=1e-12, abs=scale)
    assert a >= -scale
    assert a >= lindqvist_lower_bound(c, d, p) - scale


def test_lindqvist_bound_is_strict_below_two():
    # the relation for 1 < p < 2 is an inequality: there are pairs with a strict gap
    c, d = np.array([1.0, 0.0]), np.array([0.0, 2.0])
    assert pairing_gap(c, d, 1.5) > lindqvist_lower_bound(c, d, 1.5) + 0.1


@settings(max_examples=500, deadline=None)
@given(finite, finite, st.floats(0.05, 6))
def test_odd_power_gap_sign(u, v, beta):
    gap = odd_power_gap(u, v, beta)
    assert np.sign(gap) in (np.sign(u - v), 0.0)
    # strictness holds wherever the powers are representable and distinguishable
    m = max(abs(u), abs(v))
    if m > 1e-30 and abs(u - v) > 1e-9 * m:
        assert np.sign(gap) == np.sign(u - v)


def test_gronwall_constant():
    t = np.linspace(0, 1, 50)
    r = gronwall_check(GronwallSample(t, np.ones(50), np.zeros(50)))
    assert r.premise_ok and r.conclusion_ok
    assert r.max_ratio == 1.0


def test_gronwall_half_rate():
    t = np.linspace(0, 1, 100)
    r = gronwall_check(GronwallSample(t, np.exp(t / 2), np.ones(100)))
    assert r.premise_ok and r.conclusion_ok
    assert r.final_ratio == pytest.approx(math.exp(-0.5), rel=1e-12)
    # the ratio is 1 at t = 0, so the maximum sits there
    assert r.max_ratio == pytest.approx(1.0)


def test_gronwall_premise_fails_for_faster_growth():
    t = np.linspace(0, 1, 100)
    r = gronwall_check(GronwallSample(t, np.exp(2 * t), np.ones(100)))
    assert not r.premise_ok
    assert not r.conclusion_ok
    assert r.worst_premise_excess > 0


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(0, 100), min_size=5, max_size=5))
def test_gronwall_zero_function(g):
    t = np.linspace(0, 2, 5)
    r = gronwall_check(GronwallSample(t, np.zeros(5), np.array(g)))
    assert r.premise_ok and r.conclusion_ok
    assert r.max_ratio == 0.0


def test_gronwall_sample_validation():
    with pytest.raises(InvalidArgument):
        GronwallSample([0, 1, 1], [1, 1, 1], 0.0)
    with pytest.raises(InvalidArgument):
        GronwallSample([0, 2, 1], [1, 1, 1], 0.0)
    with pytest.raises(InvalidArgument):
        GronwallSample([0, 1], [1, 1, 1], 0.0)
    s = GronwallSample([0, 1], [1, 1], 0.5)
    assert s.g_values.shape == (2,)
