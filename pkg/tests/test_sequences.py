"""Window calculus: rising factorials, differences, tails, the sup metric."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from remop import (
    DecayEnvelope,
    EnvelopeDomainError,
    ExtendedNorm,
    IndexRangeError,
    InsufficientDataError,
    Interval,
    NonSummableError,
    SequenceWindow,
    ShapeError,
    forward_difference,
    framed_interior,
    rising_factorial,
    sup_metric,
    weighted_tail_sum,
)

finite_floats = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False)


# ---------------------------------------------------------------------------
# rising factorial
# ---------------------------------------------------------------------------


def test_rising_factorial_examples():
    assert rising_factorial(5, 0) == 1
    assert rising_factorial(1, 4) == 24
    assert rising_factorial(3, 2) == 12


def test_rising_factorial_zero_base():
    assert rising_factorial(0, 3) == 0
    assert rising_factorial(0, 0) == 1


@pytest.mark.parametrize("n", range(1, 21))
@pytest.mark.parametrize("m", range(0, 21))
def test_rising_factorial_vs_factorial_ratio(n, m):
    assert rising_factorial(n, m) == math.factorial(n + m - 1) // math.factorial(n - 1)


def test_rising_factorial_rejects_bad_input():
    with pytest.raises(ValueError):
        rising_factorial(-1, 2)
    with pytest.raises(ValueError):
        rising_factorial(2, -1)
    with pytest.raises(TypeError):
        rising_factorial(2.0, 1)


# ---------------------------------------------------------------------------
# forward differences
# ---------------------------------------------------------------------------


def test_second_difference_of_squares_is_two():
    x = SequenceWindow(1, np.array([1.0, 4.0, 9.0, 16.0, 25.0]))
    d2 = forward_difference(x, 2)
    assert d2.p == 1 and len(d2) == 3
    np.testing.assert_array_equal(d2.values, [2.0, 2.0, 2.0])


def test_zero_order_difference_is_identity():
    x = SequenceWindow(3, np.array([1.0, -2.0, 0.5]))
    assert forward_difference(x, 0) is x


def test_first_difference_of_halving():
    x = SequenceWindow(1, np.array([1.0, 0.5, 0.25, 0.125]))
    d = forward_difference(x, 1)
    np.testing.assert_array_equal(d.values, [-0.5, -0.25, -0.125])


def test_difference_needs_room():
    x = SequenceWindow(1, np.array([1.0, 2.0]))
    with pytest.raises(InsufficientDataError):
        forward_difference(x, 2)


@settings(deadline=None, max_examples=60)
@given(
    st.lists(finite_floats, min_size=8, max_size=16),
    st.integers(min_value=0, max_value=3),
    st.integers(min_value=0, max_value=3),
)
def test_difference_composition_is_bitwise(values, j, k):
    x = SequenceWindow(1, np.array(values))
    if j + k >= len(x):
        return
    via_steps = forward_difference(forward_difference(x, k), j)
    direct = forward_difference(x, j + k)
    np.testing.assert_array_equal(via_steps.values, direct.values)


# ---------------------------------------------------------------------------
# weighted tail sums
# ---------------------------------------------------------------------------


def test_weighted_tail_geometric_example():
    # sum_{j>=3} j * 2^-j = 1 by the generating-function closed form
    x = SequenceWindow(1, 0.5 ** np.arange(1, 61, dtype=float))
    value, tail = weighted_tail_sum(x, DecayEnvelope.geometric(1.0, 0.5), 1.0, 3)
    assert tail < 1e-12
    assert value == pytest.approx(1.0, abs=1e-12)


def test_weighted_tail_zero_sequence():
    x = SequenceWindow(1, np.zeros(10))
    value, tail = weighted_tail_sum(x, DecayEnvelope.geometric(0.0, 0.5), 2.0, 1)
    assert value == 0.0 and tail == 0.0


def test_weighted_tail_brackets_zeta2():
    n = 10**4
    x = SequenceWindow(1, np.arange(1, n + 1, dtype=float) ** -2.0)
    value, tail = weighted_tail_sum(x, DecayEnvelope.power(1.0, 2.0), 0.0, 1)
    target = math.pi**2 / 6
    assert value <= target <= value + tail


def test_weighted_tail_divergent_envelope():
    x = SequenceWindow(1, np.ones(10))
    with pytest.raises(NonSummableError):
        weighted_tail_sum(x, DecayEnvelope.power(1.0, 1.0), 0.0, 1)


def test_weighted_tail_start_before_window():
    x = SequenceWindow(5, np.ones(3))
    with pytest.raises(IndexRangeError):
        weighted_tail_sum(x, DecayEnvelope.geometric(1.0, 0.5), 0.0, 2)


def test_weighted_tail_monotone_in_start():
    x = SequenceWindow(1, 0.8 ** np.arange(1, 41, dtype=float))
    env = DecayEnvelope.geometric(1.0, 0.8)
    totals = []
    for n in range(1, 30):
        value, tail = weighted_tail_sum(x, env, 1.5, n)
        totals.append(value + tail)
    assert all(a >= b for a, b in zip(totals, totals[1:]))


# ---------------------------------------------------------------------------
# envelopes
# ---------------------------------------------------------------------------


def test_envelope_validation():
    with pytest.raises(ValueError):
        DecayEnvelope.geometric(1.0, 1.5)
    with pytest.raises(ValueError):
        DecayEnvelope.power(-1.0, 2.0)


def test_envelope_refuses_early_tail():
    env = DecayEnvelope.geometric(1.0, 0.5, valid_from=10)
    with pytest.raises(EnvelopeDomainError):
        env.tail_sum(0.0, 5)


def test_envelope_scaling():
    env = DecayEnvelope.power(2.0, 3.0)
    assert env.scaled(2.5).amplitude == 5.0
    assert env.scaled(2.5).rate == 3.0


def test_zero_envelope_tail_is_zero():
    env = DecayEnvelope.zero_beyond(7)
    assert env.tail_sum(5.0, 8) == 0.0
    assert env.tail_integral(5.0, 8.0) == 0.0


@pytest.mark.parametrize("w", [0.0, 1.0, 2.5, 4.0])
@pytest.mark.parametrize("q", [0.3, 0.7, 0.9])
def test_geometric_tail_sum_is_upper_bound(w, q):
    env = DecayEnvelope.geometric(1.3, q)
    start = 12
    truth = math.fsum(1.3 * j**w * q**j for j in range(start, start + 4000))
    bound = env.tail_sum(w, start)
    assert bound >= truth
    assert bound <= 50 * truth  # sane tightness


@pytest.mark.parametrize("w", [0.0, 1.0, 2.0])
@pytest.mark.parametrize("beta", [2.5, 4.0])
def test_power_tail_sum_is_upper_bound(w, beta):
    if w - beta >= -1:
        return
    env = DecayEnvelope.power(0.7, beta)
    start = 9
    truth = math.fsum(0.7 * j ** (w - beta) for j in range(start, start + 200000))
    bound = env.tail_sum(w, start)
    assert bound >= truth
    assert bound <= 3 * truth


@pytest.mark.parametrize("w", [0.0, 0.5, 1.0, 3.0])
def test_geometric_tail_integral_vs_quadrature(w):
    env = DecayEnvelope.geometric(2.0, math.exp(-0.8), valid_from=0.0)
    start = 3.0
    truth, err = quad(lambda s: 2.0 * s**w * math.exp(-0.8 * s), start, np.inf)
    bound = env.tail_integral(w, start)
    assert bound >= truth - 10 * err
    assert bound <= 5 * truth + 1e-12


def test_power_tail_integral_closed_form():
    env = DecayEnvelope.power(1.0, 2.0)
    # integral_2^inf s^(0-2) ds = 1/2, and the power form is exact here
    assert env.tail_integral(0.0, 2.0) == pytest.approx(0.5, rel=1e-14)


# ---------------------------------------------------------------------------
# sup metric and extended norm
# ---------------------------------------------------------------------------


def test_sup_metric_identity_and_example():
    f = SequenceWindow(1, np.array([0.0, 0.0, 0.0]))
    g = SequenceWindow(1, np.array([1.0, -2.0, 0.0]))
    assert float(sup_metric(f, f)) == 0.0
    assert float(sup_metric(f, g)) == 2.0


def test_sup_metric_halving_vs_zero():
    f = SequenceWindow(1, 0.5 ** np.arange(1, 51, dtype=float))
    g = SequenceWindow(1, np.zeros(50))
    assert float(sup_metric(f, g)) == 0.5


def test_sup_metric_shape_mismatch():
    f = SequenceWindow(1, np.zeros(3))
    g = SequenceWindow(2, np.zeros(3))
    with pytest.raises(ShapeError):
        sup_metric(f, g)


@settings(deadline=None, max_examples=60)
@given(
    st.lists(finite_floats, min_size=5, max_size=5),
    st.lists(finite_floats, min_size=5, max_size=5),
    st.lists(finite_floats, min_size=5, max_size=5),
)
def test_sup_metric_axioms(fv, gv, hv):
    f = SequenceWindow(1, np.array(fv))
    g = SequenceWindow(1, np.array(gv))
    h = SequenceWindow(1, np.array(hv))
    dfg = float(sup_metric(f, g))
    assert dfg == float(sup_metric(g, f))
    assert dfg >= 0.0
    assert (dfg == 0.0) == bool(np.all(f.values == g.values))
    assert dfg <= float(sup_metric(f, h)) + float(sup_metric(h, g)) + 1e-9


def test_extended_norm_tags():
    inf_norm = ExtendedNorm.infinite()
    fin = ExtendedNorm.finite(3.0)
    assert not inf_norm.is_finite and fin.is_finite
    assert fin < inf_norm
    assert inf_norm > 10.0**300
    assert fin <= 3.0 and fin >= 3.0
    with pytest.raises(ValueError):
        float(inf_norm)
    with pytest.raises(ValueError):
        ExtendedNorm.finite(-1.0)


# ---------------------------------------------------------------------------
# framed interior
# ---------------------------------------------------------------------------


def test_framed_interior_closed_interval():
    assert framed_interior(Interval(-2.0, 2.0), 1.0) == Interval(-1.0, 1.0)


def test_framed_interior_real_line():
    inner = framed_interior(Interval.real_line(), 7.0)
    assert inner == Interval.real_line()


def test_framed_interior_empty():
    inner = framed_interior(Interval(0.0, 1.0), 0.6)
    assert inner.is_empty
    assert not inner.contains(0.5)


def test_framed_interior_needs_positive_margin():
    with pytest.raises(ValueError):
        framed_interior(Interval(0.0, 1.0), 0.0)


def test_window_validation():
    with pytest.raises(ValueError):
        SequenceWindow(0, np.array([1.0]))
    with pytest.raises(ValueError):
        SequenceWindow(1, np.array([np.nan]))
    with pytest.raises(ValueError):
        SequenceWindow(1, np.array([]))
    w = SequenceWindow(2, np.array([5.0, 6.0]))
    assert w.end == 3 and w.value_at(3) == 6.0
    with pytest.raises(IndexRangeError):
        w.value_at(4)
