"""Discrete remainder operator: values, identities, certificates."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from remop import (
    DecayEnvelope,
    EnvelopeDomainError,
    IndexRangeError,
    InsufficientDataError,
    NonSummableError,
    RemainderInput,
    SequenceWindow,
    Verdict,
    check_difference_identity,
    rm_truncation_bound,
    rm_value,
    rm_window,
    summability_certificate,
    weighted_tail_sum,
)
from oracles import iterated_suffix_remainder


def geometric_window(q=0.5, C=1.0, p=1, length=200):
    win = SequenceWindow(p, C * q ** np.arange(p, p + length, dtype=float))
    return win, DecayEnvelope.geometric(C, q, valid_from=p)


# ---------------------------------------------------------------------------
# construction guards
# ---------------------------------------------------------------------------


def test_input_rejects_divergent_envelope():
    x = SequenceWindow(1, np.arange(1.0, 31.0) ** -1.0)
    with pytest.raises(NonSummableError):
        RemainderInput(x, DecayEnvelope.power(1.0, 1.0), 2)


def test_input_rejects_bad_order():
    x, env = geometric_window(length=10)
    with pytest.raises(ValueError):
        RemainderInput(x, env, 0)


def test_input_rejects_late_envelope():
    x, _ = geometric_window(length=10)
    with pytest.raises(EnvelopeDomainError):
        RemainderInput(x, DecayEnvelope.geometric(1.0, 0.5, valid_from=50), 1)


# ---------------------------------------------------------------------------
# rm_value / rm_window
# ---------------------------------------------------------------------------


def test_rm_value_geometric_order_one():
    x, env = geometric_window()
    value, bound = rm_value(RemainderInput(x, env, 1), 4)
    assert value == pytest.approx(0.125, rel=1e-14)
    assert bound < 1e-50


def test_rm_value_geometric_order_two():
    x, env = geometric_window()
    value, _ = rm_value(RemainderInput(x, env, 2), 3)
    assert value == pytest.approx(0.5, rel=1e-13)


def test_rm_value_zero_input():
    x = SequenceWindow(1, np.zeros(40))
    value, bound = rm_value(RemainderInput(x, DecayEnvelope.zero_beyond(41), 3), 5)
    assert value == 0.0 and bound == 0.0


def test_rm_value_before_window_start():
    x, env = geometric_window(p=3, length=20)
    with pytest.raises(IndexRangeError):
        rm_value(RemainderInput(x, env, 1), 2)


def test_rm_window_geometric_closed_form():
    x, env = geometric_window()
    win = rm_window(RemainderInput(x, env, 1), (1, 5))
    np.testing.assert_allclose(win.values, [1.0, 0.5, 0.25, 0.125, 0.0625], rtol=1e-14)


def test_rm_window_zero():
    x = SequenceWindow(1, np.zeros(30))
    win = rm_window(RemainderInput(x, DecayEnvelope.zero_beyond(31), 2), (1, 30))
    assert np.all(win.values == 0.0)


def test_rm_window_single_point_order_three():
    x, env = geometric_window()
    win = rm_window(RemainderInput(x, env, 3), (3, 3))
    assert win.values[0] == pytest.approx(1.0, rel=1e-13)


def test_rm_value_matches_exact_suffix_oracle():
    rng = np.random.default_rng(7)
    for m in (1, 2, 3, 4):
        vals = rng.uniform(-1, 1, size=50) * 0.6 ** np.arange(1, 51)
        x = SequenceWindow(1, vals)
        rin = RemainderInput(x, DecayEnvelope.geometric(1.0, 0.6), m)
        for n in (1, 7, 25, 50):
            lib, _ = rm_value(rin, n)
            exact = iterated_suffix_remainder(vals, 1, m, n)
            assert lib == pytest.approx(exact, abs=1e-13 * (1 + abs(exact)))


def test_truncation_bound_dominates_omitted_tail():
    # short window vs long window of the same sequence: the difference the
    # short window omits must stay inside its certified bound
    x_long, env = geometric_window(q=0.8, length=400)
    x_short = SequenceWindow(1, x_long.values[:60])
    for m in (1, 2, 3):
        long_rin = RemainderInput(x_long, env, m)
        short_rin = RemainderInput(x_short, env, m)
        bound = rm_truncation_bound(short_rin)
        for n in (1, 10, 40):
            full, _ = rm_value(long_rin, n)
            cut, _ = rm_value(short_rin, n)
            assert abs(full - cut) <= bound * (1 + 1e-12)


# ---------------------------------------------------------------------------
# difference identities
# ---------------------------------------------------------------------------


def test_identity_k_zero_is_exact():
    x, env = geometric_window()
    assert check_difference_identity(RemainderInput(x, env, 2), 0, (1, 20)) == 0.0


def test_identity_first_order():
    x, env = geometric_window()
    dev = check_difference_identity(RemainderInput(x, env, 1), 1, (1, 40))
    assert dev < 1e-13


def test_identity_weighted_geometric_input():
    x = SequenceWindow(1, np.arange(1.0, 121.0) * 3.0 ** -np.arange(1, 121, dtype=float))
    env = DecayEnvelope.geometric(2.0, 0.5)  # j*3^-j <= 2*(1/2)^j for j >= 1
    dev = check_difference_identity(RemainderInput(x, env, 3), 2, (1, 20))
    assert dev < 1e-10


def test_identity_needs_room_for_differences():
    x, env = geometric_window(length=20)
    with pytest.raises(InsufficientDataError):
        check_difference_identity(RemainderInput(x, env, 2), 2, (1, 19))


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_sign_identity_on_power_and_geometric(m):
    rng = np.random.default_rng(m)
    geo = rng.uniform(0.5, 2.0) * rng.uniform(0.3, 0.8) ** np.arange(1, 201, dtype=float)
    pow_vals = rng.uniform(0.5, 2.0) * np.arange(1.0, 201.0) ** -6.0
    cases = [
        (geo, DecayEnvelope.geometric(2.0, 0.8)),
        (pow_vals, DecayEnvelope.power(2.0, 6.0)),
    ]
    for vals, env in cases:
        rin = RemainderInput(SequenceWindow(1, vals), env, m)
        dev = check_difference_identity(rin, m, (1, 40))
        assert dev < 1e-9


@settings(deadline=None, max_examples=40)
@given(
    st.floats(min_value=-4.0, max_value=4.0, allow_nan=False),
    st.integers(min_value=1, max_value=4),
    st.integers(min_value=0, max_value=40),
)
def test_linearity(lam, m, seed):
    rng = np.random.default_rng(seed)
    decay = 0.55 ** np.arange(1, 81, dtype=float)
    xv = rng.uniform(-1, 1, 80) * decay
    yv = rng.uniform(-1, 1, 80) * decay
    env = DecayEnvelope.geometric(1.0, 0.55)
    combo = RemainderInput(SequenceWindow(1, lam * xv + yv), env.scaled(1 + abs(lam)), m)
    rx = RemainderInput(SequenceWindow(1, xv), env, m)
    ry = RemainderInput(SequenceWindow(1, yv), env, m)
    for n in (1, 10, 33):
        left, _ = rm_value(combo, n)
        vx, _ = rm_value(rx, n)
        vy, _ = rm_value(ry, n)
        assert left == pytest.approx(lam * vx + vy, abs=1e-10)


def test_tail_majorant():
    rng = np.random.default_rng(11)
    vals = rng.uniform(-1, 1, 150) * np.arange(1.0, 151.0) ** -4.0
    x = SequenceWindow(1, vals)
    env = DecayEnvelope.power(1.0, 4.0)
    for m in (1, 2, 3):
        rin = RemainderInput(x.abs(), env, m)
        for n in (1, 5, 20, 77):
            value, _ = rm_value(rin, n)
            part, tail = weighted_tail_sum(x, env, m - 1.0, n)
            assert value <= part + tail + 1e-12


def test_vanishing_rate_proxy_geometric():
    # certified weight: sum n^(m-1-alpha) |x_n| finite; the weighted remainder
    # profile must fall off at geometric checkpoints
    x, env = geometric_window(length=200)
    m, alpha = 2, -1.0
    rin = RemainderInput(x, env, m)
    profile = []
    for i in range(3, 8):
        n = 2**i
        value, _ = rm_value(rin, n)
        profile.append(abs(value) * n ** (-alpha))
    assert all(a > b for a, b in zip(profile, profile[1:]))
    assert profile[-1] < 0.5 * profile[0]


# ---------------------------------------------------------------------------
# summability certificates
# ---------------------------------------------------------------------------


def test_certificate_brackets_zeta2():
    n = 10**4
    x = SequenceWindow(1, np.arange(1, n + 1, dtype=float) ** -2.0)
    report = summability_certificate(DecayEnvelope.power(1.0, 2.0), x, 1, 0.0)
    assert report.verdict is Verdict.CERTIFIED_FINITE
    target = math.pi**2 / 6
    assert report.partial <= target <= report.bound


def test_certificate_harmonic_boundary_diverges():
    x = SequenceWindow(1, np.arange(1.0, 101.0) ** -1.0)
    report = summability_certificate(DecayEnvelope.power(1.0, 1.0), x, 1, 0.0)
    assert report.verdict is Verdict.DIVERGENT_ENVELOPE
    assert not report.certified
    with pytest.raises(NonSummableError):
        _ = report.bound


def test_certificate_geometric_beats_polynomial_weight():
    x = SequenceWindow(1, 5.0 * 0.9 ** np.arange(1, 101, dtype=float))
    report = summability_certificate(DecayEnvelope.geometric(5.0, 0.9), x, 4, -2.0)
    assert report.verdict is Verdict.CERTIFIED_FINITE
    assert report.exponent == 5.0


def test_certificate_rejects_positive_alpha():
    x = SequenceWindow(1, np.zeros(10))
    with pytest.raises(ValueError):
        summability_certificate(DecayEnvelope.zero_beyond(11), x, 1, 0.5)
