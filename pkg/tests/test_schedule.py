import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from adaptive_sis.schedule import (Constant, NodeSchedules, SquareWave, UniformRandomPiecewise,
                                   phased_pair, stationary_mean, time_average)

probs = st.floats(0.0, 1.0)


@st.composite
def square_waves(draw):
    a, b = sorted((draw(probs), draw(probs)))
    period = draw(st.floats(0.5, 50.0))
    phase = draw(st.floats(0.0, 0.999)) * period
    return SquareWave(a, b, period, phase)


def test_square_wave_levels():
    s = SquareWave(0.3, 0.5, 8, 0)
    assert s(1) == 0.3
    assert s(5) == 0.5
    assert s(0) == 0.3 and s(4) == 0.5 and s(8) == 0.3


def test_square_wave_phase_shifts_window():
    s = SquareWave(0.3, 0.5, 8, 2)
    # (t - 2) mod 8: t=1 -> 7 (high), t=3 -> 1 (low)
    assert s(1) == 0.5 and s(3) == 0.3


def test_constant():
    c = Constant(0.005)
    assert all(c(t) == 0.005 for t in (0, 1.5, 1e6))


def test_random_windowed_determinism():
    r = UniformRandomPiecewise(0.1, 0.3, 8, seed=7)
    assert r(3) == r(7)
    assert r(3) != r(11)
    assert UniformRandomPiecewise(0.1, 0.3, 8, seed=7)(100) == r(100)
    assert UniformRandomPiecewise(0.1, 0.3, 8, seed=8)(3) != r(3)


def test_equal_duty_means():
    assert time_average(SquareWave(0.3, 0.5, 8), 8) == pytest.approx(0.4, abs=1e-15)
    assert time_average(SquareWave(0.003, 0.007, 8), 800) == pytest.approx(0.005, abs=1e-15)
    assert stationary_mean(SquareWave(0.003, 0.007, 8)) == pytest.approx(0.005)


def test_random_average_converges_to_midpoint():
    r = UniformRandomPiecewise(0.1, 0.3, 8, seed=7)
    assert time_average(r, 8000) == pytest.approx(0.2, abs=0.01)
    assert stationary_mean(r) == pytest.approx(0.2)


def test_random_integral_matches_riemann_sum():
    r = UniformRandomPiecewise(0.0, 1.0, 2.5, seed=3)
    t = np.arange(0, 37.0, 0.5)
    assert r.integral(37.0) == pytest.approx(sum(r(x) for x in t) * 0.5, rel=1e-12)


@pytest.mark.parametrize("s", [Constant(0.2), SquareWave(0.1, 0.2), UniformRandomPiecewise(0, 1)])
def test_negative_time_rejected(s):
    with pytest.raises(ValueError):
        s(-1e-9)


@pytest.mark.parametrize("kwargs", [dict(low=0.5, high=0.3), dict(low=0.1, high=1.2),
                                    dict(low=0.1, high=0.2, period=0),
                                    dict(low=0.1, high=0.2, period=8, phase=8)])
def test_square_wave_validation(kwargs):
    with pytest.raises(ValueError):
        SquareWave(**kwargs)


@given(square_waves(), st.floats(0, 1e4))
def test_square_wave_bounded(s, t):
    assert 0.0 <= s(t) <= 1.0
    assert s(t) in (s.low, s.high)


@given(square_waves(), st.integers(1, 50))
def test_whole_period_average_is_midpoint(s, k):
    assert time_average(s, k * s.period) == pytest.approx((s.low + s.high) / 2, abs=1e-12)


@given(square_waves(), st.integers(1, 20))
def test_phase_invariance_of_average(s, k):
    avgs = [time_average(s.shifted(f), k * s.period) for f in (0.0, 0.25, 0.5)]
    assert max(avgs) - min(avgs) < 1e-12


def _piecewise_integral(s, t):
    half = s.period / 2
    k0 = int(np.floor((0 - s.phase) / half)) - 1
    cuts = [s.phase + k * half for k in range(k0, k0 + int(t / half) + 4)]
    pts = sorted({0.0, t, *(c for c in cuts if 0 < c < t)})
    return sum((b - a) * s((a + b) / 2) for a, b in zip(pts, pts[1:]))


@given(square_waves(), st.floats(0, 100))
def test_square_wave_integral_matches_breakpoint_sum(s, t):
    assert s.integral(t) == pytest.approx(_piecewise_integral(s, t), abs=1e-9)


def test_phase_presets():
    gamma = SquareWave(0.003, 0.007, 8, 0)
    b_sync, _ = phased_pair(SquareWave(0.2, 0.4), gamma, "sync")
    b_async, _ = phased_pair(SquareWave(0.2, 0.4), gamma, "async")
    b_anti, _ = phased_pair(SquareWave(0.2, 0.4), gamma, "antisync")
    assert (b_sync.phase, b_async.phase, b_anti.phase) == (0.0, 2.0, 4.0)
    # antisync: beta high exactly while gamma low
    assert all((b_anti(t) == 0.4) == (gamma(t) == 0.003) for t in np.arange(0, 16, 0.5))
    with pytest.raises(ValueError):
        phased_pair(SquareWave(0.2, 0.4), gamma, "sideways")


def test_node_schedules():
    shared = NodeSchedules(Constant(0.3), Constant(0.1))
    assert shared.homogeneous and shared.beta_at(2.0) == 0.3
    per = NodeSchedules([Constant(0.1), SquareWave(0.2, 0.4)], Constant(0.1))
    assert not per.homogeneous
    assert per.beta_at(5.0).tolist() == [0.1, 0.4]
    per.check_size(2)
    with pytest.raises(ValueError):
        per.check_size(3)
