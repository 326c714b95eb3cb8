"""Time-varying model inputs: cure rates beta_v(t) and infection rate gamma(t).

Every schedule is a pure function of ``t`` (and, for the random kind, a
seed). Values are probabilities per unit time and must lie in [0, 1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence, Union

import numpy as np

PHASE_PRESETS = {"sync": 0.0, "async": 0.25, "antisync": 0.5}


def _check_time(t):
    if t < 0:
        raise ValueError(f"schedules are defined for t >= 0, got {t}")


def _check_prob(name, value):
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name}={value} outside [0, 1]")


@dataclass(frozen=True)
class Constant:
    value: float

    def __post_init__(self):
        _check_prob("value", self.value)

    def __call__(self, t: float) -> float:
        _check_time(t)
        return self.value

    def integral(self, t: float) -> float:
        return self.value * t

    @property
    def mean(self) -> float:
        return self.value

    @property
    def sup(self) -> float:
        return self.value


@dataclass(frozen=True)
class SquareWave:
    """Equal-duty two-level wave: ``low`` for the first half of each period
    (after shifting by ``phase``), ``high`` for the second half."""

    low: float
    high: float
    period: float = 8.0
    phase: float = 0.0

    def __post_init__(self):
        _check_prob("low", self.low)
        _check_prob("high", self.high)
        if self.low > self.high:
            raise ValueError("low must not exceed high")
        if self.period <= 0:
            raise ValueError("period must be positive")
        if not 0.0 <= self.phase < self.period:
            raise ValueError("phase must lie in [0, period)")

    def __call__(self, t: float) -> float:
        _check_time(t)
        return self.low if (t - self.phase) % self.period < self.period / 2 else self.high

    def _unshifted_integral(self, s: float) -> float:
        # integral of the phase-0 wave over [0, s]; valid for any real s
        T, half = self.period, self.period / 2
        k, r = divmod(s, T)
        within = self.low * min(r, half) + self.high * max(r - half, 0.0)
        return k * half * (self.low + self.high) + within

    def integral(self, t: float) -> float:
        return self._unshifted_integral(t - self.phase) - self._unshifted_integral(-self.phase)

    @property
    def mean(self) -> float:
        return 0.5 * (self.low + self.high)

    @property
    def sup(self) -> float:
        return self.high

    def shifted(self, fraction: float) -> "SquareWave":
        """Copy lagging this wave by ``fraction`` of a period."""
        return SquareWave(self.low, self.high, self.period,
                          (self.phase + fraction * self.period) % self.period)


@lru_cache(maxsize=65536)
def _window_draw(seed: int, window: int) -> float:
    return float(np.random.default_rng([seed, window]).random())


@dataclass(frozen=True)
class UniformRandomPiecewise:
    """Piecewise-constant process: on window ``floor(t / dwell)`` the value is
    uniform on ``[lo, hi]``, drawn from a generator keyed on (seed, window)."""

    lo: float
    hi: float
    dwell: float = 8.0
    seed: int = 0

    def __post_init__(self):
        _check_prob("lo", self.lo)
        _check_prob("hi", self.hi)
        if self.lo > self.hi:
            raise ValueError("lo must not exceed hi")
        if self.dwell <= 0:
            raise ValueError("dwell must be positive")

    def window_value(self, window: int) -> float:
        return self.lo + (self.hi - self.lo) * _window_draw(self.seed, int(window))

    def __call__(self, t: float) -> float:
        _check_time(t)
        return self.window_value(math.floor(t / self.dwell))

    def integral(self, t: float) -> float:
        full = math.floor(t / self.dwell)
        total = sum(self.window_value(w) for w in range(full)) * self.dwell
        return total + (t - full * self.dwell) * self.window_value(full)

    @property
    def mean(self) -> float:
        """Stationary expectation (interval midpoint)."""
        return 0.5 * (self.lo + self.hi)

    @property
    def sup(self) -> float:
        return self.hi


ParamSchedule = Union[Constant, SquareWave, UniformRandomPiecewise]


def time_average(s: ParamSchedule, horizon: float) -> float:
    """Exact average of ``s`` over ``[0, horizon]``."""
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    return s.integral(horizon) / horizon


def stationary_mean(s: ParamSchedule) -> float:
    """Long-run mean: closed form for deterministic kinds, the stationary
    expectation for the random kind."""
    return s.mean


@dataclass(frozen=True)
class NodeSchedules:
    """Cure schedule(s) and the shared infection schedule.

    ``beta`` is either one schedule shared by all nodes or a sequence with one
    schedule per node.
    """

    beta: Union[ParamSchedule, Sequence[ParamSchedule]]
    gamma: ParamSchedule

    def __post_init__(self):
        if not self.homogeneous:
            object.__setattr__(self, "beta", tuple(self.beta))

    @property
    def homogeneous(self) -> bool:
        return not isinstance(self.beta, (list, tuple))

    def check_size(self, n: int):
        if not self.homogeneous and len(self.beta) != n:
            raise ValueError(f"per-node beta has {len(self.beta)} entries for {n} nodes")

    def beta_at(self, t: float):
        """Scalar for shared beta, length-n array otherwise."""
        if self.homogeneous:
            return self.beta(t)
        return np.array([b(t) for b in self.beta])

    def gamma_at(self, t: float) -> float:
        return self.gamma(t)


def phased_pair(beta: SquareWave, gamma: SquareWave, preset: str) -> tuple[SquareWave, SquareWave]:
    """Place ``beta`` relative to ``gamma``: sync, async (beta lags by T/4) or
    antisync (lag T/2)."""
    if preset not in PHASE_PRESETS:
        raise ValueError(f"unknown phase preset {preset!r}")
    base = SquareWave(beta.low, beta.high, gamma.period, gamma.phase)
    return base.shifted(PHASE_PRESETS[preset]), gamma
