"""Fully-adaptive defences: cure rates driven only by observed infection.

Two integral-action laws are provided:

* die-out: ``dbeta_v/dt = rho * i_v`` starting from ``beta_v = 0``;
* containment: ``dbeta_v/dt = rho * (i_v - i*_v) * i_v`` with an optional
  additive input ``w_v = eta * (i*_v - i_v)`` on the plant.

Cure rates are probabilities and are clamped to [0, 1]; every clamp is
counted so runs where the ideal law would leave that range are visible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy.integrate import trapezoid

from .dynamics import (EXTINCTION_FRACTION, InfectionState, TimeSeries, _check_finite,
                       master_rhs, pressure_vector)
from .errors import PremiseError
from .graph import Graph
from .schedule import ParamSchedule


def _clamp_count(beta: np.ndarray) -> tuple[np.ndarray, int]:
    out = (beta < 0.0) | (beta > 1.0)
    return np.clip(beta, 0.0, 1.0), int(np.count_nonzero(out))


@dataclass
class DieOutController:
    rho: float
    beta: np.ndarray
    clamp_events: int = 0

    def __post_init__(self):
        if self.rho < 0:
            raise ValueError("rho must be non-negative")
        self.beta = np.asarray(self.beta, dtype=np.float64).copy()

    @classmethod
    def fresh(cls, n: int, rho: float) -> "DieOutController":
        return cls(rho, np.zeros(n))

    def step(self, i: np.ndarray, dt: float) -> np.ndarray:
        """Advance the cure rates by one Euler step of the control law."""
        if dt <= 0:
            raise ValueError("dt must be positive")
        self.beta, clamps = _clamp_count(self.beta + dt * self.rho * np.asarray(i))
        self.clamp_events += clamps
        return self.beta

    def input(self, i: np.ndarray):
        return None


def dieout_step(ctrl: DieOutController, state: InfectionState, dt: float) -> np.ndarray:
    return ctrl.step(state.i, dt)


def beta_star(g: Graph, gamma: float, i_star) -> np.ndarray:
    """Equilibrium cure rates that make ``i_star`` a fixed point of the
    master equation."""
    i_star = np.broadcast_to(np.asarray(i_star, dtype=np.float64), (g.n,))
    if np.any(i_star <= 0) or np.any(i_star > 1):
        raise ValueError("target infection levels must lie in (0, 1]")
    return pressure_vector(g, i_star, gamma) * (1.0 - i_star) / i_star


@dataclass
class ContainController:
    rho: float
    i_star: np.ndarray
    beta: np.ndarray
    beta_star: np.ndarray
    eta: float = 0.0
    w_mode: str = "zero"
    clamp_events: int = 0

    def __post_init__(self):
        if self.rho < 0 or self.eta < 0:
            raise ValueError("rho and eta must be non-negative")
        if self.w_mode not in ("zero", "proportional"):
            raise ValueError("w_mode must be 'zero' or 'proportional'")
        self.i_star = np.asarray(self.i_star, dtype=np.float64)
        if np.any(self.i_star <= 0):
            raise ValueError("target infection levels must be positive")
        self.beta = np.asarray(self.beta, dtype=np.float64).copy()

    @classmethod
    def for_graph(cls, g: Graph, gamma: float, i_star, rho: float, eta: float = 0.0,
                  w_mode: str = "zero", beta0=0.0, lambda1: float | None = None
                  ) -> "ContainController":
        """Build a controller, computing the reference cure rates from the
        graph and a single (typically time-averaged) infection rate.

        With ``w_mode='proportional'`` the gain condition
        ``eta + min beta* > 1 + gamma*lambda1`` is enforced, which needs
        ``lambda1``.
        """
        i_star = np.broadcast_to(np.asarray(i_star, dtype=np.float64), (g.n,)).copy()
        bstar = beta_star(g, gamma, i_star)
        if w_mode == "proportional":
            if lambda1 is None:
                raise ValueError("lambda1 is required to validate the proportional-mode gain")
            if not eta + bstar.min() > 1.0 + gamma * lambda1:
                raise PremiseError(f"gain condition eta + min beta* > 1 + gamma*lambda1 fails: "
                                   f"{eta + bstar.min():.6g} <= {1.0 + gamma * lambda1:.6g}")
        beta = np.broadcast_to(np.asarray(beta0, dtype=np.float64), (g.n,)).copy()
        return cls(rho, i_star, beta, bstar, eta, w_mode)

    def input(self, i: np.ndarray):
        if self.w_mode == "proportional":
            return self.eta * (self.i_star - np.asarray(i))
        return None

    def step(self, i: np.ndarray, dt: float) -> np.ndarray:
        if dt <= 0:
            raise ValueError("dt must be positive")
        i = np.asarray(i)
        self.beta, clamps = _clamp_count(self.beta + dt * self.rho * (i - self.i_star) * i)
        self.clamp_events += clamps
        return self.beta


def contain_step(ctrl: ContainController, state: InfectionState, dt: float):
    """Returns ``(beta, w)``; ``w`` is zero unless in proportional mode."""
    w = ctrl.input(state.i)
    beta = ctrl.step(state.i, dt)
    return beta, (np.zeros_like(state.i) if w is None else w)


Controller = Union[DieOutController, ContainController]


@dataclass
class ControlledRun:
    series: TimeSeries
    beta_history: np.ndarray | None = field(default=None, repr=False)
    i_history: np.ndarray | None = field(default=None, repr=False)
    plant_clamp_events: int = 0
    tracking_error: np.ndarray | None = field(default=None, repr=False)


def run_controlled(g: Graph, init: InfectionState, gamma_sched: ParamSchedule,
                   controller: Controller, dt: float = 1.0, steps: int = 100,
                   record: bool = False) -> ControlledRun:
    """Closed loop: the plant sees ``gamma_sched`` and the controller's cure
    rates; the controller sees only the infection probabilities.

    Both are advanced with the same explicit Euler step from the current
    joint state. ``series.extra`` carries ``mean_beta``, ``max_beta`` and the
    cumulative ``clamp_events`` (plant plus controller) per step.
    """
    n = g.n
    i = init.i.copy()
    t_arr = np.arange(steps + 1) * dt + init.t
    total = np.empty(steps + 1)
    mean_b = np.empty(steps + 1)
    max_b = np.empty(steps + 1)
    clamps = np.empty(steps + 1)
    betas = np.empty((steps + 1, n)) if record else None
    states = np.empty((steps + 1, n)) if record else None
    plant_clamps = 0
    target = getattr(controller, "i_star", None)
    track = np.empty(steps + 1) if target is not None else None

    def log(k):
        total[k] = i.sum()
        mean_b[k] = controller.beta.mean()
        max_b[k] = controller.beta.max()
        clamps[k] = plant_clamps + controller.clamp_events
        if track is not None:
            track[k] = np.abs(i - target).sum()
        if record:
            betas[k] = controller.beta
            states[k] = i

    log(0)
    for k in range(steps):
        beta = controller.beta.copy()
        w = controller.input(i)
        controller.step(i, dt)
        di = master_rhs(g, i, gamma_sched(t_arr[k]), beta, w)
        _check_finite(di, "derivative")
        nxt = i + dt * di
        out = (nxt < 0.0) | (nxt > 1.0)
        plant_clamps += int(np.count_nonzero(out))
        i = np.clip(nxt, 0.0, 1.0)
        log(k + 1)

    series = TimeSeries(t_arr, total, n, clamp_events=int(clamps[-1]),
                        extra={"mean_beta": mean_b, "max_beta": max_b, "clamp_events": clamps})
    return ControlledRun(series, betas, states, plant_clamps, track)


def replay_controller(controller: Controller, i_history: np.ndarray, dt: float) -> np.ndarray:
    """Drive ``controller`` with a recorded infection trajectory and return
    the cure-rate history it produces."""
    out = np.empty_like(i_history)
    out[0] = controller.beta
    for k in range(len(i_history) - 1):
        out[k + 1] = controller.step(i_history[k], dt)
    return out


# -- convergence bounds -------------------------------------------------------

@dataclass
class BoundReport:
    name: str
    bound_value: float
    inputs: dict
    observed_integral: float | None = None
    truncation_time: float | None = None
    notes: list = field(default_factory=list)

    @property
    def holds(self) -> bool | None:
        if self.observed_integral is None:
            return None
        return self.observed_integral <= self.bound_value

    def to_text(self) -> str:
        lines = [f"bound = {self.name}", f"bound_value = {self.bound_value:.10g}"]
        lines += [f"{k} = {v:.10g}" if isinstance(v, float) else f"{k} = {v}"
                  for k, v in self.inputs.items()]
        if self.observed_integral is not None:
            lines.append(f"observed_integral = {self.observed_integral:.10g}")
            lines.append(f"truncation_time = {self.truncation_time:.10g}")
            lines.append(f"holds = {str(self.holds).lower()}")
        lines += [f"note = {note}" for note in self.notes]
        return "\n".join(lines) + "\n"


def prop1_bound(n: int, rho: float, gamma_m: float, sum_i0: float) -> BoundReport:
    """Upper bound on the accumulated infection ``int_0^inf sum_v i_v dt``
    under the die-out law with zero initial cure rates.

    Evaluates ``(n-1)^2 gm / rho + (n-1)/rho * sqrt(S0 + (n-1)^3 gm^2 / (2 rho))``
    with ``gm = sup gamma`` and ``S0 = sum_v i_v(0)``.
    """
    if rho <= 0:
        raise ValueError("rho must be positive")
    m = n - 1
    value = m * m * gamma_m / rho + m / rho * math.sqrt(sum_i0 + m ** 3 * gamma_m ** 2 / (2 * rho))
    rep = BoundReport("dieout", value, {"n": n, "rho": float(rho), "gamma_m": float(gamma_m),
                                        "sum_i0": float(sum_i0)})
    if n == 1:
        rep.notes.append("n=1: bound degenerates to 0; conformance not meaningful")
    return rep


def prop2_bound(rho: float, eta: float, gamma: float, lambda1: float, i0, i_star, beta0,
                beta_star, weights=None) -> BoundReport:
    """Upper bound on ``int_0^inf sum_v |i_v - i*_v| dt`` for the containment
    law with proportional input.

    Node weights default to 1; the bound needs ``eta > 1 + gamma*lambda1``.
    """
    if rho <= 0:
        raise ValueError("rho must be positive")
    i0, i_star = np.asarray(i0, float), np.asarray(i_star, float)
    beta0, beta_star = np.broadcast_to(beta0, i0.shape), np.asarray(beta_star, float)
    P = np.ones_like(i0) if weights is None else np.asarray(weights, float)
    denom = P.min() * (eta - 1.0 - gamma * lambda1)
    if denom <= 0:
        raise PremiseError(f"gain condition eta > 1 + gamma*lambda1 fails "
                           f"(eta={eta:.6g}, 1 + gamma*lambda1={1 + gamma * lambda1:.6g})")
    num = 0.5 * float(np.sum(P * (i0 - i_star) ** 2)) \
        + float(np.sum((beta0 - beta_star) ** 2)) / (2 * rho)
    rep = BoundReport("containment", num / denom,
                      {"rho": float(rho), "eta": float(eta), "gamma": float(gamma),
                       "lambda1": float(lambda1), "n": len(i0)})
    if weights is None:
        rep.notes.append("unit node weights")
    return rep


def observed_integral(t: np.ndarray, values: np.ndarray, stop_below: float | None = None):
    """Trapezoidal integral of ``values`` over ``t``, truncated at the first
    sample below ``stop_below``. Returns ``(integral, truncation_time)``."""
    end = len(t)
    if stop_below is not None:
        hit = np.flatnonzero(values < stop_below)
        if hit.size:
            end = hit[0] + 1
    return float(trapezoid(values[:end], t[:end])), float(t[end - 1])


def attach_dieout_observation(rep: BoundReport, run: ControlledRun) -> BoundReport:
    s = run.series
    rep.observed_integral, rep.truncation_time = observed_integral(
        s.t, s.sum_i, EXTINCTION_FRACTION * s.n)
    return rep


def attach_containment_observation(rep: BoundReport, run: ControlledRun,
                                   tol: float = 1e-6) -> BoundReport:
    """Tracking integral ``int sum_v |i_v - i*_v| dt``, truncated once the
    total deviation falls below ``tol * n``."""
    s = run.series
    rep.observed_integral, rep.truncation_time = observed_integral(
        s.t, run.tracking_error, tol * s.n)
    return rep
