"""Deterministic SIS machinery on a graph.

* the master equation for per-node infection probabilities,
* its linear comparison system ``dx/dt = (gamma(t) A - B(t)) x``,
* a maximum-Lyapunov-exponent estimator for that linear system,
* the time-averaged spectral die-out test.
"""

from __future__ import annotations

import bisect
import csv
import enum
import io
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence, Union

import numpy as np

from .errors import NonFiniteError, PremiseError
from .graph import Graph
from .schedule import NodeSchedules, ParamSchedule, stationary_mean

EXTINCTION_FRACTION = 1e-6


@dataclass(frozen=True)
class InfectionState:
    """Per-node infection probabilities at time ``t``.

    ``clamp_events`` counts how many entries have been pushed back into
    [0, 1] by the integrator so far.
    """

    i: np.ndarray
    t: float = 0.0
    clamp_events: int = 0

    def __post_init__(self):
        i = np.asarray(self.i, dtype=np.float64)
        if i.ndim != 1:
            raise ValueError("state must be a vector")
        if np.any(i < 0) or np.any(i > 1):
            raise ValueError("infection probabilities must lie in [0, 1]")
        object.__setattr__(self, "i", i)

    @property
    def s(self) -> np.ndarray:
        return 1.0 - self.i

    @property
    def total(self) -> float:
        return float(self.i.sum())

    @classmethod
    def seeded(cls, n: int, infected) -> "InfectionState":
        i = np.zeros(n)
        i[np.asarray(list(infected), dtype=int)] = 1.0
        return cls(i)


@dataclass(frozen=True)
class TopologySchedule:
    """Piecewise-constant topology: ``graphs[k]`` applies from ``times[k]``."""

    times: Sequence[float]
    graphs: Sequence[Graph]

    def __post_init__(self):
        times = tuple(float(t) for t in self.times)
        if not times or times[0] != 0.0:
            raise ValueError("first switch time must be 0")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("switch times must be strictly increasing")
        if len(times) != len(self.graphs):
            raise ValueError("need one graph per switch time")
        if len({g.n for g in self.graphs}) != 1:
            raise ValueError("all graphs must share the node count")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "graphs", tuple(self.graphs))

    @property
    def n(self) -> int:
        return self.graphs[0].n

    def graph_at(self, t: float) -> Graph:
        return self.graphs[bisect.bisect_right(self.times, t) - 1]


Topology = Union[Graph, TopologySchedule]


def _graph_at(topo: Topology, t: float) -> Graph:
    return topo.graph_at(t) if isinstance(topo, TopologySchedule) else topo


# -- vector fields ------------------------------------------------------------

def pressure_vector(g: Graph, i: np.ndarray, gamma: float) -> np.ndarray:
    """``1 - prod_{u -> v} (1 - gamma*i_u)`` for every node at once."""
    with np.errstate(divide="ignore"):
        logs = np.log1p(-gamma * i)
    return -np.expm1(g.adjacency @ logs)


def infection_pressure(g: Graph, state: InfectionState, gamma: float, v: int) -> float:
    """Probability that susceptible ``v`` is infected by its in-neighbours."""
    if not 0.0 <= gamma <= 1.0:
        raise ValueError("gamma must lie in [0, 1]")
    nbrs = g.in_neighbors(v)
    return 1.0 - float(np.prod(1.0 - gamma * state.i[nbrs]))


def master_rhs(g: Graph, i: np.ndarray, gamma: float, beta, w=None) -> np.ndarray:
    """``di/dt``; ``w`` is the optional additive control input."""
    di = pressure_vector(g, i, gamma) * (1.0 - i) - beta * i
    if w is not None:
        di = di + w
    return di


def linear_rhs(g: Graph, x: np.ndarray, gamma: float, beta) -> np.ndarray:
    return gamma * (g.adjacency @ x) - beta * x


def _check_finite(vec, what):
    bad = ~np.isfinite(vec)
    if bad.any():
        raise NonFiniteError(f"non-finite {what}", node=int(np.flatnonzero(bad)[0]))


def _rk4(f: Callable[[float, np.ndarray], np.ndarray], t: float, y: np.ndarray, dt: float):
    k1 = f(t, y)
    k2 = f(t + dt / 2, y + dt / 2 * k1)
    k3 = f(t + dt / 2, y + dt / 2 * k2)
    k4 = f(t + dt, y + dt * k3)
    return y + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def _advance(f, t, y, dt, method):
    if method == "euler":
        return y + dt * f(t, y)
    if method == "rk4":
        return _rk4(f, t, y, dt)
    raise ValueError(f"unknown method {method!r}")


def master_step(g: Topology, state: InfectionState, sched: NodeSchedules, dt: float = 1.0,
                method: str = "euler") -> InfectionState:
    """One step of the master equation followed by clamping to [0, 1]."""
    if dt <= 0:
        raise ValueError("dt must be positive")

    def f(t, y):
        d = master_rhs(_graph_at(g, t), y, sched.gamma_at(t), sched.beta_at(t))
        _check_finite(d, "derivative")
        return d

    nxt = _advance(f, state.t, state.i, dt, method)
    _check_finite(nxt, "state")
    clamps = int(np.count_nonzero((nxt < 0.0) | (nxt > 1.0)))
    return InfectionState(np.clip(nxt, 0.0, 1.0), state.t + dt, state.clamp_events + clamps)


def linear_step(g: Topology, x: np.ndarray, sched: NodeSchedules, dt: float = 1.0, t: float = 0.0,
                method: str = "euler") -> np.ndarray:
    """One step of the comparison system. No clamping.

    Raises :class:`NonFiniteError` on overflow; callers iterating for long
    horizons must renormalise.
    """
    def f(s, y):
        return linear_rhs(_graph_at(g, s), y, sched.gamma_at(s), sched.beta_at(s))

    with np.errstate(over="ignore", invalid="ignore"):
        nxt = _advance(f, t, np.asarray(x, dtype=np.float64), dt, method)
    _check_finite(nxt, "comparison state (renormalisation required)")
    return nxt


# -- trajectories -------------------------------------------------------------

@dataclass
class TimeSeries:
    """Aggregate trajectory plus optional per-node samples.

    ``nodes[k]`` is the state at ``t[node_steps[k]]``. ``extra`` holds named
    per-step columns written between ``sum_i`` and the node columns.
    """

    t: np.ndarray
    sum_i: np.ndarray
    n: int
    nodes: np.ndarray | None = None
    node_steps: np.ndarray | None = None
    node_ids: np.ndarray | None = None
    clamp_events: int = 0
    extra: dict = field(default_factory=dict)

    def extinction_time(self, fraction: float = EXTINCTION_FRACTION):
        """First recorded time with ``sum_i < fraction * n``, else None."""
        below = np.flatnonzero(self.sum_i < fraction * self.n)
        return float(self.t[below[0]]) if below.size else None

    def to_csv(self, fh=None, value_label: str = "sum_i", node_prefix: str = "i_") -> str:
        """Write CSV (header always present). Returns the text when ``fh`` is None."""
        out = io.StringIO() if fh is None else fh
        writer = csv.writer(out, lineterminator="\n")
        header = ["t", value_label, *self.extra]
        rows = range(len(self.t))
        if self.nodes is not None:
            ids = self.node_ids if self.node_ids is not None else range(self.nodes.shape[1])
            header += [f"{node_prefix}{v}" for v in ids]
            rows = self.node_steps
        writer.writerow(header)
        for k, r in enumerate(rows):
            row = [_fmt(self.t[r]), _fmt(self.sum_i[r])]
            row += [_fmt(col[r]) for col in self.extra.values()]
            if self.nodes is not None:
                row += [_fmt(x) for x in self.nodes[k]]
            writer.writerow(row)
        return out.getvalue() if fh is None else ""


def _fmt(x) -> str:
    return format(float(x), ".12g")


def integrate(g: Topology, init: InfectionState, sched: NodeSchedules, dt: float = 1.0,
              steps: int = 100, method: str = "euler", stride: int | None = None) -> TimeSeries:
    """Repeated :func:`master_step`. Records ``sum_i`` every step and, if
    ``stride`` is given, the full state every ``stride`` steps."""
    if steps < 1:
        raise ValueError("steps must be >= 1")
    n = len(init.i)
    sched.check_size(n)
    t = np.empty(steps + 1)
    total = np.empty(steps + 1)
    samples, sample_steps = [], []
    state = init
    for k in range(steps + 1):
        if k:
            # index-based time keeps schedule switch points exact
            state = master_step(g, replace(state, t=(k - 1) * dt + init.t), sched, dt, method)
        t[k], total[k] = state.t, state.total
        if stride and (k % stride == 0 or k == steps):
            samples.append(state.i.copy())
            sample_steps.append(k)
    g0 = _graph_at(g, 0.0)
    return TimeSeries(t, total, n,
                      nodes=np.array(samples) if stride else None,
                      node_steps=np.array(sample_steps) if stride else None,
                      node_ids=g0.node_ids if stride else None,
                      clamp_events=state.clamp_events)


def integrate_linear(g: Topology, x0, sched: NodeSchedules, dt: float = 1.0, steps: int = 100,
                     method: str = "euler") -> np.ndarray:
    """Full comparison-system trajectory, shape ``(steps + 1, n)``."""
    x = np.asarray(x0, dtype=np.float64)
    out = np.empty((steps + 1, len(x)))
    out[0] = x
    for k in range(steps):
        x = linear_step(g, x, sched, dt, t=k * dt, method=method)
        out[k + 1] = x
    return out


# -- Lyapunov exponent --------------------------------------------------------

@dataclass(frozen=True)
class MLEEstimate:
    mu: float
    horizon: float
    renorm_interval: float
    trace_t: np.ndarray = field(repr=False)
    log_norm_trace: np.ndarray = field(repr=False)


def estimate_mle(g: Topology, sched: NodeSchedules, horizon: float = 1e4, dt: float = 0.1,
                 renorm_interval: float = 1.0, method: str = "rk4") -> MLEEstimate:
    """Top Lyapunov exponent of the comparison system.

    Propagates the normalised all-ones vector, accumulating ``ln ||x||_1``
    and rescaling every ``renorm_interval``. ``log_norm_trace`` holds the
    running sums at each renormalisation.
    """
    if not horizon > renorm_interval > 0 or not renorm_interval >= dt > 0:
        raise ValueError("need horizon > renorm_interval >= dt > 0")
    n = _graph_at(g, 0.0).n
    sched.check_size(n)
    steps = int(round(horizon / dt))
    every = max(1, int(round(renorm_interval / dt)))
    x = np.full(n, 1.0 / n)
    acc = 0.0
    tt, trace = [], []
    for k in range(steps):
        x = linear_step(g, x, sched, dt, t=k * dt, method=method)
        if (k + 1) % every == 0 or k + 1 == steps:
            norm = np.abs(x).sum()
            if not np.isfinite(norm) or norm == 0.0:
                raise NonFiniteError("log-norm accumulation became non-finite")
            acc += math.log(norm)
            x = x / norm
            tt.append((k + 1) * dt)
            trace.append(acc)
    total_time = steps * dt
    return MLEEstimate(acc / total_time, total_time, every * dt, np.array(tt), np.array(trace))


# -- spectral threshold -------------------------------------------------------

class Verdict(str, enum.Enum):
    DIES_OUT = "DiesOut"
    PERSISTS = "Persists"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class ThresholdReport:
    lambda1: float
    beta_bar: float
    gamma_bar: float
    ratio: float
    margin: float
    verdict: Verdict

    def to_text(self) -> str:
        lines = [f"verdict = {self.verdict.value}", f"lambda1 = {self.lambda1:.10g}",
                 f"beta_bar = {self.beta_bar:.10g}", f"gamma_bar = {self.gamma_bar:.10g}",
                 f"ratio = {self.ratio:.10g}", f"margin = {self.margin:.10g}"]
        return "\n".join(lines) + "\n"


def threshold_check(lambda1: float, beta_sched, gamma_sched: ParamSchedule,
                    tie_tol: float = 1e-9) -> ThresholdReport:
    """Die-out test ``lambda1 < beta_bar / gamma_bar`` with long-run means.

    Only valid for a cure schedule shared by every node; per-node schedules
    must go through :func:`estimate_mle`. ``tie_tol`` is relative to
    ``max(lambda1, 1)``.
    """
    if isinstance(beta_sched, (list, tuple)):
        raise PremiseError("threshold_check needs one cure schedule shared by all nodes; "
                           "use estimate_mle for per-node cure rates")
    beta_bar = stationary_mean(beta_sched)
    gamma_bar = stationary_mean(gamma_sched)
    if gamma_bar <= 0:
        raise PremiseError("time-averaged infection rate must be positive")
    ratio = beta_bar / gamma_bar
    margin = ratio - lambda1
    tol = tie_tol * max(abs(lambda1), 1.0)
    if margin > tol:
        verdict = Verdict.DIES_OUT
    elif margin < -tol:
        verdict = Verdict.PERSISTS
    else:
        verdict = Verdict.INCONCLUSIVE
    return ThresholdReport(lambda1, beta_bar, gamma_bar, ratio, margin, verdict)
