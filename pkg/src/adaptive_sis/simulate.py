"""Discrete-time stochastic SIS process.

Each unit step, every susceptible node is infected with probability
``1 - (1 - gamma(t))**k`` where ``k`` is its number of infected
in-neighbours, and every infected node is cured with probability
``beta_v(t)``. All transitions are computed from the state at ``t`` and
applied together.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .dynamics import InfectionState, TimeSeries, integrate
from .graph import Graph
from .schedule import NodeSchedules


@dataclass(frozen=True)
class SimConfig:
    """Either ``initial_fraction`` (fresh uniform draw per replicate) or an
    explicit ``initial_infected`` set shared by every replicate."""

    graph: Graph
    schedules: NodeSchedules
    initial_fraction: float | None = 0.2
    initial_infected: Sequence[int] | None = None
    replicates: int = 50
    steps: int = 100
    rng_seed: int = 0
    record_nodes: bool = False

    def __post_init__(self):
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        if self.steps < 0:
            raise ValueError("steps must be >= 0")
        self.schedules.check_size(self.graph.n)
        if self.initial_infected is not None:
            seeds = np.unique(np.asarray(list(self.initial_infected), dtype=int))
            if seeds.size and (seeds.min() < 0 or seeds.max() >= self.graph.n):
                raise ValueError("initial_infected outside node range")
            object.__setattr__(self, "initial_infected", tuple(int(s) for s in seeds))
        else:
            f = self.initial_fraction
            if f is None or not 0.0 < f <= 1.0:
                raise ValueError("initial_fraction must lie in (0, 1]")
            if f * self.graph.n < 1:
                raise ValueError("initial_fraction * n must be at least 1")

    @property
    def seed_count(self) -> int:
        if self.initial_infected is not None:
            return len(self.initial_infected)
        return seed_count(self.graph.n, self.initial_fraction)


def seed_count(n: int, fraction: float) -> int:
    return max(1, int(round(fraction * n)))


def replicate_rng(rng_seed: int, replicate: int) -> np.random.Generator:
    return np.random.default_rng([rng_seed, replicate])


@dataclass
class SimResult:
    mean_infected: np.ndarray
    std_infected: np.ndarray
    replicates: int
    frequencies: np.ndarray | None = field(default=None, repr=False)

    @property
    def t(self) -> np.ndarray:
        return np.arange(len(self.mean_infected), dtype=float)

    def to_csv(self, fh=None, node_ids=None, stride: int = 1) -> str:
        out = io.StringIO() if fh is None else fh
        w = csv.writer(out, lineterminator="\n")
        header = ["t", "mean_infected"]
        if self.frequencies is not None:
            ids = node_ids if node_ids is not None else range(self.frequencies.shape[1])
            header += [f"freq_{v}" for v in ids]
        w.writerow(header)
        last = len(self.mean_infected) - 1
        for k in range(len(self.mean_infected)):
            if k % stride and k != last:
                continue
            row = [format(float(k), ".12g"), format(self.mean_infected[k], ".12g")]
            if self.frequencies is not None:
                row += [format(x, ".12g") for x in self.frequencies[k]]
            w.writerow(row)
        return out.getvalue() if fh is None else ""


def run(cfg: SimConfig) -> SimResult:
    g, n, R = cfg.graph, cfg.graph.n, cfg.replicates
    A = g.adjacency
    rngs = [replicate_rng(cfg.rng_seed, r) for r in range(R)]

    X = np.zeros((n, R), dtype=bool)
    if cfg.initial_infected is not None:
        X[list(cfg.initial_infected), :] = True
    else:
        k = cfg.seed_count
        for r, rng in enumerate(rngs):
            X[rng.choice(n, size=k, replace=False), r] = True

    counts = np.empty((cfg.steps + 1, R))
    freqs = np.empty((cfg.steps + 1, n)) if cfg.record_nodes else None
    counts[0] = X.sum(axis=0)
    if freqs is not None:
        freqs[0] = X.mean(axis=1)

    for step in range(cfg.steps):
        t = float(step)
        gamma = cfg.schedules.gamma_at(t)
        beta = np.broadcast_to(np.asarray(cfg.schedules.beta_at(t), dtype=float), (n,))
        k_inf = A @ X.astype(np.float64)
        p_inf = -np.expm1(k_inf * np.log1p(-gamma)) if gamma < 1 else (k_inf > 0).astype(float)
        u = np.column_stack([rng.random(n) for rng in rngs])
        # one uniform per node: a node is either S or I, never both
        X = np.where(X, u >= beta[:, None], u < p_inf)
        counts[step + 1] = X.sum(axis=0)
        if freqs is not None:
            freqs[step + 1] = X.mean(axis=1)

    std = counts.std(axis=1, ddof=1) if R > 1 else np.zeros(cfg.steps + 1)
    return SimResult(counts.mean(axis=1), std, R, freqs)


@dataclass(frozen=True)
class Discrepancy:
    """Aggregate sim-vs-model gap, normalised by ``n``."""

    max_abs: float
    mean_abs: float
    simulated: np.ndarray = field(repr=False)
    model: np.ndarray = field(repr=False)

    def to_csv(self, fh=None) -> str:
        out = io.StringIO() if fh is None else fh
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["t", "sim_mean_infected", "model_sum_i", "abs_diff"])
        for k, (a, b) in enumerate(zip(self.simulated, self.model)):
            w.writerow([format(float(k), ".12g"), format(a, ".12g"), format(b, ".12g"),
                        format(abs(a - b), ".12g")])
        return out.getvalue() if fh is None else ""


def model_initial_state(cfg: SimConfig) -> InfectionState:
    """Mean-field initial condition matching the simulator's seeding: the
    indicator of an explicit seed set, or ``k/n`` everywhere for random
    per-replicate seeding."""
    n = cfg.graph.n
    if cfg.initial_infected is not None:
        return InfectionState.seeded(n, cfg.initial_infected)
    return InfectionState(np.full(n, cfg.seed_count / n))


def compare_with_model(cfg: SimConfig, dt: float = 1.0, method: str = "euler") -> Discrepancy:
    sim = run(cfg)
    per_unit = int(round(1.0 / dt))
    if not np.isclose(per_unit * dt, 1.0):
        raise ValueError("dt must divide the unit step")
    n = cfg.graph.n
    if cfg.steps == 0:
        model = np.array([model_initial_state(cfg).total])
    else:
        series: TimeSeries = integrate(cfg.graph, model_initial_state(cfg), cfg.schedules,
                                       dt=dt, steps=cfg.steps * per_unit, method=method)
        model = series.sum_i[::per_unit]
    diff = np.abs(sim.mean_infected - model) / n
    return Discrepancy(float(diff.max()), float(diff.mean()), sim.mean_infected, model)
