"""Experiment configuration files.

INI-style document with sections ``[graph]``, ``[beta]``, ``[gamma]`` and
``[run]``; see the README for every key. Unknown keys, missing required
keys and out-of-range values raise :class:`ConfigError` naming the key.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError
from .graph import (Graph, complete_graph, cycle_graph, gnp_random_graph, path_graph,
                    read_edge_list, star_graph)
from .schedule import (PHASE_PRESETS, Constant, ParamSchedule, SquareWave,
                       UniformRandomPiecewise)

MODES = ("threshold", "integrate", "simulate", "mle", "control-dieout", "control-contain",
         "compare")
DEFAULT_PERIOD = 8.0

_GRAPH_KEYS = {"edges", "directed", "generator", "n", "p", "seed", "lambda1"}
_SCHEDULE_KEYS = {"kind", "value", "low", "high", "period", "phase", "lo", "hi", "dwell", "seed"}
_RUN_KEYS = {"mode", "dt", "steps", "method", "horizon", "renorm_interval", "replicates",
             "initial_fraction", "seed", "stride", "tie_tol", "rho", "eta", "i_star", "w_mode",
             "out"}


@dataclass
class GraphSpec:
    edges: Path | None = None
    directed: bool = False
    generator: str | None = None
    n: int | None = None
    p: float | None = None
    seed: int = 0
    lambda1: float | None = None

    def build(self) -> Graph:
        if self.edges is not None:
            return read_edge_list(self.edges, directed=self.directed)
        gen = self.generator
        if gen == "complete":
            return complete_graph(self.n)
        if gen == "star":
            return star_graph(self.n - 1)
        if gen == "cycle":
            return cycle_graph(self.n)
        if gen == "path":
            return path_graph(self.n)
        if gen == "gnp":
            return gnp_random_graph(self.n, self.p, seed=self.seed, directed=self.directed)
        raise ConfigError("generator", "no graph source configured")


@dataclass
class ExperimentConfig:
    mode: str
    graph: GraphSpec
    beta: ParamSchedule | None = None
    gamma: ParamSchedule | None = None
    dt: float = 1.0
    steps: int = 200
    method: str = "euler"
    horizon: float = 1e4
    renorm_interval: float = 1.0
    replicates: int = 50
    initial_fraction: float = 0.2
    seed: int = 0
    stride: int = 0
    tie_tol: float = 1e-9
    rho: float | None = None
    eta: float = 0.0
    i_star: float | None = None
    w_mode: str = "zero"
    out: Path | None = None


def _get(section, key, conv, where):
    raw = section[key]
    try:
        return conv(raw)
    except ValueError:
        raise ConfigError(key, f"[{where}] cannot parse {raw!r}") from None


def _bool(raw: str) -> bool:
    low = raw.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(raw)


def _prob(key, value, where):
    if not 0.0 <= value <= 1.0:
        raise ConfigError(key, f"[{where}] {value} is outside [0, 1]")
    return value


def _positive(key, value, where):
    if not value > 0:
        raise ConfigError(key, f"[{where}] must be positive, got {value}")
    return value


def _check_keys(section, allowed, where):
    for key in section:
        if key not in allowed:
            raise ConfigError(key, f"unknown key in [{where}]")


def _require(section, key, where):
    if key not in section:
        raise ConfigError(key, f"missing required key in [{where}]")


def _parse_schedule(section, where, gamma: ParamSchedule | None = None) -> ParamSchedule:
    _check_keys(section, _SCHEDULE_KEYS, where)
    kind = section.get("kind", "square").strip().lower()
    if kind == "constant":
        _require(section, "value", where)
        return Constant(_prob("value", _get(section, "value", float, where), where))
    if kind == "square":
        for k in ("low", "high"):
            _require(section, k, where)
        low = _prob("low", _get(section, "low", float, where), where)
        high = _prob("high", _get(section, "high", float, where), where)
        if low > high:
            raise ConfigError("low", f"[{where}] low exceeds high")
        period = _positive("period", _get(section, "period", float, where), where) \
            if "period" in section else DEFAULT_PERIOD
        phase_raw = section.get("phase", "0").strip().lower()
        if phase_raw in PHASE_PRESETS:
            if not isinstance(gamma, SquareWave):
                raise ConfigError("phase", f"[{where}] presets need a square-wave [gamma]")
            period = gamma.period
            phase = (gamma.phase + PHASE_PRESETS[phase_raw] * period) % period
        else:
            try:
                phase = float(phase_raw)
            except ValueError:
                raise ConfigError("phase", f"[{where}] cannot parse {phase_raw!r}") from None
            if not 0.0 <= phase < period:
                raise ConfigError("phase", f"[{where}] must lie in [0, period)")
        return SquareWave(low, high, period, phase)
    if kind == "random":
        for k in ("lo", "hi"):
            _require(section, k, where)
        lo = _prob("lo", _get(section, "lo", float, where), where)
        hi = _prob("hi", _get(section, "hi", float, where), where)
        if lo > hi:
            raise ConfigError("lo", f"[{where}] lo exceeds hi")
        dwell = _positive("dwell", _get(section, "dwell", float, where), where) \
            if "dwell" in section else DEFAULT_PERIOD
        seed = _get(section, "seed", int, where) if "seed" in section else 0
        return UniformRandomPiecewise(lo, hi, dwell, seed)
    raise ConfigError("kind", f"[{where}] unknown schedule kind {kind!r}")


def _parse_graph(section, base: Path) -> GraphSpec:
    _check_keys(section, _GRAPH_KEYS, "graph")
    spec = GraphSpec()
    if "directed" in section:
        spec.directed = _get(section, "directed", _bool, "graph")
    if "seed" in section:
        spec.seed = _get(section, "seed", int, "graph")
    if "lambda1" in section:
        spec.lambda1 = _get(section, "lambda1", float, "graph")
        if spec.lambda1 < 0:
            raise ConfigError("lambda1", "[graph] must be non-negative")
    if "edges" in section:
        path = Path(section["edges"])
        spec.edges = path if path.is_absolute() else base / path
    elif "generator" in section:
        spec.generator = section["generator"].strip().lower()
        if spec.generator not in ("complete", "star", "cycle", "path", "gnp"):
            raise ConfigError("generator", f"[graph] unknown generator {spec.generator!r}")
        _require(section, "n", "graph")
        spec.n = _get(section, "n", int, "graph")
        if spec.n < 1:
            raise ConfigError("n", "[graph] must be at least 1")
        if spec.generator == "gnp":
            _require(section, "p", "graph")
            spec.p = _prob("p", _get(section, "p", float, "graph"), "graph")
    elif spec.lambda1 is None:
        raise ConfigError("edges", "missing required key in [graph] (or generator)")
    return spec


def parse_config(text: str, mode: str | None = None, base_dir: Path | str = ".") -> ExperimentConfig:
    """Parse and validate a configuration document.

    ``mode`` (from the command line) overrides ``[run] mode``; defaults follow
    the reference experiments: dt=1, period 8, 50 replicates, 20% seeding.
    """
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError("<document>", str(exc)) from None
    for name in cp.sections():
        if name not in ("graph", "beta", "gamma", "run"):
            raise ConfigError(name, "unknown section")
    run = cp["run"] if cp.has_section("run") else {}
    _check_keys(run, _RUN_KEYS, "run")

    mode = mode or run.get("mode")
    if mode is None:
        raise ConfigError("mode", "missing required key in [run]")
    if mode not in MODES:
        raise ConfigError("mode", f"unknown mode {mode!r}; choose from {', '.join(MODES)}")

    if not cp.has_section("graph"):
        raise ConfigError("graph", "missing required section")
    base = Path(base_dir)
    cfg = ExperimentConfig(mode=mode, graph=_parse_graph(cp["graph"], base))
    if cfg.graph.lambda1 is not None and cfg.graph.edges is None and cfg.graph.generator is None \
            and mode != "threshold":
        raise ConfigError("edges", f"mode {mode} needs a graph, not only lambda1")

    if cp.has_section("gamma"):
        cfg.gamma = _parse_schedule(cp["gamma"], "gamma")
    if cp.has_section("beta"):
        cfg.beta = _parse_schedule(cp["beta"], "beta", cfg.gamma)

    conv = {"dt": float, "steps": int, "horizon": float, "renorm_interval": float,
            "replicates": int, "initial_fraction": float, "seed": int, "stride": int,
            "tie_tol": float, "rho": float, "eta": float, "i_star": float}
    for key, fn in conv.items():
        if key in run:
            setattr(cfg, key, _get(run, key, fn, "run"))
    for key in ("dt", "horizon", "renorm_interval", "tie_tol"):
        _positive(key, getattr(cfg, key), "run")
    for key in ("steps", "replicates"):
        if getattr(cfg, key) < 1:
            raise ConfigError(key, "[run] must be at least 1")
    if cfg.stride < 0:
        raise ConfigError("stride", "[run] must be non-negative")
    if not 0.0 <= cfg.initial_fraction <= 1.0:
        raise ConfigError("initial_fraction", f"[run] {cfg.initial_fraction} is outside [0, 1]")
    if mode == "simulate" and cfg.initial_fraction == 0.0:
        raise ConfigError("initial_fraction", "[run] simulate mode needs at least one seed")
    if "method" in run:
        cfg.method = run["method"].strip().lower()
        if cfg.method not in ("euler", "rk4"):
            raise ConfigError("method", "[run] must be euler or rk4")
    if "w_mode" in run:
        cfg.w_mode = run["w_mode"].strip().lower()
        if cfg.w_mode not in ("zero", "proportional"):
            raise ConfigError("w_mode", "[run] must be zero or proportional")
    if "out" in run:
        path = Path(run["out"])
        cfg.out = path if path.is_absolute() else base / path
    if cfg.eta < 0:
        raise ConfigError("eta", "[run] must be non-negative")

    needs_beta = mode in ("threshold", "integrate", "simulate", "mle", "compare")
    if needs_beta and cfg.beta is None:
        raise ConfigError("beta", f"mode {mode} needs a [beta] section")
    if cfg.gamma is None:
        raise ConfigError("gamma", f"mode {mode} needs a [gamma] section")
    if mode.startswith("control"):
        if cfg.rho is None:
            raise ConfigError("rho", f"missing required key in [run] for {mode}")
        _positive("rho", cfg.rho, "run")
    if mode == "control-contain":
        if cfg.i_star is None:
            raise ConfigError("i_star", "missing required key in [run] for control-contain")
        if not 0.0 < cfg.i_star <= 1.0:
            raise ConfigError("i_star", f"[run] {cfg.i_star} is outside (0, 1]")
    if mode == "mle" and not cfg.horizon > cfg.renorm_interval >= cfg.dt:
        raise ConfigError("horizon", "[run] need horizon > renorm_interval >= dt")
    if mode == "compare" and not math.isclose(round(1 / cfg.dt) * cfg.dt, 1.0):
        raise ConfigError("dt", "[run] compare mode needs dt dividing 1")
    return cfg


def load_config(path, mode: str | None = None) -> ExperimentConfig:
    path = Path(path)
    return parse_config(path.read_text(), mode=mode, base_dir=path.parent)
