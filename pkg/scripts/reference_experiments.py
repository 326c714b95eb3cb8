"""Run the bundled reference experiments and collect their outputs.

    python scripts/reference_experiments.py [--outdir results] [--edges as.txt]

Each configuration under ``configs/`` runs in its natural mode; the phase
sweep (sync, async, antisync) reruns the 500-node comparison three times.
With ``--edges`` the two threshold cases recompute lambda1 from that edge
list instead of using the stored value.
"""

import argparse
import tempfile
from pathlib import Path

from adaptive_sis.cli import main as cli

CONFIGS = Path(__file__).resolve().parents[1] / "configs"

RUNS = [
    ("case1_threshold", "threshold"),
    ("case2_threshold", "threshold"),
    ("k4_mle", "mle"),
    ("gnp500_compare", "compare"),
    ("gnp500_compare", "simulate"),
    ("gnp500_compare", "integrate"),
    ("gnp500_dieout", "control-dieout"),
    ("gnp500_contain", "control-contain"),
]


def with_edges(config: Path, edges: Path, workdir: Path) -> Path:
    text = config.read_text().replace("lambda1 = 75.2407", f"edges = {edges.resolve()}")
    out = workdir / config.name
    out.write_text(text)
    return out


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--outdir", type=Path, default=Path("results"))
    p.add_argument("--edges", type=Path, default=None)
    args = p.parse_args(argv)
    args.outdir.mkdir(parents=True, exist_ok=True)

    failures = 0
    with tempfile.TemporaryDirectory() as tmp:
        for name, mode in RUNS:
            config = CONFIGS / f"{name}.ini"
            if args.edges is not None and mode == "threshold":
                config = with_edges(config, args.edges, Path(tmp))
            suffix = "txt" if mode in ("threshold",) else "csv"
            out = args.outdir / f"{name}.{mode}.{suffix}"
            print(f"{name} [{mode}] -> ", end="", flush=True)
            failures += cli([mode, "--config", str(config), "--out", str(out)]) != 0

        base = (CONFIGS / "gnp500_compare.ini").read_text()
        for phase in ("sync", "async", "antisync"):
            config = Path(tmp) / f"compare_{phase}.ini"
            config.write_text(base.replace("phase = async", f"phase = {phase}"))
            out = args.outdir / f"gnp500_compare.{phase}.csv"
            print(f"compare [{phase}] -> ", end="", flush=True)
            failures += cli(["compare", "--config", str(config), "--out", str(out)]) != 0
    return 1 if failures else 0


if __name__ == "__main__":
    raise SystemExit(main())
