"""Plot CSV output from the adaptive-sis CLI.

    python scripts/plot_series.py run.csv [more.csv ...] [--columns sum_i] [--out fig.png]

Every column after ``t`` is drawn against ``t`` unless ``--columns`` picks a
subset. Needs the ``plot`` extra (matplotlib).
"""

import argparse
import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def read_columns(path: Path) -> dict[str, list[float]]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    if header[0] != "t":
        raise SystemExit(f"{path}: first column must be t, got {header[0]!r}")
    return {name: [float(r[k]) for r in body] for k, name in enumerate(header)}


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("csv", nargs="+", type=Path)
    p.add_argument("--columns", nargs="*", default=None)
    p.add_argument("--logy", action="store_true")
    p.add_argument("--out", type=Path, default=Path("series.png"))
    args = p.parse_args(argv)

    fig, ax = plt.subplots(figsize=(8, 4.5))
    for path in args.csv:
        data = read_columns(path)
        names = args.columns or [c for c in data if c != "t"]
        for name in names:
            if name not in data:
                raise SystemExit(f"{path}: no column {name!r}")
            label = name if len(args.csv) == 1 else f"{path.stem}:{name}"
            ax.plot(data["t"], data[name], label=label)
    ax.set_xlabel("t")
    if args.logy:
        ax.set_yscale("log")
    ax.legend()
    fig.tight_layout()
    fig.savefig(args.out, dpi=120)
    print(args.out)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
