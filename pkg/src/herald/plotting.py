"""Figures from aggregate CSVs. matplotlib is imported lazily (``pip install artifact[plot]``)."""

from __future__ import annotations

from pathlib import Path
from typing import Iterable

METRICS = (("social_cost", "Expected social cost"), ("total_payment", "Total payment"))

STYLE = {
    "figure.figsize": (6.0, 4.0),
    "figure.dpi": 120,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "legend.frameon": False,
    "font.size": 10,
}


def _pyplot():
    try:
        import matplotlib
    except ImportError as exc:  # pragma: no cover - depends on environment
        raise RuntimeError("figure rendering needs matplotlib: pip install 'artifact[plot]'") from exc
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def _series(rows: Iterable[dict], x: str, metric: str) -> dict[str, list[tuple[float, float]]]:
    out: dict[str, list[tuple[float, float]]] = {}
    for r in rows:
        label = f"{r['mechanism']}-{r['score']} {r['setting']} eps={float(r['epsilon']):g}"
        out.setdefault(label, []).append((float(r[x]), float(r[metric])))
    return {k: sorted(v) for k, v in out.items()}


def render_aggregate(rows: list[dict], out_dir: str | Path, tag: str, x: str = "m") -> list[Path]:
    """One PNG per metric, one line per (mechanism, score, variant, epsilon)."""
    plt = _pyplot()
    out_dir = Path(out_dir)
    paths = []
    with plt.rc_context(STYLE):
        for metric, title in METRICS:
            fig, ax = plt.subplots()
            for label, pts in _series(rows, x, metric).items():
                ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", markersize=3, label=label)
            ax.set_xlabel(f"number of {'tasks' if x == 'n' else 'workers'} ({x})")
            ax.set_ylabel(title)
            ax.legend(fontsize=7)
            fig.tight_layout()
            path = out_dir / f"{tag}_{metric}.png"
            fig.savefig(path)
            plt.close(fig)
            paths.append(path)
    return paths


_SCRIPT = '''"""Regenerate figures from {csv_name}. Needs matplotlib."""

import csv
from pathlib import Path

from herald.plotting import render_aggregate

HERE = Path(__file__).resolve().parent

with open(HERE / "{csv_name}", newline="") as fh:
    rows = list(csv.DictReader(fh))

for path in render_aggregate(rows, HERE, "{tag}", "{x}"):
    print(path)
'''


def write_plot_script(aggregate_csv: str | Path, script_path: str | Path, x: str = "m") -> Path:
    aggregate_csv = Path(aggregate_csv)
    script_path = Path(script_path)
    tag = aggregate_csv.stem.removesuffix("_aggregate")
    script_path.write_text(_SCRIPT.format(csv_name=aggregate_csv.name, tag=tag, x=x))
    return script_path
