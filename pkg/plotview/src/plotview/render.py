"""Render reachable-set projection CSVs into static figure panels.

The input schema is ``set_label,k,dim_i,dim_j,xi,xj``; every row is one
sampled point of a labeled set projected onto a coordinate pair.  Points
are drawn as translucent clouds (no hull fitting) so non-convex regions
keep their shape.  Plotted coordinates are read from the file, never
recomputed.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

REQUIRED_COLUMNS = ("set_label", "k", "dim_i", "dim_j", "xi", "xj")

# fixed colors for the benchmark labels; anything else cycles the fallback
LABEL_COLORS = {
    "X0": "#444444",
    "Rtilde": "#1f77b4",
    "Rhat": "#d62728",
    "Rbar": "#2ca02c",
}
FALLBACK_COLORS = ("#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                   "#bcbd22", "#17becf")


class RenderError(ValueError):
    """Bad input data or plot specification."""


@dataclass
class PlotSpec:
    """What to read, which coordinate pairs to draw, where to write."""

    inputs: list
    output_dir: Path
    panels: tuple = ((1, 2), (3, 4), (4, 5))
    labels: list | None = None      # draw order; default: first appearance
    stem: str = "panel"
    dpi: int = 150
    point_size: float = 2.0
    alpha: float = 0.35
    extra_colors: dict = field(default_factory=dict)


def load_points(paths):
    """Read projection CSVs into ``{(i, j): {label: (N, 2) array}}``.

    Labels keep their order of first appearance across all files.
    """
    panels: dict = {}
    label_order: list = []
    total_rows = 0
    for path in paths:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            header = reader.fieldnames or []
            missing = [c for c in REQUIRED_COLUMNS if c not in header]
            if missing:
                raise RenderError(
                    f"{path}: missing required column(s) {', '.join(missing)}")
            for row in reader:
                total_rows += 1
                label = row["set_label"]
                key = (int(row["dim_i"]), int(row["dim_j"]))
                if label not in label_order:
                    label_order.append(label)
                panels.setdefault(key, {}).setdefault(label, []).append(
                    (float(row["xi"]), float(row["xj"])))
    if total_rows == 0:
        raise RenderError("no data rows found in the input CSV(s)")
    for key in panels:
        panels[key] = {lab: np.asarray(pts) for lab, pts in panels[key].items()}
    return panels, label_order


def _color_for(label, order, extra):
    if label in extra:
        return extra[label]
    if label in LABEL_COLORS:
        return LABEL_COLORS[label]
    return FALLBACK_COLORS[order.index(label) % len(FALLBACK_COLORS)]


def render(spec: PlotSpec):
    """Write one PNG per panel; returns the written paths.

    Identical inputs produce byte-identical files (fixed backend, fixed
    metadata, no timestamps).
    """
    panels, seen_labels = load_points(spec.inputs)
    labels = spec.labels if spec.labels is not None else seen_labels
    for label in labels:
        if not any(label in panel for panel in panels.values()):
            raise RenderError(f"label {label!r} does not occur in the input")

    out_dir = Path(spec.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for i, j in spec.panels:
        if (i, j) not in panels:
            raise RenderError(f"no rows for panel ({i},{j}) in the input")
        data = panels[(i, j)]
        fig, ax = plt.subplots(figsize=(4.2, 4.0))
        for label in labels:
            if label not in data:
                continue
            pts = data[label]
            ax.scatter(pts[:, 0], pts[:, 1], s=spec.point_size,
                       alpha=spec.alpha, linewidths=0,
                       color=_color_for(label, labels, spec.extra_colors),
                       label=label, rasterized=False)
        ax.set_xlabel(f"x{i}")
        ax.set_ylabel(f"x{j}")
        legend = ax.legend(loc="best", markerscale=4, fontsize=8)
        for handle in legend.legend_handles:
            handle.set_alpha(1.0)
        fig.tight_layout()
        path = out_dir / f"{spec.stem}_x{i}x{j}.png"
        fig.savefig(path, dpi=spec.dpi, metadata={"Software": "plotview"})
        plt.close(fig)
        written.append(path)
    return written
