"""Figure rendering for finished runs.

A run writes its plottable series as plain CSV under plot_data/ plus a
plots.json manifest describing each series (kind, columns, title).  This
module turns that manifest into PNG files next to the CSVs, so the data
stays delimited and inspectable while the figures are one command away.
"""

from __future__ import annotations

import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def _load_columns(path: Path) -> dict[str, np.ndarray]:
    with open(path) as f:
        header = f.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return {name: data[:, i] for i, name in enumerate(header)}


def _render_line(entry: dict, cols: dict[str, np.ndarray], target: Path) -> None:
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    xs = cols[entry["x"]]
    for name in entry["y"]:
        ax.plot(xs, cols[name], label=name)
    if entry.get("logy"):
        positive = np.concatenate([np.abs(cols[n]) for n in entry["y"]])
        if np.any(positive > 0):
            ax.set_yscale("log")
    ax.set_xlabel(entry["x"])
    if len(entry["y"]) > 1:
        ax.legend(frameon=False)
    else:
        ax.set_ylabel(entry["y"][0])
    ax.set_title(entry.get("title", target.stem))
    fig.tight_layout()
    fig.savefig(target, dpi=150)
    plt.close(fig)


def _render_heatmap(entry: dict, cols: dict[str, np.ndarray], target: Path) -> None:
    xs = np.unique(cols[entry["x"]])
    ys = np.unique(cols[entry["y"][0]])
    vals = cols[entry["value"]].reshape(len(xs), len(ys))
    fig, ax = plt.subplots(figsize=(5.0, 4.2))
    im = ax.pcolormesh(xs, ys, vals.T, shading="auto")
    fig.colorbar(im, ax=ax, label=entry["value"])
    ax.set_xlabel(entry["x"])
    ax.set_ylabel(entry["y"][0])
    ax.set_aspect("equal")
    ax.set_title(entry.get("title", target.stem))
    fig.tight_layout()
    fig.savefig(target, dpi=150)
    plt.close(fig)


_RENDERERS = {"line": _render_line, "heatmap": _render_heatmap}


def render_manifest(directory: str | Path) -> list[Path]:
    """Render every entry of directory/plots.json; returns written PNG paths."""
    out = Path(directory)
    manifest_path = out / "plots.json"
    if not manifest_path.exists():
        return []
    manifest = json.loads(manifest_path.read_text())
    written: list[Path] = []
    for entry in manifest.get("plots", []):
        src = out / entry["file"]
        if not src.exists():
            continue
        cols = _load_columns(src)
        target = src.with_suffix(".png")
        _RENDERERS[entry["kind"]](entry, cols, target)
        written.append(target)
    return written
