"""Render sweep tables to matplotlib figures on disk.

The figure layout is driven by the plot hints each table carries in its
metadata (plot_x, plot_y, plot_group, plot_logx, plot_logy), so the same
entry point covers the rate-vs-distance, coefficient-vs-temperature and
max-distance-vs-frequency families.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .errors import ConfigError
from .experiments import SweepTable

_AXIS_LABELS = {
    "distance_m": "distance (m)",
    "frequency_hz": "carrier frequency (Hz)",
    "temperature_k": "temperature (K)",
    "total_rate_bits": "secret key rate (bits/use)",
    "zeta": "feasibility coefficient",
    "max_distance_m": "max distance (m)",
}


def render_figure(table: SweepTable, path) -> Path:
    """Plot the table per its metadata hints and save to path (PNG)."""
    meta = table.metadata
    x_col = meta.get("plot_x")
    y_col = meta.get("plot_y")
    if not x_col or not y_col:
        raise ConfigError("table carries no plot hints (plot_x/plot_y metadata)")
    group_col = meta.get("plot_group", "")

    groups: dict[str, tuple[list, list]] = {}
    for row in table.rows:
        y = row.get(y_col)
        if y is None:
            continue
        key = str(row.get(group_col, "")) if group_col else ""
        xs, ys = groups.setdefault(key, ([], []))
        xs.append(float(row[x_col]))
        ys.append(float(y))

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for key in sorted(groups):
        xs, ys = groups[key]
        ax.plot(xs, ys, marker=".", markersize=4, label=key or None)
    if meta.get("plot_logx") == "true":
        ax.set_xscale("log")
    if meta.get("plot_logy") == "true":
        ax.set_yscale("log")
    ax.set_xlabel(_AXIS_LABELS.get(x_col, x_col))
    ax.set_ylabel(_AXIS_LABELS.get(y_col, y_col))
    ax.grid(True, which="both", alpha=0.3)
    if group_col and any(groups):
        ax.legend()
    fig.tight_layout()
    path = Path(path)
    try:
        fig.savefig(path, dpi=150)
    except OSError as exc:
        raise ConfigError(f"cannot write figure {path}: {exc}") from exc
    finally:
        plt.close(fig)
    return path
