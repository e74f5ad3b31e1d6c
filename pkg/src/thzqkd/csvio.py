"""CSV emission and standalone plot-script generation.

Tables are written with leading '#' metadata lines, a header row, '.'
decimal separator and scientific notation for magnitudes below 1e-3.
Float formatting round-trips exactly, so re-parsing a CSV reproduces the
table bit-for-bit.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .experiments import SweepTable

LIST_SEPARATOR = ";"


def format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return _format_float(float(value))
    if isinstance(value, (list, tuple, np.ndarray)):
        return LIST_SEPARATOR.join(format_value(v) for v in value)
    return str(value)


def _format_float(x: float) -> str:
    if x != x:
        return "nan"
    if x == 0.0:
        return "0.0"
    if abs(x) < 1e-3:
        return np.format_float_scientific(x, unique=True)
    return repr(x)


def parse_value(text: str):
    """Inverse of format_value for scalar cells (used by round-trip tests)."""
    if text == "":
        return None
    if text in ("true", "false"):
        return text == "true"
    if LIST_SEPARATOR in text:
        return [parse_value(t) for t in text.split(LIST_SEPARATOR)]
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def render_csv(table: SweepTable) -> str:
    buf = io.StringIO()
    for key in table.metadata:
        buf.write(f"# {key}={table.metadata[key]}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([format_value(row.get(col)) for col in table.columns])
    return buf.getvalue()


def write_csv(table: SweepTable, path) -> None:
    path = Path(path)
    try:
        path.write_text(render_csv(table), encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot write CSV {path}: {exc}") from exc


def read_csv(path):
    """Read back a table written by write_csv: (metadata, columns, rows of strings)."""
    path = Path(path)
    metadata = {}
    lines = path.read_text(encoding="utf-8").splitlines()
    body = []
    for line in lines:
        if line.startswith("#"):
            key, _, val = line[1:].strip().partition("=")
            metadata[key.strip()] = val
        else:
            body.append(line)
    reader = csv.reader(body)
    columns = tuple(next(reader))
    rows = [dict(zip(columns, rec)) for rec in reader if rec]
    return metadata, columns, rows


_PLOT_SCRIPT = '''#!/usr/bin/env python3
"""Plot {csv_name} (generated alongside the data; edit freely)."""
import csv

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

CSV_PATH = {csv_path!r}
X_COLUMN = {x!r}
Y_COLUMN = {y!r}
GROUP_BY = {group!r}

rows = []
with open(CSV_PATH, newline="", encoding="utf-8") as fh:
    body = [line for line in fh if not line.startswith("#")]
for rec in csv.DictReader(body):
    rows.append(rec)

groups = {{}}
for rec in rows:
    if rec[Y_COLUMN] == "":
        continue
    key = rec.get(GROUP_BY, "") if GROUP_BY else ""
    groups.setdefault(key, ([], []))
    groups[key][0].append(float(rec[X_COLUMN]))
    groups[key][1].append(float(rec[Y_COLUMN]))

fig, ax = plt.subplots(figsize=(6.0, 4.0))
for key in sorted(groups):
    xs, ys = groups[key]
    ax.plot(xs, ys, marker=".", label=key or None)
if {logx!r} == "true":
    ax.set_xscale("log")
if {logy!r} == "true":
    ax.set_yscale("log")
ax.set_xlabel(X_COLUMN)
ax.set_ylabel(Y_COLUMN)
ax.grid(True, which="both", alpha=0.3)
if any(groups) and GROUP_BY:
    ax.legend()
fig.tight_layout()
out = CSV_PATH.rsplit(".", 1)[0] + ".png"
fig.savefig(out, dpi=150)
print(f"wrote {{out}}")
'''


def emit_plot_script(table: SweepTable, script_path, csv_path) -> None:
    """Write a self-contained matplotlib script that reads the CSV by column name."""
    meta = table.metadata
    x = meta.get("plot_x")
    y = meta.get("plot_y")
    if not x or not y:
        raise ConfigError("table carries no plot hints (plot_x/plot_y metadata)")
    script = _PLOT_SCRIPT.format(
        csv_name=Path(csv_path).name,
        csv_path=str(csv_path),
        x=x,
        y=y,
        group=meta.get("plot_group", ""),
        logx=meta.get("plot_logx", "false"),
        logy=meta.get("plot_logy", "false"),
    )
    path = Path(script_path)
    try:
        path.write_text(script, encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot write plot script {path}: {exc}") from exc
