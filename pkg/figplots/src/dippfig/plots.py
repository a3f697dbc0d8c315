"""Line plots over sweep CSV rows.

Each figure id maps to a fixed (x axis, y axis, row selection) triple over
the version-1 sweep schema; every matching (algorithm, connectivity) group
becomes one curve.  Rendering is read-only over the CSV and deterministic:
groups and points are sorted, so any row order or file concatenation that
carries the same rows produces the same image.

Figure ids:
    fig2  support error vs undersampling, binary signals, noisy
    fig3  reconstruction SRER vs undersampling, Gaussian signals, noisy
    fig4  support error vs undersampling, Gaussian signals, noisy
    fig5  support error vs undersampling, Gaussian signals, clean
    fig6  reconstruction SRER vs noise level, Gaussian signals
    fig7  reconstruction SRER vs undersampling on the small-world network
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

SCHEMA_VERSION = "1"
REQUIRED_COLUMNS = (
    "schema_version", "algorithm", "topology", "degree_or_q", "p_rewire",
    "alpha", "smnr_db", "signal_kind", "srer_db_mean", "asce_mean",
)

RING_TOPOLOGIES = ("none", "ring", "complete")


class SchemaError(ValueError):
    """The CSV does not carry the columns the figure needs."""


class NoDataError(ValueError):
    """The figure's row selection matched nothing."""


@dataclass(frozen=True)
class FigureDef:
    x: str                       # x-axis column: "alpha" or "smnr_db"
    y: str                       # y-axis column: "srer_db_mean" or "asce_mean"
    signal_kind: str
    noise: str                   # "noisy", "clean" or "any"
    topologies: tuple[str, ...]  # allowed topology column values


FIGURES = {
    "fig2": FigureDef("alpha", "asce_mean", "binary", "noisy", RING_TOPOLOGIES),
    "fig3": FigureDef("alpha", "srer_db_mean", "gaussian", "noisy", RING_TOPOLOGIES),
    "fig4": FigureDef("alpha", "asce_mean", "gaussian", "noisy", RING_TOPOLOGIES),
    "fig5": FigureDef("alpha", "asce_mean", "gaussian", "clean", RING_TOPOLOGIES),
    "fig6": FigureDef("smnr_db", "srer_db_mean", "gaussian", "noisy", RING_TOPOLOGIES),
    "fig7": FigureDef("alpha", "srer_db_mean", "gaussian", "noisy", ("none", "watts_strogatz")),
}

AXIS_LABELS = {
    "alpha": "fraction of measurements",
    "smnr_db": "signal-to-measurement-noise ratio [dB]",
    "srer_db_mean": "SRER [dB]",
    "asce_mean": "ASCE",
}


@dataclass(frozen=True)
class PlotSpec:
    input_csv: str
    figure_id: str
    output_path: str
    x_range: tuple[float, float] | None = None
    y_range: tuple[float, float] | None = None


def load_rows(path: str) -> list[dict[str, str]]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for column in REQUIRED_COLUMNS:
            if column not in header:
                raise SchemaError(f"missing required column {column!r}")
        rows = list(reader)
    for row in rows:
        if row["schema_version"] != SCHEMA_VERSION:
            raise SchemaError(
                f"unsupported schema_version {row['schema_version']!r}"
            )
    return rows


def _selected(row: dict[str, str], fig: FigureDef) -> bool:
    if row["signal_kind"] != fig.signal_kind:
        return False
    if row["topology"] not in fig.topologies:
        return False
    clean = row["smnr_db"] == "clean"
    if fig.noise == "noisy" and clean:
        return False
    if fig.noise == "clean" and not clean:
        return False
    return True


def _group_key(row: dict[str, str]) -> tuple:
    return (row["algorithm"], row["topology"], row["degree_or_q"], row["p_rewire"])


def _group_label(key: tuple) -> str:
    algorithm, topology, degree_or_q, _ = key
    if algorithm == "sp":
        return "SP"
    if topology == "watts_strogatz":
        return f"DIPP WS q={degree_or_q}"
    return f"DIPP C_{degree_or_q}"


def _group_order(key: tuple) -> tuple:
    algorithm, topology, degree_or_q, _ = key
    return (0 if algorithm == "sp" else 1, topology, int(degree_or_q))


def build_figure(rows: list[dict[str, str]], figure_id: str,
                 x_range=None, y_range=None):
    """Assemble the matplotlib figure for one figure id over parsed rows."""
    try:
        fig_def = FIGURES[figure_id]
    except KeyError:
        raise ValueError(
            f"unknown figure id {figure_id!r}; expected one of {sorted(FIGURES)}"
        ) from None
    groups: dict[tuple, list[tuple[float, float]]] = {}
    for row in rows:
        if not _selected(row, fig_def):
            continue
        x = float(row[fig_def.x])
        y = float(row[fig_def.y])
        groups.setdefault(_group_key(row), []).append((x, y))
    if not groups:
        raise NoDataError(f"no data rows match figure {figure_id}")

    figure, ax = plt.subplots(figsize=(6.4, 4.2))
    for key in sorted(groups, key=_group_order):
        points = sorted(set(groups[key]))
        xs = [p[0] for p in points]
        ys = [p[1] for p in points]
        ax.plot(xs, ys, marker="o", label=_group_label(key))
    ax.set_xlabel(AXIS_LABELS[fig_def.x])
    ax.set_ylabel(AXIS_LABELS[fig_def.y])
    all_y = [y for pts in groups.values() for _, y in pts]
    # support-error curves sweeping several decades read better on a log axis
    if fig_def.y == "asce_mean":
        positive = [y for y in all_y if y > 0]
        if positive and len(positive) == len(all_y) and max(positive) / min(positive) > 100:
            ax.set_yscale("log")
    if x_range is not None:
        ax.set_xlim(*x_range)
    if y_range is not None:
        ax.set_ylim(*y_range)
    ax.grid(True, alpha=0.3)
    ax.legend()
    figure.tight_layout()
    return figure


def render(spec: PlotSpec) -> str:
    """Render one figure to the output path (format from the extension)."""
    rows = load_rows(spec.input_csv)
    figure = build_figure(rows, spec.figure_id, spec.x_range, spec.y_range)
    try:
        with plt.rc_context({"svg.hashsalt": "dippfig"}):
            figure.savefig(spec.output_path, metadata=_stable_metadata(spec.output_path))
    finally:
        plt.close(figure)
    return spec.output_path


def _stable_metadata(path: str) -> dict | None:
    # strip the creation timestamp so identical inputs give identical bytes
    if path.endswith(".svg"):
        return {"Date": None}
    if path.endswith(".png"):
        return {"Software": "dippfig"}
    return None
