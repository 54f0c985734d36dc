"""Deterministic matplotlib rendering of the figure recipes.

A render is a pure function of the input CSV files and the recipe: fixed
figure size, fixed style cycles keyed by file order, no timestamps in the
output, so re-rendering identical inputs reproduces the image bytes.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)

from .recipes import FigureRecipe
from .tables import Table, lambda_label, read_table

FIGSIZE = (6.4, 4.4)
DPI = 144
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
MARKERS = ("o", "s", "^", "v", "D", "*")


def _style(index: int) -> dict:
    return {"color": COLORS[index % len(COLORS)], "marker": MARKERS[index % len(MARKERS)]}


def _group_columns(table: Table) -> list[str]:
    cols = ["lambda"]
    if "D" in table.columns:
        cols.append("D")
    return cols


def _group_label(names: list[str], values: tuple[str, ...], with_d: str | None = None) -> str:
    parts = []
    for name, value in zip(names, values):
        if name == "lambda":
            parts.append(lambda_label(value))
        elif name == "D":
            parts.append(f"$D = {value}$")
    if with_d is not None:
        parts.append(f"$d = {with_d}$")
    return ", ".join(parts)


def _plot_series(ax, table: Table, recipe: FigureRecipe, with_markers: bool = False) -> None:
    group_cols = _group_columns(table)
    distances = table.groups("d") if "d" in table.columns else []
    multi_d = len(distances) > 1
    index = 0
    for key in table.groups(*group_cols):
        sel = table.where(**dict(zip(group_cols, key)))
        d_values = [v[0] for v in sel.groups("d")] if "d" in sel.columns else [None]
        for d in d_values:
            part = sel.where(d=d) if d is not None else sel
            label = _group_label(group_cols, key, with_d=d if multi_d else None)
            style = _style(index)
            if not with_markers:
                style.pop("marker")
            ax.plot(part.floats("t"), part.floats(recipe.value_column),
                    lw=1.2, label=label, **style)
            index += 1


def _plot_profile(ax, table: Table, recipe: FigureRecipe, value_column: str,
                  dashed: bool = False, label_suffix: str = "") -> None:
    group_cols = _group_columns(table)
    for index, key in enumerate(table.groups(*group_cols)):
        sel = table.where(**dict(zip(group_cols, key)))
        label = _group_label(group_cols, key) + label_suffix
        style = _style(index)
        if dashed:
            style.pop("marker")
            ax.plot(sel.floats("d"), sel.floats(value_column), "--", lw=1.0,
                    color=style["color"], label=label)
        else:
            ax.plot(sel.floats("d"), sel.floats(value_column), ls="-", lw=1.0,
                    ms=5, label=label, **style)


def build_figure(recipe: FigureRecipe, in_dir: Path):
    """Figure object for a recipe; separated from file output for inspection."""
    in_dir = Path(in_dir)
    tables = [read_table(in_dir / name, kind) for name, kind in recipe.inputs]
    extra = [
        read_table(in_dir / name, kind)
        for name, kind in recipe.optional_inputs
        if (in_dir / name).exists()
    ]
    fig = plt.figure(figsize=FIGSIZE)

    if recipe.kind == "peaks_pair":
        axes = fig.subplots(1, 2)
        for ax, table, (logy, column, ylabel) in zip(
            axes, tables,
            ((True, "eof_peak", r"$\varepsilon_{\max}$"), (False, "mc_peak", r"$M_{c,\max}$")),
        ):
            _plot_profile(ax, table, recipe, column)
            ax.set_xlabel("distance $d$")
            ax.set_ylabel(ylabel)
            if logy:
                ax.set_yscale("log")
            if len(table):
                ax.legend(fontsize=8)
        fig.tight_layout()
        return fig

    ax = fig.add_subplot(1, 1, 1)
    table = tables[0]
    if recipe.kind == "series":
        _plot_series(ax, table, recipe)
        ax.set_xlabel("$t$")
    else:
        _plot_profile(ax, table, recipe, recipe.value_column)
        for overlay in extra:
            _plot_profile(ax, overlay, recipe, recipe.value_column,
                          dashed=True, label_suffix=" (larger lattice)")
        ax.set_xlabel("distance $d$")
    ax.set_ylabel(recipe.ylabel)
    if recipe.logy:
        ax.set_yscale("log")
    if len(table):
        ax.legend(fontsize=8)
    fig.tight_layout()
    # the inset is positioned manually, after the main axes are laid out
    if recipe.kind == "series" and recipe.inset and len(table):
        inset = fig.add_axes((0.58, 0.55, 0.3, 0.3))
        _plot_series(inset, table, recipe)
        t = table.floats("t")
        inset.set_xlim(min(t), min(t) + 0.15 * (max(t) - min(t)) + 1e-12)
        inset.tick_params(labelsize=7)
    return fig


def render(recipe: FigureRecipe, in_dir: Path, out_dir: Path) -> Path:
    """Render one figure to <out_dir>/<figure_id>.png and return the path."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    fig = build_figure(recipe, in_dir)
    out_path = out_dir / recipe.output_name
    try:
        fig.savefig(out_path, dpi=DPI, metadata={"Software": None})
    finally:
        plt.close(fig)
    return out_path
