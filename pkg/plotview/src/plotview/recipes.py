"""Figure recipes: which files feed each figure and how its axes look."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class FigureRecipe:
    """Inputs and axis layout for one figure of the production set."""

    figure_id: str
    kind: str                      # series | profile | peaks | peaks_pair
    inputs: tuple[tuple[str, str], ...]   # (file name, table kind)
    optional_inputs: tuple[tuple[str, str], ...] = ()
    value_column: str = ""
    ylabel: str = ""
    logy: bool = False
    inset: bool = False
    split_by_interaction: bool = False
    output_name: str = ""

    def __post_init__(self) -> None:
        if not self.output_name:
            object.__setattr__(self, "output_name", f"{self.figure_id}.png")


_RECIPES = {
    "fig2": FigureRecipe(
        "fig2", "series", (("fig2_pex.csv", "pex"),),
        value_column="pex_mean", ylabel=r"$P_{ex}$", inset=True,
    ),
    "fig3": FigureRecipe(
        "fig3", "profile", (("fig3_pee.csv", "pee"),),
        value_column="pee", ylabel=r"$P_{ee}$",
    ),
    "fig4": FigureRecipe(
        "fig4", "series", (("fig4_eof.csv", "eof"),),
        value_column="eof_mean", ylabel=r"$\varepsilon$", inset=True,
    ),
    "fig5": FigureRecipe(
        "fig5", "series", (("fig5_eof.csv", "eof"),),
        value_column="eof_mean", ylabel=r"$\varepsilon$",
    ),
    "fig6": FigureRecipe(
        "fig6", "peaks", (("fig6_eof_peaks.csv", "eof_peaks"),),
        value_column="eof_peak", ylabel=r"$\varepsilon_{\max}$", logy=True,
    ),
    "fig7": FigureRecipe(
        "fig7", "series", (("fig7_mc.csv", "mc"),),
        value_column="mc_mean", ylabel=r"$M_c$", inset=True,
    ),
    "fig8": FigureRecipe(
        "fig8", "peaks", (("fig8_mc_peaks.csv", "mc_peaks"),),
        optional_inputs=(("fig8_n20_mc_peaks.csv", "mc_peaks"),),
        value_column="mc_peak", ylabel=r"$M_{c,\max}$",
    ),
    "fig9a": FigureRecipe(
        "fig9a", "peaks", (("fig9_eof_peaks.csv", "eof_peaks"),),
        value_column="eof_peak", ylabel=r"$\varepsilon_{\max}$", logy=True,
        split_by_interaction=True,
    ),
    "fig9b": FigureRecipe(
        "fig9b", "peaks", (("fig9_mc_peaks.csv", "mc_peaks"),),
        value_column="mc_peak", ylabel=r"$M_{c,\max}$",
        split_by_interaction=True,
    ),
    "grid2d": FigureRecipe(
        "grid2d", "peaks_pair",
        (("grid2d_eof_peaks.csv", "eof_peaks"), ("grid2d_mc_peaks.csv", "mc_peaks")),
        ylabel=r"$\varepsilon_{\max}$ / $M_{c,\max}$",
    ),
}


def recipe_names() -> list[str]:
    return sorted(_RECIPES)


def recipe(figure_id: str) -> FigureRecipe:
    if figure_id not in _RECIPES:
        raise KeyError(
            f"unknown figure {figure_id!r}; known: {', '.join(recipe_names())}"
        )
    return _RECIPES[figure_id]
