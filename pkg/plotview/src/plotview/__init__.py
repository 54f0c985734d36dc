"""Render the production figure set from blockadesim CSV outputs."""

__version__ = "0.1.0"

from .recipes import FigureRecipe, recipe, recipe_names
from .render import build_figure, render

__all__ = ["FigureRecipe", "recipe", "recipe_names", "build_figure", "render"]
