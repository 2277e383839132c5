"""Static rendering of reachable-set projection CSVs."""

from .render import LABEL_COLORS, PlotSpec, RenderError, load_points, render

__version__ = "0.1.0"

__all__ = ["LABEL_COLORS", "PlotSpec", "RenderError", "load_points", "render"]
