"""Numerics for p-Weil-Petersson curves: Besov data on the line and circle,
curves from log-derivatives, boundary welding, Schwarzian calculus and
Beltrami coefficients."""

__version__ = "0.1.0"

from .grids import (  # noqa: E402
    CircleGrid,
    LineGrid,
    MonotoneMap,
    SampledFunction,
    identity_map,
    integrate_cumulative,
    interpolate,
    invert_monotone,
    make_circle_grid,
    make_line_grid,
)
from ._parallel import threads  # noqa: E402

__all__ = [
    "CircleGrid",
    "LineGrid",
    "MonotoneMap",
    "SampledFunction",
    "identity_map",
    "integrate_cumulative",
    "interpolate",
    "invert_monotone",
    "make_circle_grid",
    "make_line_grid",
    "threads",
]
