"""Seeded families of smooth, compactly supported test functions."""

from __future__ import annotations

import numpy as np

from .grids import LineGrid, SampledFunction


def bump(x, center=0.0, radius=1.0):
    """C-infinity bump exp(1 - 1/(1 - s^2)), s = (x - center)/radius; peak value 1."""
    s = (np.asarray(x, dtype=np.float64) - center) / radius
    out = np.zeros_like(s)
    m = np.abs(s) < 1
    out[m] = np.exp(1.0 - 1.0 / (1.0 - s[m] ** 2))
    return out


def random_smooth(grid: LineGrid, rng: np.random.Generator, support=(-2.0, 2.0),
                  amplitude=0.3, n_bumps=3) -> SampledFunction:
    """Sum of a few random bumps inside ``support`` rescaled to sup norm in [amplitude/2, amplitude]."""
    a, b = support
    x = grid.nodes
    v = np.zeros_like(x)
    for _ in range(n_bumps):
        r = rng.uniform(0.25, 0.5) * (b - a) / 2
        c = rng.uniform(a + r, b - r)
        v += rng.choice([-1.0, 1.0]) * rng.uniform(0.3, 1.0) * bump(x, c, r)
    peak = np.max(np.abs(v))
    if peak == 0:
        return SampledFunction(grid, v)
    target = amplitude * rng.uniform(0.5, 1.0)
    return SampledFunction(grid, v * (target / peak))


def seeded_family(grid, seed, count, **kw):
    rng = np.random.default_rng(seed)
    return [random_smooth(grid, rng, **kw) for _ in range(count)]
