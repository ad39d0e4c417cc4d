"""Curves from log-derivatives, and the reparametrization operators.

A curve is recovered from w = log(gamma') as gamma(x) = int_0^x e^w.
For real u the same formula gives an increasing homeomorphism gamma_u,
which drives the variable change P_h(w) = w o h, the affine map
Q_u(w) = w o gamma_u + u, and the splitting J(u, v) = u + i v o gamma_u of
a curve into a reparametrization and an arc-length parametrization.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from ._parallel import block_map
from .grids import (
    LineGrid,
    MonotoneMap,
    SampledFunction,
    _hermite_eval,
    hermite_slopes,
    integrate_cumulative,
    interpolate,
    invert_monotone,
)
from .spaces import besov_seminorm
from .testfunctions import bump, random_smooth

__all__ = [
    "CurveParam",
    "PlaneCurve",
    "normalize_log_derivative",
    "curve_from_log_derivative",
    "log_derivative_from_curve",
    "homeo_from_real_u",
    "variable_change",
    "q_transform",
    "j_map",
    "j_inverse",
    "arc_length_defect",
    "chord_arc_constant",
    "operator_norm_estimate",
]


@dataclass(frozen=True)
class CurveParam:
    """A log-derivative w = log(gamma'), flagged once int_0^1 e^w = 1."""

    w: SampledFunction
    normalized: bool = False


@dataclass(frozen=True, eq=False)
class PlaneCurve:
    """Sampled embedding of the window into C.

    ``tangent`` holds exact derivatives gamma' at the nodes when the curve
    came from a log-derivative; evaluation between nodes then uses them.
    """

    grid: LineGrid
    points: np.ndarray
    tangent: np.ndarray | None = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.complex128)
        if pts.shape != (self.grid.size,):
            raise ValueError(f"expected {self.grid.size} points, got shape {pts.shape}")
        object.__setattr__(self, "points", pts)
        if self.tangent is not None:
            object.__setattr__(self, "tangent", np.asarray(self.tangent, dtype=np.complex128))

    def __call__(self, x):
        d = self.tangent if self.tangent is not None else hermite_slopes(self.points, self.grid.spacing)
        return _hermite_eval(self.grid, self.points, d, x)

    def sup_distance(self, other: "PlaneCurve", inner: float | None = None) -> float:
        x = self.grid.nodes
        m = np.ones_like(x, dtype=bool) if inner is None else np.abs(x) <= inner
        return float(np.max(np.abs(self.points[m] - other.points[m])))


def _as_values(w):
    return w.w if isinstance(w, CurveParam) else w


def _integral_0_to_1(g: SampledFunction):
    grid = g.grid
    if grid.half_width < 1:
        raise ValueError("window must contain [0, 1]")
    G = integrate_cumulative(g)
    return _hermite_eval(grid, G.values, g.values, 1.0)


def normalize_log_derivative(w: SampledFunction) -> CurveParam:
    """Shift w by c = -log int_0^1 e^w (principal branch) so that gamma(1) = 1."""
    w = _as_values(w)
    total = _integral_0_to_1(w.with_values(np.exp(w.values)))
    if total == 0:
        raise ZeroDivisionError("int_0^1 e^w vanishes; cannot normalize")
    c = -np.log(complex(total))
    vals = w.values + (c if np.iscomplexobj(w.values) or c.imag != 0 else c.real)
    return CurveParam(SampledFunction(w.grid, vals, w.modulo_constant), True)


def curve_from_log_derivative(w) -> PlaneCurve:
    """gamma(x) = int_0^x e^{w(t)} dt on the grid of w."""
    w = _as_values(w)
    g = np.exp(w.values.astype(np.complex128))
    G = integrate_cumulative(SampledFunction(w.grid, g))
    return PlaneCurve(w.grid, G.values, g)


def log_derivative_from_curve(curve: PlaneCurve) -> SampledFunction:
    """log(gamma') from curve samples: fourth-order differences, continuous branch."""
    pts = curve.points
    inc = np.abs(np.diff(pts))
    zero = np.nonzero(inc == 0)[0]
    if zero.size:
        raise ValueError(f"derivative vanishes at {int(zero[0])}")
    d = hermite_slopes(pts, curve.grid.spacing)
    if np.any(d == 0):
        raise ValueError(f"derivative vanishes at {int(np.nonzero(d == 0)[0][0])}")
    arg = np.unwrap(np.angle(d))
    # np.unwrap starts on the principal branch at the left window edge, where
    # compactly supported log-derivatives sit at their (principal) constant
    return SampledFunction(curve.grid, np.log(np.abs(d)) + 1j * arg)


def homeo_from_real_u(u: SampledFunction) -> MonotoneMap:
    """gamma_u(x) = int_0^x e^{u(t)} dt, with affine tails outside the window."""
    if not u.is_real:
        raise ValueError("homeo_from_real_u needs real-valued u")
    grid = u.grid
    e = np.exp(np.real(u.values))
    vals = integrate_cumulative(SampledFunction(grid, e)).values
    X = grid.half_width
    s_lo, s_hi = e[0], e[-1]
    return MonotoneMap(grid, vals, (vals[0] + s_lo * X, vals[-1] - s_hi * X), (s_lo, s_hi), e)


def variable_change(w: SampledFunction, h: MonotoneMap) -> SampledFunction:
    """P_h(w) = w o h, sampled on the grid of h."""
    return SampledFunction(h.grid, interpolate(w, h.values), w.modulo_constant)


def q_transform(u: SampledFunction, w: SampledFunction) -> SampledFunction:
    """Q_u(w) = w o gamma_u + u."""
    return variable_change(w, homeo_from_real_u(u)) + u.values


def j_map(u: SampledFunction, v: SampledFunction, normalize: bool = True) -> CurveParam:
    """J(u, v) = u + i v o gamma_u (then normalized unless ``normalize`` is False)."""
    if not (u.is_real and v.is_real):
        raise ValueError("j_map needs real u and v")
    w = SampledFunction(u.grid, np.real(u.values) + 1j * np.real(variable_change(v, homeo_from_real_u(u)).values))
    if normalize:
        return normalize_log_derivative(w)
    return CurveParam(w, False)


def j_inverse(w) -> tuple[SampledFunction, SampledFunction]:
    """Split w into (u, v) = (Re w, (Im w) o gamma_u^{-1})."""
    w = _as_values(w)
    u = SampledFunction(w.grid, np.real(w.values))
    g_inv = invert_monotone(homeo_from_real_u(u))
    v = variable_change(SampledFunction(w.grid, np.imag(w.values)), g_inv)
    return u, v


def arc_length_defect(curve: PlaneCurve) -> float:
    """sup_j | |increment_j|/spacing - m | / m, m the mean speed."""
    speed = np.abs(np.diff(curve.points)) / curve.grid.spacing
    m = speed.mean()
    return float(np.max(np.abs(speed - m)) / m)


def chord_arc_constant(curve: PlaneCurve, full: bool = False, stride: int = 8) -> float:
    """Largest arclength/chord ratio over sampled pairs of points.

    By default only every ``stride``-th node (plus the last) enters the pair
    scan, about N^2/64 pairs. Returns inf with a warning if two sampled
    points coincide.
    """
    pts = curve.points
    arc = np.concatenate([[0.0], np.cumsum(np.abs(np.diff(pts)))])
    idx = np.arange(pts.shape[0]) if full else np.unique(np.r_[np.arange(0, pts.shape[0], stride), pts.shape[0] - 1])
    p, s = pts[idx], arc[idx]
    n = idx.shape[0]

    def rows(a, b):
        chord = np.abs(p[a:b, None] - p[None, :])
        length = np.abs(s[a:b, None] - s[None, :])
        with np.errstate(divide="ignore", invalid="ignore"):
            r = np.where(length > 0, length / chord, 1.0)
        return r.max(axis=1)

    best = float(block_map(rows, n, 256).max())
    if not np.isfinite(best):
        warnings.warn("coincident points: not chord-arc at this resolution", RuntimeWarning)
        return float("inf")
    if best > 10:
        warnings.warn(f"chord-arc constant {best:.3g} > 10 (near-touching fold?)", RuntimeWarning)
    return best


def _affine_witness(h: MonotoneMap):
    # bump placed on the longest stretch where h is affine to rounding
    v = h.values
    scale = np.max(np.abs(v)) + 1.0
    flat = np.abs(np.diff(v, 2)) <= 1e-12 * scale
    best_len, best_end, run = 0, 0, 0
    for i, f in enumerate(flat):
        run = run + 1 if f else 0
        if run > best_len:
            best_len, best_end = run, i
    if best_len < 32:
        return None
    x = h.grid.nodes
    lo, hi = x[best_end - best_len + 2], x[best_end]
    return bump(x, 0.5 * (lo + hi), 0.45 * (hi - lo))


def operator_norm_estimate(h: MonotoneMap, p: float = 2.0, trials: int = 16, seed: int = 0) -> float:
    """Empirical lower bound for the norm of P_h on B_p.

    Maximizes besov(w o h)/besov(w) over ``trials`` seeded smooth bumps
    supported in (-X/2, X/2), plus one bump placed where h is affine (a
    direction on which the ratio is 1 up to quadrature).
    """
    grid = h.grid
    X = grid.half_width
    rng = np.random.default_rng(seed)
    family = [random_smooth(grid, rng, support=(-X / 2, X / 2), amplitude=1.0)
              for _ in range(trials)]
    witness = _affine_witness(h)
    if witness is not None:
        family.append(SampledFunction(grid, witness))
    best = 0.0
    for w in family:
        base = besov_seminorm(w, p).value
        if base == 0:
            continue
        best = max(best, besov_seminorm(variable_change(w, h), p).value / base)
    return best
