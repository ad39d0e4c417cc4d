"""Grids, sampled functions and monotone maps shared by every other module.

Everything here is an immutable value object plus a handful of pure
functions: cubic Hermite interpolation, cumulative quadrature of the same
interpolant, and bisection inversion of increasing maps.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "LineGrid",
    "CircleGrid",
    "SampledFunction",
    "MonotoneMap",
    "make_line_grid",
    "make_circle_grid",
    "hermite_slopes",
    "interpolate",
    "integrate_cumulative",
    "invert_monotone",
    "identity_map",
]

DEFAULT_HALF_WIDTH = 8.0
DEFAULT_LINE_COUNT = 4096
DEFAULT_CIRCLE_COUNT = 2048


@dataclass(frozen=True)
class LineGrid:
    """Uniform grid x_j = -X + j*(2X/M), j = 0..M, on the window [-X, X]."""

    half_width: float
    node_count: int

    def __post_init__(self):
        X, M = self.half_width, self.node_count
        if not np.isfinite(X) or X <= 0:
            raise ValueError(f"nonpositive half-width {X!r}")
        if int(M) != M or M < 16 or M % 2:
            raise ValueError(f"node count must be an even integer >= 16, got {M!r}")
        object.__setattr__(self, "half_width", float(X))
        object.__setattr__(self, "node_count", int(M))

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_width / self.node_count

    @property
    def nodes(self) -> np.ndarray:
        return -self.half_width + self.spacing * np.arange(self.node_count + 1)

    @property
    def size(self) -> int:
        return self.node_count + 1

    @property
    def origin_index(self) -> int:
        return self.node_count // 2


@dataclass(frozen=True)
class CircleGrid:
    """Angles 2*pi*j/N, j = 0..N-1, with N a power of two."""

    node_count: int

    def __post_init__(self):
        N = self.node_count
        if int(N) != N or N < 16 or (int(N) & (int(N) - 1)):
            raise ValueError(f"circle node count must be a power of two >= 16, got {N!r}")
        object.__setattr__(self, "node_count", int(N))

    @property
    def spacing(self) -> float:
        return 2.0 * np.pi / self.node_count

    @property
    def nodes(self) -> np.ndarray:
        return self.spacing * np.arange(self.node_count)

    @property
    def size(self) -> int:
        return self.node_count


def make_line_grid(X: float = DEFAULT_HALF_WIDTH, M: int = DEFAULT_LINE_COUNT) -> LineGrid:
    return LineGrid(X, M)


def make_circle_grid(N: int = DEFAULT_CIRCLE_COUNT) -> CircleGrid:
    return CircleGrid(N)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """Complex samples aligned with a line or circle grid.

    With ``modulo_constant`` set the function is a class modulo additive
    constants; norms and comparisons then work with the mean-zero
    representative (see :meth:`normalized`).
    """

    grid: LineGrid | CircleGrid
    values: np.ndarray
    modulo_constant: bool = False
    note: str = field(default="", compare=False)

    def __post_init__(self):
        v = np.asarray(self.values)
        v = v.astype(np.float64 if np.isrealobj(v) else np.complex128)
        if v.ndim != 1 or v.shape[0] != self.grid.size:
            raise ValueError(f"expected {self.grid.size} samples, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("samples must be finite")
        object.__setattr__(self, "values", _frozen(v))

    @classmethod
    def from_callable(cls, grid, fn, modulo_constant=False):
        return cls(grid, fn(grid.nodes), modulo_constant)

    @property
    def is_line(self) -> bool:
        return isinstance(self.grid, LineGrid)

    @property
    def is_real(self) -> bool:
        return np.isrealobj(self.values) or bool(np.all(self.values.imag == 0))

    @property
    def real(self) -> "SampledFunction":
        return SampledFunction(self.grid, self.values.real, self.modulo_constant)

    @property
    def imag(self) -> "SampledFunction":
        return SampledFunction(self.grid, np.imag(self.values), self.modulo_constant)

    def mean(self):
        """Grid mean: trapezoid average on a line window, plain average on the circle."""
        v = self.values
        if self.is_line:
            return (v.sum() - 0.5 * (v[0] + v[-1])) / self.grid.node_count
        return v.mean()

    def normalized(self) -> "SampledFunction":
        if not self.modulo_constant:
            return self
        return SampledFunction(self.grid, self.values - self.mean(), True)

    def with_values(self, values, modulo_constant=None) -> "SampledFunction":
        mc = self.modulo_constant if modulo_constant is None else modulo_constant
        return SampledFunction(self.grid, values, mc)

    def __add__(self, other):
        if isinstance(other, SampledFunction):
            _check_same_grid(self, other)
            return self.with_values(self.values + other.values,
                                    self.modulo_constant and other.modulo_constant)
        return self.with_values(self.values + other)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, SampledFunction):
            _check_same_grid(self, other)
            return self.with_values(self.values - other.values,
                                    self.modulo_constant and other.modulo_constant)
        return self.with_values(self.values - other)

    def __mul__(self, a):
        return self.with_values(self.values * a)

    __rmul__ = __mul__

    def __neg__(self):
        return self.with_values(-self.values)

    def sup_distance(self, other: "SampledFunction") -> float:
        _check_same_grid(self, other)
        a, b = self.normalized().values, other.normalized().values
        return float(np.max(np.abs(a - b)))


def _check_same_grid(a, b):
    if a.grid != b.grid:
        raise ValueError(f"grid mismatch: {a.grid} vs {b.grid}")


@dataclass(frozen=True, eq=False)
class MonotoneMap:
    """Increasing map of R: samples on a line grid, affine tails outside it.

    ``slopes`` optionally carries exact derivatives at the nodes (for
    example e^u for the homeomorphism generated by u); when absent they
    are estimated from the samples.
    """

    grid: LineGrid
    values: np.ndarray
    tail_offsets: tuple[float, float]
    tail_slopes: tuple[float, float]
    slopes: np.ndarray | None = field(default=None)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.shape != (self.grid.size,):
            raise ValueError(f"expected {self.grid.size} samples, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("samples must be finite")
        bad = np.nonzero(np.diff(v) <= 0)[0]
        if bad.size:
            raise ValueError(f"not monotone at {int(bad[0]) + 1}")
        s_lo, s_hi = (float(s) for s in self.tail_slopes)
        if not (s_lo > 0 and s_hi > 0):
            raise ValueError(f"tail slopes must be positive, got {self.tail_slopes}")
        object.__setattr__(self, "values", _frozen(v))
        object.__setattr__(self, "tail_offsets", tuple(float(c) for c in self.tail_offsets))
        object.__setattr__(self, "tail_slopes", (s_lo, s_hi))
        if self.slopes is not None:
            d = np.asarray(self.slopes, dtype=np.float64)
            if d.shape != v.shape or np.any(d < 0):
                raise ValueError("slopes must be nonnegative and aligned with the nodes")
            object.__setattr__(self, "slopes", _frozen(d))

    @classmethod
    def from_samples(cls, grid, values, slopes=None):
        """Build the map with tails continuing the end slopes."""
        values = np.asarray(values, dtype=np.float64)
        X = grid.half_width
        if slopes is None:
            d = hermite_slopes(values, grid.spacing)
            s_lo, s_hi = d[0], d[-1]
        else:
            s_lo, s_hi = slopes[0], slopes[-1]
        c_lo = values[0] + s_lo * X
        c_hi = values[-1] - s_hi * X
        return cls(grid, values, (c_lo, c_hi), (s_lo, s_hi), slopes)

    def __call__(self, x):
        return interpolate(self, x)

    def compose(self, inner: "MonotoneMap") -> "MonotoneMap":
        """self o inner, sampled on inner's grid."""
        vals = interpolate(self, inner.values)
        slopes = None
        if self.slopes is not None and inner.slopes is not None:
            slopes = _hermite_eval(self.grid, self.values, self._slopes(), inner.values,
                                   derivative=True) * inner.slopes
        c_lo = self.tail_slopes[0] * inner.tail_offsets[0] + self.tail_offsets[0]
        c_hi = self.tail_slopes[1] * inner.tail_offsets[1] + self.tail_offsets[1]
        s_lo = self.tail_slopes[0] * inner.tail_slopes[0]
        s_hi = self.tail_slopes[1] * inner.tail_slopes[1]
        return MonotoneMap(inner.grid, vals, (c_lo, c_hi), (s_lo, s_hi), slopes)

    def _slopes(self) -> np.ndarray:
        if self.slopes is not None:
            d = np.array(self.slopes)
        else:
            d = hermite_slopes(self.values, self.grid.spacing)
        return _fritsch_carlson_limit(self.values, d, self.grid.spacing)


def identity_map(grid: LineGrid) -> MonotoneMap:
    x = grid.nodes
    return MonotoneMap(grid, x, (0.0, 0.0), (1.0, 1.0), np.ones_like(x))


def hermite_slopes(values: np.ndarray, h: float, periodic: bool = False) -> np.ndarray:
    """Node derivatives by fourth-order centered differences.

    Second-order stencils are used next to the ends of an open grid.
    """
    g = np.asarray(values)
    if periodic:
        return (-np.roll(g, -2) + 8 * np.roll(g, -1) - 8 * np.roll(g, 1) + np.roll(g, 2)) / (12 * h)
    n = g.shape[0]
    d = np.empty_like(g)
    d[2:-2] = (-g[4:] + 8 * g[3:-1] - 8 * g[1:-3] + g[:-4]) / (12 * h)
    d[1] = (g[2] - g[0]) / (2 * h)
    d[n - 2] = (g[n - 1] - g[n - 3]) / (2 * h)
    d[0] = (-3 * g[0] + 4 * g[1] - g[2]) / (2 * h)
    d[n - 1] = (3 * g[n - 1] - 4 * g[n - 2] + g[n - 3]) / (2 * h)
    return d


def edge_tails(values, h: float, X: float):
    """Tail model c0 + a/t + b/t^2 on each side of the window.

    Matches value, slope and second derivative at t = -X and t = X (fourth
    and third order one-sided stencils). Exact for constants, 1/t and 1/t^2,
    so data supported in the window, constant offsets and Hilbert-type decay
    all continue correctly. Returns ((c0, a, b) left, (c0, a, b) right).
    """
    g = np.asarray(values)
    out = []
    for k, sign in ((slice(0, 5), -1.0), (slice(-1, -6, -1), 1.0)):
        e = g[k]
        # derivatives with respect to the outward coordinate |t|
        d = (-25 * e[0] + 48 * e[1] - 36 * e[2] + 16 * e[3] - 3 * e[4]) / (-12 * h)
        s2 = (35 * e[0] - 104 * e[1] + 114 * e[2] - 56 * e[3] + 11 * e[4]) / (12 * h * h)
        b = X ** 4 * s2 / 2 + X ** 3 * d
        a = -3 * X * X * d - X ** 3 * s2
        c0 = e[0] + 2 * X * d + X * X * s2 / 2
        out.append((c0, sign * a, b))
    return out[0], out[1]


def tail_eval(coef, t):
    c0, a, b = coef
    return c0 + a / t + b / (t * t)


def _fritsch_carlson_limit(values, d, h):
    # Fritsch-Carlson: rescale slope pairs whose (alpha, beta) leave the radius-3 disk.
    y = np.asarray(values, dtype=np.float64)
    d = np.maximum(np.asarray(d, dtype=np.float64), 0.0)
    delta = np.diff(y) / h
    alpha = d[:-1] / delta
    beta = d[1:] / delta
    r2 = alpha ** 2 + beta ** 2
    bad = np.nonzero(r2 > 9.0)[0]
    for k in bad:
        tau = 3.0 / np.sqrt(r2[k])
        d[k] = min(d[k], tau * alpha[k] * delta[k])
        d[k + 1] = min(d[k + 1], tau * beta[k] * delta[k])
    return d


def _hermite_eval(grid, values, slopes, x, derivative=False):
    x = np.asarray(x, dtype=np.float64)
    h = grid.spacing
    if isinstance(grid, CircleGrid):
        s = np.mod(x, 2 * np.pi) / h
        k = np.floor(s).astype(np.intp)
        t = s - k
        k = np.mod(k, grid.node_count)
        k1 = np.mod(k + 1, grid.node_count)
    else:
        s = (x + grid.half_width) / h
        k = np.clip(np.floor(s).astype(np.intp), 0, grid.node_count - 1)
        t = s - k
        k1 = k + 1
    y0, y1 = values[k], values[k1]
    m0, m1 = slopes[k] * h, slopes[k1] * h
    if derivative:
        t2 = t * t
        return ((6 * t2 - 6 * t) * (y0 - y1) + (3 * t2 - 4 * t + 1) * m0 + (3 * t2 - 2 * t) * m1) / h
    t2 = t * t
    t3 = t2 * t
    return ((2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * m0
            + (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * m1)


def interpolate(f, x):
    """Evaluate a sampled function or monotone map at arbitrary points.

    Inside the window this is the cubic Hermite interpolant through the
    samples; for a :class:`MonotoneMap` the slopes are Fritsch-Carlson
    limited so the interpolant stays increasing. Outside the window a
    monotone map follows its affine tails and a line function continues as
    c0 + c1/x, matched to the value and slope at the nearer edge: constants
    stay constant, 1/x decay stays exact, and data supported inside the
    window continues by zero. Circle functions are periodic.
    """
    scalar = np.ndim(x) == 0
    x = np.asarray(x, dtype=np.float64)
    grid = f.grid
    if isinstance(f, MonotoneMap):
        out = _hermite_eval(grid, f.values, f._slopes(), x)
        X = grid.half_width
        lo, hi = x < -X, x > X
        out = np.where(lo, f.tail_slopes[0] * x + f.tail_offsets[0], out)
        out = np.where(hi, f.tail_slopes[1] * x + f.tail_offsets[1], out)
    elif isinstance(grid, CircleGrid):
        d = hermite_slopes(f.values, grid.spacing, periodic=True)
        out = _hermite_eval(grid, f.values, d, x)
    else:
        d = hermite_slopes(f.values, grid.spacing)
        out = _hermite_eval(grid, f.values, d, x)
        X = grid.half_width
        lo, hi = x < -X, x > X
        if lo.any() or hi.any():
            left, right = edge_tails(f.values, grid.spacing, X)
            out = np.array(out, copy=True)
            out[lo] = tail_eval(left, x[lo])
            out[hi] = tail_eval(right, x[hi])
    if scalar:
        return out[()]
    return out


def _cell_integrals(values, h):
    d = hermite_slopes(values, h)
    return 0.5 * h * (values[:-1] + values[1:]) + (h * h / 12.0) * (d[:-1] - d[1:])


def integrate_cumulative(g: SampledFunction) -> SampledFunction:
    """Cumulative integral of g anchored at 0, i.e. x -> int_0^x g.

    Each cell contributes the exact integral of the Hermite interpolant,
    which is the trapezoid rule plus the end-slope correction
    h^2/12 (g'(a) - g'(b)).
    """
    if not isinstance(g.grid, LineGrid):
        raise TypeError("integrate_cumulative needs a line grid")
    cells = _cell_integrals(g.values, g.grid.spacing)
    acc = np.concatenate([[0.0], np.cumsum(cells)])
    acc = acc - acc[g.grid.origin_index]
    return SampledFunction(g.grid, acc, False)


def invert_monotone(f: MonotoneMap, tol: float = 1e-13) -> MonotoneMap:
    """Inverse map sampled on f's grid, by bisection at every node."""
    grid = f.grid
    y = grid.nodes
    X = grid.half_width
    s_lo, s_hi = f.tail_slopes
    c_lo, c_hi = f.tail_offsets
    lo = np.full_like(y, -X)
    hi = np.full_like(y, X)
    below = y < f.values[0]
    above = y > f.values[-1]
    inside = ~(below | above)
    out = np.empty_like(y)
    out[below] = (y[below] - c_lo) / s_lo
    out[above] = (y[above] - c_hi) / s_hi
    if np.any(inside):
        yi = y[inside]
        k = np.clip(np.searchsorted(f.values, yi, side="right") - 1, 0, grid.node_count - 1)
        a = grid.nodes[k]
        b = a + grid.spacing
        lo, hi = a, b
        slopes = f._slopes()
        n_iter = int(np.ceil(np.log2(grid.spacing / tol))) + 2
        for _ in range(max(n_iter, 1)):
            mid = 0.5 * (lo + hi)
            fm = _hermite_eval(grid, f.values, slopes, mid)
            left = fm < yi
            lo = np.where(left, mid, lo)
            hi = np.where(left, hi, mid)
        out[inside] = 0.5 * (lo + hi)
    inv_slopes = None
    if f.slopes is not None:
        fp = _hermite_eval(grid, f.values, f._slopes(), out, derivative=True)
        fp = np.where(below, s_lo, np.where(above, s_hi, fp))
        inv_slopes = 1.0 / fp
    return MonotoneMap(grid, out,
                       (-c_lo / s_lo, -c_hi / s_hi),
                       (1.0 / s_lo, 1.0 / s_hi),
                       inv_slopes)
