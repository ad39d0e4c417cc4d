"""Seminorms and singular integrals for functions on the line and the circle.

Besov seminorms are computed by direct double sums, BMO-type quantities by
scanning a dyadic family of intervals, the line Hilbert transform by a
principal-value quadrature, and circle conjugation as a Fourier multiplier.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._parallel import block_map
from .grids import (
    CircleGrid,
    LineGrid,
    SampledFunction,
    edge_tails,
    hermite_slopes,
    interpolate,
    make_circle_grid,
    tail_eval,
)

__all__ = [
    "NormReport",
    "besov_seminorm",
    "bmo_norm",
    "vmo_defect",
    "a_infty_constant",
    "conjugate_circle",
    "hilbert_line",
    "cayley",
    "cayley_line_to_circle",
    "cayley_circle_to_line",
]

_ROW_BLOCK = 128


@dataclass(frozen=True)
class NormReport:
    value: float
    p: float | None
    method: str
    truncation_note: str = ""

    def to_dict(self):
        return {"value": self.value, "p": self.p, "method": self.method,
                "truncation_note": self.truncation_note}


# -- Besov -------------------------------------------------------------------

def _trapezoid_weights(n, h):
    w = np.full(n, h)
    w[0] = w[-1] = 0.5 * h
    return w


def _diagonal_cell(du, h, p):
    # integral of |u'|^p |d|^(p-2) over the skipped cell |d| < h/2
    return np.abs(du) ** p * 2.0 * (0.5 * h) ** (p - 1) / (p - 1)


def besov_seminorm(u: SampledFunction, p: float = 2.0, method: str = "double_sum") -> NormReport:
    """Unsquared p-Besov seminorm

        ||u||^p = (1/4 pi^2) iint |u(t) - u(s)|^p / |t - s|^2 ds dt

    on the line, or the same with chordal distance |e^it - e^is| on the circle.

    The double sum skips the singular diagonal cell and replaces it with the
    integral of the limiting integrand |u'|^p |t-s|^(p-2) over that cell.
    On the line, the part of the integral with one variable outside the
    window is added in closed form using the tail rule of :func:`interpolate`.
    ``method="fourier"`` (circle, p = 2 only) uses sum |n| |a_n|^2 instead.
    """
    if not p > 1:
        raise ValueError(f"p must exceed 1 (B_p degenerates at p = 1), got {p}")
    if method == "fourier":
        return _besov_fourier(u, p)
    if method != "double_sum":
        raise ValueError(f"unknown method {method!r}")
    if u.is_line:
        return _besov_line(u, p)
    return _besov_circle(u, p)


def _besov_fourier(u, p):
    if u.is_line or p != 2:
        raise ValueError("the Fourier route is only available for circle data with p = 2")
    N = u.grid.node_count
    a = np.fft.fft(u.values) / N
    n = np.fft.fftfreq(N, d=1.0 / N)
    a[N // 2] = 0.0
    val = float(np.sqrt(np.sum(np.abs(n) * np.abs(a) ** 2)))
    return NormReport(val, p, "fourier", f"Fourier modes |n| < {N // 2}")


def _besov_line(u, p):
    grid: LineGrid = u.grid
    v = u.normalized().values
    x = grid.nodes
    h = grid.spacing
    X = grid.half_width
    n = v.shape[0]
    w = _trapezoid_weights(n, h)

    def rows(a, b):
        dv = np.abs(v[a:b, None] - v[None, :]) ** p
        dx = x[a:b, None] - x[None, :]
        idx = np.arange(a, b)
        dx[idx - a, idx] = 1.0
        q = dv / (dx * dx)
        q[idx - a, idx] = 0.0
        return (q * w[None, :]).sum(axis=1)

    inner = block_map(rows, n, _ROW_BLOCK)
    du = hermite_slopes(v, h)
    inner = inner + _diagonal_cell(du, h, p)
    # outside the window u continues by the tail model of edge_tails
    left, right = edge_tails(v, h, X)
    (c_lo, a_lo, b_lo), (c_hi, a_hi, b_hi) = left, right
    scale = float(np.max(np.abs(v)))
    note = f"window [-{X:g}, {X:g}]; tails c0 + a/t + b/t^2 added"
    if abs(c_hi - c_lo) > _LIMIT_TOL * scale:
        note += f"; limits at +-inf differ by {abs(c_hi - c_lo):.3g}, seminorm diverges"
        return NormReport(float("inf"), p, "double_sum", note)
    c = 0.5 * (c_lo + c_hi)
    right, left = (c, a_hi, b_hi), (c, a_lo, b_lo)
    mixed = (_mixed_tail(v, X - x, h, lambda t: tail_eval(right, t), X, p)
             + _mixed_tail(v, X + x, h, lambda t: tail_eval(left, -t), X, p))
    total = np.sum(w * (inner + 2.0 * mixed))
    total += 2.0 * _opposite_tails(a_hi / X, b_hi / X ** 2, -a_lo / X, b_lo / X ** 2, p)
    total += _same_side(a_hi / X, b_hi / X ** 2, p) + _same_side(-a_lo / X, b_lo / X ** 2, p)
    total /= 4.0 * np.pi ** 2
    return NormReport(float(total ** (1.0 / p)), p, "double_sum", note)


# relative gap between the fitted limits at +-inf beyond which B_p is infinite
_LIMIT_TOL = 0.05
_XI = np.arange(-36.0, 36.0, 0.125)
_GL_X, _GL_W = np.polynomial.legendre.leggauss(64)


def _mixed_tail(v, dist, h, tail, X, p):
    """int_{r > 0} |v_s - tail(X + r)|^p / (r + d)^2 dr per node, d the distance to the edge.

    r = d e^xi, trapezoid in xi; the integrand decays exponentially both ways.
    """
    d = np.maximum(dist, 0.5 * h)
    out = np.zeros_like(d)
    for xi in _XI:
        r = d * np.exp(xi)
        out += np.abs(v - tail(X + r)) ** p * r / (r + d) ** 2
    return out * 0.125


def _opposite_tails(a1, b1, a2, b2, p):
    # t = X/s, t' = -X/s': iint |(a1 s + b1 s^2) - (a2 s' + b2 s'^2)|^p / (s + s')^2 over [0, 1]^2
    g = 0.5 * (_GL_X + 1)
    wg = 0.5 * _GL_W
    A, B = np.meshgrid(g, g, indexing="ij")
    f = np.abs(a1 * A + b1 * A * A - a2 * B - b2 * B * B) ** p / (A + B) ** 2
    return float(wg @ f @ wg)


def _same_side(a1, b1, p):
    # iint |tau - sigma|^(p-2) |a1 + b1 (tau + sigma)|^p over [0, 1]^2, in m = tau + sigma
    g = 0.5 * (_GL_X + 1)
    wg = 0.5 * _GL_W
    total = 0.0
    for m, L in ((g, g), (1 + g, 1 - g)):
        total += float(np.sum(wg * np.abs(a1 + b1 * m) ** p * L ** (p - 1))) / (p - 1)
    return total


def _besov_circle(u, p):
    grid: CircleGrid = u.grid
    v = u.normalized().values
    N = grid.node_count
    h = grid.spacing
    # chordal kernel depends on the index gap only
    gap = np.arange(N)
    chord2 = 4.0 * np.sin(0.5 * h * gap) ** 2
    chord2[0] = 1.0
    kern = 1.0 / chord2
    kern[0] = 0.0

    def rows(a, b):
        idx = np.arange(a, b)
        k = kern[np.mod(idx[:, None] - gap[None, :], N)]
        dv = np.abs(v[a:b, None] - v[None, :]) ** p
        return (dv * k).sum(axis=1) * h

    inner = block_map(rows, N, _ROW_BLOCK)
    du = hermite_slopes(v, h, periodic=True)
    inner = inner + _diagonal_cell(du, h, p)
    total = np.sum(inner) * h / (4.0 * np.pi ** 2)
    return NormReport(float(total ** (1.0 / p)), p, "double_sum", f"circle N = {N}")


# -- dyadic interval scans ----------------------------------------------------

def _dyadic_windows(grid: LineGrid, min_nodes: int = 2, max_length: float | None = None):
    """Yield (length, node_span, start_indices) for every dyadic scale.

    Lengths are 2X/2^k; windows start at half-length steps.
    """
    M = grid.node_count
    span = M
    while span >= min_nodes:
        length = span * grid.spacing
        if max_length is None or length <= max_length * (1 + 1e-12):
            step = max(span // 2, 1)
            starts = np.arange(0, M - span + 1, step)
            yield length, span, starts
        if span % 2:
            break
        span //= 2


def _window_stack(values, span, starts):
    win = np.lib.stride_tricks.sliding_window_view(values, span + 1)
    return win[starts]


def _interval_means(stack, span):
    w = np.ones(span + 1)
    w[0] = w[-1] = 0.5
    return (stack * w).sum(axis=-1) / span, w


def _mean_oscillation(values, span, starts):
    stack = _window_stack(values, span, starts)
    mean, w = _interval_means(stack, span)
    dev = (np.abs(stack - mean[:, None]) * w).sum(axis=-1) / span
    return dev


def bmo_norm(u: SampledFunction) -> NormReport:
    """Sup of the mean oscillation (1/|I|) int_I |u - u_I| over dyadic intervals.

    A lower bound for the true supremum over all intervals; it converges as
    the grid is refined.
    """
    if not u.is_line:
        raise TypeError("bmo_norm needs a line grid")
    v = u.values
    best = 0.0
    for _, span, starts in _dyadic_windows(u.grid):
        best = max(best, float(_mean_oscillation(v, span, starts).max()))
    return NormReport(best, None, "dyadic_sup", "dyadic intervals at half-length offsets")


def vmo_defect(u: SampledFunction, scale: float) -> float:
    """Largest dyadic mean oscillation over intervals no longer than ``scale``."""
    if not u.is_line:
        raise TypeError("vmo_defect needs a line grid")
    if scale < 2 * u.grid.spacing * (1 - 1e-12):
        raise ValueError(f"scale {scale} is below two grid spacings and cannot be resolved")
    v = u.values
    best = 0.0
    for _, span, starts in _dyadic_windows(u.grid, max_length=scale):
        best = max(best, float(_mean_oscillation(v, span, starts).max()))
    return best


def a_infty_constant(omega: SampledFunction, floor: float) -> NormReport:
    """Sup over dyadic intervals of avg(omega) / exp(avg(log omega))."""
    if not omega.is_line:
        raise TypeError("a_infty_constant needs a line grid")
    if not floor > 0:
        raise ValueError("floor must be positive")
    if not omega.is_real:
        raise ValueError("weight must be real")
    w = np.real(omega.values)
    low = np.nonzero(w < floor)[0]
    if low.size:
        raise ValueError(f"weight degenerate: sample {int(low[0])} is below floor {floor}")
    lw = np.log(w)
    best = 1.0
    for _, span, starts in _dyadic_windows(omega.grid):
        a, _ = _interval_means(_window_stack(w, span, starts), span)
        g, _ = _interval_means(_window_stack(lw, span, starts), span)
        best = max(best, float(np.max(a / np.exp(g))))
    return NormReport(best, None, "dyadic_sup", "dyadic intervals at half-length offsets")


# -- conjugation ----------------------------------------------------------------

def conjugate_circle(u: SampledFunction) -> SampledFunction:
    """Conjugate function on the circle: multiply Fourier modes by -i sgn(n).

    The zero mode and the Nyquist mode are discarded.
    """
    if u.is_line:
        raise TypeError("conjugate_circle needs a circle grid")
    N = u.grid.node_count
    a = np.fft.fft(u.values)
    n = np.fft.fftfreq(N, d=1.0 / N)
    m = -1j * np.sign(n)
    m[N // 2] = 0.0
    out = np.fft.ifft(a * m)
    if u.is_real:
        out = out.real
    return SampledFunction(u.grid, out, u.modulo_constant)


def _pv_kernel_sum(f, h):
    """sum_{k != j} f_k / ((j - k) h) for all j, as one FFT convolution."""
    n = f.shape[0]
    L = 1 << int(np.ceil(np.log2(2 * n)))
    m = np.arange(-(n - 1), n)
    k = np.zeros(2 * n - 1)
    nz = m != 0
    k[nz] = 1.0 / (m[nz] * h)
    kk = np.zeros(L)
    kk[: n] = k[n - 1:]
    kk[L - (n - 1):] = k[: n - 1]
    if np.iscomplexobj(f):
        return _pv_kernel_sum(f.real, h) + 1j * _pv_kernel_sum(f.imag, h)
    ff = np.zeros(L)
    ff[:n] = f
    out = np.fft.irfft(np.fft.rfft(ff) * np.fft.rfft(kk), L)
    return out[:n]


def _tail_mass(x, X, log_hi, a, b):
    """int_X^inf (a/t + b/t^2) / (x - t) dt, with log_hi = log((X - x)/X) clipped by the caller."""
    out = np.empty_like(x)
    small = np.abs(x) < 1e-3 * X
    r = x[small] / X
    out[small] = -a / X * (1 + r / 2 + r * r / 3) - b / X ** 2 * (0.5 + r / 3 + r * r / 4)
    xb, lb = x[~small], log_hi[~small]
    out[~small] = a * lb / xb + b * (1 / (xb * X) + lb / xb ** 2)
    return out


def hilbert_line(u: SampledFunction, tail: str = "decay") -> SampledFunction:
    """(Hu)(x) = (1/pi) PV int u(t) / (x - t) dt.

    At node x_j the integrand is regularized by subtracting u(x_j):
    the trapezoid sum of (u(t) - u(x_j)) / (x_j - t) (whose value on the
    diagonal is -u'(x_j)) plus u(x_j) log((X + x_j) / (X - x_j)), the exact
    principal value of int dt / (x_j - t) over [-X, X].

    ``tail="decay"`` continues u outside the window by the tail model
    c0 + a/t + b/t^2 of :func:`edge_tails` and adds that mass in closed form.
    This covers the 1/t decay of a Hilbert transform of compactly supported
    data and the 1/t^2 decay of a Poisson kernel. If the limits c0 at the
    two ends differ the integral diverges logarithmically; the divergent
    part is dropped and noted. ``tail="none"`` drops it.
    Both logarithms are clipped at h/2, so the endpoint singularities cancel.
    """
    if not u.is_line:
        raise TypeError("hilbert_line needs a line grid")
    if tail not in ("decay", "none"):
        raise ValueError(f"unknown tail model {tail!r}")
    grid: LineGrid = u.grid
    v = u.values
    h = grid.spacing
    X = grid.half_width
    x = grid.nodes
    w = _trapezoid_weights(v.shape[0], h)
    s_uv = _pv_kernel_sum(w * v, h)
    s_1 = _pv_kernel_sum(w, h)
    du = hermite_slopes(v, h)
    lo = np.log(np.maximum(X + x, 0.5 * h) / X)
    hi = np.log(np.maximum(X - x, 0.5 * h) / X)
    out = s_uv - v * s_1 - w * du + v * (lo - hi)
    note = f"window [-{X:g}, {X:g}], tail {tail}"
    if tail == "decay":
        (c_lo, a_lo, b_lo), (c_hi, a_hi, b_hi) = edge_tails(v, h, X)
        out = out + _tail_mass(x, X, hi, a_hi, b_hi) - _tail_mass(-x, X, lo, -a_lo, b_lo)
        # constant parts: only the symmetric piece has a principal value
        out = out + c_hi * hi - c_lo * lo
        if abs(c_hi - c_lo) > 1e-9 * max(1.0, float(np.max(np.abs(v)))):
            note += f"; limits differ by {abs(c_hi - c_lo):.3g}, divergent part dropped"
    out = out / np.pi
    note += f"; edge magnitude {float(max(abs(v[0]), abs(v[-1]))):.3g}"
    return SampledFunction(grid, out, u.modulo_constant, note=note)


# -- Cayley transport -----------------------------------------------------------

def cayley(z):
    """T(z) = (z - i) / (z + i), carrying the upper half-plane onto the disk."""
    z = np.asarray(z, dtype=np.complex128)
    return (z - 1j) / (z + 1j)


def cayley_line_to_circle(u: SampledFunction, grid: CircleGrid | None = None) -> SampledFunction:
    """Transport u on the line to u o T^{-1} on the circle (theta = 0 is infinity)."""
    if not u.is_line:
        raise TypeError("expected a line function")
    grid = grid or make_circle_grid()
    th = grid.nodes
    with np.errstate(divide="ignore"):
        x = -1.0 / np.tan(0.5 * th)
    x[0] = np.inf
    vals = interpolate(u, np.where(np.isfinite(x), x, 0.0))
    # theta = 0 is the point at infinity: the common limit of the tail model
    left, right = edge_tails(u.values, u.grid.spacing, u.grid.half_width)
    vals = np.where(np.isfinite(x), vals, 0.5 * (left[0] + right[0]))
    return SampledFunction(grid, vals, u.modulo_constant)


def cayley_circle_to_line(u: SampledFunction, grid: LineGrid) -> SampledFunction:
    """Transport u on the circle back to u o T on the line grid."""
    if u.is_line:
        raise TypeError("expected a circle function")
    th = 2.0 * np.arctan2(1.0, -grid.nodes)
    return SampledFunction(grid, interpolate(u, th), u.modulo_constant)
