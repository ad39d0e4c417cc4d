"""Truncated power series: pre-Schwarzian, Schwarzian, analytic norms, boundary traces.

A series with ``domain="disk"`` holds the Taylor coefficients of a function
on the unit disk about 0. With ``domain="halfplane_via_cayley"`` it holds the
coefficients of a function on the upper half-plane in powers of (z - i);
:func:`cayley_conjugate_series` moves between the two pictures through the
Cayley map T(z) = (z - i)/(z + i).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from ._parallel import block_map
from .grids import CircleGrid, SampledFunction
from .spaces import NormReport

__all__ = [
    "PowerSeries",
    "pre_schwarzian",
    "alpha_map",
    "schwarzian",
    "analytic_norm",
    "boundary_trace",
    "cayley_conjugate_series",
    "mobius_series",
]

DOMAINS = ("disk", "halfplane_via_cayley")
DEFAULT_DEGREE = 64
CUTOFF = 1e-3


@dataclass(frozen=True, eq=False)
class PowerSeries:
    coefficients: np.ndarray
    domain_tag: str = "disk"

    def __post_init__(self):
        c = np.array(self.coefficients, dtype=np.complex128)
        if c.ndim != 1 or c.shape[0] < 2:
            raise ValueError("a power series needs degree D >= 1")
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        if self.domain_tag not in DOMAINS:
            raise ValueError(f"unknown domain {self.domain_tag!r}")
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)

    @property
    def degree(self) -> int:
        return self.coefficients.shape[0] - 1

    @classmethod
    def monomial(cls, n: int, degree: int = DEFAULT_DEGREE, scale=1.0, domain_tag="disk"):
        c = np.zeros(max(degree, n, 1) + 1, dtype=np.complex128)
        c[n] = scale
        return cls(c, domain_tag)

    def __call__(self, z):
        z = np.asarray(z, dtype=np.complex128)
        if self.domain_tag == "halfplane_via_cayley":
            z = z - 1j
        out = np.zeros_like(z)
        for a in self.coefficients[::-1]:
            out = out * z + a
        return out

    def derivative_coefficients(self) -> np.ndarray:
        c = self.coefficients
        return c[1:] * np.arange(1, c.shape[0])

    def __mul__(self, a):
        return PowerSeries(self.coefficients * a, self.domain_tag)

    __rmul__ = __mul__


def _mul(a, b, D):
    return np.convolve(a, b)[: D + 1]


def pre_schwarzian(g_prime: PowerSeries) -> PowerSeries:
    """L_g = log g', as a formal series truncated at the degree of g'.

    The constant term is the principal log of g'(0); the rest comes from
    n L_n = n b_n - sum_{k<n} k L_k b_{n-k}, b = g'/g'(0).
    """
    a = g_prime.coefficients
    if a[0] == 0:
        raise ValueError("locally non-univalent at 0: g'(0) = 0")
    b = a / a[0]
    D = g_prime.degree
    L = np.zeros(D + 1, dtype=np.complex128)
    L[0] = np.log(a[0])
    k = np.arange(D + 1)
    for n in range(1, D + 1):
        L[n] = b[n] - np.dot(k[1:n] * L[1:n], b[n - 1:0:-1]) / n
    return PowerSeries(L, g_prime.domain_tag)


def alpha_map(phi: PowerSeries) -> PowerSeries | np.ndarray:
    """alpha(phi) = phi'' - (phi')^2 / 2, truncated at degree D - 2.

    For D = 2 the result is a constant; it is returned as a length-1 array
    since a PowerSeries needs degree at least 1.
    """
    D = phi.degree
    if D < 2:
        raise ValueError(f"alpha needs degree >= 2, got {D}")
    d1 = phi.derivative_coefficients()
    d2 = d1[1:] * np.arange(1, d1.shape[0])
    out = d2 - 0.5 * _mul(d1, d1, D - 2)
    if D == 2:
        return out
    return PowerSeries(out, phi.domain_tag)


def schwarzian(g_prime: PowerSeries):
    """S_g = alpha(log g')."""
    return alpha_map(pre_schwarzian(g_prime))


def mobius_series(a, b, c, d, degree: int = 12) -> PowerSeries:
    """Taylor series at 0 of (a z + b)/(c z + d), d != 0."""
    if d == 0:
        raise ValueError("pole at 0")
    if a * d - b * c == 0:
        raise ValueError("degenerate Mobius map")
    r = -c / d
    geo = r ** np.arange(degree + 1)  # 1/(cz + d) = (1/d) sum (-c/d)^n z^n
    coef = (b * geo + np.r_[0, a * geo[:-1]]) / d
    return PowerSeries(coef)


# -- Cayley transport ------------------------------------------------------------

def _compose(c, s, D):
    """sum c_n s^n truncated at D, s a series with s_0 = 0 (Horner)."""
    out = np.zeros(D + 1, dtype=np.complex128)
    for a in c[::-1]:
        out = _mul(out, s, D)
        out[0] += a
    return out


def cayley_conjugate_series(phi: PowerSeries, target: str | None = None) -> PowerSeries:
    """Move a series between the half-plane (about z = i) and the disk (about 0).

    halfplane -> disk is phi o T^{-1}, with T^{-1}(w) - i = 2i w/(1 - w);
    disk -> halfplane is psi o T, with T(z) = zeta/(2i + zeta), zeta = z - i.
    Both substitutions fix 0, so truncation at D commutes with composition.
    """
    src = phi.domain_tag
    dst = target or ("disk" if src == "halfplane_via_cayley" else "halfplane_via_cayley")
    if dst not in DOMAINS:
        raise ValueError(f"unknown domain {dst!r}")
    if dst == src:
        raise ValueError("target domain must differ from the source")
    D = phi.degree
    k = np.arange(D + 1)
    if src == "halfplane_via_cayley":
        s = np.where(k >= 1, 2j, 0).astype(np.complex128)
    else:
        s = np.where(k >= 1, -((-1.0 / 2j) ** k), 0).astype(np.complex128)
    out = _compose(phi.coefficients, s, D)
    peak = np.max(np.abs(out))
    if peak > 1e12 * max(1.0, np.max(np.abs(phi.coefficients))):
        raise OverflowError(f"truncation overflow: coefficient growth {peak:.3g}")
    return PowerSeries(out, dst)


def _disk_coefficients(phi: PowerSeries, quadratic: bool) -> np.ndarray:
    if phi.domain_tag == "disk":
        return phi.coefficients
    c = cayley_conjugate_series(phi, "disk").coefficients
    if quadratic:
        # (phi o T^{-1}) ((T^{-1})')^2, (T^{-1})'(w)^2 = -4/(1 - w)^4
        n = np.arange(c.shape[0])
        c = _mul(c, -4.0 * (n + 1) * (n + 2) * (n + 3) / 6.0, c.shape[0] - 1)
    return c


# -- analytic norms ----------------------------------------------------------------

def _radial_nodes(cut):
    # composite Gauss-Legendre on [0, 1/2], [1/2, 3/4], ... up to r = cut
    x, w = np.polynomial.legendre.leggauss(24)
    edges = [0.0]
    while 1 - edges[-1] > 2 * (1 - cut):
        edges.append(1 - 0.5 * (1 - edges[-1]))
    edges.append(cut)
    r, wr = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        r.append(0.5 * (b - a) * x + 0.5 * (a + b))
        wr.append(0.5 * (b - a) * w)
    r, wr = np.concatenate(r), np.concatenate(wr)
    # interval ends carry no weight; they only enter the sup kinds
    return np.concatenate([r, edges]), np.concatenate([wr, np.zeros(len(edges))])


def _ring_values(c, r, n_theta):
    # f(r e^{i theta}) on each ring by one inverse FFT per ring
    D = c.shape[0] - 1
    scaled = np.zeros((r.shape[0], n_theta), dtype=np.complex128)
    scaled[:, : D + 1] = c[None, :] * r[:, None] ** np.arange(D + 1)[None, :]
    return np.fft.ifft(scaled, axis=1) * n_theta


def _polar(c, kind, p, cut, n_theta):
    r, wr = _radial_nodes(cut)
    weight = (1 - r * r) / 2

    def block(a, b):
        vals = np.abs(_ring_values(c, r[a:b], n_theta))
        wa = weight[a:b, None]
        if kind == "bloch":
            return (vals * wa).max(axis=1)
        if kind == "a_inf":
            return (vals * wa ** 2).max(axis=1)
        expo = p - 2 if kind == "besov_p" else 2 * p - 2
        ring = (vals ** p).mean(axis=1) * 2 * np.pi * (weight[a:b] ** expo)
        return ring * r[a:b] * wr[a:b] / np.pi

    parts = block_map(block, r.shape[0], 32)
    if kind not in ("bloch", "a_inf"):
        return float(np.sum(parts))
    # sup kinds: zoom in radially around the best ring
    order = np.argsort(r)
    rs, vs = r[order], parts[order]
    best = float(vs.max())
    i = int(np.argmax(vs))
    lo, hi = rs[max(i - 1, 0)], rs[min(i + 1, rs.shape[0] - 1)]
    for _ in range(4):
        rr = np.linspace(lo, hi, 33)
        wt = (1 - rr * rr) / 2
        vals = np.abs(_ring_values(c, rr, n_theta)).max(axis=1)
        vals = vals * (wt if kind == "bloch" else wt ** 2)
        j = int(np.argmax(vals))
        best = max(best, float(vals[j]))
        lo, hi = rr[max(j - 1, 0)], rr[min(j + 1, 32)]
    return best


def analytic_norm(phi: PowerSeries, kind: str, p: float | None = None) -> NormReport:
    """Bloch, analytic p-Besov, A^p or A^inf norm computed on the disk.

    bloch    sup |phi'| (1 - |w|^2)/2
    besov_p  ((1/pi) iint |phi'|^p ((1 - |w|^2)/2)^(p-2))^(1/p)
    a_p      ((1/pi) iint |phi|^p ((1 - |w|^2)/2)^(2p-2))^(1/p)
    a_inf    sup |phi| ((1 - |w|^2)/2)^2

    Half-plane series are moved to the disk first (a_p and a_inf as
    quadratic differentials), which makes every norm equal to its
    half-plane counterpart. Radii run to 1 - eps with eps = 1e-3; the
    integral kinds are Richardson-extrapolated from eps and 2 eps using the
    known order of the cutoff error, and any growth above 10 % between the
    two levels is reported as divergence.
    """
    if kind not in ("bloch", "besov_p", "a_p", "a_inf"):
        raise ValueError(f"unknown norm kind {kind!r}")
    if kind == "besov_p":
        p = 2.0 if p is None else float(p)
        if not p > 1:
            raise ValueError(f"besov_p needs p > 1, got {p}")
    elif kind == "a_p":
        if p is None or p < 1:
            raise ValueError(f"a_p needs p >= 1, got {p}")
        p = float(p)
    c = _disk_coefficients(phi, quadratic=kind in ("a_p", "a_inf"))
    if kind in ("bloch", "besov_p"):
        c = c[1:] * np.arange(1, c.shape[0])
    if not np.any(c):
        return NormReport(0.0, p or 1.0, "polar", "identically zero")
    n_theta = max(64, 1 << int(np.ceil(np.log2(8 * c.shape[0]))))
    fine = _polar(c, kind, p, 1 - CUTOFF, n_theta)
    coarse = _polar(c, kind, p, 1 - 2 * CUTOFF, n_theta)
    if coarse > 0 and fine > 1.1 * coarse:
        raise ArithmeticError(f"norm divergent at cutoff: {coarse:.4g} -> {fine:.4g}")
    note = f"radii up to 1 - {CUTOFF:g}"
    if kind in ("bloch", "a_inf"):
        return NormReport(fine, p or 1.0, "polar", note)
    order = p - 1 if kind == "besov_p" else 2 * p - 1
    value = (2 ** order * fine - coarse) / (2 ** order - 1)
    value = max(value, 0.0)
    return NormReport(value ** (1 / p), p, "polar", note + "; Richardson in the cutoff")


# -- boundary values -----------------------------------------------------------------

def boundary_trace(phi: PowerSeries, grid: CircleGrid) -> SampledFunction:
    """phi(e^{i theta}) on the circle grid by direct summation.

    A series whose top eighth of coefficients carries more than 1e-10 in
    absolute sum is treated as a truncation of a non-summable series: it is
    evaluated at radius 1 - 1e-3 instead, with a warning.
    """
    c = _disk_coefficients(phi, quadratic=False)
    D = c.shape[0] - 1
    tail = np.sum(np.abs(c[D - max(1, D // 8) + 1:]))
    radius = 1.0
    if tail > 1e-10:
        radius = 1 - CUTOFF
        warnings.warn(f"coefficient tail {tail:.3g} not summable at |z| = 1; "
                      f"evaluating at radius {radius}", RuntimeWarning)
        c = c * radius ** np.arange(D + 1)
    N = grid.node_count
    if D < N:
        buf = np.zeros(N, dtype=np.complex128)
        buf[: D + 1] = c
        vals = np.fft.ifft(buf) * N
    else:
        z = np.exp(1j * grid.nodes)
        vals = np.zeros(N, dtype=np.complex128)
        for a in c[::-1]:
            vals = vals * z + a
    note = "" if radius == 1 else f"radius {radius}"
    return SampledFunction(grid, vals, note=note)
