"""Beltrami coefficients on the upper half-plane.

A field is piecewise constant on cells of a grid that is uniform in x and
logarithmic in y. Norms integrate the cell values against the exact cell
measures of y^-2 dxdy (the p-norm) and y^-1 dxdy (the Carleson measure
lambda_mu = |mu|^2 y^-1 dxdy), so box indicators aligned with cell edges
come out exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._parallel import block_map
from .grids import MonotoneMap, interpolate
from .spaces import NormReport

__all__ = [
    "HalfPlaneGrid",
    "BeltramiField",
    "MapJet",
    "mp_norm",
    "carleson_norm",
    "vanishing_profile",
    "cp_constant",
    "compose_dilatations",
    "inverse_dilatation",
    "beurling_ahlfors_extension",
    "dilatation_of_jet",
    "box_field",
    "random_field",
]

MARGIN = 1e-9


@dataclass(frozen=True)
class HalfPlaneGrid:
    """M x-cells on [-X, X] times P log-spaced y-cells on [y_min, y_max]."""

    half_width: float
    x_count: int
    y_min: float = 1e-3
    y_max: float | None = None
    y_count: int = 256

    def __post_init__(self):
        if not self.half_width > 0:
            raise ValueError(f"nonpositive half-width {self.half_width!r}")
        if int(self.x_count) != self.x_count or self.x_count < 2:
            raise ValueError(f"x count must be an integer >= 2, got {self.x_count!r}")
        if int(self.y_count) != self.y_count or self.y_count < 2:
            raise ValueError(f"y count must be an integer >= 2, got {self.y_count!r}")
        y_max = 4.0 * self.half_width if self.y_max is None else float(self.y_max)
        object.__setattr__(self, "y_max", y_max)
        if not 0 < self.y_min < y_max:
            raise ValueError(f"need 0 < y_min < y_max, got ({self.y_min}, {y_max})")

    @property
    def dx(self) -> float:
        return 2.0 * self.half_width / self.x_count

    @property
    def x_edges(self) -> np.ndarray:
        return -self.half_width + self.dx * np.arange(self.x_count + 1)

    @property
    def x_centers(self) -> np.ndarray:
        e = self.x_edges
        return 0.5 * (e[:-1] + e[1:])

    @property
    def y_edges(self) -> np.ndarray:
        return np.geomspace(self.y_min, self.y_max, self.y_count + 1)

    @property
    def y_centers(self) -> np.ndarray:
        e = self.y_edges
        return np.sqrt(e[:-1] * e[1:])

    @property
    def shape(self) -> tuple[int, int]:
        return (self.y_count, self.x_count)

    def mesh(self):
        """(x, y) at cell centers, each of shape (P, M)."""
        return np.meshgrid(self.x_centers, self.y_centers, indexing="xy")

    def cell_measure(self, power: int) -> np.ndarray:
        """int over each y-cell of y^-power dy (power 1 or 2), one entry per row."""
        e = self.y_edges
        if power == 1:
            return np.log(e[1:] / e[:-1])
        if power == 2:
            return 1.0 / e[:-1] - 1.0 / e[1:]
        raise ValueError("power must be 1 or 2")


@dataclass(frozen=True, eq=False)
class BeltramiField:
    """Complex cell values mu[j, i] at (x_i, y_j); sup|mu| <= 1 - 1e-9.

    ``image_points`` records where the values live when they describe a
    dilatation at H(z) rather than at z (see :func:`inverse_dilatation`).
    """

    grid: HalfPlaneGrid
    values: np.ndarray
    image_points: np.ndarray | None = None

    def __post_init__(self):
        v = np.array(self.values, dtype=np.complex128)
        if v.shape != self.grid.shape:
            raise ValueError(f"expected shape {self.grid.shape}, got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("values must be finite")
        worst = float(np.max(np.abs(v))) if v.size else 0.0
        if worst > 1 - MARGIN:
            j, i = np.unravel_index(np.argmax(np.abs(v)), v.shape)
            raise ValueError(f"|mu| = {worst:.12g} reaches 1 at cell ({i}, {j}); not a Beltrami coefficient")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_callable(cls, grid: HalfPlaneGrid, fn):
        x, y = grid.mesh()
        return cls(grid, fn(x, y))

    @property
    def sup(self) -> float:
        return float(np.max(np.abs(self.values)))

    def at(self, z) -> np.ndarray:
        """Bilinear interpolation in (x, log y) between cell centers; 0 off the grid."""
        z = np.asarray(z, dtype=np.complex128)
        g = self.grid
        xs, ly = g.x_centers, np.log(g.y_centers)
        x, y = z.real, z.imag
        inside = (x >= g.half_width * -1) & (x <= g.half_width) & (y >= g.y_min) & (y <= g.y_max)
        t = np.log(np.where(inside, y, g.y_min))
        fi = np.clip((x - xs[0]) / g.dx, 0, g.x_count - 1)
        fj = np.clip((t - ly[0]) / (ly[1] - ly[0]), 0, g.y_count - 1)
        i0 = np.minimum(fi.astype(int), g.x_count - 2)
        j0 = np.minimum(fj.astype(int), g.y_count - 2)
        a, b = fi - i0, fj - j0
        v = self.values
        out = ((1 - a) * (1 - b) * v[j0, i0] + a * (1 - b) * v[j0, i0 + 1]
               + (1 - a) * b * v[j0 + 1, i0] + a * b * v[j0 + 1, i0 + 1])
        return np.where(inside, out, 0.0)


@dataclass(frozen=True, eq=False)
class MapJet:
    """Values of a map H with its Wirtinger derivatives at the cell centers."""

    grid: HalfPlaneGrid
    value: np.ndarray
    wirtinger_dz: np.ndarray
    wirtinger_dzbar: np.ndarray

    def __post_init__(self):
        for name in ("value", "wirtinger_dz", "wirtinger_dzbar"):
            a = np.array(getattr(self, name), dtype=np.complex128)
            if a.shape != self.grid.shape:
                raise ValueError(f"{name}: expected shape {self.grid.shape}, got {a.shape}")
            a.setflags(write=False)
            object.__setattr__(self, name, a)
        bad = np.abs(self.wirtinger_dzbar) >= np.abs(self.wirtinger_dz)
        if bad.any():
            ratio = np.abs(self.wirtinger_dzbar) / np.maximum(np.abs(self.wirtinger_dz), 1e-300)
            j, i = np.unravel_index(np.argmax(ratio), ratio.shape)
            raise ValueError(f"orientation violated: |dH/dzbar| >= |dH/dz| at cell ({i}, {j}), "
                             f"ratio {ratio[j, i]:.6g}")


def _check_p(p, lo):
    if not p >= lo:
        raise ValueError(f"p must be >= {lo}, got {p}")


def mp_norm(mu: BeltramiField, p: float = 2.0) -> NormReport:
    """(iint |mu|^p y^-2 dxdy)^(1/p) over the grid."""
    _check_p(p, 1)
    g = mu.grid
    m = g.cell_measure(2)[:, None] * g.dx
    total = float(np.sum(np.abs(mu.values) ** p * m))
    note = f"y in [{g.y_min:g}, {g.y_max:g}]; mass below y_min not represented"
    return NormReport(total ** (1.0 / p), p, "double_sum", note)


def _lambda_columns(mu: BeltramiField):
    # cumulative lambda_mu mass per x-cell up to each y edge
    g = mu.grid
    dens = np.abs(mu.values) ** 2 * g.cell_measure(1)[:, None] * g.dx
    return np.vstack([np.zeros((1, g.x_count)), np.cumsum(dens, axis=0)])


def _mass_below(mu, cum, height):
    # per x-cell lambda mass of the strip y < height, cells cut in the log measure
    g = mu.grid
    e = g.y_edges
    if height <= e[0]:
        return np.zeros(g.x_count)
    if height >= e[-1]:
        return cum[-1]
    j = int(np.searchsorted(e, height, side="right")) - 1
    frac = np.log(height / e[j]) / np.log(e[j + 1] / e[j])
    return cum[j] + frac * (cum[j + 1] - cum[j])


def _box_ratios(mu, cum, n_cells, step):
    # sup over intervals of n_cells x-cells (starting every ``step`` cells) of lambda(box)/|I|
    g = mu.grid
    length = n_cells * g.dx
    col = _mass_below(mu, cum, length)
    run = np.concatenate([[0.0], np.cumsum(col)])
    starts = np.arange(0, g.x_count - n_cells + 1, step)
    mass = run[starts + n_cells] - run[starts]
    return float(np.max(mass)) / length


def carleson_norm(mu: BeltramiField) -> NormReport:
    """sqrt of sup lambda_mu(I x (0, |I|]) / |I| over dyadic I with half-step offsets.

    A lower bound for the Carleson norm of lambda_mu; boxes are cut at the
    top in the log measure, exact for cellwise constant fields.
    """
    g = mu.grid
    cum = _lambda_columns(mu)
    sizes = []
    n = g.x_count
    while n >= 2:
        sizes.append(n)
        n //= 2
    ratios = block_map(lambda a, b: np.array([_box_ratios(mu, cum, s, max(1, s // 2))
                                              for s in sizes[a:b]]), len(sizes), 4)
    value = float(np.sqrt(max(ratios.max(), 0.0))) if sizes else 0.0
    note = f"dyadic boxes of {sizes[-1] if sizes else 0}..{g.x_count} cells; below y_min not represented"
    return NormReport(value, 2.0, "dyadic_sup", note)


def vanishing_profile(mu: BeltramiField, scales) -> np.ndarray:
    """sup of lambda_mu(box)/|I| over boxes with |I| <= s, for each scale s.

    For each s the box sizes are round(s/dx) cells and its repeated halvings
    down to two cells, so the profile is nonincreasing as s decreases and
    tends to 0 exactly when mu is vanishing at grid resolution. Scales must
    decrease; a scale under two cells is rejected as unresolvable.
    """
    g = mu.grid
    scales = np.asarray(scales, dtype=np.float64)
    if np.any(np.diff(scales) >= 0):
        raise ValueError("scales must be strictly decreasing")
    if scales.size and scales[-1] < 2 * g.dx:
        raise ValueError(f"scale {scales[-1]:g} below two grid cells ({2 * g.dx:g}) is unresolvable")
    cum = _lambda_columns(mu)
    cache = {}

    def ratio(n):
        if n not in cache:
            cache[n] = _box_ratios(mu, cum, n, max(1, n // 2))
        return cache[n]

    out = []
    for s in scales:
        n = min(int(round(s / g.dx)), g.x_count)
        best = 0.0
        while n >= 2:
            best = max(best, ratio(n))
            n //= 2
        out.append(best)
    return np.array(out)


def cp_constant(p: float) -> float:
    """C_p with C_p^2 = (p' - 1)^(-1/q'), p' = p/2, 1/p' + 1/q' = 1; C_2 = 1."""
    if not p >= 2:
        raise ValueError(f"C_p needs p >= 2, got {p}")
    pp = p / 2.0
    if pp == 1:
        return 1.0
    qq = pp / (pp - 1.0)
    return float(np.sqrt((pp - 1.0) ** (-1.0 / qq)))


def _check_jet(nu: BeltramiField, H: MapJet, tol=1e-3):
    if H.grid != nu.grid:
        raise ValueError("jet and field live on different grids")
    dev = np.abs(H.wirtinger_dzbar / H.wirtinger_dz - nu.values)
    if dev.max() > tol:
        j, i = np.unravel_index(np.argmax(dev), dev.shape)
        raise ValueError(f"jet does not carry nu: deviation {dev[j, i]:.3g} at cell ({i}, {j})")


def compose_dilatations(mu: BeltramiField, nu: BeltramiField, H: MapJet) -> BeltramiField:
    """mu * nu = (mu(H) r + nu) / (1 + mu(H) conj(nu) r), r = conj(H_z)/H_z.

    mu is read at the image points H(z) by interpolation (0 off the grid).
    """
    _check_jet(nu, H)
    r = np.conj(H.wirtinger_dz) / H.wirtinger_dz
    m = mu.at(H.value)
    den = 1 + m * np.conj(nu.values) * r
    if np.min(np.abs(den)) < 1e-9:
        raise ZeroDivisionError("chain-rule denominator below 1e-9")
    out = (m * r + nu.values) / den
    if np.max(np.abs(out)) >= 1:
        raise ArithmeticError("composed dilatation reached modulus 1")
    return BeltramiField(nu.grid, out)


def inverse_dilatation(nu: BeltramiField, H: MapJet) -> BeltramiField:
    """Dilatation of H^{-1} at H(z): -nu(z) conj(H_z)/H_z, kept on the source cells."""
    _check_jet(nu, H)
    r = np.conj(H.wirtinger_dz) / H.wirtinger_dz
    r = r / np.abs(r)
    return BeltramiField(nu.grid, -nu.values * r, image_points=H.value)


# -- extension -----------------------------------------------------------------

_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)


def beurling_ahlfors_extension(f: MonotoneMap, grid: HalfPlaneGrid | None = None) -> MapJet:
    """F = (a + b)/2 + i (a - b), a and b the means of f over [x, x+y] and [x-y, x].

    Means use 16-point Gauss-Legendre on the interpolant of f; derivatives
    are the exact difference quotients a_x = (f(x+y) - f(x))/y,
    a_y = (f(x+y) - a)/y, b_x = (f(x) - f(x-y))/y, b_y = (f(x-y) - b)/y.
    The identity extends to F = z.
    """
    if grid is None:
        X = f.grid.half_width
        grid = HalfPlaneGrid(X, 256, y_max=X, y_count=128)
    x, y = grid.mesh()
    t = 0.5 * (_GL_X + 1)
    w = 0.5 * _GL_W

    def rows(a, b):
        xr, yr = x[a:b], y[a:b]
        fwd = interpolate(f, xr[..., None] + yr[..., None] * t) @ w
        bwd = interpolate(f, xr[..., None] - yr[..., None] * t) @ w
        return np.stack([fwd, bwd], axis=1)

    means = block_map(rows, grid.y_count, 16)
    al, be = means[:, 0], means[:, 1]
    f0, fp, fm = interpolate(f, x), interpolate(f, x + y), interpolate(f, x - y)
    al_x, al_y = (fp - f0) / y, (fp - al) / y
    be_x, be_y = (f0 - fm) / y, (fm - be) / y
    F = 0.5 * (al + be) + 1j * (al - be)
    Fx = 0.5 * (al_x + be_x) + 1j * (al_x - be_x)
    Fy = 0.5 * (al_y + be_y) + 1j * (al_y - be_y)
    return MapJet(grid, F, 0.5 * (Fx - 1j * Fy), 0.5 * (Fx + 1j * Fy))


def dilatation_of_jet(H: MapJet) -> BeltramiField:
    return BeltramiField(H.grid, H.wirtinger_dzbar / H.wirtinger_dz)


# -- test fields ---------------------------------------------------------------

def box_field(grid: HalfPlaneGrid, k: float, x0: float, x1: float, y0: float, y1: float) -> BeltramiField:
    """k on cells whose centers lie in [x0, x1] x [y0, y1], zero elsewhere."""
    x, y = grid.mesh()
    inside = (x >= x0) & (x <= x1) & (y >= y0) & (y <= y1)
    return BeltramiField(grid, np.where(inside, k, 0.0))


def random_field(grid: HalfPlaneGrid, rng: np.random.Generator, k_max: float = 0.5,
                 support=(-2.0, 2.0), y_range=(0.01, 2.0), n_blobs: int = 3) -> BeltramiField:
    """Sum of smooth complex blobs in x and log y, rescaled to sup in [k_max/2, k_max]."""
    x, y = grid.mesh()
    ly = np.log(y)
    v = np.zeros(grid.shape, dtype=np.complex128)
    a, b = support
    la, lb = np.log(y_range[0]), np.log(y_range[1])
    for _ in range(n_blobs):
        rx = rng.uniform(0.2, 0.5) * (b - a) / 2
        ry = rng.uniform(0.2, 0.5) * (lb - la) / 2
        cx = rng.uniform(a + rx, b - rx)
        cy = rng.uniform(la + ry, lb - ry)
        s2 = ((x - cx) / rx) ** 2 + ((ly - cy) / ry) ** 2
        blob = np.where(s2 < 1, np.exp(1 - 1 / (1 - np.minimum(s2, 1 - 1e-15))), 0.0)
        v += np.exp(2j * np.pi * rng.uniform()) * rng.uniform(0.3, 1.0) * blob
    peak = np.max(np.abs(v))
    if peak > 0:
        v *= k_max * rng.uniform(0.5, 1.0) / peak
    return BeltramiField(grid, v)
