import numpy as np
import pytest

from wpc.curves import (CurveParam, PlaneCurve, arc_length_defect, chord_arc_constant,
                        curve_from_log_derivative, homeo_from_real_u, j_inverse, j_map,
                        log_derivative_from_curve, normalize_log_derivative,
                        operator_norm_estimate, q_transform, variable_change)
from wpc.grids import LineGrid, SampledFunction, identity_map
from wpc.testfunctions import bump, random_smooth


def sf(grid, vals):
    return SampledFunction(grid, np.asarray(vals))


@pytest.fixture(scope="module")
def g():
    return LineGrid(8.0, 4096)


# -- normalization -----------------------------------------------------------------

def test_normalize_zero(g):
    w = normalize_log_derivative(sf(g, np.zeros(g.size)))
    assert w.normalized
    assert np.max(np.abs(w.w.values)) < 1e-14


def test_normalize_log2(g):
    w = normalize_log_derivative(sf(g, np.full(g.size, np.log(2))))
    assert np.max(np.abs(w.w.values)) < 1e-14


def test_normalize_linear_imaginary(g):
    w = sf(g, 1j * g.nodes)
    c = normalize_log_derivative(w).w.values[g.origin_index]
    oracle = -np.log((np.exp(1j) - 1) / 1j)
    assert abs(c - oracle) < 1e-10
    assert abs(c - (0.0420 - 0.5j)) < 1e-4


def test_normalize_then_gamma_one(g, rng):
    w = random_smooth(g, rng, amplitude=0.8).values + 1j * random_smooth(g, rng).values
    gamma = curve_from_log_derivative(normalize_log_derivative(sf(g, w)))
    assert abs(gamma(1.0) - 1) < 1e-9
    assert gamma.points[g.origin_index] == 0


def test_normalize_needs_unit_interval():
    with pytest.raises(ValueError):
        normalize_log_derivative(sf(LineGrid(0.5, 64), np.zeros(65)))


# -- reconstruction ----------------------------------------------------------------

def test_curve_identity(g):
    gamma = curve_from_log_derivative(CurveParam(sf(g, np.zeros(g.size)), True))
    assert np.max(np.abs(gamma.points - g.nodes)) < 1e-12


def test_curve_unit_speed(fine_grid):
    g = fine_grid
    v = bump(g.nodes, 0.5, 2.0) * 0.3
    gamma = curve_from_log_derivative(sf(g, 1j * v))
    assert np.max(np.abs(np.abs(gamma.tangent) - 1)) < 1e-12
    # chords fall short of arcs by (h v')^2 / 24
    h = g.spacing
    speed = np.abs(np.diff(gamma.points)) / h
    mid = 0.5 * (g.nodes[1:] + g.nodes[:-1])
    dv = np.interp(mid, g.nodes, np.gradient(v, h))
    assert np.max(np.abs(speed - (1 - (h * dv) ** 2 / 24))) < 1e-10
    assert np.max(np.abs(speed - 1)) < 2e-8


def test_curve_real_increasing(g):
    u = np.log1p(bump(g.nodes, 0, 1.5))
    gamma = curve_from_log_derivative(sf(g, u))
    assert np.all(np.abs(gamma.points.imag) < 1e-15)
    assert np.all(np.diff(gamma.points.real) > 0)


def test_log_derivative_identity(g):
    assert np.max(np.abs(log_derivative_from_curve(PlaneCurve(g, g.nodes + 0j)).values)) < 1e-12


def test_round_trip(g, rng):
    for _ in range(3):
        w = random_smooth(g, rng, amplitude=0.5).values + 1j * random_smooth(g, rng, amplitude=2.0).values
        w = normalize_log_derivative(sf(g, w)).w
        back = log_derivative_from_curve(curve_from_log_derivative(w))
        assert back.sup_distance(w) < 1e-5


def test_round_trip_winding(g):
    # argument passes through several multiples of 2 pi: branch must follow it
    v = 9.0 * bump(g.nodes, 0, 3.0)
    w = sf(g, 1j * v)
    back = log_derivative_from_curve(curve_from_log_derivative(w))
    assert back.sup_distance(w) < 1e-5


def test_repeated_point_rejected(g):
    pts = g.nodes.astype(complex)
    pts[100] = pts[99]
    with pytest.raises(ValueError, match="vanishes"):
        log_derivative_from_curve(PlaneCurve(g, pts))


# -- homeomorphisms and P, Q -------------------------------------------------------

def test_homeo_zero(g):
    h = homeo_from_real_u(sf(g, np.zeros(g.size)))
    assert np.max(np.abs(h.values - g.nodes)) < 1e-12
    assert np.allclose(h(np.array([-20.0, 30.0])), [-20.0, 30.0])


def test_homeo_bump(g):
    b = bump(g.nodes, 1.0, 1.0)
    h = homeo_from_real_u(sf(g, b))
    x = g.nodes
    left = x <= 0
    assert np.max(np.abs(h.values[left] - x[left])) < 1e-12
    # independent oracle: fine trapezoid over the support
    t = np.linspace(0, 2, 200001)
    shift = np.trapezoid(np.exp(bump(t, 1.0, 1.0)) - 1, t)
    right = x >= 2
    assert np.max(np.abs(h.values[right] - x[right] - shift)) < 1e-9
    assert h(20.0) == pytest.approx(20.0 + shift, abs=1e-9)


def test_homeo_constant(g):
    h = homeo_from_real_u(sf(g, np.full(g.size, 0.3)))
    assert np.max(np.abs(h.values - np.exp(0.3) * g.nodes)) < 1e-12


def test_homeo_rejects_complex(g):
    with pytest.raises(ValueError):
        homeo_from_real_u(sf(g, 1j * np.ones(g.size)))


def test_variable_change_identity_and_constant(g, rng):
    w = random_smooth(g, rng)
    assert variable_change(w, identity_map(g)).sup_distance(w) < 1e-14
    h = homeo_from_real_u(random_smooth(g, rng))
    c = variable_change(sf(g, np.full(g.size, 2.0 - 1j)), h)
    assert np.max(np.abs(c.values - (2.0 - 1j))) < 1e-12


def test_variable_change_composition(fine_grid, rng):
    g = fine_grid
    w = random_smooth(g, rng, amplitude=1.0)
    h1 = homeo_from_real_u(random_smooth(g, rng, amplitude=0.4))
    h2 = homeo_from_real_u(random_smooth(g, rng, amplitude=0.4))
    lhs = variable_change(variable_change(w, h2), h1)
    rhs = variable_change(w, h2.compose(h1))
    assert lhs.sup_distance(rhs) < 1e-7


def test_q_trivial(g, rng):
    w = sf(g, random_smooth(g, rng).values + 1j * random_smooth(g, rng).values)
    u = random_smooth(g, rng)
    assert q_transform(sf(g, np.zeros(g.size)), w).sup_distance(w) < 1e-14
    assert q_transform(u, sf(g, np.zeros(g.size))).sup_distance(u) < 1e-14


def test_q_algebra(fine_grid, rng):
    g = fine_grid
    u, u2 = random_smooth(g, rng, amplitude=0.5), random_smooth(g, rng, amplitude=0.5)
    w = sf(g, random_smooth(g, rng).values + 1j * random_smooth(g, rng).values)
    lhs = q_transform(u2, q_transform(u, w))
    rhs = q_transform(q_transform(u2, u), w)
    assert lhs.sup_distance(rhs) < 1e-7


# -- J and its inverse -------------------------------------------------------------

def test_j_trivial(g, rng):
    u, v = random_smooth(g, rng), random_smooth(g, rng)
    zero = sf(g, np.zeros(g.size))
    assert np.max(np.abs(j_map(zero, v, normalize=False).w.values - 1j * v.values)) < 1e-14
    assert np.max(np.abs(j_map(u, zero, normalize=False).w.values - u.values)) < 1e-14


def test_j_lemma_composition(fine_grid, rng):
    # gamma of J(u, v) equals gamma_{iv} o gamma_u
    g = fine_grid
    u, v = random_smooth(g, rng, amplitude=0.5), random_smooth(g, rng, amplitude=1.0)
    w = j_map(u, v, normalize=False).w
    lhs = curve_from_log_derivative(w)
    gamma_v = curve_from_log_derivative(sf(g, 1j * v.values))
    h = homeo_from_real_u(u)
    rhs = gamma_v(h.values)
    assert np.max(np.abs(lhs.points - rhs)) < 1e-6


def test_j_inverse_trivial(g, rng):
    u = random_smooth(g, rng)
    uu, vv = j_inverse(CurveParam(u, True))
    assert uu.sup_distance(u) == 0
    assert np.max(np.abs(vv.values)) == 0
    v = random_smooth(g, rng)
    uu, vv = j_inverse(sf(g, 1j * v.values))
    assert np.max(np.abs(uu.values)) == 0
    assert vv.sup_distance(v) < 1e-12


def test_j_round_trips(fine_grid, rng):
    g = fine_grid
    for _ in range(2):
        w = normalize_log_derivative(sf(g, random_smooth(g, rng, amplitude=0.5).values
                                        + 1j * random_smooth(g, rng, amplitude=1.0).values)).w
        u, v = j_inverse(w)
        assert j_map(u, v).w.sup_distance(w) < 1e-6


def test_j_rejects_complex(g):
    with pytest.raises(ValueError):
        j_map(sf(g, 1j * np.ones(g.size)), sf(g, np.zeros(g.size)))


# -- diagnostics -------------------------------------------------------------------

def test_arc_length_defect(g):
    assert arc_length_defect(PlaneCurve(g, g.nodes + 0j)) < 1e-12
    v = bump(g.nodes, 0, 2)
    assert arc_length_defect(curve_from_log_derivative(sf(g, 1j * v))) < 1e-6
    u = 0.5 * bump(g.nodes, 0, 2)
    assert arc_length_defect(curve_from_log_derivative(sf(g, u))) >= 0.3


def test_chord_arc_line_and_semicircle():
    g = LineGrid(1.0, 2048)
    assert chord_arc_constant(PlaneCurve(g, 3 * g.nodes + 1j)) == pytest.approx(1.0, abs=1e-12)
    theta = np.pi * (g.nodes + 1) / 2
    semi = PlaneCurve(g, np.exp(1j * theta))
    assert abs(chord_arc_constant(semi) - np.pi / 2) < 1e-2


def test_chord_arc_fold_flagged():
    g = LineGrid(1.0, 2048)
    t = g.nodes
    # hairpin: out along y = +eps, back along y = -eps
    eps = 0.01
    pts = np.where(t < 0, (t + 1) + 1j * eps, (1 - t) - 1j * eps)
    arcpart = np.abs(t) < 0.01
    pts = np.where(arcpart, 1 + eps * np.exp(1j * np.pi * (0.5 - t / 0.02)), pts)
    with pytest.warns(RuntimeWarning, match="> 10"):
        assert chord_arc_constant(PlaneCurve(g, pts)) > 10


def test_chord_arc_coincident():
    g = LineGrid(1.0, 64)
    pts = np.exp(2j * np.pi * (g.nodes + 1) / 2)
    pts[-1] = pts[0]  # closed loop
    with pytest.warns(RuntimeWarning, match="coincident"):
        assert chord_arc_constant(PlaneCurve(g, pts)) == np.inf


def test_operator_norm_identity():
    g = LineGrid(8.0, 1024)
    assert abs(operator_norm_estimate(identity_map(g), 2, trials=4) - 1) < 1e-9


def test_operator_norm_small_h(rng):
    g = LineGrid(8.0, 1024)
    h = homeo_from_real_u(random_smooth(g, rng, amplitude=0.1))
    est = operator_norm_estimate(h, 2, trials=6)
    assert 1 - 1e-9 <= est <= 2


def test_operator_norm_deterministic(rng):
    g = LineGrid(8.0, 512)
    h = homeo_from_real_u(random_smooth(g, rng, amplitude=0.3))
    assert operator_norm_estimate(h, 2, trials=3, seed=5) == operator_norm_estimate(h, 2, trials=3, seed=5)
