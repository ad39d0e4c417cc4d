"""Acceptance criteria, one pass/fail line each.

Every criterion is computed once with 1 kernel thread and once with 8; the
single-thread numbers are checked against the pinned tolerances and the two
runs must agree bit for bit (criterion 12). Run directly with
``python3 tests/test_acceptance.py`` to print the table without pytest.
"""

import time

import numpy as np
import pytest

from wpc import threads
from wpc.analytic import PowerSeries, alpha_map, analytic_norm, boundary_trace, mobius_series, pre_schwarzian
from wpc.beltrami import (HalfPlaneGrid, beurling_ahlfors_extension, box_field, carleson_norm,
                          compose_dilatations, cp_constant, dilatation_of_jet, inverse_dilatation,
                          mp_norm, random_field)
from wpc.curves import (curve_from_log_derivative, homeo_from_real_u, j_inverse, j_map,
                        normalize_log_derivative, q_transform)
from wpc.grids import CircleGrid, LineGrid, SampledFunction
from wpc.spaces import besov_seminorm, bmo_norm, conjugate_circle, hilbert_line
from wpc.testfunctions import random_smooth
from wpc.welding import eval_lambda, eval_lambda_inverse, weld_decompose

SEEDS = range(10)


def c1():
    N = 2048
    g = CircleGrid(N)
    rng = np.random.default_rng(1)
    n = np.arange(-N // 4, N // 4 + 1)
    a = (rng.normal(size=n.size) + 1j * rng.normal(size=n.size)) / (1 + np.abs(n))
    u = SampledFunction(g, np.exp(1j * np.outer(g.nodes, n)) @ a)
    t = time.perf_counter()
    cc = conjugate_circle(conjugate_circle(u))
    dt = time.perf_counter() - t
    err = float(np.max(np.abs(cc.values + (u.values - u.values.mean()))))
    return {"error": err}, {"seconds": dt}, err <= 1e-10 and dt < 0.1


def c2():
    t = time.perf_counter()
    worst = 0.0
    out = {}
    for n in range(1, 9):
        phi = PowerSeries.monomial(n, degree=16)
        a = analytic_norm(phi, "besov_p", 2).value ** 2
        b = besov_seminorm(boundary_trace(phi, CircleGrid(2048)), 2).value ** 2
        out[f"analytic_{n}"], out[f"circle_{n}"] = a, b
        worst = max(worst, abs(a - n) / n, abs(b - n) / n)
    dt = time.perf_counter() - t
    out["worst_rel"] = worst
    return out, {"seconds": dt}, worst <= 1e-2 and dt < 30


def c3():
    g = LineGrid(64.0, 4096)
    x = g.nodes
    hv = hilbert_line(SampledFunction(g, 1 / (1 + x ** 2))).values
    m = np.abs(x) <= 8
    err = float(np.max(np.abs(hv[m] - x[m] / (1 + x[m] ** 2))))
    return {"error": err}, {}, err <= 1e-3


def _v_set():
    g = LineGrid(32.0, 8192)
    return g, [random_smooth(g, np.random.default_rng(s), support=(-2, 2), amplitude=0.3) for s in SEEDS]


def c4():
    g, vs = _v_set()
    t = time.perf_counter()
    res, its, rts, ok = [], [], [], True
    for v in vs:
        r = eval_lambda(v, tol=1e-8, max_iter=50)
        back = eval_lambda_inverse(r.log_f_prime)
        rt = float(np.max(np.abs(back.values - v.values)))
        res.append(r.residual)
        its.append(r.iterations)
        rts.append(rt)
        ok = ok and r.converged and r.residual <= 1e-8 and r.iterations <= 50 and rt <= 1e-4
    dt = time.perf_counter() - t
    metrics = {"max_residual": max(res), "max_iterations": max(its), "max_roundtrip": max(rts)}
    return metrics, {"seconds": dt}, ok and dt < 60


def c5():
    g, vs = _v_set()
    errs = [weld_decompose(SampledFunction(g, 1j * v.values), check_radius=2.0).composition_error for v in vs]
    return {"max_composition": max(errs)}, {}, max(errs) <= 1e-3


def _pairs(g, count, seed0):
    out = []
    for s in range(count):
        rng = np.random.default_rng(seed0 + s)
        out.append((random_smooth(g, rng, amplitude=0.5), random_smooth(g, rng, amplitude=1.0)))
    return out


def c6():
    g = LineGrid(8.0, 8192)
    worst = 0.0
    for u, v in _pairs(g, 10, 100):
        lhs = curve_from_log_derivative(j_map(u, v, normalize=False).w).points
        rhs = curve_from_log_derivative(SampledFunction(g, 1j * v.values))(homeo_from_real_u(u).values)
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return {"max_error": worst}, {}, worst <= 1e-6


def c7():
    g = LineGrid(8.0, 8192)
    q_err = j_err = 0.0
    for s, (u, v) in enumerate(_pairs(g, 5, 200)):
        rng = np.random.default_rng(300 + s)
        u2 = random_smooth(g, rng, amplitude=0.5)
        w = SampledFunction(g, random_smooth(g, rng).values + 1j * v.values)
        lhs = q_transform(u2, q_transform(u, w))
        rhs = q_transform(q_transform(u2, u), w)
        q_err = max(q_err, lhs.sup_distance(rhs))
        wn = normalize_log_derivative(SampledFunction(g, u.values + 1j * v.values)).w
        uu, vv = j_inverse(wn)
        j_err = max(j_err, j_map(uu, vv).w.sup_distance(wn))
    return {"q_algebra": q_err, "j_roundtrip": j_err}, {}, q_err <= 1e-7 and j_err <= 1e-6


def c8():
    # pinned check: bmo <= besov + 1e-2; also reported, the bound the
    # Jensen argument gives under the 1/(4 pi^2) normalization
    g = LineGrid(8.0, 512)
    worst = scaled = -np.inf
    for s in range(100):
        u = random_smooth(g, np.random.default_rng(1000 + s), amplitude=0.6)
        b = bmo_norm(u).value
        for p in (1.5, 2.0, 3.0):
            bp = besov_seminorm(u, p).value
            worst = max(worst, b - bp)
            scaled = max(scaled, b - (4 * np.pi ** 2) ** (1 / p) * bp)
    return {"max_slack": worst, "scaled_bound_slack": scaled}, {}, worst <= 1e-2


def c9():
    g = HalfPlaneGrid(8.0, 512, y_min=1e-3, y_max=8.0, y_count=128)
    worst = -np.inf
    for s in range(20):
        mu = random_field(g, np.random.default_rng(2000 + s))
        c = carleson_norm(mu).value
        for p in (2, 3, 4):
            worst = max(worst, c - cp_constant(p) * mp_norm(mu, p).value)
    aligned = HalfPlaneGrid(8.0, 1024, y_min=2.0 ** -10, y_max=32.0, y_count=240)
    k = 0.5
    box = box_field(aligned, k, 0, 1, 1, 2)
    box_err = max(abs(mp_norm(box, p).value - k * 2 ** (-1 / p)) for p in (1, 2, 3, 4))
    carl_err = abs(carleson_norm(box).value - k * np.sqrt(np.log(2) / 2))
    ok = worst <= 3e-2 and box_err <= 2e-2 and carl_err <= 2e-2
    return {"max_slack": worst, "box_mp_error": box_err, "box_carleson_error": carl_err}, {}, ok


def c10():
    lg = LineGrid(8.0, 2048)
    worst_gap = -np.inf
    inv_gap = 0.0
    for s in range(5):
        rng = np.random.default_rng(3000 + s)
        f = homeo_from_real_u(random_smooth(lg, rng, amplitude=0.4))
        H = beurling_ahlfors_extension(f)
        nu = dilatation_of_jet(H)
        mu = random_field(H.grid, rng, k_max=0.8)
        out = compose_dilatations(mu, nu, H)
        a, b = mu.sup, nu.sup
        worst_gap = max(worst_gap, out.sup - (a + b) / (1 - a * b))
        inv = inverse_dilatation(nu, H)
        inv_gap = max(inv_gap, abs(inv.sup - nu.sup),
                      float(np.max(np.abs(np.abs(inv.values) - np.abs(nu.values)))))
    return {"chain_gap": worst_gap, "inverse_gap": inv_gap}, {}, worst_gap <= 0 and inv_gap <= 1e-12


def c11():
    mob = 0.0
    for abcd in [(1, 0, 0.3, 1), (2 - 1j, 0.5, -0.4j, 1.5), (1, 1, 0.2, 2), (0.5, -1, 0.1 + 0.1j, 1)]:
        g = mobius_series(*abcd, degree=13)
        S = alpha_map(pre_schwarzian(PowerSeries(g.derivative_coefficients())))
        mob = max(mob, float(np.max(np.abs(S.coefficients))))
    s0 = 0.0
    for a in (0.1, -0.35, 0.2 + 0.25j):
        S = alpha_map(pre_schwarzian(PowerSeries(np.r_[1, 2 * a, np.zeros(10)])))
        s0 = max(s0, abs(S.coefficients[0] + 6 * a ** 2))
    return {"mobius": mob, "s_at_zero": s0}, {}, mob <= 1e-10 and s0 <= 1e-10


CRITERIA = {
    1: ("circle conjugation involution", c1),
    2: ("Douglas formula n = 1..8", c2),
    3: ("line Hilbert pair", c3),
    4: ("lambda round trips", c4),
    5: ("welding composition", c5),
    6: ("change-of-parameter identity", c6),
    7: ("Q-algebra and J bijection", c7),
    8: ("BMO below Besov", c8),
    9: ("Carleson bound and box values", c9),
    10: ("chain-rule bounds", c10),
    11: ("Schwarzian of Mobius and at 0", c11),
}

_cache = {}


def results(n_threads):
    if n_threads not in _cache:
        out = {}
        with threads(n_threads):
            for k, (_, fn) in CRITERIA.items():
                out[k] = fn()
        _cache[n_threads] = out
    return _cache[n_threads]


def _fmt(d):
    return " ".join(f"{k}={v:.3g}" for k, v in d.items())


def line(k):
    name = CRITERIA[k][0]
    metrics, timing, ok = results(1)[k]
    return f"[{'PASS' if ok else 'FAIL'}] {k:2d} {name}: {_fmt(metrics)} {_fmt(timing)}".rstrip()


def determinism_line():
    one, eight = results(1), results(8)
    diff = [k for k in CRITERIA if one[k][0] != eight[k][0]]
    ok = not diff
    detail = "identical for 1 and 8 threads" if ok else f"differs in {diff}"
    return ok, f"[{'PASS' if ok else 'FAIL'}] 12 determinism: {detail}"


# Not attainable as pinned: with the 1/(4 pi^2) factor in the Besov seminorm
# the comparison only holds up to (4 pi^2)^(1/p). Seed 1020 is a smooth
# counterexample (bmo 0.328 dyadic, >= 0.349 brute force; B_2 = 0.3152 by the
# Fourier formula), stable under grid refinement.
_UNATTAINABLE = {8: "bmo <= B_p fails by a constant factor under the 1/(4 pi^2) normalization"}


@pytest.mark.parametrize("k", [pytest.param(k, marks=pytest.mark.xfail(reason=_UNATTAINABLE[k], strict=True))
                               if k in _UNATTAINABLE else k for k in CRITERIA])
def test_criterion(k, acceptance_log):
    text = line(k)
    acceptance_log(text)
    print(text)
    assert results(1)[k][2], text


def test_determinism(acceptance_log):
    ok, text = determinism_line()
    acceptance_log(text)
    print(text)
    assert ok, text


if __name__ == "__main__":
    for k in CRITERIA:
        print(line(k))
    print(determinism_line()[1])
