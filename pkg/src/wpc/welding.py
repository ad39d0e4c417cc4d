"""Conformal welding of arc-length curves at the level of boundary data.

For an arc-length curve gamma_0 with log(gamma_0') = i v, the welding
gamma_0 = h o f splits it into an increasing homeomorphism f = gamma_u and a
boundary parametrization h of a Riemann map. The real data u = log f' and
v are tied by

    -P_f H P_f^{-1} (u) = v,

which gives v from u directly (``eval_lambda_inverse``). The other direction
(``eval_lambda``) is solved by fixed-point iteration.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .curves import (
    CurveParam,
    PlaneCurve,
    curve_from_log_derivative,
    homeo_from_real_u,
    j_inverse,
    q_transform,
    variable_change,
)
from .grids import SampledFunction, invert_monotone
from .spaces import hilbert_line

__all__ = [
    "WeldingResult",
    "eval_lambda_inverse",
    "eval_lambda",
    "riemann_log_derivative",
    "weld_decompose",
    "welding_curve",
]


@dataclass(frozen=True)
class WeldingResult:
    log_f_prime: SampledFunction
    log_h_prime: SampledFunction | None
    residual: float
    iterations: int
    converged: bool
    damping: float = 1.0
    history: tuple = field(default=(), repr=False)
    composition_error: float | None = None
    truncation_note: str = ""


def _real(u: SampledFunction) -> SampledFunction:
    if not u.is_real:
        raise ValueError("expected real-valued data")
    return SampledFunction(u.grid, np.real(u.values), u.modulo_constant)


def _conjugated_hilbert(g: SampledFunction, f, f_inv):
    # P_f H P_f^{-1} (g)
    return variable_change(hilbert_line(variable_change(g, f_inv)), f)


def eval_lambda_inverse(u: SampledFunction) -> SampledFunction:
    """v = -P_f H P_f^{-1}(u) with f = gamma_u."""
    u = _real(u)
    f = homeo_from_real_u(u)
    return -_conjugated_hilbert(u, f, invert_monotone(f))


def eval_lambda(v: SampledFunction, tol: float = 1e-8, max_iter: int = 50,
                damping: float = 1.0) -> WeldingResult:
    """Solve -P_f H P_f^{-1}(u) = v for u, with f = gamma_u.

    Fixed-point iteration from u = 0:

        u <- (1 - d) u + d P_f H P_f^{-1}(v),   f = gamma_u,

    using H^2 = -I. ``residual`` is the sup-norm of the fixed-point defect
    sup|u_{k+1} - u_k|. The damping d drops to 0.5 if the defect grows twice
    in a row. Non-convergence is reported, not raised.
    """
    if not 0 < damping <= 1:
        raise ValueError("damping must lie in (0, 1]")
    v = _real(v)
    grid = v.grid
    u = np.zeros(grid.size)
    history = []
    rises = 0
    residual = np.inf
    it = 0
    note = ""
    while it < max_iter:
        it += 1
        f = homeo_from_real_u(SampledFunction(grid, u))
        hv = hilbert_line(variable_change(v, invert_monotone(f)))
        note = hv.note
        target = variable_change(hv, f).values
        new = (1 - damping) * u + damping * target
        new_res = float(np.max(np.abs(new - u)))
        rises = rises + 1 if new_res > residual else 0
        u, residual = new, new_res
        history.append(residual)
        if residual <= tol:
            break
        if rises >= 2 and damping > 0.5:
            damping, rises = 0.5, 0
    return WeldingResult(SampledFunction(grid, u), None, residual, it, residual <= tol,
                         damping, tuple(history), truncation_note=note)


def riemann_log_derivative(u: SampledFunction) -> SampledFunction:
    """log h' for the welding partner of f = gamma_u.

    Re log h' = -u o f^{-1} and Im log h' = H(Re log h').
    """
    u = _real(u)
    f = homeo_from_real_u(u)
    re = -variable_change(u, invert_monotone(f))
    im = hilbert_line(re)
    return SampledFunction(u.grid, re.values + 1j * im.values, note=im.note)


def welding_curve(log_h_prime: SampledFunction) -> PlaneCurve:
    """h(x) = int_0^x e^{log h'}."""
    return curve_from_log_derivative(log_h_prime)


def weld_decompose(w, tol: float = 1e-8, max_iter: int = 50, damping: float = 1.0,
                   check_radius: float | None = None) -> WeldingResult:
    """Split the curve of w into gamma_w = h o f.

    w goes through J^{-1} to (u0, v); the arc-length curve gamma_{iv} is
    welded by solving for lambda(v); then log f' = Q_{u0}(lambda(v)) and
    log h' comes from lambda(v). ``composition_error`` is
    sup |h(f(x)) - gamma_w(x)| over |x| <= check_radius (default X/4).
    """
    wv = w.w if isinstance(w, CurveParam) else w
    grid = wv.grid
    u0, v = j_inverse(wv)
    r = eval_lambda(v, tol, max_iter, damping)
    log_f = q_transform(u0, r.log_f_prime)
    log_h = riemann_log_derivative(r.log_f_prime)
    h = welding_curve(log_h)
    f = homeo_from_real_u(log_f)
    gamma = curve_from_log_derivative(wv)
    radius = grid.half_width / 4 if check_radius is None else check_radius
    m = np.abs(grid.nodes) <= radius
    err = float(np.max(np.abs(h(f.values[m]) - gamma.points[m])))
    return WeldingResult(log_f, log_h, r.residual, r.iterations, r.converged, r.damping,
                         r.history, err, log_h.note)
