"""Weld a curve into its two conformal halves.

Start from a log-derivative w = u + i v on the line. The curve gamma_w is
split as h o f where f is an increasing homeomorphism of the line and h
extends analytically to the upper half-plane. The composition error measures
how well the sampled h o f reproduces the curve.
"""

import numpy as np

from wpc.curves import chord_arc_constant, curve_from_log_derivative
from wpc.grids import LineGrid, SampledFunction
from wpc.testfunctions import random_smooth
from wpc.welding import weld_decompose

grid = LineGrid(32.0, 8192)
rng = np.random.default_rng(7)
w = SampledFunction(grid, random_smooth(grid, rng, amplitude=0.3).values
                    + 1j * random_smooth(grid, rng, amplitude=0.4).values)

gamma = curve_from_log_derivative(w)
print("chord-arc constant of gamma:", f"{chord_arc_constant(gamma):.4f}")

r = weld_decompose(w)
print("lambda iterations:", r.iterations, " residual:", f"{r.residual:.1e}")
print("composition error |h o f - gamma|:", f"{r.composition_error:.2e}")

f_slope = np.exp(r.log_f_prime.values.real)
print("f' ranges over", f"[{f_slope.min():.3f}, {f_slope.max():.3f}]")
