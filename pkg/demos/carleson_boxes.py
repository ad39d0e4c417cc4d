"""Beltrami coefficients in the upper half-plane.

A box of constant dilatation k over [0, 1] x [1, 2] has explicit M_p and
Carleson values. We compare them with the computed ones, then extend a
smooth increasing map of the line by Beurling-Ahlfors and look at the
dilatation it produces near the axis.
"""

import numpy as np

from wpc.beltrami import (HalfPlaneGrid, beurling_ahlfors_extension, box_field, carleson_norm,
                          dilatation_of_jet, mp_norm, vanishing_profile)
from wpc.curves import homeo_from_real_u
from wpc.grids import LineGrid, SampledFunction
from wpc.testfunctions import bump

grid = HalfPlaneGrid(8.0, 1024, y_min=2.0 ** -10, y_max=32.0, y_count=240)
k = 0.5
box = box_field(grid, k, 0, 1, 1, 2)
for p in (1, 2, 4):
    print(f"M_{p}: {mp_norm(box, p).value:.4f}   expected {k * 2 ** (-1 / p):.4f}")
print(f"Carleson: {carleson_norm(box).value:.4f}   expected {k * np.sqrt(np.log(2) / 2):.4f}")

line = LineGrid(8.0, 2048)
f = homeo_from_real_u(SampledFunction(line, 0.3 * bump(line.nodes, 0.0, 2.0)))
mu = dilatation_of_jet(beurling_ahlfors_extension(f))
print("\nextension of a smooth map: sup |mu| =", f"{mu.sup:.4f}")
scales = [4, 2, 1, 0.5, 0.25, 0.125]
prof = vanishing_profile(mu, scales)
for s, val in zip(scales, prof):
    print(f"  boxes of side <= {s:<6} {val:.4f}")
