"""How far does the fixed-point iteration for lambda reach?

An arc-length parametrized curve is determined by its tangent angle v. The
welding map f of that curve has log f' = lambda(v), computed by a damped
fixed-point iteration started at the Hilbert transform of v. For small v the
iteration contracts quickly; as v grows the contraction weakens and finally
fails. This script prints iterations, residual and the round-trip error
lambda^-1(lambda(v)) - v as the amplitude increases.
"""

import numpy as np

from wpc.grids import LineGrid, SampledFunction
from wpc.spaces import hilbert_line
from wpc.testfunctions import bump
from wpc.welding import eval_lambda, eval_lambda_inverse

grid = LineGrid(32.0, 4096)
shape = bump(grid.nodes, 0.0, 1.5)

print(f"{'amp':>5} {'iter':>5} {'residual':>10} {'roundtrip':>10}  converged")
for amp in (0.05, 0.1, 0.2, 0.4, 0.8, 1.6, 3.2):
    v = SampledFunction(grid, amp * shape)
    r = eval_lambda(v, tol=1e-8, max_iter=60)
    back = eval_lambda_inverse(r.log_f_prime)
    rt = np.max(np.abs(back.values - v.values))
    print(f"{amp:5.2f} {r.iterations:5d} {r.residual:10.2e} {rt:10.2e}  {r.converged}")

# the first iterate is exactly the linearization H v
v = SampledFunction(grid, 0.01 * shape)
u = eval_lambda(v, tol=1e-13).log_f_prime
print("\nsmall v: |lambda(v) - Hv| =", f"{np.max(np.abs(u.values - hilbert_line(v).values)):.2e}",
      "(second order in the amplitude)")
