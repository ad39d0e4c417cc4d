"""Two routes to the same number.

The Dirichlet integral of an analytic function on the disk equals a double
integral of its boundary values over the circle. For phi = z^n both give n.
We compute the first by polar quadrature inside the disk and the second from
samples on the circle, with no shared code between the two.
"""

from wpc.analytic import PowerSeries, analytic_norm, boundary_trace
from wpc.grids import CircleGrid
from wpc.spaces import besov_seminorm

circle = CircleGrid(1024)
print(f"{'n':>2} {'disk':>10} {'circle':>10}")
for n in range(1, 9):
    phi = PowerSeries.monomial(n, degree=16)
    disk = analytic_norm(phi, "besov_p", 2).value ** 2
    edge = besov_seminorm(boundary_trace(phi, circle), 2).value ** 2
    print(f"{n:2d} {disk:10.5f} {edge:10.5f}")
