"""
Linear Goursat problems and their signature expansion
=====================================================

The solution of a linear hyperbolic equation driven by a field expands over
id-signature coordinates. The explicit marching scheme on the grid is the
same recursion as the id-signature itself, so truncating at level L differs
from the solver by the tail of the series.
"""

import numpy as np

from twodsig.field import linear_path, monomial
from twodsig.goursat import (
    GoursatProblem,
    bessel_series,
    expansion_goursat,
    goursat_kernel,
    kernel_series,
    solve_goursat_2d,
)

# %%
# Scalar problem with driver t1 t2. The exact terminal value is a Bessel-type
# series sum 1/(n!)^2.
exact = bessel_series(1.0)
for scheme in ("explicit", "trapezoidal"):
    for N in (64, 128, 256):
        y = solve_goursat_2d(GoursatProblem(np.ones((1, 1, 1)), [1.0], monomial(1, 1, N)), scheme)
        print(f"{scheme:11s} N={N:4d}  y(1,1)={y.at_end()[0]:.6f}  err {abs(y.at_end()[0] - exact):.2e}")

# %%
# Truncation levels against the solver on the same grid.
p = GoursatProblem(np.ones((1, 1, 1)), [1.0], monomial(1, 1, 128))
sol = solve_goursat_2d(p).values
for L in range(1, 7):
    print(f"L={L}: max |solver - expansion| = {np.abs(sol - expansion_goursat(p, L)).max():.2e}")

# %%
# The signature kernel of two paths solves the same kind of equation.
x1 = linear_path([np.cos(0.3), np.sin(0.3)], 1024)
x2 = linear_path([np.cos(2.0), np.sin(2.0)], 1024)
u = goursat_kernel(x1, x2).values[-1, -1, 0]
print(f"kernel PDE {u:.6f}   series L=5 {kernel_series(x1, x2, 5):.6f}")
