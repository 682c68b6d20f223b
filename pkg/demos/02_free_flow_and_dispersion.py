"""The free Dirichlet flow: closed-form Gaussian evolution and the decay of the kernel.

Run:  python demos/02_free_flow_and_dispersion.py
"""
import numpy as np

from exball_nls.checks import DISPERSIVE_RADII, DISPERSIVE_TIMES
from exball_nls.fields import gaussian
from exball_nls.propagator_kernels import (
    DISPERSIVE_CONSTANT,
    dispersive_scan,
    kernel_magnitude,
    kernel_propagate,
    propagate,
)
from exball_nls.radial_core import RadialGrid, lp_norm_values

grid = RadialGrid(64, 4096)
u0 = gaussian(grid)
x = grid.r - 1

print("free Gaussian against its closed form")
for t in (0.5, 1.0, 2.0):
    b = 0.25 + 1j * t
    exact = x * (4 * b) ** -1.5 * np.exp(-x ** 2 / (4 * b)) / grid.r
    ut = propagate(u0, t).values
    err = lp_norm_values(ut - exact, grid, 2) / lp_norm_values(exact, grid, 2)
    print(f"  t = {t}: relative L2 error {err:.1e}, sup|u| = {np.max(np.abs(ut)):.4f}")

small = RadialGrid(32, 2048)
f = gaussian(small)
gap = np.max(np.abs(kernel_propagate(f, 1.0).values - propagate(f, 1.0).values))
print(f"\nkernel quadrature vs spectral flow at t = 1: {gap:.1e}")

# |t|^{3/2} |K| is largest when (r-1)(s-1)/t is small and r, s are large.
print("\n|t|^{3/2} |K(t, r, s)| at a few points")
for t, r, s in [(1.0, 2.0, 2.0), (10.0, 5.0, 8.0), (1e4, 50.0, 50.0), (1e8, 1e3, 1e3)]:
    print(f"  t={t:<8g} r={r:<6g} s={s:<6g} -> {abs(t) ** 1.5 * kernel_magnitude(t, r, s):.6f}")
peak = dispersive_scan(DISPERSIVE_TIMES, DISPERSIVE_RADII)
print(f"scan maximum {peak:.6f}; sharp constant 1/(2 sqrt(pi)) = {DISPERSIVE_CONSTANT:.6f}")
