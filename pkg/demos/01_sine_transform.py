"""Walk through the radial sine transform and the frequency projections built on it.

Run:  python demos/01_sine_transform.py
"""
import numpy as np

from exball_nls.fields import gaussian, sine_mode
from exball_nls.functional_calculus import Multiplier, apply_multiplier, lp_kernel_crosscheck
from exball_nls.radial_core import NormSpec, RadialGrid, norm
from exball_nls.spectral_transform import forward_transform, inverse_transform, plancherel_defect

grid = RadialGrid(32, 4096)
print(f"grid: r in [1, {1 + grid.L:g}], M = {grid.M}, h = {grid.h:.4g}, top frequency {grid.lam[-1]:.1f}")

# A Gaussian written as r u = x exp(-x^2) has an odd extension, so its coefficients
# are those of the continuous transform: sqrt(2)/4 lam exp(-lam^2/4).
u = gaussian(grid)
g = forward_transform(u)
closed = np.sqrt(2) / 4 * grid.lam * np.exp(-grid.lam ** 2 / 4)
print(f"coefficients vs closed form: max gap {np.max(np.abs(g.coeffs - closed)):.2e}")
print(f"Plancherel defect: {plancherel_defect(u):.2e}")
back = inverse_transform(g)
print(f"round trip: {np.max(np.abs(back.values - u.values)):.2e}")

# A single eigenfunction sits in one bin.
k = 25
c = forward_transform(sine_mode(grid, k)).coeffs
print(f"sine mode k={k}: {np.sum(np.abs(c) > 1e-10)} nonzero coefficient(s)")

# Littlewood-Paley pieces: P_{<=N} + P_{>N} = identity, and each band carries part of the mass.
print("\nband masses of the Gaussian (||P_N u||_2^2):")
total = norm(u, NormSpec.lp(2)) ** 2
for N in 2.0 ** np.arange(-2, 4):
    piece = apply_multiplier(Multiplier.band(N), u)
    print(f"  N = {N:6.3f}: {norm(piece, NormSpec.lp(2)) ** 2 / total:.4f} of the mass")

# The same projection computed directly from its kernel.
wide = RadialGrid(64, 4096)
for N in (1.0, 4.0):
    print(f"kernel vs spectral P_<=N at N = {N:g}: {lp_kernel_crosscheck(N, gaussian(wide)):.2e}")
