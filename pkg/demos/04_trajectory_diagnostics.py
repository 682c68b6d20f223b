"""Local mass, Morawetz, interval bookkeeping and scattering on stored runs.

Run:  python demos/04_trajectory_diagnostics.py     (about half a minute)
"""
import numpy as np

from exball_nls import diagnostics as dg
from exball_nls.fields import gaussian
from exball_nls.nls_solver import EvolutionConfig, evolve
from exball_nls.radial_core import RadialGrid

grid = RadialGrid(128, 8192)
traj = evolve(gaussian(grid, 2.0, 1.0), EvolutionConfig(dt=2e-3, t_end=4.0, snapshot_stride=5))
print(f"run on [0, {traj.times[-1]:g}] with {len(traj)} snapshots, truncated: {traj.truncated}")

print("\nlocal mass: R-scaled Lipschitz quotient vs C_phi sup ||grad u||")
bound = dg.mass_lipschitz_bound(traj)
for R in (2, 8, 32):
    print(f"  R = {R:2d}: {dg.mass_lipschitz_check(traj, R):.4f}   (bound {bound:.3f})")

print("\nMorawetz ratio  int int_{r <= A |I|^(1/2)} |u|^6 / |x|  /  (A |I|^(1/2))")
for A in (1, 2, 4, 8):
    print(f"  A = {A}: {dg.morawetz_ratio(traj, 0.0, 4.0, A):.5f}")
print(f"weighted L6 over the run: {dg.weighted_l6_integral(traj):.5f}")

etas = dg.EtaConstants(0.3, 1e-2, 1e-3, 1e-4)
recs = dg.classify_intervals(traj, dg.partition_intervals(traj, etas), etas)
print(f"\nL10 norm {dg.spacetime_norm(traj, 10, 10):.4f} splits into {len(recs)} intervals:")
print(dg.interval_summary(recs, etas))

# Small data on a wide domain: e^{-it Delta} u(t) settles down.
wide = RadialGrid(256, 4096)
small = evolve(gaussian(wide, 0.5, 2.5), EvolutionConfig(dt=1e-2, t_end=40.0, snapshot_stride=50))
print("\nCauchy defect of v(t) = e^{-it Delta} u(t) per window")
for a in np.arange(0.0, 40.0, 10.0):
    print(f"  [{a:g}, {a + 10:g}]: {dg.cauchy_defect(small, a, a + 10):.2e}")
v, defect = dg.scattering_profile(small)
print(f"final defect over the last 4 snapshots: {defect:.2e}")
