"""Evolve the defocusing quintic equation and audit the run.

Run:  python demos/03_nls_run.py [output_dir]
"""
import sys

from exball_nls.fields import gaussian
from exball_nls.nls_solver import EvolutionConfig, duhamel_residual, evolve
from exball_nls.persistence import load_trajectory, save_trajectory
from exball_nls.radial_core import RadialGrid

grid = RadialGrid(64, 8192)
u0 = gaussian(grid, 2.0, 1.0)
cfg = EvolutionConfig(p=4, dt=1e-3, t_end=1.0, snapshot_stride=10)

print(f"evolving {cfg.n_steps} steps (dealias factor {cfg.dealias_factor}) ...")
traj = evolve(u0, cfg)
dm, de = traj.drifts()
print(f"snapshots: {len(traj)}, energy {traj.energy[0]:.8f}")
print(f"mass drift {dm:.1e}, energy drift {de:.1e}")
print(f"largest boundary-mass fraction {traj.boundary_mass.max():.1e}")

# u(t1) - e^{i(t1-t0)Delta} u(t0) + i int e^{i(t1-s)Delta} |u|^4 u ds should be small
for t0, t1 in [(0.0, 0.25), (0.25, 0.5), (0.0, 1.0)]:
    print(f"Duhamel residual on [{t0}, {t1}]: {duhamel_residual(traj, t0, t1):.2e}")

if len(sys.argv) > 1:
    out = sys.argv[1]
    save_trajectory(traj, out)
    again = load_trajectory(out)
    print(f"saved to {out}; reload identical: {(again.values == traj.values).all()}")
