"""Defocusing NLS  i u_t + Delta_D u = |u|^p u  by Strang splitting in the sine basis.

The state lives as sine coefficients g(lam_k).  One step is

    half nonlinear phase  u <- exp(-i |u|^p dt/2) u    (exact: |u| is conserved)
    full linear step      g <- exp(-i lam^2 dt) g
    half nonlinear phase

The phase is applied on a grid refined by ``dealias_factor`` (sine data zero
padded) and projected back.  Consecutive half phases between two stored
snapshots are merged into one full phase, which is exact for the continuous
sub-flow and changes the discrete result only at the level of the projection.
"""
from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field, fields as dc_fields, replace

import numpy as np
from scipy.integrate import simpson
from scipy.interpolate import CubicSpline

from .errors import BudgetExceededError, BudgetWarning, DataError, NumericalAbort, ParameterError
from .propagator_kernels import DEFAULT_BOUNDARY_BUDGET, boundary_mass_fraction
from .radial_core import RadialField, RadialGrid, h1dot_norm_values, integrate
from .spectral_transform import forward_coeffs, inverse_values, resample_coeffs, spectral_norm

log = logging.getLogger(__name__)


def min_dealias_factor(p: float) -> int:
    return max(3, math.ceil((p + 2) / 2))


@dataclass(frozen=True)
class EvolutionConfig:
    """Time-stepping parameters.  ``dealias_factor=None`` picks the smallest admissible one."""

    p: float = 4.0
    dt: float = 1e-3
    t_start: float = 0.0
    t_end: float = 1.0
    snapshot_stride: int = 10
    dealias_factor: int | None = None
    boundary_budget: float = DEFAULT_BOUNDARY_BUDGET
    nonlinear: bool = True

    def __post_init__(self):
        if not (self.p >= 4):
            raise ParameterError(f"p must be >= 4, got {self.p}")
        if not (self.dt > 0 and np.isfinite(self.dt)):
            raise ParameterError(f"dt must be positive, got {self.dt}")
        if not (self.t_end > self.t_start):
            raise ParameterError(f"t_end must exceed t_start, got [{self.t_start}, {self.t_end}]")
        if int(self.snapshot_stride) != self.snapshot_stride or self.snapshot_stride < 1:
            raise ParameterError(f"snapshot_stride must be a positive integer, got {self.snapshot_stride}")
        need = min_dealias_factor(self.p)
        if self.dealias_factor is None:
            object.__setattr__(self, "dealias_factor", need)
        elif int(self.dealias_factor) != self.dealias_factor or self.dealias_factor < need:
            raise ParameterError(f"dealias_factor must be an integer >= {need} for p={self.p}")
        if not (self.boundary_budget > 0):
            raise ParameterError("boundary_budget must be positive")

    @property
    def n_steps(self) -> int:
        n = (self.t_end - self.t_start) / self.dt
        if abs(n - round(n)) > 1e-9 * max(1.0, n):
            raise ParameterError(f"horizon {self.t_end - self.t_start} is not a multiple of dt={self.dt}")
        return int(round(n))

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in dc_fields(self)}


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Stored snapshots of one run plus per-snapshot energy, mass and boundary mass."""

    grid: RadialGrid
    config: EvolutionConfig
    times: np.ndarray
    values: np.ndarray
    energy: np.ndarray = field(default=None)
    mass: np.ndarray = field(default=None)
    boundary_mass: np.ndarray = field(default=None)
    truncated: bool = False
    last_trusted_time: float | None = None

    def __post_init__(self):
        times = np.array(self.times, dtype=float)
        vals = np.array(self.values, dtype=complex)
        if vals.ndim != 2 or vals.shape != (len(times), self.grid.M + 1):
            raise DataError(f"snapshot array has shape {vals.shape}, expected ({len(times)}, {self.grid.M + 1})")
        if len(times) == 0:
            raise DataError("a trajectory needs at least one snapshot")
        if np.any(np.diff(times) <= 0):
            raise DataError("snapshot times must be strictly increasing")
        if not np.all(np.isfinite(vals)):
            raise DataError("trajectory contains non-finite samples")
        if self.energy is None:
            object.__setattr__(self, "energy", np.array([energy_values(v, self.grid, self.config.p) for v in vals]))
        if self.mass is None:
            object.__setattr__(self, "mass", np.array([mass_values(v, self.grid) for v in vals]))
        if self.boundary_mass is None:
            object.__setattr__(self, "boundary_mass", np.array([boundary_mass_fraction(v, self.grid) for v in vals]))
        for name, arr in (("times", times), ("values", vals)):
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        for name in ("energy", "mass", "boundary_mass"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    def __len__(self):
        return len(self.times)

    def field(self, i: int) -> RadialField:
        return RadialField(self.grid, self.values[i])

    @property
    def snapshots(self):
        return [(float(t), self.field(i)) for i, t in enumerate(self.times)]

    def index_of(self, t: float) -> int:
        """Index of the snapshot at time t (to within 1e-9 of the spacing)."""
        i = int(np.argmin(np.abs(self.times - t)))
        tol = 1e-9 * max(1.0, abs(t))
        if abs(self.times[i] - t) > tol:
            raise ParameterError(f"t={t} is not a snapshot time")
        return i

    def coeffs(self) -> np.ndarray:
        return forward_coeffs(self.values, self.grid)

    def drifts(self) -> tuple[float, float]:
        """Max relative mass and energy drift against the first snapshot."""
        m0, e0 = self.mass[0], self.energy[0]
        dm = float(np.max(np.abs(self.mass - m0)) / m0) if m0 else 0.0
        de = float(np.max(np.abs(self.energy - e0)) / abs(e0)) if e0 else 0.0
        return dm, de


def mass_values(values, grid) -> float:
    """Discrete L2(r^2 dr) mass; equals the spectral mass sum |g|^2 pi/L exactly."""
    return float(grid.h * np.sum(np.abs(grid.r * values) ** 2))


def mass(u: RadialField) -> float:
    return mass_values(u.values, u.grid)


def energy_values(values, grid, p) -> float:
    grad = h1dot_norm_values(values, grid) ** 2
    pot = float(integrate(np.abs(values) ** (p + 2), grid, 2))
    return 0.5 * grad + pot / (p + 2)


def energy(u: RadialField, p: float = 4.0) -> float:
    """E(u) = 1/2 ||u||_{H1dot}^2 + ||u||_{L^{p+2}}^{p+2} / (p+2)."""
    return energy_values(u.values, u.grid, p)


class _Stepper:
    """Strang splitting on coefficient arrays for a fixed grid and exponent."""

    def __init__(self, grid: RadialGrid, p: float, dealias_factor: int, nonlinear: bool = True):
        self.grid = grid
        self.p = p
        self.nonlinear = nonlinear
        self.fine = RadialGrid(grid.L, grid.M * dealias_factor)
        self.lam2 = grid.lam ** 2

    def phase(self, g, tau):
        """exp(-i |u|^p tau) u on the refined grid, projected back."""
        if not self.nonlinear or tau == 0:
            return g
        u = inverse_values(resample_coeffs(g, self.fine.M), self.fine)
        u *= np.exp(-1j * tau * np.abs(u) ** self.p)
        return resample_coeffs(forward_coeffs(u, self.fine), self.grid.M)

    def nonlinearity(self, g):
        """Sine coefficients of |u|^p u, formed on the refined grid."""
        if not self.nonlinear:
            return np.zeros_like(g)
        u = inverse_values(resample_coeffs(g, self.fine.M), self.fine)
        return resample_coeffs(forward_coeffs(np.abs(u) ** self.p * u, self.fine), self.grid.M)

    def linear(self, g, tau):
        return np.exp(-1j * self.lam2 * tau) * g

    def run(self, g, dt, n):
        """n Strang steps of size dt (dt may be negative), half phases merged."""
        g = self.phase(g, dt / 2)
        for k in range(n):
            g = self.linear(g, dt)
            g = self.phase(g, dt if k < n - 1 else dt / 2)
        return g


def step(u: RadialField, dt: float, p: float = 4.0, dealias_factor: int | None = None) -> RadialField:
    """One Strang step; a negative dt steps backward in time."""
    fac = dealias_factor or min_dealias_factor(p)
    st = _Stepper(u.grid, p, fac)
    g = st.run(forward_coeffs(u.values, u.grid), dt, 1)
    return RadialField(u.grid, inverse_values(g, u.grid))


def run_steps(u: RadialField, dt: float, n_steps: int, p: float = 4.0, dealias_factor: int | None = None,
              nonlinear: bool = True) -> RadialField:
    """Advance u by n_steps steps without storing snapshots (dt < 0 allowed)."""
    fac = dealias_factor or min_dealias_factor(p)
    st = _Stepper(u.grid, p, fac, nonlinear)
    g = st.run(forward_coeffs(u.values, u.grid), dt, n_steps)
    return RadialField(u.grid, inverse_values(g, u.grid))


def evolve(u0: RadialField, cfg: EvolutionConfig) -> Trajectory:
    """Evolve u0 over [t_start, t_end] storing every ``snapshot_stride``-th step.

    Raises NumericalAbort on non-finite values.  If a snapshot exceeds the
    boundary-mass budget the trajectory stops at the previous snapshot and is
    returned with ``truncated=True``.
    """
    grid = u0.grid
    b0 = boundary_mass_fraction(u0.values, grid)
    if b0 > cfg.boundary_budget:
        raise BudgetExceededError(
            f"initial data already carries boundary mass {b0:.3e} > {cfg.boundary_budget:g}", None)
    n_total = cfg.n_steps
    st = _Stepper(grid, cfg.p, cfg.dealias_factor, cfg.nonlinear)
    g = forward_coeffs(u0.values, grid)

    times = [cfg.t_start]
    snaps = [np.array(u0.values)]
    truncated = False
    last_trusted = None
    done = 0
    log.info("evolve: %d steps of dt=%g on L=%g M=%d, p=%g", n_total, cfg.dt, grid.L, grid.M, cfg.p)
    while done < n_total:
        n = min(cfg.snapshot_stride, n_total - done)
        g = st.run(g, cfg.dt, n)
        done += n
        if not np.all(np.isfinite(g)):
            raise NumericalAbort(f"non-finite values within steps {done - n + 1}..{done}", step=done)
        v = inverse_values(g, grid)
        frac = boundary_mass_fraction(v, grid)
        t = cfg.t_start + done * cfg.dt
        if frac > cfg.boundary_budget:
            truncated = True
            last_trusted = times[-1]
            warnings.warn(f"boundary mass {frac:.3e} at t={t:g}; trajectory truncated at t={last_trusted:g}",
                          BudgetWarning, stacklevel=2)
            break
        times.append(t)
        snaps.append(v)
    traj = Trajectory(grid, cfg, np.array(times), np.array(snaps), truncated=truncated,
                      last_trusted_time=last_trusted if truncated else float(times[-1]))
    dm, de = traj.drifts()
    log.info("evolve done: %d snapshots, mass drift %.2e, energy drift %.2e", len(traj), dm, de)
    return traj


def _interaction_spline(traj: Trajectory) -> CubicSpline:
    """Cubic spline in time of exp(i lam^2 t) g(t), which varies only through the nonlinearity."""
    g = traj.coeffs()
    w = np.exp(1j * np.outer(traj.times, traj.grid.lam ** 2)) * g
    return CubicSpline(traj.times, w, axis=0)


#: default Simpson density for duhamel_residual, nodes per unit time
QUAD_NODES_PER_TIME = 2048


def duhamel_residual(traj: Trajectory, t0: float, t1: float, n_quad: int | None = None) -> float:
    """Relative H1-type spectral norm of the Duhamel defect between two snapshots.

    u(s) between snapshots comes from a cubic spline of the interaction-picture
    coefficients; the time integral uses composite Simpson on n_quad nodes
    (default: QUAD_NODES_PER_TIME per unit time, odd, at least 65).  The
    integrand oscillates like exp(-i lam^2 (t1 - s)), so coarse node sets put a
    floor under the residual well above the splitting error.
    """
    i0, i1 = traj.index_of(t0), traj.index_of(t1)
    if i1 <= i0:
        raise ParameterError("need t0 < t1")
    if n_quad is None:
        n_quad = max(65, 2 * math.ceil(QUAD_NODES_PER_TIME * (t1 - t0) / 2) + 1)
    if n_quad < 8:
        raise ParameterError(f"n_quad must be >= 8, got {n_quad}")
    if len(traj) < 2:
        raise ParameterError("need at least two snapshots")
    grid = traj.grid
    cfg = traj.config
    lam2 = grid.lam ** 2
    g = traj.coeffs()
    g0, g1 = g[i0], g[i1]
    ta, tb = traj.times[i0], traj.times[i1]
    scale = spectral_norm(g1, grid, 1.0)
    if scale == 0.0 and spectral_norm(g0, grid, 1.0) == 0.0:
        return 0.0
    integral = np.zeros_like(g1)
    if cfg.nonlinear:
        spline = _interaction_spline(traj)
        st = _Stepper(grid, cfg.p, cfg.dealias_factor)
        s = np.linspace(ta, tb, n_quad)
        vals = np.empty((n_quad, grid.M - 1), dtype=complex)
        for j, sj in enumerate(s):
            gs = np.exp(-1j * lam2 * sj) * spline(sj)
            vals[j] = np.exp(-1j * lam2 * (tb - sj)) * st.nonlinearity(gs)
        integral = simpson(vals, x=s, axis=0)
    res = g1 - np.exp(-1j * lam2 * (tb - ta)) * g0 + 1j * integral
    denom = max(scale, spectral_norm(g0, grid, 1.0))
    return spectral_norm(res, grid, 1.0) / denom


def with_config(traj: Trajectory, **changes) -> Trajectory:
    """Copy of a trajectory with config fields replaced (used for synthetic data)."""
    return Trajectory(traj.grid, replace(traj.config, **changes), traj.times, traj.values)
