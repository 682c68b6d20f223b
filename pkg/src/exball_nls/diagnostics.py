"""Functionals evaluated on stored trajectories.

Quantities named after physical integrals over the exterior domain (local
mass, Morawetz, weighted L6, mass concentration) carry the 4 pi of the sphere.
Spacetime norms follow the radial-measure convention of ``radial_core``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from itertools import combinations

import numpy as np

from .errors import BudgetExceededError, ParameterError, ResolutionError
from .functional_calculus import bump_profile
from .nls_solver import Trajectory
from .radial_core import RadialField, h1dot_norm_values, integrate, integrate_to, spacetime_lqlr
from .spectral_transform import inverse_values, spectral_norm

log = logging.getLogger(__name__)

FOUR_PI = 4.0 * np.pi

EXCEPTIONAL = "exceptional"
UNEXCEPTIONAL = "unexceptional"
UNCLASSIFIED = "unclassified"


@dataclass(frozen=True)
class EtaConstants:
    eta0: float = 0.1
    eta1: float = 1e-2
    eta2: float = 1e-3
    eta3: float = 1e-4

    def __post_init__(self):
        vals = (self.eta0, self.eta1, self.eta2, self.eta3)
        if not all(0 < v < 1 for v in vals):
            raise ParameterError(f"eta constants must lie in (0, 1), got {vals}")
        if not all(a > b for a, b in zip(vals, vals[1:])):
            raise ParameterError(f"eta constants must be strictly decreasing, got {vals}")


@dataclass(frozen=True)
class IntervalRecord:
    a: float
    b: float
    l10_norm: float
    classification: str = UNCLASSIFIED
    partial: bool = False
    # L10 norms of the free flows from t_- and t_+ over [a, b], filled by classify_intervals
    l10_minus: float | None = None
    l10_plus: float | None = None

    def __post_init__(self):
        if not self.a < self.b:
            raise ParameterError(f"interval needs a < b, got [{self.a}, {self.b}]")
        if self.classification not in (EXCEPTIONAL, UNEXCEPTIONAL, UNCLASSIFIED):
            raise ParameterError(f"unknown classification {self.classification!r}")

    @property
    def length(self) -> float:
        return self.b - self.a


@dataclass(frozen=True)
class CutoffSpec:
    """phi(|x| / R) with phi the package bump profile (1 on [0,1], 0 beyond 2)."""

    R: float
    profile: object = field(default=bump_profile, repr=False)

    def __post_init__(self):
        if not self.R >= 1:
            raise ParameterError(f"cutoff radius must be >= 1, got {self.R}")

    def __call__(self, r):
        return self.profile(np.asarray(r, dtype=float) / self.R)


def profile_lipschitz(n: int = 200001) -> float:
    """sup |phi'| of the bump profile, sampled on [1, 2]."""
    x = np.linspace(1.0, 2.0, n)
    return float(np.max(np.abs(np.gradient(bump_profile(x), x))))


def local_mass(u: RadialField, R: float) -> float:
    """4 pi int |u|^2 phi(r/R)^2 r^2 dr."""
    cut = CutoffSpec(R)
    return FOUR_PI * float(integrate(np.abs(u.values) ** 2 * cut(u.grid.r) ** 2, u.grid, 2))


def _local_mass_series(traj: Trajectory, R: float) -> np.ndarray:
    w = CutoffSpec(R)(traj.grid.r) ** 2
    return FOUR_PI * np.real(integrate(np.abs(traj.values) ** 2 * w, traj.grid, 2))


def gradient_norm_dx(traj: Trajectory) -> np.ndarray:
    """||grad u(t)||_{L2(dx)} per snapshot (4 pi included, matching local_mass)."""
    return np.sqrt(FOUR_PI) * np.array([h1dot_norm_values(v, traj.grid) for v in traj.values])


def mass_lipschitz_check(traj: Trajectory, R: float) -> float:
    """max over consecutive snapshots of R |M_R^(1/2)(t2) - M_R^(1/2)(t1)| / (t2 - t1)."""
    if len(traj) < 2:
        raise ParameterError("need at least two snapshots")
    if not R >= 1:
        raise ParameterError(f"R must be >= 1, got {R}")
    root = np.sqrt(np.maximum(_local_mass_series(traj, R), 0.0))
    return float(R * np.max(np.abs(np.diff(root)) / np.diff(traj.times)))


def mass_lipschitz_bound(traj: Trajectory) -> float:
    """C_phi sup_t ||grad u||_2, the reference bound for mass_lipschitz_check."""
    return profile_lipschitz() * float(np.max(gradient_norm_dx(traj)))


def _window(traj: Trajectory, t_a: float, t_b: float) -> slice:
    if not t_b > t_a:
        raise ParameterError(f"empty time window [{t_a}, {t_b}]")
    i0, i1 = traj.index_of(t_a), traj.index_of(t_b)
    return slice(i0, i1 + 1)


def _time_integral(times, series):
    if len(times) < 2:
        return 0.0
    return float(np.trapezoid(series, times))


def morawetz_integral(traj: Trajectory, t_a: float, t_b: float, A: float) -> float:
    """4 pi int_I int_{1 <= r <= A |I|^(1/2)} |u|^6 r dr dt (trapezoid in t, Simpson in r)."""
    if not A >= 1:
        raise ParameterError(f"A must be >= 1, got {A}")
    sl = _window(traj, t_a, t_b)
    r_max = A * np.sqrt(t_b - t_a)
    series = [float(np.real(integrate_to(np.abs(v) ** 6, traj.grid, r_max, 1))) for v in traj.values[sl]]
    return FOUR_PI * _time_integral(traj.times[sl], series)


def morawetz_ratio(traj: Trajectory, t_a: float, t_b: float, A: float) -> float:
    return morawetz_integral(traj, t_a, t_b, A) / (A * np.sqrt(t_b - t_a))


def weighted_l6_integral(traj: Trajectory) -> float:
    """4 pi int int |u|^6 r dr dt over the whole run, i.e. || |x|^(-1/6) u ||_6^6."""
    series = np.real(integrate(np.abs(traj.values) ** 6, traj.grid, 1))
    return FOUR_PI * _time_integral(traj.times, series)


def spacetime_norm(traj: Trajectory, q: float, r: float, t_a: float | None = None, t_b: float | None = None) -> float:
    t_a = traj.times[0] if t_a is None else t_a
    t_b = traj.times[-1] if t_b is None else t_b
    sl = _window(traj, t_a, t_b)
    return spacetime_lqlr(traj.times[sl], traj.values[sl], traj.grid, q, r)


def l10_increments(traj: Trajectory) -> np.ndarray:
    """Trapezoid contributions of each snapshot gap to int int |u|^10 r^2 dr dt."""
    inner = np.real(integrate(np.abs(traj.values) ** 10, traj.grid, 2))
    return 0.5 * np.diff(traj.times) * (inner[1:] + inner[:-1])


def partition_intervals(traj: Trajectory, etas: EtaConstants = EtaConstants()) -> list[IntervalRecord]:
    """Greedy left-to-right split into intervals with eta0 < ||u||_{L10} <= 2 eta0.

    Interval ends sit on snapshot times.  The last interval may fall short of
    eta0 and is then marked ``partial``.
    """
    if len(traj) < 2:
        raise ParameterError("need at least two snapshots")
    inc = l10_increments(traj)
    times = traj.times
    lo, hi = etas.eta0 ** 10, (2 * etas.eta0) ** 10
    total = float(np.sum(inc))
    if total <= lo:
        return [IntervalRecord(float(times[0]), float(times[-1]), total ** 0.1, partial=True)]
    records = []
    start, acc = 0, 0.0
    for j, d in enumerate(inc):
        acc += d
        if acc > hi:
            raise ResolutionError(
                f"snapshots too coarse on [{times[start]:g}, {times[j + 1]:g}]: L10 tenth power jumps past (2 eta0)^10")
        if acc > lo:
            records.append(IntervalRecord(float(times[start]), float(times[j + 1]), acc ** 0.1))
            start, acc = j + 1, 0.0
    if start < len(times) - 1:
        records.append(IntervalRecord(float(times[start]), float(times[-1]), acc ** 0.1, partial=True))
    log.info("partition: %d intervals (eta0=%g, total L10=%.4g)", len(records), etas.eta0, total ** 0.1)
    return records


def free_flow_values(traj: Trajectory, index: int) -> np.ndarray:
    """exp(i (t - t_k) Delta_D) u(t_k) at every snapshot time of the trajectory."""
    g = traj.coeffs()[index]
    dt = traj.times - traj.times[index]
    return inverse_values(np.exp(-1j * np.outer(dt, traj.grid.lam ** 2)) * g, traj.grid)


def _window_l10(times, values, grid, a, b):
    sl = slice(int(np.searchsorted(times, a - 1e-12)), int(np.searchsorted(times, b + 1e-12)))
    inner = np.real(integrate(np.abs(values[sl]) ** 10, grid, 2))
    return _time_integral(times[sl], inner) ** 0.1


def classify_intervals(traj: Trajectory, records, etas: EtaConstants = EtaConstants()) -> list[IntervalRecord]:
    """Mark each record exceptional iff either free flow from t_- or t_+ has L10 norm > eta0^10 on it."""
    u_minus = free_flow_values(traj, 0)
    u_plus = free_flow_values(traj, len(traj) - 1)
    thr = etas.eta0 ** 10
    out = []
    for rec in records:
        nm = _window_l10(traj.times, u_minus, traj.grid, rec.a, rec.b)
        npl = _window_l10(traj.times, u_plus, traj.grid, rec.a, rec.b)
        cls = EXCEPTIONAL if (nm > thr or npl > thr) else UNEXCEPTIONAL
        out.append(replace(rec, classification=cls, l10_minus=nm, l10_plus=npl))
    return out


def interval_summary(records, etas: EtaConstants = EtaConstants()) -> dict:
    """Counts per class and the shortest unexceptional length next to eta1."""
    unexc = [r.length for r in records if r.classification == UNEXCEPTIONAL]
    return {
        "n_intervals": len(records),
        "n_exceptional": sum(r.classification == EXCEPTIONAL for r in records),
        "n_unexceptional": len(unexc),
        "min_unexceptional_length": min(unexc) if unexc else None,
        "eta1": etas.eta1,
    }


def mass_concentration_check(traj: Trajectory, record: IntervalRecord, etas: EtaConstants = EtaConstants()) -> float:
    """min over snapshots in I of 4 pi int_{r < |I|^(1/2)/eta3} |u|^2 r^2 dr, divided by |I|."""
    if record.classification != UNEXCEPTIONAL:
        raise ParameterError("mass concentration is defined on unexceptional intervals only")
    sl = _window(traj, record.a, record.b)
    r_max = np.sqrt(record.length) / etas.eta3
    vals = [FOUR_PI * float(np.real(integrate_to(np.abs(v) ** 2, traj.grid, r_max, 2))) for v in traj.values[sl]]
    return min(vals) / record.length


def contiguous_sum_check(records) -> float:
    """sum |I_j|^(1/2) / |J|^(1/2) for contiguous unexceptional records."""
    records = list(records)
    if not records:
        raise ParameterError("no records")
    for r in records:
        if r.classification != UNEXCEPTIONAL:
            raise ParameterError("all records must be unexceptional")
    for r0, r1 in zip(records, records[1:]):
        if abs(r0.b - r1.a) > 1e-12 * max(1.0, abs(r1.a)):
            raise ParameterError(f"records are not contiguous at {r0.b} / {r1.a}")
    span = records[-1].b - records[0].a
    return float(sum(np.sqrt(r.length) for r in records) / np.sqrt(span))


def _free_profiles(traj: Trajectory, idx) -> np.ndarray:
    """Sine coefficients of exp(-i t Delta_D) u(t) at the given snapshot indices."""
    g = traj.coeffs()[idx]
    return np.exp(1j * np.outer(traj.times[idx], traj.grid.lam ** 2)) * g


def cauchy_defect(traj: Trajectory, t_a: float, t_b: float) -> float:
    """max over snapshot pairs in [t_a, t_b] of ||v(t_i) - v(t_j)||_{H1}, v(t) = exp(-i t Delta) u(t)."""
    sl = _window(traj, t_a, t_b)
    idx = np.arange(len(traj))[sl]
    v = _free_profiles(traj, idx)
    if len(idx) < 2:
        raise ParameterError("need at least two snapshots in the window")
    return max(spectral_norm(v[i] - v[j], traj.grid, 1.0) for i, j in combinations(range(len(idx)), 2))


def scattering_profile(traj: Trajectory, direction: str = "forward", k: int = 4):
    """(v at the end of the run, Cauchy defect over the last k snapshots).

    ``direction="backward"`` uses the first k snapshots and returns v at the start.
    """
    if direction not in ("forward", "backward"):
        raise ParameterError(f"direction must be 'forward' or 'backward', got {direction!r}")
    if k < 4 or k > len(traj):
        raise ParameterError(f"need 4 <= k <= {len(traj)} snapshots, got k={k}")
    if traj.truncated:
        raise BudgetExceededError(
            f"boundary budget violated before t_end; last trusted time {traj.last_trusted_time}",
            traj.last_trusted_time)
    idx = np.arange(len(traj) - k, len(traj)) if direction == "forward" else np.arange(k)
    v = _free_profiles(traj, idx)
    defect = max(spectral_norm(v[i] - v[j], traj.grid, 1.0) for i, j in combinations(range(k), 2))
    keep = v[-1] if direction == "forward" else v[0]
    return RadialField(traj.grid, inverse_values(keep, traj.grid)), float(defect)


def diagnostics_table(traj: Trajectory, radii=()) -> tuple[list[str], np.ndarray]:
    cols = ["t", "mass", "energy", "boundary_mass"] + [f"M_R={R:g}" for R in radii]
    data = [traj.times, traj.mass, traj.energy, traj.boundary_mass]
    data += [_local_mass_series(traj, R) for R in radii]
    return cols, np.column_stack(data)


def write_diagnostics_csv(path, traj: Trajectory, radii=()) -> None:
    cols, data = diagnostics_table(traj, radii)
    np.savetxt(path, data, delimiter=",", header=",".join(cols), comments="", fmt="%.16e")


def write_intervals_csv(path, records) -> None:
    with open(path, "w") as fh:
        fh.write("a,b,l10,class,length\n")
        for r in records:
            fh.write(f"{r.a:.16e},{r.b:.16e},{r.l10_norm:.16e},{r.classification},{r.length:.16e}\n")
