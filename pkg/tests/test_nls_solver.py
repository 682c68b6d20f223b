import numpy as np
import pytest

from exball_nls.errors import BudgetExceededError, BudgetWarning, DataError, NumericalAbort, ParameterError
from exball_nls.fields import gaussian, random_bandlimited, sine_mode
from exball_nls.nls_solver import (
    EvolutionConfig,
    Trajectory,
    duhamel_residual,
    energy,
    evolve,
    mass,
    min_dealias_factor,
    run_steps,
    step,
    with_config,
)
from exball_nls.propagator_kernels import h1_spectral_norm, l2_norm, propagate
from exball_nls.radial_core import RadialField, RadialGrid
from exball_nls.spectral_transform import forward_coeffs

# mpmath oracles
SINE_MODE_ENERGY = 30.8427347483888  # L=32, k=40, amplitude 0.5, p=4
GAUSS_ENERGY = 0.944187911023396  # amplitude 2, width 1, p=4


def test_config_validation():
    with pytest.raises(ParameterError):
        EvolutionConfig(p=3)
    with pytest.raises(ParameterError):
        EvolutionConfig(dt=0)
    with pytest.raises(ParameterError):
        EvolutionConfig(t_end=0)
    with pytest.raises(ParameterError):
        EvolutionConfig(snapshot_stride=0)
    with pytest.raises(ParameterError):
        EvolutionConfig(dealias_factor=2)
    with pytest.raises(ParameterError):
        EvolutionConfig(dt=0.3, t_end=1.0).n_steps


def test_dealias_default():
    assert min_dealias_factor(4) == 3
    assert min_dealias_factor(6) == 4
    assert EvolutionConfig(p=6).dealias_factor == 4
    assert EvolutionConfig().to_dict()["dealias_factor"] == 3


def test_mass_is_spectral_mass(rng):
    g = RadialGrid(16, 512)
    u = random_bandlimited(g, 511, rng)
    spec = np.sum(np.abs(forward_coeffs(u.values, g)) ** 2) * g.dlam
    assert mass(u) == pytest.approx(spec, rel=1e-13)


def test_energy_sine_mode_oracle():
    # the gradient term converges at fourth order in h; 16384 points puts it near 2e-10
    g = RadialGrid(32, 16384)
    assert energy(sine_mode(g, 40, 0.5)) == pytest.approx(SINE_MODE_ENERGY, rel=1e-9)


def test_energy_gaussian_oracle():
    g = RadialGrid(64, 8192)
    assert energy(gaussian(g, 2.0, 1.0)) == pytest.approx(GAUSS_ENERGY, rel=1e-8)


def test_zero_data_stays_zero():
    g = RadialGrid(16, 256)
    traj = evolve(RadialField.zeros(g), EvolutionConfig(dt=1e-2, t_end=0.5, snapshot_stride=5))
    assert np.all(traj.values == 0)
    assert traj.drifts() == (0.0, 0.0)
    assert duhamel_residual(traj, 0.0, 0.5) == 0.0


def test_small_data_follows_linear_flow():
    g = RadialGrid(64, 2048)
    u = gaussian(g, 1e-3, 1.0)
    v = run_steps(u, 1e-3, 1000)
    w = propagate(u, 1.0)
    assert np.max(np.abs(v.values - w.values)) < 1e-12


def test_linear_mode_is_exact():
    g = RadialGrid(32, 1024)
    u = gaussian(g, 2.0, 1.0)
    v = run_steps(u, 1e-2, 50, nonlinear=False)
    assert np.max(np.abs(v.values - propagate(u, 0.5).values)) < 1e-12


def test_time_reversal():
    g = RadialGrid(32, 1024)
    u = gaussian(g, 2.0, 1.0)
    back = run_steps(run_steps(u, 1e-3, 200), -1e-3, 200)
    assert np.max(np.abs(back.values - u.values)) < 1e-12


def test_single_step_matches_run_steps():
    g = RadialGrid(16, 256)
    u = gaussian(g, 1.0, 1.0)
    assert np.allclose(step(u, 1e-2).values, run_steps(u, 1e-2, 1).values, atol=1e-15)


def test_strang_second_order():
    g = RadialGrid(32, 1024)
    u = gaussian(g, 2.0, 1.0)
    ref = run_steps(u, 1e-4, 5000)
    errs = [l2_norm(run_steps(u, dt, int(round(0.5 / dt))) - ref) for dt in (1e-2, 5e-3, 2.5e-3)]
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(np.abs(orders - 2.0) <= 0.2)


def test_conservation_default_run(default_run):
    dm, de = default_run.drifts()
    assert dm < 1e-10
    assert de < 1e-6
    assert default_run.energy[0] == pytest.approx(GAUSS_ENERGY, rel=1e-8)
    assert not default_run.truncated


def test_conservation_p6():
    g = RadialGrid(64, 8192)
    traj = evolve(gaussian(g, 2.0, 1.0), EvolutionConfig(p=6, dt=1e-3, t_end=0.5, snapshot_stride=25))
    dm, de = traj.drifts()
    assert dm < 1e-10 and de < 1e-6


def test_trajectory_accessors(default_run):
    assert len(default_run) == 101
    assert default_run.times[-1] == pytest.approx(1.0)
    assert default_run.index_of(0.5) == 50
    with pytest.raises(ParameterError):
        default_run.index_of(0.505)
    t, f = default_run.snapshots[3]
    assert t == pytest.approx(0.03)
    assert np.array_equal(f.values, default_run.values[3])
    with pytest.raises(ValueError):
        default_run.values[0, 1] = 0.0


def test_trajectory_validation():
    g = RadialGrid(8, 64)
    cfg = EvolutionConfig()
    with pytest.raises(DataError):
        Trajectory(g, cfg, np.array([0.0, 0.0]), np.zeros((2, 65)))
    with pytest.raises(DataError):
        Trajectory(g, cfg, np.array([0.0]), np.zeros((1, 64)))


def test_nonfinite_aborts():
    g = RadialGrid(16, 256)
    u = gaussian(g, 1e3, 0.2)  # |u|^400 overflows, so the phase turns into nan
    cfg = EvolutionConfig(p=400, dt=1e-2, t_end=0.1, snapshot_stride=1)
    with pytest.raises(NumericalAbort) as exc:
        evolve(u, cfg)
    assert exc.value.step == 1


def test_budget_truncation():
    g = RadialGrid(16, 512)
    cfg = EvolutionConfig(dt=1e-2, t_end=20.0, snapshot_stride=10, nonlinear=False)
    with pytest.warns(BudgetWarning):
        traj = evolve(gaussian(g, 1.0, 1.0), cfg)
    assert traj.truncated
    assert traj.last_trusted_time == traj.times[-1]
    assert traj.times[-1] < 20.0
    assert np.all(traj.boundary_mass <= cfg.boundary_budget)


def test_budget_exceeded_at_start():
    g = RadialGrid(8, 256)
    # a sine mode spreads its mass evenly, so the outer tenth holds far more than 1e-8
    with pytest.raises(BudgetExceededError):
        evolve(sine_mode(g, 3), EvolutionConfig())


def test_duhamel_linear_run():
    g = RadialGrid(32, 1024)
    traj = evolve(gaussian(g, 2.0, 1.0), EvolutionConfig(dt=1e-2, t_end=1.0, nonlinear=False))
    assert duhamel_residual(traj, 0.0, 1.0) < 1e-10


def test_duhamel_nonlinear_and_dt_halving():
    g = RadialGrid(64, 8192)
    u = gaussian(g, 2.0, 1.0)
    res = []
    for dt in (1e-3, 5e-4):
        traj = evolve(u, EvolutionConfig(dt=dt, t_end=0.5, snapshot_stride=int(round(0.01 / dt))))
        res.append(duhamel_residual(traj, 0.0, 0.5))
    assert res[0] < 1e-3
    assert res[0] / res[1] >= 3.0


def test_duhamel_arguments(default_run):
    with pytest.raises(ParameterError):
        duhamel_residual(default_run, 0.5, 0.5)
    with pytest.raises(ParameterError):
        duhamel_residual(default_run, 0.0, 0.5, n_quad=5)
    with pytest.raises(ParameterError):
        duhamel_residual(default_run, 0.0, 0.333)


def test_with_config_recomputes_energy(default_run):
    other = with_config(default_run, p=6.0, dealias_factor=4)
    assert np.array_equal(other.values, default_run.values)
    assert other.energy[0] == pytest.approx(energy(default_run.field(0), 6.0))
    assert other.energy[0] != default_run.energy[0]


def test_h1_norm_consistent_with_energy():
    g = RadialGrid(64, 8192)
    u = gaussian(g, 2.0, 1.0)
    kinetic = 0.5 * h1_spectral_norm(u) ** 2
    assert 0 < kinetic < energy(u)
