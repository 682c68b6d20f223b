import numpy as np
import pytest

from exball_nls.fields import gaussian
from exball_nls.nls_solver import EvolutionConfig, evolve
from exball_nls.radial_core import RadialGrid

# criterion number -> (verdict, detail); filled by test_acceptance.py
ACCEPTANCE = {}


def record(criterion, ok, detail):
    ACCEPTANCE[criterion] = ("PASS" if ok else "FAIL", detail)
    print(f"criterion {criterion}: {'PASS' if ok else 'FAIL'} {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: (int(str(k).rstrip("ab")), str(k))):
        verdict, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"{verdict} criterion {key}: {detail}")


@pytest.fixture(scope="session")
def default_run():
    """Gaussian (A=2, w=1) on L=64, M=8192 over [0, 1], dt=1e-3."""
    grid = RadialGrid(64, 8192)
    return evolve(gaussian(grid, 2.0, 1.0), EvolutionConfig(dt=1e-3, t_end=1.0, snapshot_stride=10))


@pytest.fixture(scope="session")
def standard_run():
    """The diagnostics run: same data on L=128 up to t=4, snapshots every 0.01."""
    grid = RadialGrid(128, 8192)
    return evolve(gaussian(grid, 2.0, 1.0), EvolutionConfig(dt=2e-3, t_end=4.0, snapshot_stride=5))


@pytest.fixture(scope="session")
def standard_linear_run():
    grid = RadialGrid(128, 8192)
    cfg = EvolutionConfig(dt=2e-3, t_end=4.0, snapshot_stride=5, nonlinear=False)
    return evolve(gaussian(grid, 2.0, 1.0), cfg)


SCATTER_GRID = (256, 4096)
SCATTER_CFG = dict(dt=1e-2, t_end=40.0, snapshot_stride=50)


@pytest.fixture(scope="session")
def scatter_run():
    grid = RadialGrid(*SCATTER_GRID)
    return evolve(gaussian(grid, 0.5, 2.5), EvolutionConfig(**SCATTER_CFG))


@pytest.fixture(scope="session")
def scatter_linear_run():
    grid = RadialGrid(*SCATTER_GRID)
    return evolve(gaussian(grid, 0.5, 2.5), EvolutionConfig(nonlinear=False, **SCATTER_CFG))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)

