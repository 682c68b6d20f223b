"""Shifted sine transform diagonalising the radial Dirichlet Laplacian.

The continuum pair is

    F0 f(lam) = sqrt(2/pi) * int_1^inf sin(lam (s-1)) s f(s) ds
    f(r)      = sqrt(2/pi) * int_0^inf sin(lam (r-1)) / r * F0 f(lam) dlam

On the truncated grid both integrals become type-I discrete sine sums: the
s-integral with step h, the lam-integral with step pi/L over lam_k = k pi/L.
With these weights the two sums are exact inverses of each other.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import fft as sfft

from .errors import DataError, DegenerateInputError, ParameterError
from .radial_core import RadialField, RadialGrid, integrate

_SQRT_2_OVER_PI = np.sqrt(2.0 / np.pi)


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Coefficients g(lam_k), k = 1..M-1, on the dual grid of ``grid``."""

    grid: RadialGrid
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex, copy=True)
        if c.shape != (self.grid.M - 1,):
            raise DataError(f"expected {self.grid.M - 1} coefficients, got {c.shape}")
        if not np.all(np.isfinite(c)):
            raise DataError("spectral coefficients contain non-finite values")
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    @property
    def lam(self) -> np.ndarray:
        return self.grid.lam

    def norm(self, power: float = 0.0) -> float:
        """sqrt(sum lam^(2 power) |g|^2 * pi/L); power=1 gives the H^1-type norm."""
        return spectral_norm(self.coeffs, self.grid, power)


def spectral_norm(coeffs: np.ndarray, grid: RadialGrid, power: float = 0.0) -> float:
    w = np.abs(coeffs) ** 2
    if power:
        w = w * grid.lam ** (2 * power)
    return float(np.sqrt(np.sum(w, axis=-1) * grid.dlam))


def forward_coeffs(values: np.ndarray, grid: RadialGrid) -> np.ndarray:
    """Array-level forward transform; ``values`` may carry leading batch axes."""
    h_interior = grid.r[1:-1] * np.asarray(values)[..., 1:-1]
    return (0.5 * _SQRT_2_OVER_PI * grid.h) * sfft.dst(h_interior, type=1, axis=-1)


def inverse_values(coeffs: np.ndarray, grid: RadialGrid) -> np.ndarray:
    """Array-level inverse transform returning samples on all M+1 nodes."""
    coeffs = np.asarray(coeffs)
    out = np.zeros(coeffs.shape[:-1] + (grid.M + 1,), dtype=complex)
    out[..., 1:-1] = (0.5 * _SQRT_2_OVER_PI * grid.dlam) * sfft.dst(coeffs, type=1, axis=-1) / grid.r[1:-1]
    return out


def forward_transform(f: RadialField) -> SpectralField:
    if not isinstance(f, RadialField):
        raise DataError("forward_transform expects a RadialField")
    return SpectralField(f.grid, forward_coeffs(f.values, f.grid))


def inverse_transform(g: SpectralField, grid: RadialGrid | None = None) -> RadialField:
    if grid is not None and grid != g.grid:
        raise ParameterError(f"grid mismatch: {g.grid} vs {grid}")
    return RadialField(g.grid, inverse_values(g.coeffs, g.grid))


def plancherel_defect(f: RadialField) -> float:
    """Relative mismatch between the spectral L2(dlam) and physical L2(r^2 dr) norms."""
    phys = float(np.sqrt(integrate(np.abs(f.values) ** 2, f.grid, 2)))
    if phys == 0.0:
        raise DegenerateInputError("Plancherel defect is undefined for the zero field")
    spec = spectral_norm(forward_coeffs(f.values, f.grid), f.grid)
    return abs(spec - phys) / phys


def resample_coeffs(coeffs: np.ndarray, M_new: int) -> np.ndarray:
    """Zero-pad or truncate spectral data to a grid with the same L and M_new points."""
    coeffs = np.asarray(coeffs)
    n_old = coeffs.shape[-1]
    n_new = M_new - 1
    if n_new >= n_old:
        pad = [(0, 0)] * (coeffs.ndim - 1) + [(0, n_new - n_old)]
        return np.pad(coeffs, pad)
    return coeffs[..., :n_new]


def fd_laplacian(f: RadialField) -> RadialField:
    """Second-difference Dirichlet Laplacian (1/r) (r f)'' on the grid."""
    u = f.grid.r * f.values
    out = np.zeros_like(u)
    out[1:-1] = (u[2:] - 2 * u[1:-1] + u[:-2]) / f.grid.h ** 2 / f.grid.r[1:-1]
    return RadialField(f.grid, out)


def fd_symbol(grid: RadialGrid) -> np.ndarray:
    """mu_k with fd_laplacian acting as multiplication by -mu_k^2 in the sine basis."""
    return (2.0 / grid.h) * np.sin(grid.lam * grid.h / 2.0)
