"""Spectral multipliers m(sqrt(-Delta_D)) and Littlewood-Paley projectors.

Profiles
--------
The low-pass profile is the C-infinity step

    phi(lam) = S(2 - |lam|) / (S(2 - |lam|) + S(|lam| - 1)),   S(x) = exp(-1/x) for x > 0,

equal to 1 on |lam| <= 1, 0 on |lam| >= 2, monotone in between and
antisymmetric about |lam| = 3/2.  The band profile is psi(lam) = phi(lam) - phi(2 lam),
supported in 1/2 <= |lam| <= 2.  Dyadic bands therefore telescope:

    sum_{N = N0, 2 N0, ..., N1} psi(lam/N) = phi(lam/N1) - phi(2 lam/N0).

Kernel realisation
------------------
For an even multiplier m with cosine transform  m_hat(x) = int_0^inf m(lam) cos(lam x) dlam,

    m(sqrt(-Delta_D)) f(r) = int_1^inf K_m(r, s) f(s) s^2 ds,
    K_m(r, s) = (m_hat(r - s) - m_hat(r + s - 2)) / (pi r s).

For m = phi(lam/N) this is K_N(r, s) = N (phi_hat(N(r-s)) - phi_hat(N(r+s-2))) / (pi r s).
phi_hat is tabulated once (2**16 intervals on [0, 512]) and spline-interpolated.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import fft as sfft
from scipy.interpolate import CubicSpline

from .errors import DegenerateInputError, DomainError, ParameterError, UnderResolvedError
from .radial_core import RadialField, RadialGrid, integrate, lp_norm_values, simpson_weights
from .spectral_transform import forward_coeffs, inverse_values

PROFILE_ID = "smoothstep-exp(-1/x)-v1"

#: phi_hat table extent and resolution
PHI_HAT_XMAX = 512.0
PHI_HAT_INTERVALS = 2 ** 16
_PHI_HAT_FFT_SIZE = 2 ** 20

#: largest N*h accepted by the kernel realisation
KERNEL_MAX_NH = 0.25


def _smooth_exp(x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = np.exp(-1.0 / x[pos])
    return out


def bump_profile(lam) -> np.ndarray:
    """Low-pass profile phi: 1 on |lam| <= 1, 0 on |lam| >= 2."""
    a = np.abs(np.asarray(lam, dtype=float))
    up = _smooth_exp(2.0 - a)
    down = _smooth_exp(a - 1.0)
    return up / (up + down)


def band_profile(lam) -> np.ndarray:
    """Band profile psi(lam) = phi(lam) - phi(2 lam)."""
    lam = np.asarray(lam, dtype=float)
    return bump_profile(lam) - bump_profile(2.0 * lam)


def profile_digest() -> str:
    """Hash of the profile sampled on a fixed grid; recorded in run manifests."""
    lam = np.linspace(0.0, 2.5, 2501)
    data = np.round(bump_profile(lam), 15).tobytes()
    return hashlib.sha256(PROFILE_ID.encode() + data).hexdigest()[:16]


@lru_cache(maxsize=1)
def _phi_hat_spline() -> CubicSpline:
    # trapezoid rule on [0, 128 pi] (phi vanishes past 2) evaluated for all table
    # points at once through a type-I DCT
    dy = PHI_HAT_XMAX / PHI_HAT_INTERVALS
    dmu = np.pi / (_PHI_HAT_FFT_SIZE * dy)
    mu = dmu * np.arange(_PHI_HAT_FFT_SIZE + 1)
    samples = bump_profile(mu)
    table = 0.5 * dmu * sfft.dct(samples, type=1)[: PHI_HAT_INTERVALS + 1]
    y = dy * np.arange(PHI_HAT_INTERVALS + 1)
    return CubicSpline(y, table)


def phi_hat(x) -> np.ndarray:
    """Cosine transform int_0^2 phi(mu) cos(mu x) dmu (even in x, zero past the table)."""
    a = np.abs(np.asarray(x, dtype=float))
    out = np.zeros_like(a)
    inside = a <= PHI_HAT_XMAX
    out[inside] = _phi_hat_spline()(a[inside])
    return out


@dataclass(frozen=True)
class Multiplier:
    """A symbol m(lam) applied on the dual grid.

    kind: ``"propagator"`` (t), ``"lp_band"`` (N), ``"lp_low"`` (N), ``"lp_high"`` (N),
    ``"power"`` (sigma) or ``"custom"`` (table of m(lam_k)).
    """

    kind: str
    N: float | None = None
    t: float | None = None
    sigma: float | None = None
    table: tuple | None = None

    def __post_init__(self):
        if self.kind in ("lp_band", "lp_low", "lp_high"):
            if self.N is None or not (np.isfinite(self.N) and self.N > 0):
                raise ParameterError(f"{self.kind} needs N > 0, got {self.N}")
        elif self.kind == "propagator":
            if self.t is None or not np.isfinite(self.t):
                raise ParameterError("propagator multiplier needs a finite t")
        elif self.kind == "power":
            if self.sigma is None or not np.isfinite(self.sigma):
                raise ParameterError("power multiplier needs a finite sigma")
        elif self.kind == "custom":
            if self.table is None or not np.all(np.isfinite(np.asarray(self.table))):
                raise ParameterError("custom multiplier table must be finite")
        else:
            raise ParameterError(f"unknown multiplier kind {self.kind!r}")

    @classmethod
    def propagator(cls, t):
        return cls("propagator", t=float(t))

    @classmethod
    def band(cls, N):
        return cls("lp_band", N=float(N))

    @classmethod
    def low(cls, N):
        return cls("lp_low", N=float(N))

    @classmethod
    def high(cls, N):
        return cls("lp_high", N=float(N))

    @classmethod
    def power(cls, sigma):
        return cls("power", sigma=float(sigma))

    @classmethod
    def custom(cls, values):
        return cls("custom", table=tuple(np.asarray(values).ravel().tolist()))

    def symbol(self, lam: np.ndarray) -> np.ndarray:
        lam = np.asarray(lam, dtype=float)
        if self.kind == "propagator":
            return np.exp(-1j * lam ** 2 * self.t)
        if self.kind == "lp_low":
            return bump_profile(lam / self.N)
        if self.kind == "lp_high":
            return 1.0 - bump_profile(lam / self.N)
        if self.kind == "lp_band":
            return band_profile(lam / self.N)
        if self.kind == "power":
            return lam ** self.sigma
        table = np.asarray(self.table)
        if table.shape != lam.shape:
            raise ParameterError(f"custom table has {table.size} entries, grid needs {lam.size}")
        return table


def apply_symbol(symbol: np.ndarray, f: RadialField) -> RadialField:
    symbol = np.asarray(symbol)
    if not np.all(np.isfinite(symbol)):
        raise ParameterError("multiplier values must be finite")
    g = forward_coeffs(f.values, f.grid)
    return RadialField(f.grid, inverse_values(symbol * g, f.grid))


def apply_multiplier(m: Multiplier, f: RadialField) -> RadialField:
    """m(sqrt(-Delta_D)) f computed in the spectral frame."""
    return apply_symbol(m.symbol(f.grid.lam), f)


def lp_kernel(N, r, s, kind: str = "low"):
    """Kernel of P_{<=N} (kind="low") or P_N (kind="band") at (r, s).

    Returns a float for scalar input, an array otherwise.
    """
    if not N > 0:
        raise ParameterError(f"N must be positive, got {N}")
    r = np.asarray(r, dtype=float)
    s = np.asarray(s, dtype=float)
    if np.any(r < 1) or np.any(s < 1):
        raise DomainError("kernel is defined for r, s >= 1")
    if kind == "low":
        k = _low_kernel(N, r, s)
    elif kind == "band":
        k = _low_kernel(N, r, s) - _low_kernel(N / 2.0, r, s)
    else:
        raise ParameterError(f"kind must be 'low' or 'band', got {kind!r}")
    return float(k) if k.ndim == 0 else k


def _low_kernel(N, r, s):
    return N * (phi_hat(N * (r - s)) - phi_hat(N * (r + s - 2.0))) / (np.pi * r * s)


def kernel_apply(N: float, f: RadialField, kind: str = "low", chunk: int = 256) -> RadialField:
    """Evaluate int K(r, s) f(s) s^2 ds by Simpson quadrature at every grid node."""
    grid = f.grid
    r = grid.r
    w = simpson_weights(grid) * r ** 2 * f.values
    out = np.empty(grid.M + 1, dtype=complex)
    for start in range(0, grid.M + 1, chunk):
        rows = r[start:start + chunk, None]
        out[start:start + chunk] = lp_kernel(N, rows, r[None, :], kind) @ w
    out[0] = out[-1] = 0.0
    return RadialField(grid, out)


def lp_kernel_crosscheck(N: float, f: RadialField) -> float:
    """Relative L2 gap between the spectral and kernel realisations of P_{<=N} f."""
    if N * f.grid.h > KERNEL_MAX_NH:
        raise UnderResolvedError(
            f"N*h = {N * f.grid.h:.3g} exceeds {KERNEL_MAX_NH}: kernel not resolved by the grid"
        )
    spectral = apply_multiplier(Multiplier.low(N), f)
    ref = lp_norm_values(spectral.values, f.grid, 2)
    if ref == 0.0:
        return 0.0
    direct = kernel_apply(N, f)
    return lp_norm_values(direct.values - spectral.values, f.grid, 2) / ref


def schur_scan(N: float, r_values, s_max_factor: float = 400.0, points_per_scale: int = 40):
    """Measure sup_r int |K_N(r, s)| s^2 ds and sup_{r,s} |K_N(r, s)| over ``r_values``.

    The s-integral runs over [1, r + s_max_factor/N] with ``points_per_scale``
    samples per unit 1/N, which captures the decay of phi_hat.
    """
    l1_sup = 0.0
    linf_sup = 0.0
    for r in np.atleast_1d(np.asarray(r_values, dtype=float)):
        s_hi = r + s_max_factor / N
        n = int(np.ceil((s_hi - 1.0) * N * points_per_scale))
        n += n % 2
        s = np.linspace(1.0, s_hi, n + 1)
        k = np.abs(lp_kernel(N, r, s))
        l1_sup = max(l1_sup, float(np.trapezoid(k * s ** 2, s)))
        linf_sup = max(linf_sup, float(np.max(k)))
    return l1_sup, linf_sup


def bernstein_ratio(p: float, q: float, N: float, f: RadialField) -> float:
    """||P_{<=N} f||_q / (N^{3(1/p - 1/q)} ||f||_p)."""
    if not (1 <= p <= q):
        raise ParameterError(f"need 1 <= p <= q, got p={p}, q={q}")
    denom = lp_norm_values(f.values, f.grid, p)
    if denom == 0.0:
        raise DegenerateInputError("Bernstein ratio undefined for the zero field")
    low = apply_multiplier(Multiplier.low(N), f)
    exponent = 3.0 * (1.0 / p - 1.0 / q)
    return lp_norm_values(low.values, f.grid, q) / (N ** exponent * denom)


def band_equivalence_ratio(sigma: float, p: float, N: float, f: RadialField) -> float:
    """||(-Delta_D)^{sigma/2} P_N f||_p / (N^sigma ||P_N f||_p)."""
    lam = f.grid.lam
    g = forward_coeffs(f.values, f.grid) * band_profile(lam / N)
    band = inverse_values(g, f.grid)
    denom = lp_norm_values(band, f.grid, p)
    if denom == 0.0:
        raise DegenerateInputError(f"P_N f vanishes for N={N}")
    lifted = inverse_values(lam ** sigma * g, f.grid)
    return lp_norm_values(lifted, f.grid, p) / (N ** sigma * denom)


def inner_product(f: RadialField, g: RadialField) -> complex:
    """<f, g> in L^2(r^2 dr), antilinear in the second slot."""
    return complex(integrate(f.values * np.conj(g.values), f.grid, 2))


def lp_operator_ratio(N: float, f: RadialField, p: float) -> float:
    """||P_{<=N} f||_p / ||f||_p for one test field."""
    return bernstein_ratio(p, p, N, f)


def partition_defect(N: float, f: RadialField) -> float:
    """max |P_{<=N} f + P_{>N} f - f| relative to max |f|."""
    lo = apply_multiplier(Multiplier.low(N), f).values
    hi = apply_multiplier(Multiplier.high(N), f).values
    scale = np.max(np.abs(f.values))
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(lo + hi - f.values)) / scale)


def grid_band_limit(grid: RadialGrid) -> float:
    """Largest dual frequency represented on ``grid``."""
    return float(grid.lam[-1])
