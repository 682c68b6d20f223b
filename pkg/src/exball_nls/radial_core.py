"""Radial grids, field containers, quadrature and norms on r in [1, 1+L].

All integrals use the radial measure r^2 dr (the volume element of the
exterior domain divided by 4*pi) unless a function says otherwise.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np
from scipy.integrate import simpson

from .errors import DataError, ParameterError

#: relative tolerance used when validating the two Dirichlet endpoints
ENDPOINT_RTOL = 1e-12


@dataclass(frozen=True)
class RadialGrid:
    """Uniform grid r_j = 1 + j*h, j = 0..M, with h = L/M."""

    L: float
    M: int

    def __post_init__(self):
        if not (np.isfinite(self.L) and self.L > 0):
            raise ParameterError(f"L must be positive and finite, got {self.L}")
        if int(self.M) != self.M or self.M < 16 or self.M % 2:
            raise ParameterError(f"M must be an even integer >= 16, got {self.M}")
        object.__setattr__(self, "L", float(self.L))
        object.__setattr__(self, "M", int(self.M))

    @cached_property
    def h(self) -> float:
        return self.L / self.M

    @cached_property
    def r(self) -> np.ndarray:
        r = 1.0 + self.h * np.arange(self.M + 1)
        r[0] = 1.0
        r[-1] = 1.0 + self.L
        r.flags.writeable = False
        return r

    @cached_property
    def lam(self) -> np.ndarray:
        """Dual frequencies lambda_k = k*pi/L, k = 1..M-1."""
        lam = np.pi * np.arange(1, self.M) / self.L
        lam.flags.writeable = False
        return lam

    @property
    def dlam(self) -> float:
        return np.pi / self.L

    def refine(self, factor: int = 2) -> "RadialGrid":
        return RadialGrid(self.L, self.M * factor)


@dataclass(frozen=True, eq=False)
class RadialField:
    """Complex samples f(r_j) of a radial function vanishing at both ends.

    ``flags`` carries non-fatal annotations such as ``"boundary_budget"``.
    """

    grid: RadialGrid
    values: np.ndarray
    flags: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        v = np.array(self.values, dtype=complex, copy=True)
        if v.shape != (self.grid.M + 1,):
            raise DataError(f"expected {self.grid.M + 1} samples, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise DataError("field contains non-finite samples")
        scale = max(1.0, float(np.max(np.abs(v))))
        if abs(v[0]) > ENDPOINT_RTOL * scale or abs(v[-1]) > ENDPOINT_RTOL * scale:
            raise DataError(
                f"Dirichlet endpoints violated: f(1)={v[0]:.3e}, f(1+L)={v[-1]:.3e}"
            )
        v[0] = 0.0
        v[-1] = 0.0
        v.flags.writeable = False
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "flags", frozenset(self.flags))

    @classmethod
    def from_function(cls, grid: RadialGrid, fn: Callable[[np.ndarray], np.ndarray]) -> "RadialField":
        return cls(grid, fn(grid.r))

    @classmethod
    def zeros(cls, grid: RadialGrid) -> "RadialField":
        return cls(grid, np.zeros(grid.M + 1, dtype=complex))

    @property
    def r(self) -> np.ndarray:
        return self.grid.r

    def with_values(self, values, flags=frozenset()) -> "RadialField":
        return RadialField(self.grid, values, flags)

    def __add__(self, other):
        _check_same_grid(self, other)
        return RadialField(self.grid, self.values + other.values)

    def __sub__(self, other):
        _check_same_grid(self, other)
        return RadialField(self.grid, self.values - other.values)

    def __mul__(self, c):
        return RadialField(self.grid, self.values * c)

    __rmul__ = __mul__

    def __neg__(self):
        return RadialField(self.grid, -self.values)


def _check_same_grid(a, b):
    if a.grid != b.grid:
        raise ParameterError(f"grid mismatch: {a.grid} vs {b.grid}")


@dataclass(frozen=True)
class NormSpec:
    """Which norm to evaluate.

    kind is one of ``"Lp"``, ``"H1dot"``, ``"WeightedLinf"``, ``"SpacetimeLqLr"``.
    Infinite exponents are passed as ``np.inf``.
    """

    kind: str
    p: float = 2.0
    alpha: float = 0.0
    q: float = 2.0

    def __post_init__(self):
        if self.kind not in ("Lp", "H1dot", "WeightedLinf", "SpacetimeLqLr"):
            raise ParameterError(f"unknown norm kind {self.kind!r}")
        for name in ("p", "q"):
            val = getattr(self, name)
            if not (val >= 1):  # also rejects NaN
                raise ParameterError(f"exponent {name}={val} must satisfy 1 <= {name} <= inf")

    @classmethod
    def lp(cls, p):
        return cls("Lp", p=p)

    @classmethod
    def h1dot(cls):
        return cls("H1dot")

    @classmethod
    def weighted_linf(cls, alpha):
        return cls("WeightedLinf", p=np.inf, alpha=alpha)

    @classmethod
    def spacetime(cls, q, r):
        return cls("SpacetimeLqLr", p=r, q=q)


def simpson_weights(grid: RadialGrid) -> np.ndarray:
    """Composite Simpson weights on the full grid (M even)."""
    w = np.full(grid.M + 1, 2.0)
    w[1::2] = 4.0
    w[0] = w[-1] = 1.0
    return w * grid.h / 3.0


def integrate(values: np.ndarray, grid: RadialGrid, weight_exponent: int = 0):
    """Simpson integral of ``values * r**weight_exponent`` over [1, 1+L]."""
    values = np.asarray(values)
    if not np.all(np.isfinite(values)):
        raise DataError("integrand contains non-finite samples")
    y = values * grid.r ** weight_exponent if weight_exponent else values
    return simpson(y, dx=grid.h)


def integrate_to(values: np.ndarray, grid: RadialGrid, r_max: float, weight_exponent: int = 0):
    """Simpson integral over [1, r_max] using the nodes that lie inside it."""
    n = int(np.searchsorted(grid.r, r_max, side="right"))
    if n < 2:
        return 0.0
    values = np.asarray(values)
    y = values[:n] * grid.r[:n] ** weight_exponent
    return simpson(y, dx=grid.h)


def quadrature(f: RadialField, weight_exponent: int = 0):
    """Integral of f(s) s^weight_exponent ds over the truncated domain.

    Real-valued fields give a float; complex ones a complex number.
    """
    if weight_exponent not in (0, 1, 2):
        raise ParameterError(f"weight_exponent must be 0, 1 or 2, got {weight_exponent}")
    val = integrate(f.values, f.grid, weight_exponent)
    if np.iscomplexobj(val) and val.imag == 0.0:
        return float(val.real)
    return val


def derivative(values: np.ndarray, h: float) -> np.ndarray:
    """Fourth-order finite-difference derivative on a uniform grid.

    Centered five-point stencil inside; skewed fourth-order stencils on the two
    nodes nearest each end.
    """
    f = np.asarray(values)
    f = f.astype(np.result_type(f.dtype, float), copy=False)
    if f.shape[-1] < 5:
        raise ParameterError("need at least 5 samples for the fourth-order stencil")
    d = np.empty_like(f)
    d[..., 2:-2] = (f[..., :-4] - 8 * f[..., 1:-3] + 8 * f[..., 3:-1] - f[..., 4:]) / 12.0
    d[..., 0] = (-25 * f[..., 0] + 48 * f[..., 1] - 36 * f[..., 2] + 16 * f[..., 3] - 3 * f[..., 4]) / 12.0
    d[..., 1] = (-3 * f[..., 0] - 10 * f[..., 1] + 18 * f[..., 2] - 6 * f[..., 3] + f[..., 4]) / 12.0
    d[..., -1] = (25 * f[..., -1] - 48 * f[..., -2] + 36 * f[..., -3] - 16 * f[..., -4] + 3 * f[..., -5]) / 12.0
    d[..., -2] = (3 * f[..., -1] + 10 * f[..., -2] - 18 * f[..., -3] + 6 * f[..., -4] - f[..., -5]) / 12.0
    return d / h


def lp_norm_values(values: np.ndarray, grid: RadialGrid, p: float) -> float:
    a = np.abs(values)
    if np.isinf(p):
        return float(np.max(a))
    return float(integrate(a ** p, grid, 2)) ** (1.0 / p)


def h1dot_norm_values(values: np.ndarray, grid: RadialGrid) -> float:
    d = derivative(values, grid.h)
    return float(integrate(np.abs(d) ** 2, grid, 2)) ** 0.5


def norm(f, spec: NormSpec) -> float:
    """Evaluate ``spec`` on a RadialField, or a spacetime norm on a Trajectory."""
    if spec.kind == "SpacetimeLqLr":
        if isinstance(f, RadialField):
            raise ParameterError("spacetime norms need a Trajectory")
        return spacetime_lqlr(f.times, f.values, f.grid, spec.q, spec.p)
    if not isinstance(f, RadialField):
        raise ParameterError(f"{spec.kind} norm needs a RadialField")
    if spec.kind == "Lp":
        return lp_norm_values(f.values, f.grid, spec.p)
    if spec.kind == "H1dot":
        return h1dot_norm_values(f.values, f.grid)
    return float(np.max(f.grid.r ** spec.alpha * np.abs(f.values)))


def spacetime_lqlr(times: np.ndarray, values: np.ndarray, grid: RadialGrid, q: float, r: float) -> float:
    """L^q_t L^r_x over the given snapshots, trapezoid rule in time."""
    if q < 1 or r < 1:
        raise ParameterError(f"exponents must be >= 1, got q={q}, r={r}")
    times = np.asarray(times, dtype=float)
    if len(times) == 0:
        raise ParameterError("empty time window")
    inner = np.array([lp_norm_values(v, grid, r) for v in values])
    if np.isinf(q):
        return float(np.max(inner))
    if len(times) < 2:
        raise ParameterError("need at least two snapshots for a time integral")
    return float(np.trapezoid(inner ** q, times)) ** (1.0 / q)

