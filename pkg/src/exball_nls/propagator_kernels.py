"""Free Dirichlet propagator, its closed-form kernel, and half-Laplacian kernels.

Propagator kernel
-----------------
With m(lam) = exp(-i lam^2 t), m_hat(x) = (1/2) sqrt(pi/(i t)) exp(i x^2 / (4t)), so

    K(t, r, s) = exp(-i pi/4 sgn t) / (2 sqrt(pi |t|) r s)
                 * (exp(i (r-s)^2 / (4t)) - exp(i (r+s-2)^2 / (4t))).

Its modulus is |1 - exp(i theta)| / (2 sqrt(pi |t|) r s) with theta = (r-1)(s-1)/t,
so |t|^{3/2} |K| <= (r-1)(s-1) / (2 sqrt(pi) r s) < 1/(2 sqrt(pi)).

Half Laplacian
--------------
For f vanishing at r = 1 and compactly supported,

    (-Delta_D)^{1/2} f(r) = (1/pi) PV int_1^inf K1(r, s) f'(s) s^2 ds,

which follows from int_0^inf sin(a lam) cos(b lam) dlam = (1/(a+b) + 1/(a-b))/2 and
int_0^inf sin(a lam) sin(b lam) dlam / lam = log|(a+b)/(a-b)| / 2.
"""
from __future__ import annotations

import warnings

import numpy as np

from .errors import AccuracyWarning, BudgetWarning, DomainError, ParameterError
from .radial_core import RadialField, derivative, integrate, lp_norm_values, simpson_weights
from .spectral_transform import forward_coeffs, inverse_values

#: sharp constant in |t|^{3/2} |K(t, r, s)| <= DISPERSIVE_CONSTANT
DISPERSIVE_CONSTANT = 1.0 / (2.0 * np.sqrt(np.pi))

#: default boundary-mass budget (fraction of L2 mass beyond r = 1 + 0.9 L)
DEFAULT_BOUNDARY_BUDGET = 1e-8
BOUNDARY_ZONE = 0.9


def boundary_mass_fraction(values: np.ndarray, grid) -> float:
    """Fraction of the L2(r^2 dr) mass in the outer 10% of the truncated domain."""
    dens = np.abs(values) ** 2 * grid.r ** 2
    total = float(np.sum(dens))
    if total == 0.0:
        return 0.0
    return float(np.sum(dens[grid.r > 1.0 + BOUNDARY_ZONE * grid.L]) / total)


def propagate(f: RadialField, t: float, budget: float = DEFAULT_BOUNDARY_BUDGET) -> RadialField:
    """exp(i t Delta_D) f by the spectral phase exp(-i lam^2 t).

    The result is flagged ``"boundary_budget"`` (and a BudgetWarning is issued)
    when it carries more than ``budget`` of its mass near the truncation edge.
    """
    g = forward_coeffs(f.values, f.grid)
    out = inverse_values(np.exp(-1j * f.grid.lam ** 2 * t) * g, f.grid)
    flags = frozenset()
    if boundary_mass_fraction(out, f.grid) > budget:
        flags = frozenset({"boundary_budget"})
        warnings.warn(f"propagate(t={t}): boundary mass above budget {budget:g}", BudgetWarning, stacklevel=2)
    return RadialField(f.grid, out, flags)


def propagator_kernel(t, r, s):
    """Closed-form kernel of exp(i t Delta_D) against the measure s^2 ds."""
    t = np.asarray(t, dtype=float)
    if np.any(t == 0):
        raise DomainError("the propagator kernel is singular at t = 0")
    r = np.asarray(r, dtype=float)
    s = np.asarray(s, dtype=float)
    if np.any(r < 1) or np.any(s < 1):
        raise DomainError("kernel is defined for r, s >= 1")
    pref = np.exp(-0.25j * np.pi * np.sign(t)) / (2.0 * np.sqrt(np.pi * np.abs(t)) * r * s)
    # exp(i (r-s)^2/4t) - exp(i (r+s-2)^2/4t) = exp(i (r-s)^2/4t) (1 - exp(i theta))
    theta = (r - 1.0) * (s - 1.0) / t
    val = pref * np.exp(1j * (r - s) ** 2 / (4.0 * t)) * (-2j * np.exp(0.5j * theta) * np.sin(0.5 * theta))
    return complex(val) if val.ndim == 0 else val


def kernel_magnitude(t, r, s):
    """|K(t, r, s)| computed without cancellation."""
    t = np.asarray(t, dtype=float)
    if np.any(t == 0):
        raise DomainError("the propagator kernel is singular at t = 0")
    r = np.asarray(r, dtype=float)
    s = np.asarray(s, dtype=float)
    if np.any(r < 1) or np.any(s < 1):
        raise DomainError("kernel is defined for r, s >= 1")
    theta = (r - 1.0) * (s - 1.0) / t
    return np.abs(np.sin(0.5 * theta)) / (np.sqrt(np.pi * np.abs(t)) * r * s)


def kernel_propagate(f: RadialField, t: float, chunk: int = 256) -> RadialField:
    """exp(i t Delta_D) f by Simpson quadrature against the closed-form kernel."""
    grid = f.grid
    r = grid.r
    w = simpson_weights(grid) * r ** 2 * f.values
    out = np.empty(grid.M + 1, dtype=complex)
    for start in range(0, grid.M + 1, chunk):
        out[start:start + chunk] = propagator_kernel(t, r[start:start + chunk, None], r[None, :]) @ w
    out[0] = out[-1] = 0.0
    return RadialField(grid, out)


def dispersive_table(times, radii) -> np.ndarray:
    """Rows (t, r, s, |K|, |t|^{3/2} |K|) over the product scan, in scan order.

    ``radii`` is either one array used for both r and s, or a pair (r_values, s_values).
    """
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if times.size == 0:
        raise ParameterError("empty time scan")
    if np.any(times == 0):
        raise DomainError("t = 0 in dispersive scan")
    if isinstance(radii, tuple) and len(radii) == 2:
        rv, sv = (np.atleast_1d(np.asarray(a, dtype=float)) for a in radii)
    else:
        rv = sv = np.atleast_1d(np.asarray(radii, dtype=float))
    if rv.size == 0 or sv.size == 0:
        raise ParameterError("empty radius scan")
    T, R, S = np.meshgrid(times, rv, sv, indexing="ij")
    mag = kernel_magnitude(T, R, S)
    return np.column_stack([T.ravel(), R.ravel(), S.ravel(), mag.ravel(), (np.abs(T) ** 1.5 * mag).ravel()])


def dispersive_scan(times, radii) -> float:
    """sup over the scan of |t|^{3/2} |K(t, r, s)|."""
    return float(np.max(dispersive_table(times, radii)[:, 4]))


def write_scan_csv(path, table: np.ndarray) -> None:
    header = "t,r,s,abs_K,scaled_abs_K"
    np.savetxt(path, table, delimiter=",", header=header, comments="", fmt="%.16e")


def riesz_kernel(which: str, r, s):
    """Kernels K1, K0, Kdiff = K1 - K0 and its transpose KdiffT.

    K1 and K0 are singular on r = s; those points raise DomainError.
    """
    r = np.asarray(r, dtype=float)
    s = np.asarray(s, dtype=float)
    if np.any(r <= 1) or np.any(s <= 1):
        raise DomainError("riesz kernels are evaluated for r, s > 1")
    if which in ("K1", "K0") and np.any(r == s):
        raise DomainError(f"{which} is singular on the diagonal r = s")
    if which == "K1":
        val = (1 / (r + s - 2) + 1 / (r - s)) / (r * s) + np.log(np.abs((r - s) / (r + s - 2))) / (r * s ** 2)
    elif which == "K0":
        val = (1 / (r + s) + 1 / (r - s)) / (r * s) + np.log(np.abs((r - s) / (r + s))) / (r * s ** 2)
    elif which == "Kdiff":
        val = (1 / (r + s - 2) - 1 / (r + s)) / (r * s) + np.log((r + s) / (r + s - 2)) / (r * s ** 2)
    elif which == "KdiffT":
        val = (1 / (r + s - 2) - 1 / (r + s)) / (r * s) + np.log((r + s) / (r + s - 2)) / (r ** 2 * s)
    else:
        raise ParameterError(f"unknown kernel {which!r}")
    return float(val) if val.ndim == 0 else val


def half_laplacian(f: RadialField, route: str = "spectral", chunk: int = 256) -> RadialField:
    """(-Delta_D)^{1/2} f, spectrally or through the principal-value kernel K1.

    The kernel route drops the diagonal cell from the trapezoid sum and replaces
    it with its local expansion: -G'(r) h for the 1/(r-s) part (G(s) = s f'(s)/r),
    h (log(h/2) - 1) f'(r)/r for the log|r-s| part, and the regular remainder
    sampled at s = r.
    """
    grid = f.grid
    if route == "spectral":
        g = forward_coeffs(f.values, grid)
        return RadialField(grid, inverse_values(grid.lam * g, grid))
    if route != "kernel":
        raise ParameterError(f"route must be 'spectral' or 'kernel', got {route!r}")

    h = grid.h
    r = grid.r
    fp = derivative(f.values, h)
    scale = np.max(np.abs(fp))
    if scale > 0 and np.max(np.abs(derivative(fp, h))) * h > 0.1 * scale:
        warnings.warn("f' varies on the grid scale; principal value is under-resolved", AccuracyWarning, stacklevel=2)

    w = np.full(grid.M + 1, h)
    w[0] = w[-1] = h / 2
    dens = w * fp * r ** 2
    out = np.zeros(grid.M + 1, dtype=complex)
    idx = np.arange(grid.M + 1)
    for start in range(1, grid.M, chunk):
        stop = min(start + chunk, grid.M)
        ri = r[start:stop, None]
        sj = r[None, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            k = (1 / (ri + sj - 2) + 1 / (ri - sj)) / (ri * sj) + np.log(np.abs((ri - sj) / (ri + sj - 2))) / (ri * sj ** 2)
        k[idx[start:stop] - start, idx[start:stop]] = 0.0
        k[~np.isfinite(k)] = 0.0
        out[start:stop] = k @ dens
    # diagonal cell
    G = r * fp
    Gp = derivative(G, h)
    rr = r[1:-1]
    regular = 1 / (rr * rr * (2 * rr - 2)) - np.log(2 * rr - 2) / rr ** 3
    out[1:-1] += -Gp[1:-1] / rr * h + fp[1:-1] / rr * h * (np.log(h / 2) - 1) + h * regular * fp[1:-1] * rr ** 2
    out /= np.pi
    out[0] = out[-1] = 0.0
    return RadialField(grid, out)


def sobolev_ratio(f: RadialField, p: float) -> float:
    """||(-Delta_D)^{1/2} f||_p / ||f'||_p for 1 < p < 3."""
    if not (1 < p < 3):
        raise ParameterError(f"norm equivalence is only claimed for 1 < p < 3, got p={p}")
    return _sobolev_ratio(f, p)


def _sobolev_ratio(f: RadialField, p: float) -> float:
    lifted = half_laplacian(f, "spectral")
    grad = derivative(f.values, f.grid.h)
    return lp_norm_values(lifted.values, f.grid, p) / lp_norm_values(grad, f.grid, p)


def sobolev_counterexample(grid, lams, p: float = 4.0, cutoff=(0.5, 0.8)) -> np.ndarray:
    """Ratios for f = chi(r) sin(lam (r-1)) / (lam r) at each lam, for p > 3.

    chi is a smooth cutoff equal to 1 below 1 + cutoff[0] L and 0 beyond 1 + cutoff[1] L.
    The ratio tends to 0 with lam when p > 3.
    """
    from .fields import counterexample_field

    return np.array([_sobolev_ratio(counterexample_field(grid, lam, cutoff), p) for lam in lams])


def route_agreement(f: RadialField) -> float:
    """Relative L2 difference between the kernel and spectral half-Laplacians."""
    a = half_laplacian(f, "spectral").values
    b = half_laplacian(f, "kernel").values
    ref = lp_norm_values(a, f.grid, 2)
    if ref == 0.0:
        return 0.0
    return lp_norm_values(b - a, f.grid, 2) / ref


def h1_spectral_norm(f: RadialField) -> float:
    """sqrt(sum lam^2 |F0 f|^2 dlam), the spectral form of ||f'||_{L2(r^2 dr)}."""
    g = forward_coeffs(f.values, f.grid)
    return float(np.sqrt(np.sum(f.grid.lam ** 2 * np.abs(g) ** 2) * f.grid.dlam))


def l2_norm(f: RadialField) -> float:
    return float(np.sqrt(integrate(np.abs(f.values) ** 2, f.grid, 2)))

