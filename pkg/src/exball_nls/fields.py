"""Named families of radial test fields and initial data.

Every family here is smooth and satisfies f(1) = 0.  Families written as
r f(r) = odd function of x = r - 1 have smooth odd extensions, which keeps the
sine transform spectrally accurate.
"""
from __future__ import annotations

import numpy as np

from .errors import ParameterError
from .functional_calculus import bump_profile
from .radial_core import RadialField, RadialGrid
from .spectral_transform import inverse_values


def gaussian(grid: RadialGrid, amplitude=1.0, width=1.0) -> RadialField:
    """r f(r) = A x exp(-x^2 / w^2), x = r - 1."""
    x = grid.r - 1.0
    return RadialField(grid, amplitude * x * np.exp(-(x / width) ** 2) / grid.r)


def shell(grid: RadialGrid, amplitude=1.0, center=4.0, width=1.0) -> RadialField:
    """r f(r) = A (exp(-(x-c)^2/w^2) - exp(-(x+c)^2/w^2)): a bump at x = c made odd."""
    x = grid.r - 1.0
    odd = np.exp(-((x - center) / width) ** 2) - np.exp(-((x + center) / width) ** 2)
    return RadialField(grid, amplitude * odd / grid.r)


def sine_mode(grid: RadialGrid, k: int, amplitude=1.0) -> RadialField:
    """A sin(lam_k (r - 1)) / r for the k-th dual frequency."""
    if not 1 <= k <= grid.M - 1:
        raise ParameterError(f"mode index must lie in 1..{grid.M - 1}, got {k}")
    j = np.arange(grid.M + 1)
    vals = amplitude * np.sin(np.pi * k * j / grid.M) / grid.r
    vals[0] = vals[-1] = 0.0
    return RadialField(grid, vals)


def random_bandlimited(grid: RadialGrid, k_max: int, rng=None, complex_valued=True) -> RadialField:
    """Random coefficients on bins 1..k_max, synthesised by the inverse transform."""
    rng = np.random.default_rng(rng)
    if not 1 <= k_max <= grid.M - 1:
        raise ParameterError(f"k_max must lie in 1..{grid.M - 1}, got {k_max}")
    c = np.zeros(grid.M - 1, dtype=complex)
    c[:k_max] = rng.standard_normal(k_max)
    if complex_valued:
        c[:k_max] += 1j * rng.standard_normal(k_max)
    return RadialField(grid, inverse_values(c, grid))


def narrow_bump(grid: RadialGrid, center: float, width: float) -> RadialField:
    """exp(-(r-c)^2/w^2) with the endpoint samples set to zero (not smooth at r = 1)."""
    vals = np.exp(-((grid.r - center) / width) ** 2)
    vals[0] = vals[-1] = 0.0
    return RadialField(grid, vals)


def smooth_cutoff(r, r_inner, r_outer):
    """1 below r_inner, 0 above r_outer, smooth in between."""
    s = (np.asarray(r, dtype=float) - r_inner) / (r_outer - r_inner)
    return bump_profile(1.0 + s)


def counterexample_field(grid: RadialGrid, lam: float, cutoff=(0.5, 0.8)) -> RadialField:
    """chi(r) sin(lam (r-1)) / (lam r) with chi cutting off between the given fractions of L."""
    r = grid.r
    chi = smooth_cutoff(r, 1.0 + cutoff[0] * grid.L, 1.0 + cutoff[1] * grid.L)
    vals = chi * np.sin(lam * (r - 1.0)) / (lam * r)
    vals[-1] = 0.0
    return RadialField(grid, vals)


def from_spec(grid: RadialGrid, spec: dict, seed=None) -> RadialField:
    """Build an initial condition from a descriptor such as {"family": "gaussian", ...}.

    ``seed`` feeds the random families.
    """
    spec = dict(spec)
    family = spec.pop("family", None)
    if family == "gaussian":
        return gaussian(grid, **_take(spec, family, ("amplitude", "width")))
    if family == "shell":
        return shell(grid, **_take(spec, family, ("amplitude", "center", "width")))
    if family == "sine_mode":
        return sine_mode(grid, **_take(spec, family, ("k", "amplitude")))
    if family == "random_bandlimited":
        args = _take(spec, family, ("k_max", "amplitude"))
        f = random_bandlimited(grid, int(args.get("k_max", 16)), seed)
        return f * args.get("amplitude", 1.0)
    if family == "bump":
        # plain Gaussian bump in r (no odd symmetrisation); must vanish at both ends
        args = _take(spec, family, ("amplitude", "center", "width"))
        vals = args.get("amplitude", 1.0) * np.exp(-((grid.r - args.get("center", 4.0)) / args.get("width", 1.0)) ** 2)
        return RadialField(grid, vals)
    if family == "tabulated":
        args = _take(spec, family, ("re", "im"))
        re = np.asarray(args.get("re", []), dtype=float)
        im = np.asarray(args.get("im", np.zeros_like(re)), dtype=float)
        if re.shape != im.shape:
            raise ParameterError("tabulated re/im arrays differ in length")
        return RadialField(grid, re + 1j * im)
    raise ParameterError(f"unknown initial-condition family {family!r}")


def _take(spec, family, allowed):
    unknown = set(spec) - set(allowed)
    if unknown:
        raise ParameterError(f"unknown keys for family {family!r}: {sorted(unknown)}")
    return spec
