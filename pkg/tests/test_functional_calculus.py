import numpy as np
import pytest
from scipy.integrate import quad

from exball_nls.checks import kernel_sup_series
from exball_nls.errors import DegenerateInputError, DomainError, ParameterError, UnderResolvedError
from exball_nls.fields import gaussian, random_bandlimited, sine_mode
from exball_nls.functional_calculus import (
    Multiplier,
    apply_multiplier,
    band_equivalence_ratio,
    band_profile,
    bernstein_ratio,
    bump_profile,
    inner_product,
    lp_kernel,
    lp_kernel_crosscheck,
    lp_operator_ratio,
    partition_defect,
    phi_hat,
    profile_digest,
    schur_scan,
)
from exball_nls.radial_core import RadialField, RadialGrid
from exball_nls.spectral_transform import forward_coeffs

# frozen hash of the shipped profile; changing the profile must be deliberate
PROFILE_DIGEST = "18c7da2711ca61e8"


def test_profile_shape():
    lam = np.linspace(0, 3, 3001)
    phi = bump_profile(lam)
    assert np.all(phi[lam <= 1] == 1.0)
    assert np.all(phi[lam >= 2] == 0.0)
    assert np.all(np.diff(phi) <= 0)
    assert np.array_equal(bump_profile(-lam), phi)


def test_profile_antisymmetric_about_three_halves():
    d = np.linspace(0, 0.5, 101)
    assert np.allclose(bump_profile(1.5 + d), 1 - bump_profile(1.5 - d), atol=1e-15)


def test_band_profile_support():
    lam = np.linspace(0, 5, 5001)
    psi = band_profile(lam)
    assert np.all(psi[(lam <= 0.5) | (lam >= 2)] == 0.0)
    assert np.all(psi >= 0)


def test_profile_digest_frozen():
    assert profile_digest() == PROFILE_DIGEST


@pytest.mark.parametrize("x", [0.0, 0.3, 1.0, 2.5, 7.0, 30.0])
def test_phi_hat_against_quad(x):
    ref = quad(lambda m: bump_profile(m) * np.cos(m * x), 0, 2, points=[1.0], limit=400, epsabs=1e-14)[0]
    assert abs(float(phi_hat(x)) - ref) < 1e-9


def test_phi_hat_at_zero():
    # int_0^2 phi = 1 + 1/2 by the antisymmetry about 3/2
    assert float(phi_hat(0.0)) == pytest.approx(1.5, abs=1e-12)


def test_multiplier_validation():
    with pytest.raises(ParameterError):
        Multiplier.low(0)
    with pytest.raises(ParameterError):
        Multiplier.band(-1)
    with pytest.raises(ParameterError):
        Multiplier.propagator(np.inf)
    with pytest.raises(ParameterError):
        Multiplier.custom([1.0, np.nan])
    with pytest.raises(ParameterError):
        Multiplier("heat")


def test_custom_table_length_checked():
    g = RadialGrid(8, 64)
    with pytest.raises(ParameterError):
        apply_multiplier(Multiplier.custom(np.ones(10)), gaussian(g))


def test_identity_and_power_symbols():
    g = RadialGrid(16, 512)
    f = sine_mode(g, 9)
    same = apply_multiplier(Multiplier.custom(np.ones(511)), f)
    assert np.allclose(same.values, f.values, atol=1e-14)
    sq = apply_multiplier(Multiplier.power(2), f)
    assert np.allclose(sq.values, g.lam[8] ** 2 * f.values, atol=1e-11)


def test_low_high_partition(rng):
    g = RadialGrid(32, 2048)
    for N in (0.25, 1.0, 8.0, 40.0):
        f = random_bandlimited(g, 1000, rng)
        assert partition_defect(N, f) < 1e-12


def test_telescoping_sum(rng):
    g = RadialGrid(32, 2048)
    f = random_bandlimited(g, 800, rng)
    Ns = 2.0 ** np.arange(-2, 6)
    total = sum(apply_multiplier(Multiplier.band(N), f).values for N in Ns)
    # sum over N0..N1 of P_N = P_{<=N1} - P_{<=N0/2}
    ref = apply_multiplier(Multiplier.low(Ns[-1]), f).values - apply_multiplier(Multiplier.low(Ns[0] / 2), f).values
    assert np.max(np.abs(total - ref)) < 1e-12 * np.max(np.abs(f.values))


def test_projections_self_adjoint(rng):
    # fields band-limited below M/2 so that Simpson agrees with the spectral pairing
    g = RadialGrid(32, 2048)
    f = random_bandlimited(g, 300, rng)
    h = random_bandlimited(g, 300, rng)
    for m in (Multiplier.band(2.0), Multiplier.low(0.7), Multiplier.high(5.0)):
        lhs = inner_product(apply_multiplier(m, f), h)
        rhs = inner_product(f, apply_multiplier(m, h))
        assert abs(lhs - rhs) < 1e-12 * abs(inner_product(f, f))


def test_contraction_in_l2(rng):
    g = RadialGrid(32, 2048)
    f = random_bandlimited(g, 500, rng)
    for N in (0.5, 2.0, 20.0):
        assert lp_operator_ratio(N, f, 2.0) <= 1.0 + 1e-12


def test_kernel_vanishes_on_obstacle():
    s = np.linspace(1, 20, 200)
    for N in (0.5, 3.0):
        # (1 + s) - 2 and s - 1 differ in the last bit
        assert np.max(np.abs(lp_kernel(N, 1.0, s))) < 1e-15
        assert np.max(np.abs(lp_kernel(N, s, 1.0, kind="band"))) < 1e-15


def test_kernel_symmetric():
    r = np.linspace(1, 10, 37)[:, None]
    s = np.linspace(1, 10, 41)[None, :]
    k = lp_kernel(2.0, r, s)
    assert np.allclose(k, lp_kernel(2.0, s.T, r.T).T, rtol=0, atol=1e-15)


def test_kernel_domain_and_kind():
    with pytest.raises(DomainError):
        lp_kernel(1.0, 0.5, 2.0)
    with pytest.raises(ParameterError):
        lp_kernel(1.0, 2.0, 2.0, kind="high")
    with pytest.raises(ParameterError):
        lp_kernel(0.0, 2.0, 2.0)


@pytest.mark.parametrize("N", [1.0, 2.0, 4.0, 8.0])
def test_kernel_matches_spectral(N):
    f = gaussian(RadialGrid(64, 4096), 1.0, 1.0)
    assert lp_kernel_crosscheck(N, f) < 1e-4


def test_kernel_crosscheck_zero_field():
    assert lp_kernel_crosscheck(1.0, RadialField.zeros(RadialGrid(16, 256))) == 0.0


def test_kernel_crosscheck_under_resolved():
    g = RadialGrid(16, 64)  # h = 0.25
    with pytest.raises(UnderResolvedError):
        lp_kernel_crosscheck(2.0, gaussian(g))


def test_schur_l1_bounded():
    # Schur test: sup_r int |K_N(r, s)| s^2 ds bounds P_{<=N} on every L^p
    for N in (0.25, 1.0, 4.0, 16.0):
        rv = 1.0 + np.geomspace(1e-2, 50.0, 60) / N
        l1, _ = schur_scan(N, rv)
        assert l1 < 4.0


@pytest.mark.xfail(strict=True, reason="sup|K_N|/N^3 is only asymptotically constant (N -> 0); "
                                       "near the obstacle it drops by two orders between N = 1/4 and 16")
def test_kernel_sup_scales_like_cube():
    Ns = np.array([0.25, 1.0, 4.0, 16.0])
    scaled = kernel_sup_series(Ns) / Ns ** 3
    assert scaled.max() / scaled.min() <= 1.1


def test_lp_bounded_uniformly_in_N():
    g = RadialGrid(64, 8192)
    f = gaussian(g, 1.0, 0.5)
    for p in (1.0, np.inf):
        for N in (0.5, 2.0, 8.0, 32.0):
            assert lp_operator_ratio(N, f, p) < 4.0


def test_bernstein_validation():
    g = RadialGrid(16, 256)
    with pytest.raises(ParameterError):
        bernstein_ratio(2.0, 1.0, 1.0, gaussian(g))
    with pytest.raises(ParameterError):
        bernstein_ratio(0.5, 2.0, 1.0, gaussian(g))
    with pytest.raises(DegenerateInputError):
        bernstein_ratio(1.0, np.inf, 1.0, RadialField.zeros(g))


def test_band_equivalence_l2():
    # psi lives on [N/2, 2N], so in L^2 the ratio sits in [1/2, 2]
    g = RadialGrid(64, 8192)
    f = gaussian(g, 1.0, 0.5)
    for N in (0.5, 1.0, 4.0, 16.0):
        assert 0.5 <= band_equivalence_ratio(1.0, 2.0, N, f) <= 2.0


def test_band_equivalence_empty_band():
    g = RadialGrid(16, 256)
    f = sine_mode(g, 3)  # lam = 3 pi / 16
    with pytest.raises(DegenerateInputError):
        band_equivalence_ratio(1.0, 2.0, 100.0, f)


def test_sine_mode_band_passes_exactly():
    g = RadialGrid(16, 512)
    k = 40
    f = sine_mode(g, k)
    lam = g.lam[k - 1]
    out = forward_coeffs(apply_multiplier(Multiplier.band(lam), f).values, g)
    ref = forward_coeffs(f.values, g) * band_profile(1.0)
    assert np.allclose(out, ref, atol=1e-12)
