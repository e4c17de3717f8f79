import numpy as np
import pytest

from dkglab.dirac import SpinorField
from dkglab.errors import ConfigurationError, DomainError, PreconditionError
from dkglab.grid import FourierGrid, SpectralField
from dkglab.spacetime import (
    SpaceTimeField,
    SpaceTimeNorm,
    band_index,
    bilinear_constant,
    check_trilinear_hypotheses,
    commutator_field,
    commutator_field_dense,
    commutator_ratio,
    dispersion_symbol,
    duality_gap,
    embedding_gap,
    empirical_trilinear_ratio,
    field_from_transform,
    hann_taper,
    modulation_project,
    modulation_values,
    random_band_transform,
    spacetime_transform,
    trilinear_form,
    xsb_norm,
)


@pytest.fixture(scope="module")
def grid():
    return FourierGrid(16)


def random_field(grid, count=32, dt=0.1, seed=0, taper="none"):
    rng = np.random.default_rng(seed)
    frames = rng.standard_normal((count, grid.n, grid.n)) + 1j * rng.standard_normal(
        (count, grid.n, grid.n)
    )
    return SpaceTimeField(grid, frames, dt, taper=taper)


def test_taper_unit_mean():
    w = hann_taper(64)
    assert abs(w.mean() - 1.0) < 1e-14


def test_spacetime_parseval(grid):
    u = random_field(grid, seed=1)
    # frames hold spatial coefficients; per-frame spatial L2 = |coeffs|/2pi,
    # and the untapered record integrates those squares in time
    direct = np.sqrt(
        np.sum(np.abs(u.frames) ** 2) * u.dt
    ) / (2 * np.pi)
    assert abs(u.l2_norm() - direct) < 1e-10 * direct


def test_modulation_bands_partition(grid):
    u = random_field(grid, seed=2)
    values = modulation_values(u, "wave+")
    bands = np.unique(2 ** band_index(values))
    pieces = [modulation_project(u, int(b), "wave+") for b in bands]
    total = sum(p.transform() for p in pieces)
    assert np.abs(total - u.transform()).max() < 1e-12


def test_field_from_transform_roundtrip(grid):
    u = random_field(grid, seed=3)
    v = field_from_transform(grid, spacetime_transform(u), u.dt)
    assert np.abs(v.frames - u.frames).max() < 1e-12


def test_xsb_norm_single_point(grid):
    # one (tau, xi) point: norm = weight * L^b * |u_hat| / (sqrt(T) 2pi)
    count, dt = 32, 0.1
    tr = np.zeros((count, grid.n, grid.n), dtype=complex)
    i, j = 3, 5
    xi = (int(grid.xi1[i, j]), int(grid.xi2[i, j]))
    tr[4, i, j] = 2.0
    u = field_from_transform(grid, tr, dt)
    params = SpaceTimeNorm(sigma=0.1, s=0.5, b=0.5, p=2, h="wave+")
    l1 = abs(xi[0]) + abs(xi[1])
    bracket = np.sqrt(1.0 + xi[0] ** 2 + xi[1] ** 2)
    tau = 2 * np.pi * 4 / (count * dt)
    mod = abs(tau + dispersion_symbol(grid, "wave+")[i, j])
    level = 2.0 ** band_index(np.array([mod]))[0]
    expect = (
        np.exp(0.1 * l1) * bracket**0.5 * level**0.5 * 2.0
        / (2 * np.pi) / np.sqrt(count * dt)
    )
    got = xsb_norm(u, params)
    assert abs(got - expect) < 1e-10 * expect


def test_embedding_gap_bounded(grid):
    worst = 0.0
    for seed in range(5):
        u = random_field(grid, seed=seed, taper="hann")
        sup_norm, bound = embedding_gap(u, 0.05, 0.5, "kg+")
        worst = max(worst, sup_norm / bound)
    assert worst <= 1.0


def test_duality_gap_bounded(grid):
    for seed in range(5):
        u = random_field(grid, seed=10 + seed)
        v = random_field(grid, seed=20 + seed)
        pairing, bound = duality_gap(u, v, 0.5, 0.5, 2, "wave-")
        assert abs(pairing) <= bound * (1 + 1e-12)


def test_bilinear_constant_values():
    # equal bands: the mixed bracket sqrt(N L_min) (N L_max)^{1/4} wins
    assert bilinear_constant((4, 4, 4), (1, 1, 1)) == pytest.approx(2 * np.sqrt(2))
    assert bilinear_constant((1, 1, 1), (1, 1, 1)) == pytest.approx(1.0)
    # low-output special case admits the (N0 L1 L2)^{1/2} candidate,
    # which wins when L1 L2 < N0 L_min
    base = bilinear_constant((16, 64, 64), (8, 1, 1))
    special = bilinear_constant((16, 64, 64), (8, 1, 1), low_output_special=True)
    assert special < base
    assert special == pytest.approx(np.sqrt(16 * 1 * 1))
    # monotone in the modulation bands
    assert bilinear_constant((2, 4, 8), (1, 2, 4)) <= bilinear_constant(
        (2, 4, 8), (4, 8, 16)
    )


def test_random_band_transform_support(grid):
    rng = np.random.default_rng(0)
    tr = random_band_transform(grid, 32, 0.1, 2, 1, "wave+", rng)
    u = field_from_transform(grid, tr, 0.1)
    # spatial support in band 2: 1 <= |xi| < 2
    energy = np.abs(tr) ** 2
    spatial = energy.sum(axis=0)
    from dkglab.grid import dyadic_band_mask

    outside = spatial[~dyadic_band_mask(grid.abs_xi, 2)]
    assert outside.max() == 0.0
    # modulation support in the L = 1 band
    values = modulation_values(u, "wave+")
    mask = dyadic_band_mask(values, 1)
    assert energy[~mask].max() < 1e-20
    with pytest.raises(DomainError):
        random_band_transform(grid, 32, 0.1, 64, 1, "wave+", rng)


def test_trilinear_hypotheses():
    check_trilinear_hypotheses(0.5, 1 / 3, 1 / 3, 1 / 3)
    with pytest.raises(PreconditionError):
        check_trilinear_hypotheses(0.2, 0.5, 0.5, 0.5)
    with pytest.raises(PreconditionError):
        check_trilinear_hypotheses(0.5, 0.1, 0.5, 0.5)
    with pytest.raises(PreconditionError):
        check_trilinear_hypotheses(0.3, 0.45, 0.45, 0.29)


def _smooth_triple(grid, seed, count=16, dt=0.1):
    rng = np.random.default_rng(seed)
    decay = np.exp(-0.5 * (np.abs(grid.xi1) + np.abs(grid.xi2)))

    def one():
        tr = (
            rng.standard_normal((count, grid.n, grid.n))
            + 1j * rng.standard_normal((count, grid.n, grid.n))
        ) * decay
        return field_from_transform(grid, tr, dt)

    phi = one()
    psi1 = (one(), one())
    psi2 = (one(), one())
    return phi, psi1, psi2


def test_trilinear_physical_matches_spectral(grid):
    phi, psi1, psi2 = _smooth_triple(grid, 42, count=8)
    a = trilinear_form(phi, psi1, psi2, ("+", "+", "+"), 0.0, method="physical")
    b = trilinear_form(phi, psi1, psi2, ("+", "+", "+"), 0.0, method="spectral")
    assert abs(a - b) <= 1e-10 * max(abs(a), 1e-30)


def test_trilinear_lattice_translation_invariance(grid):
    phi, psi1, psi2 = _smooth_triple(grid, 43)
    signs = ("+", "+", "-")
    base = trilinear_form(phi, psi1, psi2, signs, 0.1)

    def shift(u, k1, k2):
        phase = np.exp(-1j * (grid.xi1 * k1 + grid.xi2 * k2) * (2 * np.pi / grid.n))
        return field_from_transform(grid, u.transform() * phase, u.dt)

    shifted = trilinear_form(
        shift(phi, 3, 5),
        (shift(psi1[0], 3, 5), shift(psi1[1], 3, 5)),
        (shift(psi2[0], 3, 5), shift(psi2[1], 3, 5)),
        signs,
        0.1,
    )
    assert abs(base - shifted) <= 1e-10 * max(abs(base), 1e-30)


def test_empirical_trilinear_seed_stable(grid):
    kwargs = dict(a=0.5, b0=1 / 3, b1=1 / 3, b2=1 / 3, sigma=0.0, trials=10)
    r1 = empirical_trilinear_ratio(grid, 16, 0.1, seed=1, **kwargs)
    r2 = empirical_trilinear_ratio(grid, 16, 0.1, seed=1, **kwargs)
    assert r1["max_ratio"] == r2["max_ratio"]
    assert np.isfinite(r1["max_ratio"]) and r1["max_ratio"] > 0


def _smooth_spatial(grid, rng):
    decay = np.exp(-0.7 * (np.abs(grid.xi1) + np.abs(grid.xi2)))
    c = (rng.standard_normal((16, 16)) + 1j * rng.standard_normal((16, 16))) * decay
    c[grid.abs_xi > 2.5] = 0.0  # keep products inside the dealias mask
    return SpectralField(grid, c)


def test_commutator_matches_dense_oracle(grid):
    rng = np.random.default_rng(9)
    phi = _smooth_spatial(grid, rng)
    psi1 = SpinorField(_smooth_spatial(grid, rng), _smooth_spatial(grid, rng))
    fast = commutator_field(phi, psi1, 0.1, "+")
    slow = commutator_field_dense(phi, psi1, 0.1, "+")
    keep = grid.dealias_mask
    scale = max(np.abs(slow.c1.coeffs).max(), np.abs(slow.c2.coeffs).max(), 1e-30)
    for comp in ("c1", "c2"):
        diff = getattr(fast, comp).coeffs[keep] - getattr(slow, comp).coeffs[keep]
        assert np.abs(diff).max() < 1e-12 * scale


def test_commutator_vanishes_at_sigma_zero(grid):
    rng = np.random.default_rng(10)
    phi = _smooth_spatial(grid, rng)
    psi1 = SpinorField(_smooth_spatial(grid, rng), _smooth_spatial(grid, rng))
    comm = commutator_field(phi, psi1, 0.0, "+")
    assert np.abs(comm.c1.coeffs).max() < 1e-14
    assert np.abs(comm.c2.coeffs).max() < 1e-14


def test_commutator_scaling_slope(grid):
    report = commutator_ratio(
        grid, [0.0125, 0.025, 0.05, 0.1], theta=1.0, trials=10, seed=3
    )
    assert report["slope"] >= 0.9
    assert np.isfinite(report["max_ratio"])


def test_spacetime_norm_validation(grid):
    with pytest.raises(ConfigurationError):
        SpaceTimeNorm(sigma=-0.1, s=0.0, b=0.5, p=2, h="wave+")
    with pytest.raises(ConfigurationError):
        SpaceTimeNorm(sigma=0.0, s=0.0, b=0.5, p=0, h="wave+")
    with pytest.raises(ConfigurationError):
        SpaceTimeNorm(sigma=0.0, s=0.0, b=0.5, p=2, h="bogus")
    with pytest.raises(ConfigurationError):
        dispersion_symbol(grid, "bogus")
