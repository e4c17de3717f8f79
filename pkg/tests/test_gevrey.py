import numpy as np
import pytest

from dkglab.errors import DomainError, EstimationError
from dkglab.gevrey import (
    GevreyWeight,
    estimate_radius,
    gevrey_norm,
    make_datum,
    shell_maxima,
    default_window,
)
from dkglab.grid import FourierGrid, SpectralField


def test_weight_validation():
    with pytest.raises(DomainError):
        GevreyWeight(-0.1, 0.0)
    GevreyWeight(0.0, 0.5)


def test_gevrey_norm_single_mode_hand_value():
    g = FourierGrid(16)
    coeffs = np.zeros((16, 16), dtype=complex)
    coeffs[(g.xi1 == 2) & (g.xi2 == 1)] = 3.0
    f = SpectralField(g, coeffs)
    # ||f||_{sigma,s} = |c| e^{sigma*3} <5>^{s/2... } with <xi>=sqrt(1+5)
    sigma, s = 0.2, 0.5
    expect = 3.0 * np.exp(sigma * 3) * (1 + 5) ** (s / 2) / (2 * np.pi)
    got = gevrey_norm(f, GevreyWeight(sigma, s))
    assert abs(got - expect) < 1e-12 * expect


def test_gevrey_norm_reduces_to_l2():
    g = FourierGrid(16)
    rng = np.random.default_rng(5)
    f = SpectralField(
        g, rng.standard_normal((16, 16)) + 1j * rng.standard_normal((16, 16))
    )
    assert abs(gevrey_norm(f, GevreyWeight(0.0, 0.0)) - f.l2_norm()) < 1e-13


@pytest.mark.parametrize("sigma_star", [0.1, 0.3, 0.5])
@pytest.mark.parametrize("rho", [0.0, 2.0])
def test_radius_estimator_recovery(sigma_star, rho):
    g = FourierGrid(256)
    f = make_datum(g, "exp_decay", sigma=sigma_star, rho=rho, seed=11)
    est = estimate_radius(f)
    assert not est.saturated
    assert abs(est.sigma_hat - sigma_star) <= 0.02 * sigma_star


def test_radius_estimator_saturates_on_flat_data():
    g = FourierGrid(64)
    # gaussian data decays like e^{-|xi|^2}: super-exponential, beyond
    # resolvable radius -> saturated flag rather than a number
    f = make_datum(g, "gaussian", width=0.5, seed=6)
    est = estimate_radius(f)
    assert est.saturated


def test_radius_estimator_degenerate_input():
    g = FourierGrid(32)
    coeffs = np.zeros((32, 32), dtype=complex)
    coeffs[0, 0] = 1.0
    with pytest.raises(EstimationError):
        estimate_radius(SpectralField(g, coeffs))


def test_shell_maxima_shape():
    g = FourierGrid(32)
    f = make_datum(g, "exp_decay", sigma=0.3, seed=7)
    window = default_window(g)
    radii, maxima = shell_maxima(np.abs(f.coeffs), g, window)
    assert len(radii) == len(maxima)
    assert (np.diff(radii) > 0).all()


def test_make_datum_kinds():
    g = FourierGrid(32)
    single = make_datum(g, "single_mode", mode=(3, -2), amplitude=2.0)
    nz = np.nonzero(single.coeffs)
    assert len(nz[0]) == 1
    with pytest.raises(DomainError):
        make_datum(g, "unknown_kind")
    with pytest.raises(DomainError):
        make_datum(g, "exp_decay")  # missing sigma
