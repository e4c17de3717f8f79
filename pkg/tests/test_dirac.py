import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dkglab.dirac import (
    ALPHA1,
    ALPHA2,
    BETA,
    SpinorField,
    angle_between,
    apply_projection,
    beta_commutation_check,
    dirac_symbol_residual,
    null_form_norm,
    projection_matrix,
    projection_residual,
)
from dkglab.errors import DomainError
from dkglab.grid import FourierGrid, SpectralField

lattice = st.tuples(
    st.integers(min_value=-32, max_value=32),
    st.integers(min_value=-32, max_value=32),
)
nonzero = lattice.filter(lambda v: v != (0, 0))


def test_matrix_algebra():
    eye = np.eye(2)
    for m in (ALPHA1, ALPHA2, BETA):
        assert np.allclose(m @ m, eye)
        assert np.allclose(m, m.conj().T)
    assert np.allclose(ALPHA1 @ ALPHA2 + ALPHA2 @ ALPHA1, 0)
    assert np.allclose(ALPHA1 @ BETA + BETA @ ALPHA1, 0)
    assert np.allclose(ALPHA2 @ BETA + BETA @ ALPHA2, 0)


@settings(max_examples=200, deadline=None)
@given(nonzero)
def test_projection_identities(xi):
    pp = projection_matrix(xi, +1)
    pm = projection_matrix(xi, -1)
    assert np.abs(pp @ pp - pp).max() < 1e-14
    assert np.abs(pm @ pm - pm).max() < 1e-14
    assert np.abs(pp + pm - np.eye(2)).max() < 1e-14
    assert np.abs(pp @ pm).max() < 1e-14
    assert beta_commutation_check(xi) < 1e-14
    assert dirac_symbol_residual(xi) < 1e-13


def test_zero_mode_projection():
    assert np.allclose(projection_matrix((0, 0), +1), 0.5 * np.eye(2))
    assert np.allclose(projection_matrix((0, 0), -1), 0.5 * np.eye(2))


def test_apply_projection_matches_matrix():
    g = FourierGrid(16)
    rng = np.random.default_rng(4)
    psi = SpinorField(
        SpectralField(g, rng.standard_normal((16, 16)) + 1j * rng.standard_normal((16, 16))),
        SpectralField(g, rng.standard_normal((16, 16)) + 1j * rng.standard_normal((16, 16))),
    )
    out = apply_projection(psi, "+")
    for i in range(g.n):
        for j in range(g.n):
            xi = (int(g.xi1[i, j]), int(g.xi2[i, j]))
            vec = np.array([psi.c1.coeffs[i, j], psi.c2.coeffs[i, j]])
            expect = projection_matrix(xi, +1) @ vec
            assert abs(out.c1.coeffs[i, j] - expect[0]) < 1e-13
            assert abs(out.c2.coeffs[i, j] - expect[1]) < 1e-13
    # idempotence and residual
    assert projection_residual(out, "+") < 1e-13


@settings(max_examples=200, deadline=None)
@given(nonzero, nonzero, st.sampled_from(["+", "-"]), st.sampled_from(["+", "-"]))
def test_null_form_vanishes_at_zero_angle_and_half_bound(xi, eta, s1, s2):
    norm, theta = null_form_norm(xi, eta, s1, s2)
    assert norm >= -1e-15
    assert theta >= 0
    # matrix norm of Pi(-s2 eta) Pi(s1 xi) equals sin(theta/2) <= theta/2
    assert norm <= 0.5 * theta + 1e-12
    if theta == 0.0:
        assert norm < 1e-14


def test_null_form_explicit_values():
    # opposite directions with (+,+): signed angle pi -> norm sin(pi/2) = 1
    norm, theta = null_form_norm((1, 0), (-1, 0), "+", "+")
    assert abs(theta - np.pi) < 1e-14
    assert abs(norm - 1.0) < 1e-14
    # aligned directions: zero angle, exact cancellation
    norm, theta = null_form_norm((1, 0), (2, 0), "+", "+")
    assert theta == 0.0
    assert norm < 1e-15


def test_angle_between():
    assert abs(angle_between((1, 0), (0, 1)) - np.pi / 2) < 1e-14
    assert angle_between((2, 3), (4, 6)) < 1e-14
    assert abs(angle_between((1, 0), (-2, 0)) - np.pi) < 1e-14
