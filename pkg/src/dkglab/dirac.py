"""Pauli/Dirac matrix algebra, half-wave projections and the null-form bound.

Matrices act on 2-component spinors (column-vector convention).  The
projection Pi(xi) = (1/2)(I + (xi/|xi|) . alpha) is extended to xi = 0 by
Pi(0) = I/2, the unique sign-symmetric completion of Pi(xi) + Pi(-xi) = I
(it is not idempotent, so idempotence holds for xi != 0 only).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DomainError
from .grid import SpectralField

ALPHA1 = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128)
ALPHA2 = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=np.complex128)
BETA = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=np.complex128)
IDENTITY2 = np.eye(2, dtype=np.complex128)


@dataclass
class SpinorField:
    """Two-component spinor: a pair of SpectralFields on one grid."""

    c1: SpectralField
    c2: SpectralField

    def __post_init__(self):
        if self.c1.grid != self.c2.grid:
            raise ConfigurationError("spinor components live on different grids")

    @property
    def grid(self):
        return self.c1.grid

    def copy(self):
        return SpinorField(self.c1.copy(), self.c2.copy())

    def __add__(self, other):
        return SpinorField(self.c1 + other.c1, self.c2 + other.c2)

    def __sub__(self, other):
        return SpinorField(self.c1 - other.c1, self.c2 - other.c2)

    def __mul__(self, scalar):
        return SpinorField(self.c1 * scalar, self.c2 * scalar)

    __rmul__ = __mul__

    def squared_charge(self):
        """||c1||^2 + ||c2||^2 in the module normalization."""
        return self.c1.l2_norm() ** 2 + self.c2.l2_norm() ** 2


def spinor_zeros(grid):
    from .grid import zeros

    return SpinorField(zeros(grid), zeros(grid))


def _sign_value(sign):
    if sign in (+1, -1):
        return sign
    if sign == "+":
        return +1
    if sign == "-":
        return -1
    raise DomainError(f"sign must be +1/-1 or '+'/'-', got {sign!r}")


def projection_matrix(xi, sign=+1):
    """Pi(sign*xi) as a dense 2x2 matrix; Pi(0) = I/2."""
    s = _sign_value(sign)
    x1, x2 = float(xi[0]), float(xi[1])
    r = np.hypot(x1, x2)
    if r == 0.0:
        return 0.5 * IDENTITY2
    u1, u2 = s * x1 / r, s * x2 / r
    return 0.5 * (IDENTITY2 + u1 * ALPHA1 + u2 * ALPHA2)


def apply_projection(psi, sign):
    """Mode-wise multiplication by Pi(sign*xi) over the whole lattice."""
    s = _sign_value(sign)
    grid = psi.grid
    r = grid.abs_xi
    with np.errstate(invalid="ignore", divide="ignore"):
        w = np.where(r > 0, (grid.xi1 + 1j * grid.xi2) / np.where(r > 0, r, 1.0), 0.0)
    w = s * w
    a, b = psi.c1.coeffs, psi.c2.coeffs
    out1 = 0.5 * (a + np.conj(w) * b)
    out2 = 0.5 * (w * a + b)
    return SpinorField(SpectralField(grid, out1), SpectralField(grid, out2))


def projection_residual(psi, sign):
    """Distance of psi from the range of Pi(sign*D), relative to its size.

    Returns ||Pi psi - psi|| / max(||psi||, tiny); zero modes use Pi(0)=I/2
    and are excluded by masking them out of the residual.
    """
    proj = apply_projection(psi, sign)
    num = 0.0
    den = 0.0
    for comp, pcomp in ((psi.c1, proj.c1), (psi.c2, proj.c2)):
        diff = pcomp.coeffs - comp.coeffs
        diff = diff.copy()
        diff[0, 0] = 0.0  # Pi(0) = I/2 is not a projector
        num += float(np.sum(np.abs(diff) ** 2))
        den += float(np.sum(np.abs(comp.coeffs) ** 2))
    return np.sqrt(num) / max(np.sqrt(den), 1e-300)


def beta_commutation_check(xi):
    """Frobenius norm of Pi(xi) beta - beta Pi(-xi) (the sign-reversing identity)."""
    lhs = projection_matrix(xi, +1) @ BETA
    rhs = BETA @ projection_matrix(xi, -1)
    return float(np.linalg.norm(lhs - rhs))


def dirac_symbol_residual(xi):
    """Mode-wise identity |xi| Pi(xi) - |xi| Pi(-xi) = xi . alpha (massless form)."""
    r = np.hypot(float(xi[0]), float(xi[1]))
    lhs = r * projection_matrix(xi, +1) - r * projection_matrix(xi, -1)
    rhs = float(xi[0]) * ALPHA1 + float(xi[1]) * ALPHA2
    return float(np.linalg.norm(lhs - rhs))


def angle_between(u, v):
    """Angle in [0, pi] via atan2(|u x v|, u.v), stable near 0 and pi."""
    u1, u2 = float(u[0]), float(u[1])
    v1, v2 = float(v[0]), float(v[1])
    cross = u1 * v2 - u2 * v1
    dot = u1 * v1 + u2 * v2
    return float(np.arctan2(abs(cross), dot))


def null_form_norm(xi, eta, s1, s2):
    """Operator norm of Pi(-s2*eta) Pi(s1*xi) and the signed angle.

    The norm vanishes when the signed directions coincide (the spinorial
    null structure); it equals 1 at angle pi where the product is a
    projection.
    """
    if (xi[0], xi[1]) == (0, 0) or (eta[0], eta[1]) == (0, 0):
        raise DomainError("null_form_norm needs nonzero frequency vectors")
    a = _sign_value(s1)
    b = _sign_value(s2)
    prod = projection_matrix(eta, -b) @ projection_matrix(xi, a)
    norm = float(np.linalg.norm(prod, ord=2))
    theta = angle_between((a * xi[0], a * xi[1]), (b * eta[0], b * eta[1]))
    return norm, theta
