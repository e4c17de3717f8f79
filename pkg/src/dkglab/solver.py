"""Time integration of the split half-wave DKG system.

State is the triple (psi_plus, psi_minus, phi_plus) evolving by

    (-i d/dt + |D|) psi_+  = Pi_+( -M beta psi + (Re phi_+) beta psi )
    (-i d/dt - |D|) psi_-  = Pi_-( -M beta psi + (Re phi_+) beta psi )
    (-i d/dt + <D>) phi_+  = <D>^-1 <beta psi, psi>

with psi = psi_+ + psi_-.  The production integrator is Lawson
(integrating-factor) RK4 with exact multiplier propagators on the linear
part, so the free flow is integrated exactly and all Gevrey norms are
preserved to round-off when the nonlinearity vanishes.  A Picard
(contraction) iteration is retained as a small-instance oracle.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dirac import SpinorField, apply_projection, projection_residual
from .errors import ConfigurationError, DomainError, NumericalFailure
from .gevrey import GevreyWeight, RadiusEstimate, estimate_radius, gevrey_norm
from .grid import (
    TWO_PI,
    FourierGrid,
    SpectralField,
    forward_transform,
    inverse_transform,
    reflect,
)


@dataclass
class SplitState:
    psi_plus: SpinorField
    psi_minus: SpinorField
    phi_plus: SpectralField
    t: float = 0.0

    @property
    def grid(self):
        return self.phi_plus.grid

    def arrays(self):
        return (
            self.psi_plus.c1.coeffs,
            self.psi_plus.c2.coeffs,
            self.psi_minus.c1.coeffs,
            self.psi_minus.c2.coeffs,
            self.phi_plus.coeffs,
        )

    def fields(self):
        g = self.grid
        return tuple(SpectralField(g, a) for a in self.arrays())

    def copy(self):
        return SplitState(
            self.psi_plus.copy(), self.psi_minus.copy(), self.phi_plus.copy(), self.t
        )


def _state_from_arrays(grid, arrs, t):
    return SplitState(
        SpinorField(SpectralField(grid, arrs[0]), SpectralField(grid, arrs[1])),
        SpinorField(SpectralField(grid, arrs[2]), SpectralField(grid, arrs[3])),
        SpectralField(grid, arrs[4]),
        t,
    )


def hermitian_part(coeffs):
    """Coefficients of Re(f): (c(xi) + conj(c(-xi))) / 2."""
    return 0.5 * (coeffs + np.conj(reflect(coeffs)))


def antihermitian_part(coeffs):
    """Coefficients of Im(f): (c(xi) - conj(c(-xi))) / 2i."""
    return (coeffs - np.conj(reflect(coeffs))) / 2.0j


def _split_arrays(grid, f1, f2):
    """Solver-level half-wave split of a spinor's coefficient arrays.

    Identical to the Dirac projections for xi != 0.  At xi = 0 the matrix
    Pi(0) = I/2 is not idempotent and a half/half split leaks charge
    between the branches, so the solver routes the whole zero mode to the
    '+' branch: the reconstructed psi is unchanged and the split charge
    ||psi_+||^2 + ||psi_-||^2 is conserved exactly by the semi-discrete
    flow.
    """
    r = grid.abs_xi
    w = np.where(r > 0, (grid.xi1 + 1j * grid.xi2) / np.where(r > 0, r, 1.0), 0.0)
    wc = np.conj(w)
    fp1 = 0.5 * (f1 + wc * f2)
    fp2 = 0.5 * (w * f1 + f2)
    fm1 = 0.5 * (f1 - wc * f2)
    fm2 = 0.5 * (-w * f1 + f2)
    fp1[0, 0] = f1[0, 0]
    fp2[0, 0] = f2[0, 0]
    fm1[0, 0] = 0.0
    fm2[0, 0] = 0.0
    return fp1, fp2, fm1, fm2


def split_initial_data(psi0, phi0, phi1):
    """(psi0, phi0, phi1) -> (Pi+ psi0, Pi- psi0, phi0 + i<D>^-1 phi1)."""
    if not phi0.is_real(1e-10) or not phi1.is_real(1e-10):
        raise DomainError("phi0 and phi1 must represent real-valued functions")
    grid = psi0.grid
    fp1, fp2, fm1, fm2 = _split_arrays(grid, psi0.c1.coeffs, psi0.c2.coeffs)
    psi_plus = SpinorField(SpectralField(grid, fp1), SpectralField(grid, fp2))
    psi_minus = SpinorField(SpectralField(grid, fm1), SpectralField(grid, fm2))
    phi_plus = SpectralField(grid, phi0.coeffs + 1j * phi1.coeffs / grid.angles_xi)
    return SplitState(psi_plus, psi_minus, phi_plus, 0.0)


def reconstruct(state):
    """Return (psi, phi, dphi_dt) from the split variables."""
    grid = state.grid
    psi = state.psi_plus + state.psi_minus
    phi = SpectralField(grid, hermitian_part(state.phi_plus.coeffs))
    dphi_dt = SpectralField(
        grid, grid.angles_xi * antihermitian_part(state.phi_plus.coeffs)
    )
    return psi, phi, dphi_dt


def charge(state):
    """||psi_+||^2 + ||psi_-||^2 (the conserved charge at sigma = 0)."""
    return state.psi_plus.squared_charge() + state.psi_minus.squared_charge()


def _rhs_arrays(grid, arrs, mass):
    """Nonlinear right-hand sides (F+, F-, G) on raw coefficient arrays.

    Products are evaluated pseudospectrally with the 2/3 mask applied to
    every input and to the outputs; <beta psi, psi> = |psi1|^2 - |psi2|^2
    is computed pointwise in physical space (exactly real).
    """
    p1, p2, m1, m2, fp = arrs
    mask = grid.dealias_mask
    scale_fwd = (TWO_PI / grid.n) ** 2
    scale_inv = (grid.n / TWO_PI) ** 2

    psi1 = p1 + m1
    psi2 = p2 + m2
    re_phi = hermitian_part(fp)

    psi1_p = np.fft.ifft2(np.where(mask, psi1, 0.0)) * scale_inv
    psi2_p = np.fft.ifft2(np.where(mask, psi2, 0.0)) * scale_inv
    phi_p = np.fft.ifft2(np.where(mask, re_phi, 0.0)) * scale_inv

    prod1 = np.where(mask, np.fft.fft2(phi_p * psi1_p) * scale_fwd, 0.0)
    prod2 = np.where(mask, np.fft.fft2(phi_p * psi2_p) * scale_fwd, 0.0)

    # F = -M beta psi + (Re phi_+) beta psi, with beta psi = (psi1, -psi2)
    f1 = -mass * psi1 + prod1
    f2 = mass * psi2 - prod2

    # mode-wise Dirac projections of F (zero mode routed to the + branch)
    fp1, fp2, fm1, fm2 = _split_arrays(grid, f1, f2)

    source = np.abs(psi1_p) ** 2 - np.abs(psi2_p) ** 2
    g = np.where(mask, np.fft.fft2(source) * scale_fwd, 0.0) / grid.angles_xi
    return fp1, fp2, fm1, fm2, g


def rhs_nonlinear(state, mass):
    """Public wrapper returning (F_plus, F_minus, G) as field objects."""
    grid = state.grid
    fp1, fp2, fm1, fm2, g = _rhs_arrays(grid, state.arrays(), mass)
    return (
        SpinorField(SpectralField(grid, fp1), SpectralField(grid, fp2)),
        SpinorField(SpectralField(grid, fm1), SpectralField(grid, fm2)),
        SpectralField(grid, g),
    )


class LawsonRK4:
    """Integrating-factor RK4 with exact linear propagators.

    Writing each equation as du/dt = -i h(D) u + i F(u), the substitution
    v = exp(i t h(D)) u removes the linear part and classical RK4 is
    applied to v.  Propagators exp(-i tau h) are cached for tau = dt and
    dt/2; h = +|xi|, -|xi|, +<xi> for psi_+, psi_-, phi_+ respectively.
    """

    def __init__(self, grid, dt, mass, nonlinear=True):
        if dt == 0.0:
            raise ConfigurationError("dt must be nonzero")
        self.grid = grid
        self.dt = float(dt)
        self.mass = float(mass)
        self.nonlinear = bool(nonlinear)
        symbols = (grid.abs_xi, grid.abs_xi, -grid.abs_xi, -grid.abs_xi,
                   grid.angles_xi)
        self._half = [np.exp(-0.5j * self.dt * h) for h in symbols]
        self._full = [np.exp(-1.0j * self.dt * h) for h in symbols]

    def _eval(self, arrs):
        return [1j * f for f in _rhs_arrays(self.grid, arrs, self.mass)]

    def step_arrays(self, arrs):
        dt = self.dt
        e1, e2 = self._half, self._full
        if not self.nonlinear:
            return [f * u for f, u in zip(e2, arrs)]
        k1 = self._eval(arrs)
        u2 = [h * (u + 0.5 * dt * k) for h, u, k in zip(e1, arrs, k1)]
        k2 = self._eval(u2)
        u3 = [h * u + 0.5 * dt * k for h, u, k in zip(e1, arrs, k2)]
        k3 = self._eval(u3)
        u4 = [f * u + dt * h * k for f, h, u, k in zip(e2, e1, arrs, k3)]
        k4 = self._eval(u4)
        return [
            f * u + dt / 6.0 * (f * a + 2.0 * h * (b + c) + d)
            for f, h, u, a, b, c, d in zip(e2, e1, arrs, k1, k2, k3, k4)
        ]

    def step(self, state):
        arrs = self.step_arrays(list(state.arrays()))
        return _state_from_arrays(self.grid, arrs, state.t + self.dt)


def step(state, dt, mass):
    """One Lawson-RK4 step (convenience wrapper, no propagator caching)."""
    return LawsonRK4(state.grid, dt, mass).step(state)


@dataclass
class SolverConfig:
    dt: float
    t_end: float
    mass: float = 1.0
    record_every: int = 1
    integrator: str = "lawson_rk4"
    sigma_list: tuple = (0.0,)
    track_radius: bool = False
    radius_window: tuple | None = None
    store_states: bool = False
    nonlinear: bool = True

    def __post_init__(self):
        if self.dt <= 0:
            raise ConfigurationError("dt must be > 0")
        if self.t_end < 0:
            raise ConfigurationError("t_end must be >= 0")
        if self.record_every < 1:
            raise ConfigurationError("record_every must be >= 1")
        if self.integrator not in ("lawson_rk4", "picard_oracle"):
            raise ConfigurationError(f"unknown integrator {self.integrator!r}")


@dataclass
class Sample:
    t: float
    charge: float
    m_sigma: dict
    n_sigma: dict
    sigma_hat: float | None
    pi_residual: float
    saturated: bool = False
    state: SplitState | None = None


@dataclass
class Trajectory:
    config: SolverConfig
    samples: list = field(default_factory=list)

    @property
    def times(self):
        return np.array([s.t for s in self.samples])

    def series(self, key, sigma=None):
        if key == "charge":
            return np.array([s.charge for s in self.samples])
        if key == "m_sigma":
            return np.array([s.m_sigma[sigma] for s in self.samples])
        if key == "n_sigma":
            return np.array([s.n_sigma[sigma] for s in self.samples])
        if key == "sigma_hat":
            return np.array(
                [np.nan if s.sigma_hat is None else s.sigma_hat for s in self.samples]
            )
        raise KeyError(key)


def radius_observable(state, window):
    """Radius estimate from the pooled modulus of every state component."""
    pooled = np.maximum.reduce([np.abs(a) for a in state.arrays()])
    return estimate_radius(SpectralField(state.grid, pooled), window)


def _observe(state, config):
    weights = {s: GevreyWeight(s, 0.0) for s in config.sigma_list}
    half = {s: GevreyWeight(s, 0.5) for s in config.sigma_list}
    m_sigma = {}
    n_sigma = {}
    for s in config.sigma_list:
        m_sigma[s] = (
            gevrey_norm(state.psi_plus, weights[s]) ** 2
            + gevrey_norm(state.psi_minus, weights[s]) ** 2
        )
        n_sigma[s] = gevrey_norm(state.phi_plus, half[s])
    sigma_hat = None
    saturated = False
    if config.track_radius:
        est = radius_observable(state, config.radius_window)
        sigma_hat = est.sigma_hat
        saturated = est.saturated
    res = max(
        projection_residual(state.psi_plus, +1),
        projection_residual(state.psi_minus, -1),
    )
    return Sample(
        t=state.t,
        charge=charge(state),
        m_sigma=m_sigma,
        n_sigma=n_sigma,
        sigma_hat=sigma_hat,
        pi_residual=res,
        saturated=saturated,
        state=state.copy() if config.store_states else None,
    )


def evolve(state, config):
    """Repeated stepping with observable sampling; deterministic."""
    n_steps = int(round(config.t_end / config.dt)) if config.t_end > 0 else 0
    if n_steps and abs(n_steps * config.dt - config.t_end) > 1e-9 * config.t_end:
        raise ConfigurationError("t_end must be an integer multiple of dt")
    traj = Trajectory(config)
    traj.samples.append(_observe(state, config))
    if n_steps == 0:
        return traj
    if config.integrator == "picard_oracle":
        final = picard_evolve(state, config.t_end, config.mass)
        traj.samples.append(_observe(final, config))
        return traj
    stepper = LawsonRK4(state.grid, config.dt, config.mass, config.nonlinear)
    arrs = list(state.arrays())
    for k in range(1, n_steps + 1):
        arrs = stepper.step_arrays(arrs)
        if not np.isfinite(arrs[0]).all():
            raise NumericalFailure(f"non-finite state at t = {k * config.dt:.6g}")
        if k % config.record_every == 0 or k == n_steps:
            current = _state_from_arrays(state.grid, arrs, k * config.dt)
            traj.samples.append(_observe(current, config))
    return traj


def _cumulative_quadratic(values, h):
    """Cumulative integral of node values by local quadratic interpolation.

    Third-order accurate at every node (Adams-Moulton-type weights); used
    only inside the Picard oracle.
    """
    out = np.zeros_like(values)
    f = values
    if len(f) >= 3:
        out[1] = out[0] + h / 12.0 * (5.0 * f[0] + 8.0 * f[1] - f[2])
        for j in range(2, len(f)):
            out[j] = out[j - 1] + h / 12.0 * (5.0 * f[j] + 8.0 * f[j - 1] - f[j - 2])
    elif len(f) == 2:
        out[1] = h * 0.5 * (f[0] + f[1])
    return out


def picard_evolve(
    state, t_end, mass, n_nodes=None, max_iter=60, tol=1e-13, strict_contraction=False
):
    """Contraction-iteration oracle: Duhamel fixed point on a time lattice.

    Restricted to grids <= 32^2 and t_end <= 1 (desk-scale oracle; the
    iteration is a proof device, not a production integrator).  With
    strict_contraction the successive-iterate increments must shrink by
    at least a factor of 2 each round (the contraction factor of the
    fixed-point argument), not merely converge within the iteration
    budget.
    """
    grid = state.grid
    if grid.n > 32:
        raise ConfigurationError("picard oracle restricted to grids <= 32^2")
    if t_end > 1.0:
        raise ConfigurationError("picard oracle restricted to t_end <= 1")
    if t_end == 0.0:
        return state.copy()
    if n_nodes is None:
        n_nodes = max(64, int(round(t_end / 2.5e-4)))
    h = t_end / n_nodes
    times = np.arange(n_nodes + 1) * h
    symbols = np.stack(
        (grid.abs_xi, grid.abs_xi, -grid.abs_xi, -grid.abs_xi, grid.angles_xi)
    )
    # twisted variable w(t) = exp(i t h(D)) u(t); w' = i exp(i t h(D)) F(u)
    prop = np.exp(-1j * times[:, None, None, None] * symbols[None])  # U(t_j)
    init = np.stack(state.arrays())
    iterate = np.repeat(init[None], n_nodes + 1, axis=0)  # u at nodes
    prev_delta = None
    for _ in range(max_iter):
        g = np.empty_like(iterate)
        for j in range(n_nodes + 1):
            f = np.stack(_rhs_arrays(grid, list(iterate[j]), mass))
            g[j] = 1j * f / prop[j]
        w = init[None] + _cumulative_quadratic(g, h)
        new = prop * w
        delta = float(np.abs(new - iterate).max())
        iterate = new
        if delta < tol:
            break
        if (
            strict_contraction
            and prev_delta is not None
            and delta > 0.5 * prev_delta
            and delta > 100.0 * tol
        ):
            raise NumericalFailure(
                f"picard increment ratio above 1/2 ({prev_delta:.3g} -> {delta:.3g})"
            )
        prev_delta = delta
    else:
        raise NumericalFailure("picard iteration did not contract to tolerance")
    return _state_from_arrays(grid, list(iterate[-1]), state.t + t_end)
