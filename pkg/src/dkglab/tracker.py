"""Radius-of-analyticity tracking and the exponential lower-bound certificate.

Builds on the weighted-norm observables of the solver: measures the
spinor and scalar weighted energies M_sigma(t), N_sigma(t) along a
trajectory, verifies the approximate-conservation growth law, and
assembles the staircase schedule whose envelope is the exponential
lower bound sigma(t) >= sigma_1 * e^{-A t} for the analyticity radius.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ConfigurationError,
    DomainError,
    NumericalFailure,
    PreconditionError,
)
from .gevrey import GevreyWeight, gevrey_norm
from .solver import picard_evolve


@dataclass(frozen=True)
class TrackerParams:
    """Inputs of the certificate: interpolation exponent and constants.

    a sets the growth/decay trade-off; c is the growth-estimate constant,
    c0 the local-existence constant, charge the conserved spinor L^2 mass,
    sigma0 the initial radius.
    """

    a: float
    sigma0: float
    c: float
    c0: float
    charge: float
    mass: float = 1.0

    def __post_init__(self):
        if not 0.25 < self.a <= 0.5:
            raise DomainError(f"a must lie in (1/4, 1/2], got {self.a}")
        if self.sigma0 <= 0:
            raise DomainError("sigma0 must be positive")
        if self.c <= 0 or self.c0 <= 0:
            raise DomainError("constants c and c0 must be positive")
        if self.charge < 0:
            raise DomainError("charge must be nonnegative")


def exponents(a):
    """(p, q, r) with p = min(a, 3(a - 1/4)), q = 1/2 - a, r = (3/2 - p)/q.

    r is infinite at a = 1/2 (q = 0); certificate generation requires
    a < 1/2 strictly.
    """
    if not 0.25 < a <= 0.5:
        raise DomainError(f"a must lie in (1/4, 1/2], got {a}")
    p = min(a, 3.0 * (a - 0.25))
    q = 0.5 - a
    r = math.inf if q == 0.0 else (1.5 - p) / q
    return p, q, r


def _states(traj):
    states = [s.state for s in traj.samples]
    if any(s is None for s in states):
        raise PreconditionError(
            "trajectory must be recorded with store_states=True for tracking"
        )
    return states


def measure_M_sigma(traj, sigma):
    """Spinor weighted energy: sum of squared G^{sigma,0} norms of psi+-."""
    w = GevreyWeight(sigma, 0.0)
    return np.array(
        [
            gevrey_norm(s.psi_plus, w) ** 2 + gevrey_norm(s.psi_minus, w) ** 2
            for s in _states(traj)
        ]
    )


def measure_N_sigma(traj, sigma):
    """Scalar weighted energy: G^{sigma,1/2} norm of phi+."""
    w = GevreyWeight(sigma, 0.5)
    return np.array([gevrey_norm(s.phi_plus, w) for s in _states(traj)])


def local_delta(m0, n0, c0):
    """Local existence time delta = c0 / (1 + M_sigma(0) + N_sigma(0)^2)."""
    if m0 < 0 or n0 < 0 or c0 <= 0:
        raise DomainError("local_delta needs m0, n0 >= 0 and c0 > 0")
    return c0 / (1.0 + m0 + n0**2)


def verify_approx_conservation(traj, sigma_list, a, c0):
    """Growth of the weighted energies over one local existence time.

    For each sigma, measures G(sigma) = sup_{t <= delta} M_sigma(t) -
    M_sigma(0) and the effective constant obtained by dividing out the
    predicted growth shape delta^p sigma^{1/2-a} M0 (sqrt(M0) + N0);
    likewise H(sigma) and its shape delta^{1/2} K + delta^p sigma^q M0
    for the scalar energy.  Reports the log-log slope of G versus sigma.
    """
    p, q, _ = exponents(a)
    sigma_list = sorted(float(s) for s in sigma_list)
    sigma_max = max(sigma_list)
    m_ref = measure_M_sigma(traj, sigma_max)
    n_ref = measure_N_sigma(traj, sigma_max)
    if not (np.isfinite(m_ref).all() and np.isfinite(n_ref).all()):
        raise NumericalFailure("non-finite weighted energies along the trajectory")
    delta = local_delta(m_ref[0], n_ref[0], c0)
    times = traj.times
    window = times <= delta + 1e-12
    if window.sum() < 2 or times[-1] + 1e-12 < delta:
        raise PreconditionError(
            f"trajectory must cover the local time delta = {delta:.4g}"
        )
    charge0 = traj.samples[0].charge
    rows = []
    for sigma in sigma_list:
        m = measure_M_sigma(traj, sigma)[window]
        n = measure_N_sigma(traj, sigma)[window]
        growth_m = float(m.max() - m[0])
        growth_n = float(n.max() - n[0])
        row = {"sigma": sigma, "growth_m": growth_m, "growth_n": growth_n}
        if sigma > 0:
            shape_m = delta**p * sigma**q * m[0] * (math.sqrt(m[0]) + n[0])
            shape_n = delta**0.5 * charge0 + delta**p * sigma**q * m[0]
            row["c_eff_m"] = growth_m / shape_m if shape_m > 0 else math.inf
            row["c_eff_n"] = growth_n / shape_n if shape_n > 0 else math.inf
        rows.append(row)
    positive = [r for r in rows if r["sigma"] > 0 and r["growth_m"] > 0]
    slope = math.nan
    if len(positive) >= 2:
        logs = np.log([r["sigma"] for r in positive])
        logg = np.log([r["growth_m"] for r in positive])
        slope = float(np.polyfit(logs, logg, 1)[0])
    c_effs = [r["c_eff_m"] for r in rows if "c_eff_m" in r]
    return {
        "delta": delta,
        "rows": rows,
        "slope_m": slope,
        "max_c_eff_m": max(c_effs) if c_effs else math.nan,
        "exponents": {"p": p, "q": q},
    }


@dataclass
class Certificate:
    """Staircase schedule and its exponential envelope for the radius."""

    params: TrackerParams
    r0: float
    r_work: float
    delta: float
    t0: float
    rate: float  # A in sigma(t) = sigma_1 e^{-A t}
    knots: list = field(default_factory=list)  # (t_start, t_end, sigma)

    @property
    def sigma1(self):
        return self.knots[0][2]

    def curve(self, t):
        """Envelope value sigma_1 * e^{-rate * t} (t in [0, horizon])."""
        return self.sigma1 * np.exp(-self.rate * np.asarray(t, dtype=float))

    def lower_bound(self, t):
        """Certified lower bound: min(sigma0 on [0, t0], envelope)."""
        t = np.asarray(t, dtype=float)
        return np.minimum(self.params.sigma0, self.curve(t))

    def to_json(self):
        return json.dumps(
            {
                "params": {
                    "a": self.params.a,
                    "sigma0": self.params.sigma0,
                    "c": self.params.c,
                    "c0": self.params.c0,
                    "charge": self.params.charge,
                    "mass": self.params.mass,
                },
                "R0": self.r0,
                "R": self.r_work,
                "delta": self.delta,
                "T0": self.t0,
                "A": self.rate,
                "knots": [
                    {"t_start": a, "t_end": b, "sigma": s} for a, b, s in self.knots
                ],
            },
            indent=2,
        )


def certificate_schedule(params, m0, n0, horizon=None):
    """Build the certificate from the constants and the initial energies.

    R0 is the smallest power of two satisfying the three threshold
    inequalities; R = max(R0, m0 + n0^2); each interval [nT0, (n+1)T0]
    carries radius sigma_{n+1} = (11^n R)^{-r} and the envelope decays
    at rate A = r ln(11) / T0, interpolating the knots exactly.
    """
    if params.a >= 0.5:
        raise DomainError("certificate requires a < 1/2 (finite decay exponent)")
    p, q, r = exponents(params.a)
    c, c0, charge = params.c, params.c0, params.charge
    r0 = 1.0
    while not (
        params.sigma0**q * r0 ** (1.5 - p) >= 1.0
        and c * math.sqrt(c0) * charge <= r0
        and 11.0**1.5 * c * c0**p <= r0
    ):
        r0 *= 2.0
        if r0 > 1e300:
            raise NumericalFailure("no admissible threshold R0 below overflow")
    r_work = max(r0, m0 + n0**2)
    delta = c0 / (12.0 * r_work)
    mu = max(
        11.0**1.5 * c * (c0 / 12.0) ** (p - 1.0),
        c * (c0 / 12.0) ** (-0.5) * charge,
    )
    t0 = 1.0 / (2.0 * mu)
    rate = r * math.log(11.0) / t0
    sigma1 = r_work**-r
    # one-interval induction inequalities at n = 1
    lhs1 = c * delta**p * sigma1**q * 11.0**1.5 * math.sqrt(r_work)
    lhs2 = c * charge * math.sqrt(delta)
    if lhs1 > 1.0 + 1e-12 or lhs2 > math.sqrt(r_work) + 1e-12:
        raise NumericalFailure(
            f"induction inequalities fail at n=1: {lhs1:.3g}, {lhs2:.3g}"
        )
    if horizon is None:
        horizon = 4.0 * t0
    knots = []
    n = 0
    while n * t0 < horizon:
        # evaluated in log space so late knots underflow to 0.0 gracefully
        sigma_n = math.exp(-r * (n * math.log(11.0) + math.log(r_work)))
        knots.append((n * t0, (n + 1) * t0, sigma_n))
        n += 1
    return Certificate(params, r0, r_work, delta, t0, rate, knots)


def compare_certificate(traj, cert):
    """Sample-wise check that the measured radius clears the certificate.

    Saturated (resolution-limited) radius estimates are excluded with a
    count; the verdict is pass when every usable sample sits on or above
    the lower-bound curve.  Rows double as the comparison CSV content.
    """
    rows = []
    excluded = 0
    margins = []
    for sample in traj.samples:
        if sample.sigma_hat is None:
            raise PreconditionError("trajectory was run without radius tracking")
        bound = float(cert.lower_bound(sample.t))
        if sample.saturated or not math.isfinite(sample.sigma_hat):
            excluded += 1
            continue
        margin = sample.sigma_hat - bound
        margins.append(margin)
        rows.append(
            {
                "t": sample.t,
                "sigma_hat": sample.sigma_hat,
                "sigma_lower": bound,
                "margin": margin,
                "pass": margin >= 0.0,
            }
        )
    return {
        "rows": rows,
        "excluded_saturated": excluded,
        "min_margin": min(margins) if margins else math.nan,
        "verdict": bool(rows) and all(r["pass"] for r in rows),
        "constants": {"c": cert.params.c, "c0": cert.params.c0},
    }


def calibrate_c0(
    state,
    mass,
    sigma0,
    steps=12,
    n_nodes=256,
    max_iter=40,
    tol=1e-10,
):
    """Largest c0 (to bisection accuracy) with a contracting local solve.

    A candidate local time delta is accepted when the fixed-point
    iteration of the integral formulation contracts on [0, delta] for
    the given datum with increment ratio at most 1/2; the largest such
    delta in (0, 1] is found by bisection and converted to the constant
    via c0 = delta * (1 + M(0) + N(0)^2) at sigma0 (the inverse of
    local_delta).  The oracle's one-unit time cap bounds the search.
    """
    w0 = GevreyWeight(sigma0, 0.0)
    wh = GevreyWeight(sigma0, 0.5)
    m0 = (
        gevrey_norm(state.psi_plus, w0) ** 2 + gevrey_norm(state.psi_minus, w0) ** 2
    )
    n0 = gevrey_norm(state.phi_plus, wh)
    scale = 1.0 + m0 + n0**2

    def contracts(delta):
        try:
            picard_evolve(
                state,
                delta,
                mass,
                n_nodes=n_nodes,
                max_iter=max_iter,
                tol=tol,
                strict_contraction=True,
            )
        except (NumericalFailure, ConfigurationError):
            return False
        return True

    lo, hi = 1e-4, 1.0
    if not contracts(lo):
        raise NumericalFailure(f"no contraction even on [0, {lo}]")
    if contracts(hi):
        return hi * scale
    for _ in range(steps):
        mid = math.sqrt(lo * hi)
        if contracts(mid):
            lo = mid
        else:
            hi = mid
    return lo * scale
