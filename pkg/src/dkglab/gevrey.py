"""Gevrey norms, analytic test data and the radius-of-analyticity estimator.

The radius is operationalized as the exponential decay rate of the
coefficient shell maxima along l1-shells {xi : |xi1|+|xi2| = r}, which is
the natural geometry for the weight exp(sigma*(|xi1|+|xi2|)).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .dirac import SpinorField
from .errors import DomainError, EstimationError
from .grid import (
    TWO_PI,
    FourierGrid,
    SpectralField,
    check_gevrey_range,
    reflect,
)


@dataclass(frozen=True)
class GevreyWeight:
    """Weight exp(sigma*||xi||) <xi>^s of the class G^{sigma,s}."""

    sigma: float
    s: float = 0.0

    def __post_init__(self):
        if self.sigma < 0:
            raise DomainError(f"Gevrey sigma must be >= 0, got {self.sigma}")

    def on_grid(self, grid):
        check_gevrey_range(self.sigma, grid)
        return np.exp(self.sigma * grid.l1_xi) * grid.angles_xi**self.s


def gevrey_norm(f, weight):
    """|| exp(sigma||xi||) <xi>^s coeffs ||_{l2} / 2pi.

    Accepts a SpectralField or a SpinorField (root of summed squares).
    """
    if isinstance(f, SpinorField):
        w = weight.on_grid(f.grid)
        mass = np.sum(np.abs(f.c1.coeffs * w) ** 2) + np.sum(
            np.abs(f.c2.coeffs * w) ** 2
        )
        return float(np.sqrt(mass)) / TWO_PI
    w = weight.on_grid(f.grid)
    return float(np.linalg.norm(f.coeffs * w)) / TWO_PI


def make_datum(grid, kind, *, sigma=None, rho=0.0, width=None, mode=None,
               amplitude=1.0, seed=None):
    """Test data with known analyticity radius.

    exp_decay:   coeffs(xi) = A exp(-sigma||xi||) <xi>^-rho exp(i theta(xi))
                 with conjugate-symmetric random phases (real-valued field).
    gaussian:    coeffs(xi) = A exp(-|xi|^2 / width^2), real and even.
    single_mode: coefficient A at the given lattice mode.
    """
    n = grid.n
    if kind == "exp_decay":
        if sigma is None or sigma <= 0:
            raise DomainError("exp_decay needs sigma > 0")
        if rho < 0:
            raise DomainError("exp_decay needs rho >= 0")
        rng = np.random.default_rng(seed)
        raw = rng.uniform(0.0, TWO_PI, size=(n, n))
        theta = raw - reflect(raw)  # theta(-xi) = -theta(xi)
        modulus = np.exp(-sigma * grid.l1_xi) * grid.angles_xi ** (-rho)
        coeffs = amplitude * modulus * np.exp(1j * theta)
        return SpectralField(grid, coeffs)
    if kind == "gaussian":
        if width is None or width <= 0:
            raise DomainError("gaussian needs width > 0")
        coeffs = amplitude * np.exp(-grid.abs_xi**2 / width**2)
        return SpectralField(grid, coeffs.astype(np.complex128))
    if kind == "single_mode":
        if mode is None:
            raise DomainError("single_mode needs a lattice mode")
        coeffs = np.zeros((n, n), dtype=np.complex128)
        i1 = int(mode[0]) % n
        i2 = int(mode[1]) % n
        coeffs[i2, i1] = amplitude
        return SpectralField(grid, coeffs)
    raise DomainError(f"unknown datum kind {kind!r}")


NOISE_FLOOR_FACTOR = 1e3 * np.finfo(np.float64).eps
MIN_FIT_SHELLS = 5


@dataclass
class RadiusEstimate:
    sigma_hat: float
    window: tuple
    residual: float
    saturated: bool

    def to_json(self):
        return json.dumps(
            {
                "sigma_hat": self.sigma_hat,
                "window": list(self.window),
                "residual": self.residual,
                "saturated": self.saturated,
            }
        )


def default_window(grid):
    r_min = max(2, grid.n // 32)
    r_max = min(max(grid.n // 6, r_min + MIN_FIT_SHELLS), grid.max_l1)
    return (r_min, r_max)


def shell_maxima(coeffs_abs, grid, window):
    """Max modulus over each l1-shell r in [window[0], window[1]]."""
    r_min, r_max = int(window[0]), int(window[1])
    if not 0 < r_min < r_max <= grid.max_l1:
        raise EstimationError(f"invalid shell window {window} on grid n={grid.n}")
    radii = np.arange(r_min, r_max + 1)
    l1 = grid.l1_xi
    maxima = np.array(
        [coeffs_abs[l1 == r].max() if np.any(l1 == r) else 0.0 for r in radii]
    )
    return radii, maxima


def estimate_radius(f, window=None):
    """Fit log(shell max) over the window; sigma_hat = -slope.

    The regression uses an extra log(1 + r^2/2) term so a polynomial tilt
    <xi>^-rho in the data does not bias the exponential rate (the shell
    maximum of <xi>^-rho sits at the most diagonal lattice point, where
    |xi|^2 = ceil(r^2/2)).
    """
    if isinstance(f, np.ndarray):
        raise TypeError("estimate_radius expects a SpectralField")
    grid = f.grid
    if window is None:
        window = default_window(grid)
    radii, maxima = shell_maxima(np.abs(f.coeffs), grid, window)
    positive = maxima > 0.0
    if np.count_nonzero(positive) < 2:
        raise EstimationError(
            "no decay to fit: fewer than two nonzero shells in the window"
        )
    floor = NOISE_FLOOR_FACTOR * float(np.abs(f.coeffs).max())
    usable = maxima >= floor
    if np.count_nonzero(usable) < MIN_FIT_SHELLS:
        # decay outruns the resolvable dynamic range inside the window
        return RadiusEstimate(math.inf, (int(window[0]), int(window[1])), 0.0, True)
    r = radii[usable].astype(float)
    y = np.log(maxima[usable])
    design = np.column_stack([np.ones_like(r), r, np.log1p(r**2 / 2.0)])
    coef, _, _, _ = np.linalg.lstsq(design, y, rcond=None)
    fit = design @ coef
    residual = float(np.sqrt(np.mean((y - fit) ** 2)))
    return RadiusEstimate(
        float(-coef[1]), (int(window[0]), int(window[1])), residual, False
    )
