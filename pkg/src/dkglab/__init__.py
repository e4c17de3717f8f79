"""Spectral laboratory for a coupled spinor/scalar dispersive system.

Simulates the split half-wave formulation of a two-dimensional
Dirac-Klein-Gordon-type system on the torus, tracks the uniform radius
of spatial analyticity of the solution, and checks it against an
exponential lower-bound certificate built from measured constants.
"""

__version__ = "0.1.0"

from .errors import (
    ConfigurationError,
    DkgError,
    DomainError,
    EstimationError,
    NumericalFailure,
    OverflowRangeError,
    PreconditionError,
)
from .grid import FourierGrid, SpectralField
from .dirac import SpinorField
from .gevrey import GevreyWeight, estimate_radius, gevrey_norm, make_datum
from .solver import SolverConfig, SplitState, evolve, picard_evolve, split_initial_data
from .tracker import Certificate, TrackerParams, certificate_schedule

__all__ = [
    "__version__",
    "Certificate",
    "ConfigurationError",
    "DkgError",
    "DomainError",
    "EstimationError",
    "FourierGrid",
    "GevreyWeight",
    "NumericalFailure",
    "OverflowRangeError",
    "PreconditionError",
    "SolverConfig",
    "SpectralField",
    "SpinorField",
    "SplitState",
    "TrackerParams",
    "certificate_schedule",
    "estimate_radius",
    "evolve",
    "gevrey_norm",
    "make_datum",
    "picard_evolve",
    "split_initial_data",
]
