"""Radial defocusing NLS outside the unit ball: sine-transform spectral calculus,
dispersive kernels, a Strang-splitting solver and trajectory diagnostics."""

from .errors import (
    AccuracyWarning,
    BudgetExceededError,
    BudgetWarning,
    DataError,
    DegenerateInputError,
    DomainError,
    ExballError,
    IntegrityError,
    NumericalAbort,
    ParameterError,
    ResolutionError,
    UnderResolvedError,
)
from .nls_solver import EvolutionConfig, Trajectory, energy, evolve, mass
from .radial_core import NormSpec, RadialField, RadialGrid, norm
from .spectral_transform import SpectralField, forward_transform, inverse_transform

__version__ = "0.1.0"
