"""Confined 1D spectra under size-invariant shape changes, canonical thermodynamics,
and spontaneity classification."""

from .core import (
    BOLTZMANN,
    GAAS_MASS_RATIO,
    HBAR_SQ_OVER_2ME,
    DomainError,
    SolverError,
    UnsupportedVariantError,
    kinetic_coefficient,
    normalize_energy,
    thermal_energy,
)
from .potentials import (
    Harmonic,
    HarmonicGaussianBump,
    InfiniteWell,
    InfiniteWellGaussianBump,
    InfiniteWellInfinitePartition,
)
from .eigensolver import Grid, Spectrum, solve
from .thermo import ThermoQuantities, n_level, two_level
from .spontaneity import SpontaneityClass, StateDelta, classify

__version__ = "0.1.0"
