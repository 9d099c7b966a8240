"""Physical constants and energy normalization.

Units throughout the package: eV for energy, nm for length, K for temperature.
"""

import numpy as np

# hbar^2 / (2 m_e) in eV nm^2
HBAR_SQ_OVER_2ME = 0.0380998
# Boltzmann constant in eV/K
BOLTZMANN = 8.617333e-5
# GaAs conduction-band effective mass, in units of m_e
GAAS_MASS_RATIO = 0.067


class DomainError(ValueError):
    """Input outside the domain of an operation."""


class SolverError(RuntimeError):
    """Eigenvalue iteration failed to converge."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class UnsupportedVariantError(DomainError):
    """Operation not defined for the given potential variant."""


def kinetic_coefficient(mass_ratio):
    """Return hbar^2 / (2 m) in eV nm^2 for an effective mass ``mass_ratio * m_e``."""
    if not mass_ratio > 0:
        raise DomainError(f"mass_ratio must be positive, got {mass_ratio!r}")
    return HBAR_SQ_OVER_2ME / mass_ratio


def thermal_energy(T):
    """k_B T in eV."""
    if not T > 0:
        raise DomainError(f"temperature must be positive, got {T!r}")
    return BOLTZMANN * T


def normalize_energy(E, T):
    """Energy in units of k_B T. Accepts scalars or arrays."""
    kT = thermal_energy(T)
    if np.ndim(E) == 0:
        return float(E) / kT
    return np.asarray(E, dtype=float) / kT
