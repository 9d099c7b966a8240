"""Canonical-ensemble state functions.

All energies are reported per k_B T and entropy and heat capacity per k_B.
Boltzmann sums are always shifted by the ground-state energy.
"""

from dataclasses import dataclass
import math

import numpy as np

from .core import DomainError, normalize_energy
from .potentials import resize, size_of

TRUNCATION_CUTOFF = 1e-14
TAIL_WARNING = 1e-10
THERMO_CSV_HEADER = "T_K,zeta,F_tilde,U_tilde,S_tilde,C_tilde"


class StepSizeError(DomainError):
    """Finite-difference stencil too coarse to resolve the derivative."""


@dataclass(frozen=True)
class ThermoQuantities:
    zeta: float
    F_tilde: float
    U_tilde: float
    S_tilde: float
    C_tilde: float
    T: float = None
    n_levels: int = 2
    truncation_warning: bool = False

    def as_tuple(self):
        return (self.zeta, self.F_tilde, self.U_tilde, self.S_tilde, self.C_tilde)

    def csv_row(self):
        T = "" if self.T is None else f"{self.T:.17g}"
        return ",".join([T] + [f"{v:.17g}" for v in self.as_tuple()])


def two_level_arrays(Eg_tilde, gap_tilde):
    """Vectorized closed forms; returns ``(zeta, F, U, S, C)`` arrays."""
    Eg = np.asarray(Eg_tilde, dtype=float)
    gap = np.asarray(gap_tilde, dtype=float)
    if np.any(gap < 0):
        raise DomainError("energy gap must be non-negative")
    with np.errstate(over="ignore"):
        fluct = np.log1p(np.exp(-gap))
        excitation = gap / (1.0 + np.exp(gap))
        C = (gap / (np.exp(-gap / 2) + np.exp(gap / 2))) ** 2
    zeta = np.exp(-Eg) * (1.0 + np.exp(-gap))
    F = Eg - fluct
    U = Eg + excitation
    S = excitation + fluct
    return zeta, F, U, S, C


def two_level(Eg_tilde, gap_tilde, T=None):
    """Two-level partition function, free energy, internal energy, entropy and heat capacity."""
    if not gap_tilde >= 0:
        raise DomainError(f"energy gap must be non-negative, got {gap_tilde!r}")
    values = [float(v) for v in two_level_arrays(Eg_tilde, gap_tilde)]
    return ThermoQuantities(*values, T=T, n_levels=2)


def _levels_of(spectrum):
    levels = np.asarray(getattr(spectrum, "levels", spectrum), dtype=float)
    if levels.ndim != 1 or levels.size == 0:
        raise DomainError("spectrum must be a non-empty 1D sequence of levels")
    return np.sort(levels)


def occupation_probabilities(spectrum, T):
    levels = _levels_of(spectrum)
    x = normalize_energy(levels - levels[0], T)
    w = np.exp(-x)
    return w / w.sum()


def canonical_sums(x_tilde):
    """Shifted canonical sums over the last axis of ``x_tilde`` (levels per k_B T, sorted).

    Returns ``(log_zeta, F, U, S, C)``; entries of ``x_tilde`` set to ``+inf`` are ignored.
    """
    x = np.asarray(x_tilde, dtype=float)
    ground = x[..., :1]
    shifted = x - ground
    w = np.exp(-shifted)
    Z = w.sum(axis=-1)
    p = w / Z[..., None]
    finite = np.where(np.isfinite(shifted), shifted, 0.0)
    mean = (p * finite).sum(axis=-1)
    var = (p * (finite - mean[..., None]) ** 2).sum(axis=-1)
    F = ground[..., 0] - np.log(Z)
    U = ground[..., 0] + mean
    return -F, F, U, U - F, var


def n_level(spectrum, T, cutoff=TRUNCATION_CUTOFF, allow_unconverged=False):
    """Exact canonical sums over a spectrum at temperature ``T``.

    Levels whose Boltzmann weight relative to the ground state falls below
    ``cutoff`` are dropped (at least two are kept when available); pass
    ``cutoff=None`` to sum everything. The result is flagged when the
    spectrum looks too short for its tail to be negligible.
    """
    if not allow_unconverged and getattr(spectrum, "converged", True) is False:
        raise DomainError("spectrum is not converged")
    levels = _levels_of(spectrum)
    x = normalize_energy(levels, T)
    x = np.atleast_1d(x)
    weights = np.exp(-(x - x[0]))
    if cutoff is not None:
        keep = max(int(np.count_nonzero(weights >= cutoff)), min(2, x.size))
        dropped = keep < x.size
        x, weights = x[:keep], weights[:keep]
    else:
        dropped = False
    warn = False
    if not dropped and x.size >= 2:
        ratio = weights[-1] / weights[-2]
        tail = weights[-1] * ratio / (1.0 - ratio) if ratio < 1 else math.inf
        warn = tail > TAIL_WARNING * weights.sum()
    log_zeta, F, U, S, C = (float(v) for v in canonical_sums(x))
    return ThermoQuantities(math.exp(log_zeta), F, U, S, C, T=T, n_levels=int(x.size),
                            truncation_warning=bool(warn))


def mean_level_spacing(spectrum, T):
    """Occupation-weighted mean of consecutive level gaps, in eV."""
    levels = _levels_of(spectrum)
    if levels.size < 2:
        raise DomainError("mean level spacing needs at least two levels")
    p = occupation_probabilities(levels, T)[:-1]
    return float(np.sum(p * np.diff(levels)) / np.sum(p))


def thermo_from_levels(levels, T, mode):
    """Thermo quantities and gap (eV) for a spectrum in ``two_level`` or ``n_level`` mode."""
    levels = _levels_of(levels)
    if mode == "two_level":
        if levels.size < 2:
            raise DomainError("two-level mode needs at least two levels")
        gap = float(levels[1] - levels[0])
        q = two_level(normalize_energy(levels[0], T), normalize_energy(gap, T), T)
        return q, gap
    if mode == "n_level":
        return n_level(levels, T), mean_level_spacing(levels, T)
    raise DomainError(f"mode must be 'two_level' or 'n_level', got {mode!r}")


def pressure(spec, T, levels_at, mode="two_level", delta_L=None, convention="fixed_fraction"):
    """Dimensionless pressure -dF~/dL (per nm) by a central difference in the size parameter.

    ``levels_at(spec)`` returns the levels used for a stencil point; the
    caller should solve every stencil point on one fixed grid. Partitioned
    variants keep ``l / L`` fixed by default (``convention``).
    """
    size = size_of(spec)
    delta = size * 1e-4 if delta_L is None else float(delta_L)
    if not 0 < delta < 0.1 * size:
        raise DomainError(f"delta_L must lie in (0, 0.1 L), got {delta!r}")

    def F(s):
        return thermo_from_levels(levels_at(resize(spec, s, convention)), T, mode)[0].F_tilde

    F0 = F(size)
    for _ in range(2):
        lo, hi = F(size - delta), F(size + delta)
        if (F0 - lo) * (hi - F0) >= 0:
            return -(hi - lo) / (2.0 * delta)
        delta *= 0.5
    raise StepSizeError(f"free energy is not monotone across the stencil at L={size}")


def normalize_pressure(values):
    """Scale a pressure series so that its largest magnitude is 1."""
    P = np.asarray(values, dtype=float)
    peak = np.max(np.abs(P)) if P.size else 0.0
    return P / peak if peak > 0 else np.zeros_like(P)


def thermo_csv(rows):
    return THERMO_CSV_HEADER + "\n" + "".join(q.csv_row() + "\n" for q in rows)
