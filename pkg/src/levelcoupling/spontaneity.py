"""Spontaneity classes of isothermal processes from the signs of dF, dU and dS."""

from dataclasses import dataclass
import enum
import io

import numpy as np

from .core import DomainError
from .thermo import two_level_arrays

DEFAULT_EPSILON = 1e-12
IDENTITY_TOL = 1e-10
DEFAULT_REFERENCE = (0.5, 3.0)
DEFAULT_EG_RANGE = (0.05, 1.0)
DEFAULT_GAP_RANGE = (0.5, 6.0)
DEFAULT_RESOLUTION = 241
MAP_CSV_HEADER = "Eg_over_kT,gap_over_kT,dF,dU,dS,class"
TRAJECTORY_CSV_HEADER = "param_nm,Eg_eV,gap_eV,dF,dU,dS,class"


class SpontaneityClass(str, enum.Enum):
    TYPICAL = "typical"
    ENERGY_DRIVEN = "energy"
    ENTROPY_DRIVEN = "entropy"
    NON_SPONTANEOUS = "nonspont"
    BOUNDARY = "boundary"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class StateDelta:
    dF: float
    dU: float
    dS: float

    @classmethod
    def between(cls, reference, state):
        """Change from ``reference`` to ``state`` (anything with F_tilde, U_tilde, S_tilde)."""
        return cls(
            state.F_tilde - reference.F_tilde,
            state.U_tilde - reference.U_tilde,
            state.S_tilde - reference.S_tilde,
        )

    def reversed(self):
        return StateDelta(-self.dF, -self.dU, -self.dS)


def _identity_violation(dF, dU, dS):
    scale = np.maximum(1.0, np.maximum(np.abs(dU), np.abs(dS)))
    return np.abs(dF - (dU - dS)) > IDENTITY_TOL * scale


def classify(delta, epsilon=DEFAULT_EPSILON):
    """Class of the process described by ``delta``."""
    if epsilon < 0:
        raise DomainError("epsilon must be non-negative")
    dF, dU, dS = delta.dF, delta.dU, delta.dS
    if _identity_violation(dF, dU, dS):
        raise DomainError(f"inconsistent delta: dF={dF} but dU - dS={dU - dS}")
    if dF >= epsilon:
        return SpontaneityClass.NON_SPONTANEOUS
    if abs(dF) < epsilon or abs(dU) < epsilon or abs(dS) < epsilon:
        return SpontaneityClass.BOUNDARY
    if dS < 0:
        assert dU < 0, "dF < 0, dU > 0, dS < 0 contradicts dF = dU - dS"
        return SpontaneityClass.ENERGY_DRIVEN
    if dU > 0:
        return SpontaneityClass.ENTROPY_DRIVEN
    return SpontaneityClass.TYPICAL


def classify_arrays(dF, dU, dS, epsilon=DEFAULT_EPSILON):
    """Vectorized :func:`classify`; returns an object array of SpontaneityClass."""
    dF, dU, dS = (np.asarray(v, dtype=float) for v in (dF, dU, dS))
    if np.any(_identity_violation(dF, dU, dS)):
        raise DomainError("inconsistent deltas: dF != dU - dS")
    nonspont = dF >= epsilon
    boundary = ~nonspont & ((np.abs(dF) < epsilon) | (np.abs(dU) < epsilon) | (np.abs(dS) < epsilon))
    rest = ~nonspont & ~boundary
    energy = rest & (dS < 0)
    impossible = energy & (dU > 0)
    assert not np.any(impossible), "dF < 0, dU > 0, dS < 0 contradicts dF = dU - dS"
    entropy = rest & ~energy & (dU > 0)
    # np.full would coerce the str-based enum to a plain str
    out = np.empty(dF.shape, dtype=object)
    out[rest & ~energy & ~entropy] = SpontaneityClass.TYPICAL
    out[nonspont] = SpontaneityClass.NON_SPONTANEOUS
    out[boundary] = SpontaneityClass.BOUNDARY
    out[energy] = SpontaneityClass.ENERGY_DRIVEN
    out[entropy] = SpontaneityClass.ENTROPY_DRIVEN
    return out


def _axis(lo, hi, resolution, anchor):
    # uniform axis with the grid point nearest to ``anchor`` moved onto it,
    # so the reference state is always a cell
    axis = np.linspace(lo, hi, resolution)
    if lo <= anchor <= hi:
        axis[np.argmin(np.abs(axis - anchor))] = anchor
    return axis


@dataclass(frozen=True)
class SpontaneityMap:
    reference: tuple
    Eg_axis: np.ndarray
    gap_axis: np.ndarray
    dF: np.ndarray
    dU: np.ndarray
    dS: np.ndarray
    cells: np.ndarray

    def cell(self, Eg, gap):
        i = int(np.argmin(np.abs(self.Eg_axis - Eg)))
        j = int(np.argmin(np.abs(self.gap_axis - gap)))
        return self.cells[i, j]

    def to_csv(self):
        buf = io.StringIO()
        buf.write(MAP_CSV_HEADER + "\n")
        for i, Eg in enumerate(self.Eg_axis):
            for j, gap in enumerate(self.gap_axis):
                buf.write(
                    f"{Eg:.17g},{gap:.17g},{self.dF[i, j]:.17g},{self.dU[i, j]:.17g},"
                    f"{self.dS[i, j]:.17g},{self.cells[i, j].value}\n"
                )
        return buf.getvalue()


def two_level_deltas(reference, Eg_tilde, gap_tilde):
    """(dF, dU, dS) of two-level states relative to ``reference = (Eg, gap)``."""
    _, F0, U0, S0, _ = two_level_arrays(*reference)
    _, F, U, S, _ = two_level_arrays(Eg_tilde, gap_tilde)
    return F - F0, U - U0, S - S0


def build_map(
    reference=DEFAULT_REFERENCE,
    Eg_range=DEFAULT_EG_RANGE,
    gap_range=DEFAULT_GAP_RANGE,
    resolution=DEFAULT_RESOLUTION,
    epsilon=DEFAULT_EPSILON,
):
    """Classify every (Eg, gap) cell of a two-level system against ``reference``.

    ``resolution`` is an int or an ``(n_Eg, n_gap)`` pair. Energies are per k_B T.
    """
    n_Eg, n_gap = (resolution, resolution) if np.ndim(resolution) == 0 else resolution
    if n_Eg < 2 or n_gap < 2:
        raise DomainError("map resolution must be at least 2 per axis")
    for lo, hi in (Eg_range, gap_range):
        if not hi > lo:
            raise DomainError(f"map range {(lo, hi)} has non-positive length")
    if gap_range[0] < 0 or reference[1] < 0:
        raise DomainError("energy gaps must be non-negative")
    Eg_axis = _axis(*Eg_range, n_Eg, reference[0])
    gap_axis = _axis(*gap_range, n_gap, reference[1])
    Eg, gap = np.meshgrid(Eg_axis, gap_axis, indexing="ij")
    dF, dU, dS = two_level_deltas(reference, Eg, gap)
    cells = classify_arrays(dF, dU, dS, epsilon)
    return SpontaneityMap(tuple(reference), Eg_axis, gap_axis, dF, dU, dS, cells)


def classify_path(points, reference_index=0, epsilon=DEFAULT_EPSILON):
    """Classify every state of a path relative to ``points[reference_index]``."""
    points = list(points)
    if len(points) < 2:
        raise DomainError("a path needs at least two points")
    if not -len(points) <= reference_index < len(points):
        raise DomainError(f"reference_index {reference_index} out of range")
    ref = points[reference_index]
    return [classify(StateDelta.between(ref, p), epsilon) for p in points]


def contiguous_intervals(params, classes):
    """Maximal runs of equal class as ``(class, start_param, end_param, n_points)``."""
    runs = []
    for x, c in zip(params, classes):
        if runs and runs[-1][0] == c:
            runs[-1][2] = x
            runs[-1][3] += 1
        else:
            runs.append([c, x, x, 1])
    return [tuple(r) for r in runs]
