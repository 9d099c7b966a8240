"""Finite-difference bound-state spectra of the 1D Schroedinger equation.

The Hamiltonian is discretized with second-order central differences on a
uniform grid with Dirichlet walls, giving a symmetric tridiagonal operator.
Its lowest levels are found by Sturm-sequence bisection (see ``_sturm``).
"""

from dataclasses import dataclass, field
from functools import lru_cache
import io
import math

import numpy as np

from . import _sturm
from .core import DomainError, SolverError, kinetic_coefficient, thermal_energy
from .potentials import (
    Harmonic,
    InfiniteWell,
    InfiniteWellInfinitePartition,
    check,
    evaluate,
    spec_hash,
)

DEFAULT_N_INTERIOR = 4096
DEFAULT_REL_TOL = 1e-7
DEFAULT_MAX_POINTS = 2**20
DEGENERACY_TOL = 1e-12
MIN_INTERIOR = 16


@dataclass(frozen=True)
class Grid:
    """Uniform grid on [0, L]; the two wall points are not unknowns."""

    n_interior: int
    L: float

    def __post_init__(self):
        if int(self.n_interior) != self.n_interior or self.n_interior < MIN_INTERIOR:
            raise DomainError(f"n_interior must be an integer >= {MIN_INTERIOR}")
        if not (math.isfinite(self.L) and self.L > 0):
            raise DomainError("grid length must be positive")

    @property
    def spacing(self):
        return self.L / (self.n_interior + 1)

    @property
    def points(self):
        return self.spacing * np.arange(1, self.n_interior + 1)

    def refined(self):
        return Grid(2 * self.n_interior, self.L)

    def describe(self):
        return {"n_interior": self.n_interior, "L_nm": self.L, "spacing_nm": self.spacing}


@dataclass(frozen=True)
class TridiagonalOperator:
    diagonal: np.ndarray
    off_diagonal: np.ndarray
    hopping: float = None
    potential: np.ndarray = None
    grid: Grid = None
    spec_hash: str = None

    @property
    def dimension(self):
        return self.diagonal.shape[0]


@dataclass(frozen=True)
class Spectrum:
    """Lowest energy levels in eV, ascending, with provenance."""

    levels: np.ndarray
    converged: bool = True
    grid: Grid = None
    spec_hash: str = None
    method: str = "fd"
    history: tuple = field(default=(), compare=False)

    def __post_init__(self):
        levels = np.array(self.levels, dtype=float)
        levels.setflags(write=False)
        object.__setattr__(self, "levels", levels)

    @property
    def k(self):
        return self.levels.shape[0]

    def __len__(self):
        return self.k

    def truncated(self, k):
        return Spectrum(self.levels[:k], self.converged, self.grid, self.spec_hash, self.method, self.history)

    def to_csv(self):
        """CSV text with header ``n,energy_eV`` and 17 significant digits."""
        buf = io.StringIO()
        buf.write("n,energy_eV\n")
        for n, E in enumerate(self.levels, start=1):
            buf.write(f"{n},{E:.17g}\n")
        return buf.getvalue()


def discretize(spec, grid):
    check(spec)
    if isinstance(spec, InfiniteWellInfinitePartition):
        raise DomainError("infinite partition is solved by domain splitting; use solve_split")
    if not math.isclose(grid.L, spec.L, rel_tol=1e-12):
        raise DomainError(f"grid length {grid.L} does not match domain length {spec.L}")
    t = kinetic_coefficient(spec.mass_ratio) / grid.spacing**2
    V = np.asarray(evaluate(spec, grid.points), dtype=float)
    return TridiagonalOperator(
        diagonal=2.0 * t + V,
        off_diagonal=np.full(grid.n_interior - 1, -t),
        hopping=t,
        potential=V,
        grid=grid,
        spec_hash=spec_hash(spec),
    )


def _uniform_hopping(op):
    if op.hopping is not None and op.potential is not None:
        return op.hopping
    off = np.asarray(op.off_diagonal)
    if off.size and np.all(off == off[0]) and off[0] < 0:
        return -float(off[0])
    return None


def lowest_eigenvalues(operator, k):
    """The ``k`` smallest eigenvalues of a symmetric tridiagonal operator."""
    n = operator.dimension
    if not 1 <= k <= n:
        raise DomainError(f"k must lie in [1, {n}], got {k}")
    t = _uniform_hopping(operator)
    if t is not None:
        V = operator.potential
        if V is None:
            V = np.asarray(operator.diagonal) - 2.0 * t
        values, iterations, ok = _sturm.lowest_uniform(V / t, k)
        values = values * t
    else:
        values, iterations, ok = _sturm.lowest_general(operator.diagonal, operator.off_diagonal, k)
    if not ok:
        raise SolverError(
            "bisection did not close every bracket",
            {"k": k, "dimension": n, "iterations": int(iterations)},
        )
    return Spectrum(np.sort(values), True, operator.grid, operator.spec_hash, "fd")


def analytic_box_spectrum(L, mass_ratio, k):
    """E_n = (hbar^2 / 2m) pi^2 n^2 / L^2 for n = 1..k."""
    if not (L > 0 and k >= 1):
        raise DomainError("analytic box spectrum needs L > 0 and k >= 1")
    n = np.arange(1, int(k) + 1, dtype=float)
    return Spectrum(kinetic_coefficient(mass_ratio) * np.pi**2 * n**2 / L**2, method="analytic")


def analytic_harmonic_spectrum(L_osc, mass_ratio, k):
    """E_n = (hbar^2 / m L_osc^2)(n + 1/2) for n = 0..k-1."""
    if not (L_osc > 0 and k >= 1):
        raise DomainError("analytic harmonic spectrum needs L_osc > 0 and k >= 1")
    n = np.arange(int(k), dtype=float)
    return Spectrum(2.0 * kinetic_coefficient(mass_ratio) / L_osc**2 * (n + 0.5), method="analytic")


# Pure-size variants carry a single length scale, so their discrete spectra
# are one dimensionless solve times an energy scale. Caching that solve makes
# size sweeps and pressure stencils cost one eigenproblem per grid.
def _dimensionless_form(spec):
    c = kinetic_coefficient(spec.mass_ratio)
    if isinstance(spec, InfiniteWell):
        return ("box", 1.0, 0.0), c / spec.L**2, spec.L
    if isinstance(spec, Harmonic):
        extent = float(f"{spec.L_domain / spec.L_osc:.12g}")
        center = float(f"{spec.center / spec.L_osc:.12g}")
        return ("harmonic", extent, center), c / spec.L_osc**2, spec.L_domain
    return None


@lru_cache(maxsize=256)
def _dimensionless_levels(form, n_interior, k):
    kind, extent, center = form
    step = extent / (n_interior + 1)
    if kind == "box":
        a = np.zeros(n_interior)
    else:
        xi = step * np.arange(1, n_interior + 1)
        a = (xi - center) ** 2 * step**2
    values, iterations, ok = _sturm.lowest_uniform(a, k)
    if not ok:
        raise SolverError("bisection did not close every bracket", {"k": k, "dimension": n_interior})
    values = values / step**2
    values.setflags(write=False)
    return values


def solve_on_grid(spec, n_interior, k):
    """Raw finite-difference levels (eV) of a non-split spec on ``n_interior`` points."""
    if k > n_interior:
        raise DomainError(f"k={k} exceeds grid dimension {n_interior}")
    form = _dimensionless_form(spec)
    if form is not None:
        key, scale, L = form
        Grid(n_interior, L)
        return _dimensionless_levels(key, n_interior, k) * scale
    return lowest_eigenvalues(discretize(spec, Grid(n_interior, spec.L)), k).levels


def convergence_refine(
    spec,
    k,
    rel_tol=DEFAULT_REL_TOL,
    n_start=DEFAULT_N_INTERIOR,
    max_points=DEFAULT_MAX_POINTS,
    extrapolate=False,
):
    """Double the grid until the ``k`` lowest levels change by less than ``rel_tol``.

    With ``extrapolate=True`` each pair of successive grids is combined by
    Richardson extrapolation, (4 E(h/2) - E(h)) / 3, and convergence is judged
    on the extrapolated values. An exhausted ladder returns an unconverged
    spectrum rather than raising.
    """
    check(spec)
    if not rel_tol > 0:
        raise DomainError("rel_tol must be positive")
    if isinstance(spec, InfiniteWellInfinitePartition):
        return solve_split(spec, k, method="numeric", rel_tol=rel_tol, n_start=n_start,
                           max_points=max_points, extrapolate=extrapolate)
    n = max(int(n_start), MIN_INTERIOR, int(k))
    raw_prev = solve_on_grid(spec, n, k)
    est_prev = None if extrapolate else raw_prev
    history = []
    converged = False
    while 2 * n <= max_points:
        n *= 2
        raw = solve_on_grid(spec, n, k)
        est = (4.0 * raw - raw_prev) / 3.0 if extrapolate else raw
        if est_prev is not None:
            change = float(np.max(np.abs(est - est_prev) / np.abs(est)))
            history.append((n, change))
            if change < rel_tol:
                converged = True
                break
        raw_prev, est_prev = raw, est
    else:
        est = est_prev if est_prev is not None else raw_prev
    L = spec.L
    return Spectrum(
        np.sort(est),
        converged,
        Grid(n, L),
        spec_hash(spec),
        "fd-richardson" if extrapolate else "fd",
        tuple(history),
    )


def solve_split(spec, k, method="analytic", **refine_kwargs):
    """Spectrum of a box cut by an impenetrable wall at ``l``: union of two boxes."""
    check(spec)
    if not isinstance(spec, InfiniteWellInfinitePartition):
        raise DomainError("solve_split needs an infinite-partition spec")
    parts = (InfiniteWell(spec.l, spec.mass_ratio), InfiniteWell(spec.L - spec.l, spec.mass_ratio))
    if method == "analytic":
        spectra = [analytic_box_spectrum(p.L, p.mass_ratio, k) for p in parts]
    elif method == "numeric":
        spectra = [convergence_refine(p, k, **refine_kwargs) for p in parts]
    else:
        raise DomainError(f"unknown split method {method!r}")
    merged = np.sort(np.concatenate([s.levels for s in spectra]), kind="stable")[:k]
    return Spectrum(
        merged,
        all(s.converged for s in spectra),
        spectra[0].grid,
        spec_hash(spec),
        "split-" + method,
    )


def solve(
    spec,
    k,
    *,
    n_interior=DEFAULT_N_INTERIOR,
    rel_tol=DEFAULT_REL_TOL,
    refine=True,
    extrapolate=False,
    max_points=DEFAULT_MAX_POINTS,
    split_method="analytic",
):
    """Lowest ``k`` levels of any potential variant."""
    check(spec)
    if isinstance(spec, InfiniteWellInfinitePartition):
        return solve_split(spec, k, method=split_method, rel_tol=rel_tol, n_start=n_interior,
                           max_points=max_points, extrapolate=extrapolate)
    if refine:
        return convergence_refine(spec, k, rel_tol, n_interior, max_points, extrapolate)
    levels = solve_on_grid(spec, n_interior, k)
    return Spectrum(levels, False, Grid(n_interior, spec.L), spec_hash(spec), "fd")


def solve_for_temperature(spec, T, cutoff=1e-14, k_start=8, k_max=2048, **solve_kwargs):
    """Solve with enough levels that the first omitted Boltzmann weight is below ``cutoff``.

    The level count is chosen on the starting grid, doubling until
    exp(-(E_k - E_1) / k_B T) < cutoff or ``k_max`` is reached, and the
    converged solve is then run once with that count.
    """
    kT = thermal_energy(T)
    gap_needed = -math.log(cutoff) * kT
    k = max(2, int(k_start))
    if isinstance(spec, InfiniteWellInfinitePartition):
        probe = lambda kk: solve_split(spec, kk).levels
    else:
        n0 = max(int(solve_kwargs.get("n_interior", DEFAULT_N_INTERIOR)), MIN_INTERIOR)
        probe = lambda kk: solve_on_grid(spec, max(n0, kk), kk)
    while True:
        levels = probe(k)
        if levels[-1] - levels[0] > gap_needed or k >= k_max:
            break
        k = min(2 * k, k_max)
    # coarse grids sit below the converged levels; keep a margin
    k = min(k_max, int(np.searchsorted(levels - levels[0], gap_needed)) + 4)
    if _dimensionless_form(spec) is not None:
        # shared across a size sweep through the dimensionless cache
        k = min(k_max, 1 << (k - 1).bit_length())
    return solve(spec, max(k, 2), **solve_kwargs)


def solve_fixed(spec, k, n_interior, extrapolate=False, split_method="analytic"):
    """Levels on one fixed grid, reproducing the final step of a refinement ladder.

    Used for derivative stencils, where every point must share a grid.
    """
    if isinstance(spec, InfiniteWellInfinitePartition):
        if split_method == "analytic":
            return solve_split(spec, k).levels
        parts = (InfiniteWell(spec.l, spec.mass_ratio), InfiniteWell(spec.L - spec.l, spec.mass_ratio))
        merged = np.concatenate([solve_fixed(p, k, n_interior, extrapolate) for p in parts])
        return np.sort(merged, kind="stable")[:k]
    raw = solve_on_grid(spec, n_interior, k)
    if not extrapolate:
        return raw
    coarse = solve_on_grid(spec, n_interior // 2, k)
    return np.sort((4.0 * raw - coarse) / 3.0)


def counting_function(levels, E):
    """Number of levels strictly below ``E``."""
    return int(np.searchsorted(np.asarray(levels), E, side="left"))
