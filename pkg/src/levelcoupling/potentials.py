"""Confinement potential families on a hard-walled 1D domain.

Every variant is an immutable value object. The partition position ``l`` is the
shape parameter; the domain length ``L`` is the size parameter.
"""

from dataclasses import dataclass, fields, replace
import hashlib
import json

import numpy as np

from .core import GAAS_MASS_RATIO, DomainError, UnsupportedVariantError, kinetic_coefficient

DEFAULT_L = 100.0
DEFAULT_HEIGHT = 0.057
DEFAULT_WIDTH = 1.0
# Oscillator lengths for the weakly harmonic and harmonic partitioned wells
CASE3_L_OSC = 40.0
CASE4_L_OSC = 15.0


@dataclass(frozen=True)
class InfiniteWell:
    L: float = DEFAULT_L
    mass_ratio: float = GAAS_MASS_RATIO

    type_name = "infinite_well"


@dataclass(frozen=True)
class Harmonic:
    """Parabola of oscillator length ``L_osc`` centred in a hard-walled domain."""

    L_osc: float = 10.0
    L_domain: float = DEFAULT_L
    center: float = None
    mass_ratio: float = GAAS_MASS_RATIO

    type_name = "harmonic"

    def __post_init__(self):
        if self.center is None:
            object.__setattr__(self, "center", 0.5 * self.L_domain)

    @property
    def L(self):
        return self.L_domain


@dataclass(frozen=True)
class InfiniteWellInfinitePartition:
    L: float = DEFAULT_L
    l: float = 0.5 * DEFAULT_L
    mass_ratio: float = GAAS_MASS_RATIO

    type_name = "infinite_well_infinite_partition"


@dataclass(frozen=True)
class InfiniteWellGaussianBump:
    L: float = DEFAULT_L
    l: float = 0.5 * DEFAULT_L
    h: float = DEFAULT_HEIGHT
    w: float = DEFAULT_WIDTH
    mass_ratio: float = GAAS_MASS_RATIO

    type_name = "infinite_well_gaussian_bump"


@dataclass(frozen=True)
class HarmonicGaussianBump:
    L: float = DEFAULT_L
    L_osc: float = CASE4_L_OSC
    l: float = 0.5 * DEFAULT_L
    h: float = DEFAULT_HEIGHT
    w: float = DEFAULT_WIDTH
    mass_ratio: float = GAAS_MASS_RATIO

    type_name = "harmonic_gaussian_bump"


VARIANTS = {
    cls.type_name: cls
    for cls in (
        InfiniteWell,
        Harmonic,
        InfiniteWellInfinitePartition,
        InfiniteWellGaussianBump,
        HarmonicGaussianBump,
    )
}
PARTITIONED = (InfiniteWellInfinitePartition, InfiniteWellGaussianBump, HarmonicGaussianBump)


def is_partitioned(spec):
    return isinstance(spec, PARTITIONED)


def validate(spec):
    """Return a list of invariant violations; an empty list means the spec is valid."""
    if type(spec) not in VARIANTS.values():
        return [f"unknown potential variant {type(spec).__name__}"]
    errors = []

    def positive(name):
        value = getattr(spec, name)
        if not (np.isfinite(value) and value > 0):
            errors.append(f"{name} must be positive")

    positive("mass_ratio")
    if isinstance(spec, Harmonic):
        positive("L_osc")
        positive("L_domain")
        if not 0 <= spec.center <= spec.L_domain:
            errors.append("center must lie inside [0, L_domain]")
        return errors
    positive("L")
    if isinstance(spec, HarmonicGaussianBump):
        positive("L_osc")
    if is_partitioned(spec):
        if not (np.isfinite(spec.l) and 0 < spec.l < spec.L):
            errors.append("l must lie strictly inside (0, L)")
    if isinstance(spec, (InfiniteWellGaussianBump, HarmonicGaussianBump)):
        positive("w")
        if not (np.isfinite(spec.h) and spec.h >= 0):
            errors.append("h must be non-negative")
    return errors


def check(spec):
    errors = validate(spec)
    if errors:
        raise DomainError("; ".join(errors))
    return spec


def _gaussian(x, l, h, w):
    return h * np.exp(-((x - l) ** 2) / (2.0 * w * w))


def _parabola(x, center, L_osc, mass_ratio):
    # hbar^2 / (2 m L_osc^4) (x - center)^2
    return kinetic_coefficient(mass_ratio) / L_osc**4 * (x - center) ** 2


def evaluate(spec, x):
    """Potential energy in eV at position(s) ``x`` (nm) inside the domain."""
    check(spec)
    if isinstance(spec, InfiniteWellInfinitePartition):
        raise UnsupportedVariantError(
            "the infinite partition is a domain split, not a pointwise potential"
        )
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr < 0) or np.any(x_arr > spec.L) or np.any(~np.isfinite(x_arr)):
        raise DomainError(f"x must lie in [0, {spec.L}]")

    if isinstance(spec, InfiniteWell):
        V = np.zeros_like(x_arr)
    elif isinstance(spec, Harmonic):
        V = _parabola(x_arr, spec.center, spec.L_osc, spec.mass_ratio)
    elif isinstance(spec, InfiniteWellGaussianBump):
        V = _gaussian(x_arr, spec.l, spec.h, spec.w)
    else:
        V = _parabola(x_arr, 0.5 * spec.L, spec.L_osc, spec.mass_ratio) + _gaussian(
            x_arr, spec.l, spec.h, spec.w
        )
    return float(V) if V.ndim == 0 else V


def mirror(spec):
    """Reflect the partition through the domain centre: l -> L - l."""
    check(spec)
    if isinstance(spec, Harmonic):
        return replace(spec, center=spec.L_domain - spec.center)
    if is_partitioned(spec):
        return replace(spec, l=spec.L - spec.l)
    return spec


def size_of(spec):
    """The size parameter: oscillator length for a pure harmonic, domain length otherwise."""
    return spec.L_osc if isinstance(spec, Harmonic) else spec.L


def resize(spec, size, convention="fixed_fraction"):
    """Return ``spec`` at a new size with its shape held fixed.

    With ``convention="fixed_fraction"`` the partition keeps its relative
    coordinate l/L (a pure harmonic's walls scale with L_osc); with
    ``"fixed_absolute"`` l and the walls stay put. Bump width is never
    rescaled.
    """
    if isinstance(spec, Harmonic):
        if convention == "fixed_fraction":
            ratio = size / spec.L_osc
            return replace(spec, L_osc=size, L_domain=spec.L_domain * ratio, center=spec.center * ratio)
        return replace(spec, L_osc=size)
    if not is_partitioned(spec):
        return replace(spec, L=size)
    if convention == "fixed_fraction":
        return replace(spec, L=size, l=spec.l * size / spec.L)
    if convention == "fixed_absolute":
        return replace(spec, L=size)
    raise DomainError(f"unknown resize convention {convention!r}")


def with_parameter(spec, variable, value):
    """Set the swept parameter: ``"L"`` (size) or ``"l"`` (partition position)."""
    if variable == "L":
        return resize(spec, value)
    if variable == "l":
        if not is_partitioned(spec):
            raise UnsupportedVariantError(f"{spec.type_name} has no partition position")
        return replace(spec, l=value)
    raise DomainError(f"sweep variable must be 'L' or 'l', got {variable!r}")


_FIELD_KEYS = {
    "L": "L_nm",
    "l": "l_nm",
    "h": "h_eV",
    "w": "w_nm",
    "L_osc": "L_osc_nm",
    "L_domain": "L_nm",
    "center": "center_nm",
    "mass_ratio": "mass_ratio",
}


def to_dict(spec):
    record = {"type": spec.type_name}
    for f in fields(spec):
        record[_FIELD_KEYS[f.name]] = float(getattr(spec, f.name))
    return record


def from_dict(record):
    """Build a spec from a config record ``{type, L_nm, l_nm, h_eV, w_nm, L_osc_nm, mass_ratio}``."""
    record = dict(record)
    try:
        cls = VARIANTS[record.pop("type")]
    except KeyError as exc:
        raise DomainError(f"unknown or missing potential type: {exc}") from None
    kwargs = {}
    for f in fields(cls):
        key = _FIELD_KEYS[f.name]
        if key in record:
            kwargs[f.name] = float(record.pop(key))
    if record:
        raise DomainError(f"unexpected keys for {cls.type_name}: {sorted(record)}")
    return check(cls(**kwargs))


def spec_hash(spec):
    payload = json.dumps(to_dict(spec), sort_keys=True).encode()
    return hashlib.sha256(payload).hexdigest()[:16]
