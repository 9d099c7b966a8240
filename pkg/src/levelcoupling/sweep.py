"""Config-driven parameter sweeps: potential -> spectrum -> thermo -> class -> pressure."""

from concurrent.futures import ThreadPoolExecutor
import copy
from dataclasses import dataclass, field
import io
import json
from importlib import resources
from pathlib import Path

import numpy as np

from .core import DomainError
from . import eigensolver, potentials, spontaneity, thermo

SCHEMA_VERSION = 1
SWEEP_CSV_HEADER = "param_nm,Eg_eV,gap_eV,zeta,F_tilde,U_tilde,S_tilde,C_tilde,P_norm,class"
MODES = ("two_level", "n_level")
OUTPUTS = ("sweep_csv", "trajectory_csv", "summary_json", "map_csv")
CLASSIFICATIONS = ("reference", "stepwise")

SOLVER_DEFAULTS = {
    "n_interior": eigensolver.DEFAULT_N_INTERIOR,
    "rel_tol": eigensolver.DEFAULT_REL_TOL,
    "max_points": eigensolver.DEFAULT_MAX_POINTS,
    "extrapolate": False,
    "split_method": "analytic",
}


class ConfigError(DomainError):
    """Malformed or out-of-range sweep configuration."""


class UnsupportedModeError(ConfigError):
    pass


def _fmt(x):
    return f"{x:.17g}"


@dataclass(frozen=True)
class SweepConfig:
    potential: object
    variable: str
    start: float
    end: float
    steps: int
    temperature_K: float
    mode: str = "two_level"
    classification: str = "reference"
    reference_param: float = None
    outputs: tuple = ("sweep_csv", "trajectory_csv", "summary_json")
    solver: dict = field(default_factory=lambda: dict(SOLVER_DEFAULTS))
    pressure_convention: str = "fixed_fraction"
    pressure_rel_delta: float = 1e-4
    map: dict = field(default_factory=dict)
    spectrum_k: int = 10
    workers: int = 1
    name: str = "sweep"
    raw: dict = field(default_factory=dict, compare=False)

    @classmethod
    def from_dict(cls, data):
        data = copy.deepcopy(data)
        raw = copy.deepcopy(data)
        if data.pop("schema", None) != SCHEMA_VERSION:
            raise ConfigError(f"config must declare schema: {SCHEMA_VERSION}")
        try:
            spec = potentials.from_dict(data.pop("potential"))
            sweep = dict(data.pop("sweep", {}))
            solver = dict(SOLVER_DEFAULTS)
            solver.update(data.pop("solver", {}))
            unknown = set(solver) - set(SOLVER_DEFAULTS)
            if unknown:
                raise ConfigError(f"unknown solver keys {sorted(unknown)}")
            pressure = dict(data.pop("pressure", {}))
            kwargs = dict(
                potential=spec,
                variable=sweep.pop("variable", "l" if potentials.is_partitioned(spec) else "L"),
                start=float(sweep.pop("start_nm", potentials.size_of(spec))),
                end=float(sweep.pop("end_nm", potentials.size_of(spec))),
                steps=int(sweep.pop("steps", 2)),
                reference_param=sweep.pop("reference_param", None),
                temperature_K=float(data.pop("temperature_K")),
                mode=data.pop("mode", "two_level"),
                classification=data.pop("classification", "reference"),
                outputs=tuple(data.pop("outputs", cls.outputs)),
                solver=solver,
                pressure_convention=pressure.pop("convention", "fixed_fraction"),
                pressure_rel_delta=float(pressure.pop("rel_delta", 1e-4)),
                map=dict(data.pop("map", {})),
                spectrum_k=int(data.pop("spectrum", {}).get("k", 10)),
                workers=int(data.pop("workers", 1)),
                name=str(data.pop("name", "sweep")),
            )
        except KeyError as exc:
            raise ConfigError(f"missing config key {exc}") from None
        except (TypeError, ValueError) as exc:
            if isinstance(exc, DomainError):
                raise
            raise ConfigError(str(exc)) from None
        if sweep or pressure:
            raise ConfigError(f"unknown keys {sorted(set(sweep) | set(pressure))}")
        if data:
            raise ConfigError(f"unknown config keys {sorted(data)}")
        config = cls(raw=raw, **kwargs)
        config.check()
        return config

    def check(self):
        if self.steps < 2:
            raise ConfigError("a sweep needs steps >= 2")
        if not self.temperature_K > 0:
            raise ConfigError("temperature_K must be positive")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}")
        if self.classification not in CLASSIFICATIONS:
            raise ConfigError(f"classification must be one of {CLASSIFICATIONS}")
        bad = set(self.outputs) - set(OUTPUTS)
        if bad:
            raise ConfigError(f"unknown outputs {sorted(bad)}")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        for value in (self.start, self.end):
            try:
                spec = potentials.with_parameter(self.potential, self.variable, value)
            except DomainError as exc:
                raise ConfigError(f"sweep value {value} invalid: {exc}") from None
            errors = potentials.validate(spec)
            if errors:
                raise ConfigError(f"sweep value {value} invalid: {'; '.join(errors)}")

    def with_overrides(self, temperature_K=None, steps=None):
        raw = copy.deepcopy(self.raw)
        if temperature_K is not None:
            raw["temperature_K"] = float(temperature_K)
        if steps is not None:
            raw.setdefault("sweep", {})["steps"] = int(steps)
        return SweepConfig.from_dict(raw)

    @property
    def params(self):
        return np.linspace(self.start, self.end, self.steps)

    def spec_at(self, value):
        return potentials.with_parameter(self.potential, self.variable, float(value))


@dataclass(frozen=True)
class SweepRow:
    param_nm: float
    Eg_eV: float
    gap_eV: float
    thermo: thermo.ThermoQuantities
    P: float
    converged: bool
    n_levels: int
    P_norm: float = None
    cls: spontaneity.SpontaneityClass = None
    delta: spontaneity.StateDelta = None


@dataclass(frozen=True)
class SweepResult:
    config: SweepConfig
    rows: tuple
    reference_index: int

    @property
    def converged(self):
        return all(r.converged for r in self.rows)

    def column(self, name):
        if name in ("zeta", "F_tilde", "U_tilde", "S_tilde", "C_tilde"):
            return np.array([getattr(r.thermo, name) for r in self.rows])
        return np.array([getattr(r, name) for r in self.rows])

    @property
    def classes(self):
        return [r.cls for r in self.rows]

    def sweep_csv(self):
        buf = io.StringIO()
        buf.write(SWEEP_CSV_HEADER + "\n")
        for r in self.rows:
            q = r.thermo
            values = [r.param_nm, r.Eg_eV, r.gap_eV, q.zeta, q.F_tilde, q.U_tilde, q.S_tilde,
                      q.C_tilde, r.P_norm]
            buf.write(",".join(_fmt(v) for v in values) + f",{r.cls.value}\n")
        return buf.getvalue()

    def trajectory_csv(self):
        buf = io.StringIO()
        buf.write(spontaneity.TRAJECTORY_CSV_HEADER + "\n")
        for r in self.rows:
            d = r.delta
            values = [r.param_nm, r.Eg_eV, r.gap_eV, d.dF, d.dU, d.dS]
            buf.write(",".join(_fmt(v) for v in values) + f",{r.cls.value}\n")
        return buf.getvalue()


def _solver_kwargs(config):
    s = config.solver
    return dict(
        n_interior=int(s["n_interior"]),
        rel_tol=float(s["rel_tol"]),
        max_points=int(s["max_points"]),
        extrapolate=bool(s["extrapolate"]),
        split_method=s["split_method"],
    )


def solve_spectrum(spec, config):
    """Spectrum with as many levels as ``config.mode`` needs at its temperature."""
    kwargs = _solver_kwargs(config)
    if config.mode == "two_level":
        return eigensolver.solve(spec, 2, **kwargs)
    return eigensolver.solve_for_temperature(spec, config.temperature_K, **kwargs)


def evaluate_point(spec, config):
    """One sweep row, without the sweep-wide normalization and classification."""
    T = config.temperature_K
    spectrum = solve_spectrum(spec, config)
    levels = spectrum.levels
    if config.mode == "n_level":
        q = thermo.n_level(spectrum, T, allow_unconverged=True)
        gap = thermo.mean_level_spacing(levels, T)
    else:
        q, gap = thermo.thermo_from_levels(levels, T, "two_level")

    extrapolate = spectrum.method == "fd-richardson"
    n = spectrum.grid.n_interior if spectrum.grid is not None else None
    split = config.solver["split_method"]

    def levels_at(s):
        if isinstance(s, potentials.InfiniteWellInfinitePartition) and split == "analytic":
            return eigensolver.solve_split(s, spectrum.k).levels
        return eigensolver.solve_fixed(s, spectrum.k, n, extrapolate, split)

    size = potentials.size_of(spec)
    P = thermo.pressure(spec, T, levels_at, config.mode, size * config.pressure_rel_delta,
                        config.pressure_convention)
    return dict(Eg_eV=float(levels[0]), gap_eV=float(gap), thermo=q, P=float(P),
                converged=bool(spectrum.converged), n_levels=q.n_levels)


def reference_index(config):
    params = config.params
    if config.reference_param is None:
        return 0
    return int(np.argmin(np.abs(params - float(config.reference_param))))


def run_sweep(config):
    """Evaluate every sweep point and classify the path."""
    params = config.params
    specs = [config.spec_at(p) for p in params]
    if config.workers > 1:
        with ThreadPoolExecutor(config.workers) as pool:
            points = list(pool.map(lambda s: evaluate_point(s, config), specs))
    else:
        points = [evaluate_point(s, config) for s in specs]

    P_norm = thermo.normalize_pressure([p["P"] for p in points])
    states = [p["thermo"] for p in points]
    ref = reference_index(config)
    if config.classification == "reference":
        deltas = [spontaneity.StateDelta.between(states[ref], s) for s in states]
    else:
        deltas = [spontaneity.StateDelta(0.0, 0.0, 0.0)]
        deltas += [spontaneity.StateDelta.between(a, b) for a, b in zip(states, states[1:])]
    rows = tuple(
        SweepRow(param_nm=float(x), P_norm=float(pn), cls=spontaneity.classify(d), delta=d, **p)
        for x, p, pn, d in zip(params, points, P_norm, deltas)
    )
    return SweepResult(config, rows, ref)


def monotonicity(values):
    diffs = np.diff(np.asarray(values, dtype=float))
    if np.all(diffs == 0):
        return "constant"
    if np.all(diffs > 0):
        return "increasing"
    if np.all(diffs < 0):
        return "decreasing"
    return "non-monotone"


def emit_summary(result, extra=None):
    """Summary record of a sweep (a JSON-serializable dict)."""
    if not result.rows:
        raise DomainError("empty sweep result")
    params = result.column("param_nm")
    intervals = [
        {"class": c.value, "start_nm": float(a), "end_nm": float(b), "n_points": n}
        for c, a, b, n in spontaneity.contiguous_intervals(params, result.classes)
        if c is not spontaneity.SpontaneityClass.BOUNDARY
    ]
    C = result.column("C_tilde")
    gap = result.column("gap_eV")
    summary = {
        "schema": SCHEMA_VERSION,
        "config": result.config.raw,
        "classification": result.config.classification,
        "reference_param_nm": float(params[result.reference_index]),
        "intervals": intervals,
        "extrema": {
            "argmax_C_tilde_nm": float(params[int(np.argmax(C))]),
            "argmax_gap_nm": float(params[int(np.argmax(gap))]),
        },
        "monotonicity": {
            "Eg_eV": monotonicity(result.column("Eg_eV")),
            "F_tilde": monotonicity(result.column("F_tilde")),
            "S_tilde": monotonicity(result.column("S_tilde")),
            "U_tilde": monotonicity(result.column("U_tilde")),
            "P": monotonicity(result.column("P")),
        },
        "converged": result.converged,
        "unconverged_params_nm": [r.param_nm for r in result.rows if not r.converged],
        "truncation_warnings_nm": [r.param_nm for r in result.rows if r.thermo.truncation_warning],
    }
    if extra:
        summary.update(extra)
    return summary


def summary_json(summary):
    return json.dumps(summary, indent=2, sort_keys=True) + "\n"


def run_map(config):
    """Two-level spontaneity map for the config's ``map`` block."""
    if config.mode != "two_level":
        raise UnsupportedModeError(
            "spontaneity maps exist only for two-level systems; use trajectory classification"
        )
    m = config.map
    return spontaneity.build_map(
        reference=tuple(m.get("reference", spontaneity.DEFAULT_REFERENCE)),
        Eg_range=tuple(m.get("Eg_range", spontaneity.DEFAULT_EG_RANGE)),
        gap_range=tuple(m.get("gap_range", spontaneity.DEFAULT_GAP_RANGE)),
        resolution=m.get("resolution", spontaneity.DEFAULT_RESOLUTION),
    )


def write_text(path, text):
    # newline="" keeps "\n" line endings on every platform
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def write_sweep_outputs(result, out_dir):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    outputs = result.config.outputs
    if "sweep_csv" in outputs:
        written.append(out_dir / "sweep.csv")
        write_text(written[-1], result.sweep_csv())
    if "trajectory_csv" in outputs:
        written.append(out_dir / "trajectory.csv")
        write_text(written[-1], result.trajectory_csv())
    if "summary_json" in outputs:
        written.append(out_dir / "summary.json")
        write_text(written[-1], summary_json(emit_summary(result)))
    if "map_csv" in outputs and result.config.mode == "two_level":
        written.append(out_dir / "map.csv")
        write_text(written[-1], run_map(result.config).to_csv())
    return written


def preset_names():
    files = resources.files("levelcoupling").joinpath("presets").iterdir()
    return sorted(f.name[:-5] for f in files if f.name.endswith(".json"))


def load_preset(name):
    path = resources.files("levelcoupling").joinpath("presets", f"{name}.json")
    if not path.is_file():
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(preset_names())}")
    return json.loads(path.read_text(encoding="utf-8"))


def load_config(path=None, preset=None):
    if preset is not None:
        return SweepConfig.from_dict(load_preset(preset))
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return SweepConfig.from_dict(data)
