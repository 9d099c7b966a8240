"""Command-line entry point: ``levelcoupling {spectrum,thermo,sweep,map,presets}``."""

import argparse
import logging
from pathlib import Path
import sys

from .core import DomainError, SolverError
from . import sweep, thermo

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_UNCONVERGED = 3
EXIT_IO = 4

log = logging.getLogger("levelcoupling")


def _add_common(p):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", type=Path, help="JSON config file (schema 1)")
    src.add_argument("--preset", help="bundled preset name (see `levelcoupling presets`)")
    p.add_argument("--T", type=float, default=None, help="override temperature in K")
    p.add_argument("--steps", type=int, default=None, help="override number of sweep points")
    p.add_argument("--out-dir", type=Path, default=Path("."), help="output directory")
    p.add_argument("--allow-unconverged", action="store_true",
                   help="exit 0 even if some solve hit the grid cap")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser():
    parser = argparse.ArgumentParser(prog="levelcoupling", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="solve the config's potential and write spectrum.csv")
    _add_common(p)
    p.add_argument("--k", type=int, default=None, help="number of levels")
    p = sub.add_parser("thermo", help="thermodynamics of the config's potential -> thermo.csv")
    _add_common(p)
    p = sub.add_parser("sweep", help="run the parameter sweep -> sweep.csv, trajectory.csv, summary.json")
    _add_common(p)
    p = sub.add_parser("map", help="two-level spontaneity map -> map.csv")
    _add_common(p)
    sub.add_parser("presets", help="list bundled presets")
    return parser


def _spectrum(config, args):
    kwargs = sweep._solver_kwargs(config)
    k = args.k if args.k is not None else config.spectrum_k
    spectrum = sweep.eigensolver.solve(config.potential, k, **kwargs)
    path = args.out_dir / "spectrum.csv"
    sweep.write_text(path, spectrum.to_csv())
    return [path], spectrum.converged


def _thermo(config, args):
    spectrum = sweep.solve_spectrum(config.potential, config)
    if config.mode == "n_level":
        q = thermo.n_level(spectrum, config.temperature_K, allow_unconverged=True)
    else:
        q, _ = thermo.thermo_from_levels(spectrum.levels, config.temperature_K, "two_level")
    path = args.out_dir / "thermo.csv"
    sweep.write_text(path, thermo.thermo_csv([q]))
    return [path], spectrum.converged


def _sweep(config, args):
    result = sweep.run_sweep(config)
    return sweep.write_sweep_outputs(result, args.out_dir), result.converged


def _map(config, args):
    path = args.out_dir / "map.csv"
    sweep.write_text(path, sweep.run_map(config).to_csv())
    return [path], True


COMMANDS = {"spectrum": _spectrum, "thermo": _thermo, "sweep": _sweep, "map": _map}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(message)s")
    if args.command == "presets":
        print("\n".join(sweep.preset_names()))
        return EXIT_OK
    try:
        config = sweep.load_config(args.config, args.preset)
        if args.T is not None or args.steps is not None:
            config = config.with_overrides(args.T, args.steps)
    except OSError as exc:
        log.error("cannot read config: %s", exc)
        return EXIT_CONFIG
    except DomainError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    try:
        args.out_dir.mkdir(parents=True, exist_ok=True)
        written, converged = COMMANDS[args.command](config, args)
    except SolverError as exc:
        log.error("solver failed: %s %s", exc, exc.diagnostics)
        return EXIT_UNCONVERGED
    except DomainError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    except OSError as exc:
        log.error("I/O error: %s", exc)
        return EXIT_IO
    for path in written:
        log.info("wrote %s", path)
    if not converged and not args.allow_unconverged:
        log.error("some solves did not converge (use --allow-unconverged to accept)")
        return EXIT_UNCONVERGED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
