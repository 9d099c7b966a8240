"""Acceptance criteria, one test each, each printing a single PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py``; the lines are printed even
without ``-s``.
"""

import json
import time

import mpmath as mp
import numpy as np
import pytest
from scipy.optimize import brentq, minimize_scalar

from levelcoupling import eigensolver as es
from levelcoupling import potentials as pot
from levelcoupling import spontaneity as sp
from levelcoupling import sweep, thermo
from levelcoupling.spontaneity import SpontaneityClass as K


@pytest.fixture
def report(capsys):
    def _report(label, ok, detail=""):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {label}: {detail}")
        assert ok, f"{label}: {detail}"

    return _report


def test_ac01_analytic_oracle_spectra(report):
    cases = [
        ("box L=100", pot.InfiniteWell(L=100.0), es.analytic_box_spectrum(100.0, 0.067, 10)),
        # walls 10 L_osc from the centre so the wall-free ladder applies
        ("harmonic L_osc=10", pot.Harmonic(L_osc=10.0, L_domain=200.0),
         es.analytic_harmonic_spectrum(10.0, 0.067, 10)),
    ]
    details, ok = [], True
    for name, spec, exact in cases:
        t0 = time.perf_counter()
        s = es.solve(spec, 10)
        elapsed = time.perf_counter() - t0
        err = float(np.max(np.abs(s.levels - exact.levels) / exact.levels))
        ok &= s.converged and err < 1e-5 and elapsed < 10.0
        details.append(f"{name} max rel err {err:.2e} in {elapsed:.2f}s")
    report("AC1 analytic-oracle spectra", ok, "; ".join(details))


def test_ac02_box_e10_vs_bump_height(report):
    E10 = es.analytic_box_spectrum(100.0, 0.067, 10).levels[-1]
    rel = abs(E10 - 0.057) / 0.057
    ok = round(E10, 4) == 0.0561 and rel < 0.03
    report("AC2 box E_10 near h", ok, f"E_10 = {E10:.6f} eV, {100 * rel:.2f}% from 0.057 eV")


def test_ac03_two_level_closed_forms(report):
    mp.mp.dps = 40
    Eg, gap = mp.mpf("0.5"), mp.mpf(3)
    x = [Eg, Eg + gap]
    w = [mp.e ** -v for v in x]
    Z = mp.fsum(w)
    p = [wi / Z for wi in w]
    U = mp.fsum(pi * xi for pi, xi in zip(p, x))
    brute = [Z, -mp.log(Z), U, -mp.fsum(pi * mp.log(pi) for pi in p),
             mp.fsum(pi * (xi - U) ** 2 for pi, xi in zip(p, x))]
    q = thermo.two_level(0.5, 3.0)
    err = max(abs(float(b) - v) for b, v in zip(brute, q.as_tuple()))

    S0 = thermo.two_level(0.0, 0.0).S_tilde
    schottky = minimize_scalar(lambda g: -thermo.two_level(0.0, g).C_tilde, bounds=(0.5, 6.0),
                               method="bounded", options={"xatol": 1e-10}).x
    excitation = minimize_scalar(lambda g: -thermo.two_level(0.0, g).U_tilde, bounds=(0.1, 5.0),
                                 method="bounded", options={"xatol": 1e-10}).x
    root_c = brentq(lambda y: np.tanh(y / 2) - 2 / y, 1.0, 5.0, xtol=1e-14)
    root_u = brentq(lambda y: np.exp(y) * (y - 1) - 1, 0.5, 3.0, xtol=1e-14)
    ok = (err < 1e-12 and S0 == np.log(2) and abs(schottky - 2.39936) < 1e-3
          and abs(root_c - 2.39936) < 1e-3 and abs(excitation - 1.27846) < 1e-3
          and abs(root_u - 1.27846) < 1e-3)
    report("AC3 two-level closed forms", ok,
           f"max err {err:.1e}, S(0)=ln2 {S0 == np.log(2)}, C peak {schottky:.5f}, "
           f"excitation peak {excitation:.5f}")


def test_ac04_helmholtz_identity(report):
    rng = np.random.default_rng(20240601)
    n = 1_000_000
    _, F, U, S, _ = thermo.two_level_arrays(rng.uniform(-30, 30, n), rng.uniform(0, 60, n))
    worst_two = float(np.max(np.abs(F - (U - S))))
    worst_n = 0.0
    for _ in range(10):
        # 10^5 spectra of 12 sorted levels per chunk
        levels = np.sort(rng.uniform(-20, 60, (n // 10, 12)), axis=1)
        _, F, U, S, _ = thermo.canonical_sums(levels)
        worst_n = max(worst_n, float(np.max(np.abs(F - (U - S)))))
    ok = worst_two <= 1e-10 and worst_n <= 1e-10
    report("AC4 Helmholtz identity", ok,
           f"max |F-(U-S)| two-level {worst_two:.1e}, N-level {worst_n:.1e} over 10^6 each")


def test_ac05_map_properties(report):
    m = sp.build_map()
    ref_ok = m.cell(0.5, 3.0) is K.BOUNDARY
    s = np.linspace(0.1, 0.999, 500)
    dF, dU, dS = sp.two_level_deltas((0.5, 3.0), 0.5 * s, 3.0 * s)
    diagonal_ok = all(c is K.TYPICAL for c in sp.classify_arrays(dF, dU, dS))
    impossible = int(np.count_nonzero((m.dF < 0) & (m.dU > 0) & (m.dS < 0)))
    ok = ref_ok and diagonal_ok and impossible == 0 and m.cells.shape == (241, 241)
    report("AC5 map properties", ok,
           f"reference boundary {ref_ok}, shrinking diagonal typical {diagonal_ok}, "
           f"impossible cells {impossible}")


FIG2 = ("fig2_box_two_level", "fig2_box_n_level", "fig2_harmonic_two_level", "fig2_harmonic_n_level")


def test_ac06_fig2_size_sweeps(report):
    t0 = time.perf_counter()
    details, ok = [], True
    for name in FIG2:
        result = sweep.run_sweep(sweep.load_config(preset=name))
        mono = sweep.emit_summary(result)["monotonicity"]
        typical = all(c is K.TYPICAL for c in result.classes[1:])
        good = (mono["F_tilde"] == "decreasing" and mono["S_tilde"] == "increasing"
                and mono["U_tilde"] == "decreasing" and mono["P"] == "decreasing" and typical)
        ok &= good
        details.append(f"{name} {'ok' if good else mono}")
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 120.0
    report("AC6 size sweeps", ok, f"{'; '.join(details)}; {elapsed:.1f}s total")


def _runs(params, classes):
    return [(c, a, b) for c, a, b, _ in sp.contiguous_intervals(params, classes) if c is not K.BOUNDARY]


def test_ac07_case2_energy_driven(report):
    result = sweep.run_sweep(sweep.load_config(preset="fig4_case2_two_level"))
    Eg, gap = result.column("Eg_eV"), result.column("gap_eV")
    eg_ok = bool(np.all(np.diff(Eg) < 0))
    peak = int(np.argmax(gap))
    rising, falling = np.diff(gap[: peak + 1]), np.diff(gap[peak:])
    gap_ok = 0 < peak < len(gap) - 1 and np.all(rising > 0) and np.all(falling < 0)
    energy_runs = [r for r in _runs(result.column("param_nm"), result.classes) if r[0] is K.ENERGY_DRIVEN]
    rows = [r for r in result.rows if r.cls is K.ENERGY_DRIVEN]
    signs_ok = all(r.delta.dF < 0 and r.delta.dU < 0 and r.delta.dS < 0 for r in rows)
    ok = eg_ok and gap_ok and len(energy_runs) == 1 and signs_ok
    span = f"{energy_runs[0][1]:g}-{energy_runs[0][2]:g} nm" if energy_runs else "none"
    report("AC7 case 2 energy-driven", ok,
           f"Eg decreasing {eg_ok}, gap peak at l={result.column('param_nm')[peak]:g} nm, "
           f"energy-driven runs {len(energy_runs)} ({span})")


def _case4_order(result):
    runs = _runs(result.column("param_nm"), result.classes)
    order = [c for c, _, _ in runs]
    wanted = [K.ENERGY_DRIVEN, K.TYPICAL, K.ENTROPY_DRIVEN]
    it = iter(order)
    in_order = all(any(c is w for c in it) for w in wanted)
    entropy_hits = any(c is K.ENTROPY_DRIVEN and b >= 95.0 and a <= 100.0 for c, a, b in runs)
    return in_order and entropy_hits, runs


def test_ac08_case4_energy_typical_entropy(report, tmp_path):
    base = sweep.load_preset("fig4_case4_n_level")
    candidates = [15.0] + [v for v in np.arange(5.0, 50.5, 5.0) if v != 15.0]
    found, runs = None, []
    for L_osc in candidates:
        data = json.loads(json.dumps(base))
        data["potential"]["L_osc_nm"] = float(L_osc)
        result = sweep.run_sweep(sweep.SweepConfig.from_dict(data))
        passed, runs = _case4_order(result)
        if passed:
            found = float(L_osc)
            break
    ok = found is not None
    if ok:
        summary = sweep.emit_summary(result, extra={"case4_L_osc_nm": found})
        path = tmp_path / "summary.json"
        sweep.write_text(path, sweep.summary_json(summary))
        ok = json.loads(path.read_text())["case4_L_osc_nm"] == found
    text = ", ".join(f"{c.value} {a:g}-{b:g}" for c, a, b in runs)
    report("AC8 case 4 energy->typical->entropy", ok, f"L_osc = {found} nm at 300 K: {text}")


def test_ac09_split_domain(report):
    sym = es.solve(pot.InfiniteWellInfinitePartition(l=50.0), 20).levels
    pair_err = float(np.max(np.abs(sym[1::2] - sym[0::2])))
    E1 = es.analytic_box_spectrum(100.0, 0.067, 1).levels[0]
    E = 100 * E1
    N_half = es.counting_function(es.solve(pot.InfiniteWellInfinitePartition(l=50.0), 400).levels, E)
    diffs = {}
    for l in (55.0, 60.0, 70.0, 80.0):
        levels = es.solve(pot.InfiniteWellInfinitePartition(l=l), 400).levels
        diffs[l] = es.counting_function(levels, E) - N_half
    ok = pair_err < 1e-12 and all(abs(d) <= 1 for d in diffs.values())
    report("AC9 split-domain exactness", ok,
           f"max pair splitting {pair_err:.1e} eV; N(E)-N_half at 100 E_1: {diffs}")


def test_ac10_convergence_order(report):
    spec = pot.InfiniteWell()
    exact = es.analytic_box_spectrum(100.0, 0.067, 1).levels[0]
    errs = [abs(es.solve_on_grid(spec, n, 1)[0] - exact) for n in (127, 255, 511, 1023, 2047, 4095)]
    ratios = [a / b for a, b in zip(errs, errs[1:])]
    ok = all(3.6 <= r <= 4.4 for r in ratios)
    report("AC10 convergence order", ok, "ratios " + ", ".join(f"{r:.4f}" for r in ratios))


def _preset_bytes(name, out_dir):
    config = sweep.load_config(preset=name)
    if config.outputs == ("map_csv",):
        out_dir.mkdir(parents=True)
        path = out_dir / "map.csv"
        sweep.write_text(path, sweep.run_map(config).to_csv())
        return {path.name: path.read_bytes()}
    paths = sweep.write_sweep_outputs(sweep.run_sweep(config), out_dir)
    return {p.name: p.read_bytes() for p in paths}


def test_ac11_determinism(report, tmp_path):
    es._dimensionless_levels.cache_clear()
    mismatched = []
    names = sweep.preset_names()
    for name in names:
        first = _preset_bytes(name, tmp_path / name / "a")
        second = _preset_bytes(name, tmp_path / name / "b")
        if first != second or not first:
            mismatched.append(name)
    report("AC11 determinism", not mismatched,
           f"{len(names) - len(mismatched)}/{len(names)} presets byte-identical")
