"""End-to-end acceptance gate; each test prints one ``[ACCEPTANCE]`` line."""

import json
import math
import time

import numpy as np
import pytest

from oracles import ohmic_tail_root, random_unitary
from zenolab.cli import main
from zenolab.decay import (
    Ohmic,
    QuadratureConfig,
    Regime,
    Tabulated,
    classify_regime,
    kappa,
    modified_rate,
    ohmic_tau_star_estimate,
    transition_time,
)
from zenolab.engine import (
    bb_evolve,
    cycle_zeno,
    ergodic_average,
    group_average,
    symmetrization_cycle,
    zeno_limit_evolution,
    zeno_structure,
)
from zenolab.models import PAULI, bitflip_model, random_hermitian, random_model
from zenolab.pulses import limit_order_compare

pytestmark = pytest.mark.acceptance

OHMIC = Ohmic(amplitude=1.0, cutoff=1.0, temperature=0.0, n=2)


@pytest.fixture
def report(capsys):
    def emit(name, ok, detail):
        with capsys.disabled():
            print(f"\n[ACCEPTANCE] {name} {'PASS' if ok else 'FAIL'} {detail}")
        return ok

    return emit


def test_c1_bitflip_cancellation(report):
    t0 = time.perf_counter()
    worst = max(
        np.linalg.norm(zeno_structure(m.H, m.U1).HZ)
        for m in (bitflip_model(b, s) for b in (1, 2, 4) for s in range(5))
    )
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-12 and elapsed < 1.0
    assert report("C1", ok, f"max |HZ|_F={worst:.3e} time={elapsed:.2f}s"), (worst, elapsed)


def test_c2_ergodic_convergence(report):
    t0 = time.perf_counter()
    ns = [2**k for k in range(4, 13)]
    slopes, finals = [], []
    for seed in range(10):
        m = random_model(4, seed)
        hz = zeno_structure(m.H, m.U1).HZ
        err = [np.linalg.norm(ergodic_average(m.H, m.U1, n) - hz) for n in ns]
        slopes.append(np.polyfit(np.log(ns), np.log(err), 1)[0])
        finals.append(err[-1] / np.linalg.norm(m.H))
    elapsed = time.perf_counter() - t0
    ok = all(-1.3 <= s <= -0.7 for s in slopes) and max(finals) < 1e-3 and elapsed < 10
    detail = f"slopes=[{min(slopes):.3f},{max(slopes):.3f}] max rel final={max(finals):.2e} time={elapsed:.2f}s"
    assert report("C2", ok, detail), detail


def test_c3_bang_bang_to_zeno_limit(report):
    t0 = time.perf_counter()
    ratios = []
    for seed in range(10):
        m = random_model(4, seed)
        zs = zeno_structure(m.H, m.U1)
        d = {n: np.linalg.norm(bb_evolve(m.H, m.U1, 1.0, n) - zeno_limit_evolution(zs, 1.0, n)) for n in (2**7, 2**10)}
        ratios.append(d[2**10] / d[2**7])
    elapsed = time.perf_counter() - t0
    bad = [s for s, r in enumerate(ratios) if not r < 1 / 8]
    ok = not bad and elapsed < 10
    detail = f"d(1024)/d(128) max={max(ratios):.3f} (need < 0.125) failing seeds={bad} time={elapsed:.2f}s"
    assert report("C3", ok, detail), detail


def test_c4_symmetrization_equals_group_average(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(4)
    worst = 0.0
    for bath in (1, 2, 4):
        eye = np.eye(bath)
        group = [np.kron(np.eye(2), eye), np.kron(PAULI["Z"], eye)]
        h = random_hermitian(2 * bath, rng)
        worst = max(worst, np.linalg.norm(cycle_zeno(h, symmetrization_cycle(group)).HZ - group_average(h, group)))
    for _ in range(5):
        w = random_unitary(4, rng)
        d = np.diag(np.exp(0.5j * np.pi * rng.integers(0, 4, size=4)))
        group = [w @ np.linalg.matrix_power(d, r) @ w.conj().T for r in range(4)]
        group[0] = np.eye(4)
        h = random_hermitian(4, rng)
        worst = max(worst, np.linalg.norm(cycle_zeno(h, symmetrization_cycle(group)).HZ - group_average(h, group)))
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-10 and elapsed < 1.0
    assert report("C4", ok, f"max distance={worst:.3e} time={elapsed:.2f}s"), worst


def test_c5_flat_spectrum_neutral(report):
    t0 = time.perf_counter()
    c = 1.0
    flat = Tabulated.flat(c, -1e5, 1e5)
    errs = [abs(modified_rate(flat, 0.5, tau, 200, QuadratureConfig(j_max=49)) - 2 * np.pi * c) / (2 * np.pi * c)
            for tau in (1.0, 5.0, 20.0)]
    elapsed = time.perf_counter() - t0
    ok = max(errs) < 0.05 and elapsed < 30
    assert report("C5", ok, f"max rel err={max(errs):.4f} time={elapsed:.2f}s"), errs


def test_c6_short_period_asymptote(report):
    t0 = time.perf_counter()
    N = 40000
    ratios = [modified_rate(OHMIC, 0.01, tau, N) / (8 / np.pi * kappa(OHMIC, 2 * np.pi / tau))
              for tau in (0.05, 0.1, 0.2)]
    elapsed = time.perf_counter() - t0
    ok = all(0.8 <= r <= 1.2 for r in ratios) and elapsed < 60
    detail = f"N={N} ratios={[round(r, 4) for r in ratios]} time={elapsed:.2f}s"
    assert report("C6", ok, detail), detail


def test_c7_zeno_inverse_transition(report):
    t0 = time.perf_counter()
    omega0 = 0.01
    tau_star = transition_time(OHMIC, omega0, (0.1, 1000.0))
    estimate = ohmic_tau_star_estimate(1.0, 1.0, 0.0, 2, omega0)
    oracle = 2 * np.pi / ohmic_tail_root(np.pi**2 / 4 * kappa(OHMIC, omega0))
    low = classify_regime(OHMIC, omega0, tau_star / 2, 200)
    high = classify_regime(OHMIC, omega0, 2 * tau_star, 200)
    elapsed = time.perf_counter() - t0
    ok = (0.5 <= tau_star / estimate <= 2 and math.isclose(tau_star, oracle, rel_tol=1e-5)
          and abs(estimate - 1.829) < 1e-3 and low is Regime.ZENO and high is Regime.INVERSE and elapsed < 60)
    detail = (f"tau*={tau_star:.6f} estimate={estimate:.6f} oracle={oracle:.6f} "
              f"regimes={low.value}/{high.value} time={elapsed:.2f}s")
    assert report("C7", ok, detail), detail


def test_c8_limit_interchange(report):
    t0 = time.perf_counter()
    rep = limit_order_compare(PAULI["X"], PAULI["Z"], 1.0, 1.0, [10.0, 100.0, 1000.0], [1e-1, 1e-2, 1e-3])
    elapsed = time.perf_counter() - t0
    corner = rep.cell(1000.0, 1e-3).leakage
    ok = (corner < 1e-2 and rep.monotone("tau2-first") and rep.monotone("K-first")
          and rep.corner_agreement() and elapsed < 30)
    detail = (f"corner leakage={corner:.3e} monotone={rep.monotone('tau2-first')}/{rep.monotone('K-first')} "
              f"corner distance={rep.corner_distance:.3e} vs deviations "
              f"{rep.continuous_corner_deviation:.3e}/{rep.kicked_corner_deviation:.3e} time={elapsed:.2f}s")
    assert report("C8", ok, detail), detail


CLI_RUNS = {
    "structure": ["structure", "--model", "bitflip", "--bath-dim", "2", "--seed", "42", "--out", "{}/zs.json"],
    "converge": ["converge", "--model", "bitflip", "--bath-dim", "2", "--seed", "1", "--t", "1.0",
                 "--n-list", "4,16,64,256", "--csv", "{}/conv.csv"],
    "decay": ["decay", "--bath", "ohmic", "--omega0", "0.01", "--tau-min", "0.1", "--tau-max", "10",
              "--tau-points", "8", "--kicks", "200", "--bracket", "0.1,1000",
              "--csv", "{}/decay.csv", "--json", "{}/decay.json"],
    "tau-star": ["tau-star", "--bath", "ohmic", "--amp", "1", "--omegac", "1", "--temp", "0", "--n", "2",
                 "--omega0", "0.01", "--bracket", "0.1,1000", "--out", "{}/ts.json"],
    "limits": ["limits", "--h", "X", "--h1", "Z", "--tau1", "1", "--t", "1", "--k-list", "10,100,1000",
               "--tau2-list", "0.1,0.01,0.001", "--csv", "{}/limits.csv", "--json", "{}/limits.json"],
}


def test_c9_cli_determinism(report, tmp_path):
    mismatched, failed = [], []
    for name, argv in CLI_RUNS.items():
        outputs = []
        for k in range(2):
            d = tmp_path / f"{name}-{k}"
            d.mkdir()
            code = main([a.format(d) for a in argv])
            if code != 0:
                failed.append(f"{name}:{code}")
            outputs.append({p.name: p.read_bytes() for p in sorted(d.iterdir())})
        if outputs[0] != outputs[1] or not outputs[0]:
            mismatched.append(name)
    ts = json.loads((tmp_path / "tau-star-0" / "ts.json").read_text())
    ok = not mismatched and not failed
    detail = f"commands={len(CLI_RUNS)} mismatched={mismatched} failed={failed} tau*={ts['tau_star']:.6f}"
    assert report("C9", ok, detail), detail
