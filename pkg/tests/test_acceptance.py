"""Acceptance gate: one PASS/FAIL line per criterion (see the terminal summary)."""

import math
import subprocess
import sys
import time

import numpy as np
import pytest

from ghzbath import closedforms as cf
from ghzbath import model
from ghzbath import numkernel as nk
from ghzbath import protocol as pr
from ghzbath.dynamics import EXPM, RK4, DensityMatrix, propagate
from ghzbath.model import ProtocolParams

FIG1_GRID = [1.0 + 0.5 * i for i in range(39)]
BATH = dict(gamma0=1e-3, alpha=1e-3, gtilde=0.1)


@pytest.fixture(scope="module")
def fig1_runs():
    start = time.perf_counter()
    runs = [pr.run_protocol(ProtocolParams(w, **BATH)) for w in FIG1_GRID]
    return runs, time.perf_counter() - start


def test_criterion_01_closed_chain(record_criterion):
    start = time.perf_counter()
    p = ProtocolParams(omega=5 * 0.9, gtilde=0.1).closed
    ref = model.analytic_reference(p)
    run = pr.run_protocol(p)
    dists = []
    for state, psi in zip(run.stage_states, (ref.stage1_state, ref.stage2_state, ref.final_state)):
        dists.append(nk.phase_aligned_distance(state.data, np.outer(psi, psi.conj())))
    elapsed = time.perf_counter() - start
    ok = max(dists) <= 1e-8 and elapsed < 1.0
    record_criterion(1, "closed-system chain", ok, f"distances {', '.join(f'{d:.1e}' for d in dists)}; {elapsed:.2f} s")


def test_criterion_02_ghz_condition(record_criterion):
    worst_f, worst_pop = 0.0, 0.0
    for k in range(1, 6):
        p = ProtocolParams(model.ghz_condition_omega(k)).closed
        d = pr.run_protocol(p).final.data
        worst_f = max(worst_f, abs(pr.fidelity_ghz_optimal(DensityMatrix(d)) - 1))
        worst_pop = max(worst_pop, abs(d[0, 0].real - 0.5), abs(d[-1, -1].real - 0.5))
    ok = worst_f <= 1e-6 and worst_pop <= 1e-9
    record_criterion(2, "GHZ condition k=1..5", ok, f"max |F-1|={worst_f:.1e}, max |pop-1/2|={worst_pop:.1e}")


def test_criterion_03_detuning_robustness(record_criterion):
    # closed form of the final amplitudes: |A000|^2 = (1 + sin a)/2, |A111|^2 = (1 - sin a)/2
    a = 1.1 * math.pi
    want_imb, want_f = abs(math.sin(a)), 0.5 * (1 + abs(math.cos(a)))
    p = ProtocolParams(model.ghz_condition_omega(1) * 1.1).closed
    d = pr.run_protocol(p).final.data
    imb = abs(d[0, 0].real - d[-1, -1].real)
    f = pr.fidelity_ghz_optimal(DensityMatrix(d))
    f_open = pr.run_protocol(ProtocolParams(p.omega, **BATH)).metrics.f_ghz_optimal
    ok = abs(imb - 0.309017) <= 1e-3 and abs(f - 0.9755) <= 5e-3 and abs(want_imb - 0.309017) <= 1e-6
    record_criterion(
        3, "10% detuning", ok, f"imbalance {imb:.6f} (oracle {want_imb:.6f}), F_opt {f:.6f} (oracle {want_f:.6f}, with bath {f_open:.4f})"
    )


def test_criterion_04_closed_forms(record_criterion):
    start = time.perf_counter()
    rows, unitarity = cf.validation_report(ProtocolParams(5.0))
    elapsed = time.perf_counter() - start
    checked = [r for r in rows if r.stage in (1, 2)]
    worst = max(r.distance for r in checked)
    stage3 = max(r.distance for r in rows if r.stage == 3)
    ok = len(checked) == 30 and cf.report_passes(rows) and worst <= 1e-9 and unitarity <= 1e-9 and elapsed < 5
    record_criterion(
        4, "closed-form dissipators", ok, f"{len(checked)} channels, max dist {worst:.1e}, T unitarity {unitarity:.1e}, stage-3 max {stage3:.2e} (report); {elapsed:.2f} s"
    )


def test_criterion_05_fidelity_grid(record_criterion, fig1_runs):
    runs, elapsed = fig1_runs
    fs = [r.metrics.f_protocol for r in runs]
    ok = min(fs) >= 0.89 and elapsed < 30
    record_criterion(5, "F over omega/g in [1, 20]", ok, f"min F {min(fs):.4f} at omega/g={FIG1_GRID[int(np.argmin(fs))]}; {elapsed:.1f} s")


def test_criterion_06_ghz_peaks(record_criterion):
    step = 0.05
    peaks, offsets = [], []
    for k in range(1, 6):
        center = model.ghz_condition_omega(k)
        grid = [center + step * i for i in range(-10, 11)]
        fs = [pr.run_protocol(ProtocolParams(w, **BATH)).metrics.f_ghz_optimal for w in grid]
        i = int(np.argmax(fs))
        interior = 0 < i < len(fs) - 1
        offsets.append(i - 10 if interior else None)
        peaks.append(fs[i])
    near = all(o is not None and abs(o) <= 1 for o in offsets)
    decreasing = all(b < a for a, b in zip(peaks, peaks[1:]))
    ok = near and decreasing and peaks[0] >= 0.9
    record_criterion(6, "F_GHZ peaks", ok, f"peaks {', '.join(f'{x:.4f}' for x in peaks)}; offsets (steps) {offsets}")


def test_criterion_07_strong_bath(record_criterion):
    grid = [1.0 + 0.5 * i for i in range(39)]
    fs = [pr.run_protocol(ProtocolParams(w, gamma0=1e-2, alpha=1e-2)).metrics.f_ghz_optimal for w in grid]
    above = [w for w, f in zip(grid, fs) if f >= 0.7]
    ok = bool(above)
    where = f"[{min(above)}, {max(above)}]" if above else "none"
    record_criterion(7, "F_GHZ >= 0.7 at gamma=1e-2", ok, f"max {max(fs):.4f}; omega/g with F_GHZ >= 0.7: {where}")


def test_criterion_08_leakage(record_criterion, fig1_runs):
    runs, _ = fig1_runs
    leak = [r.metrics.leakage for r in runs]
    ok = max(leak) <= 0.03
    record_criterion(8, "leakage", ok, f"max {max(leak):.4f} at omega/g={FIG1_GRID[int(np.argmax(leak))]}")


def test_criterion_09_hygiene(record_criterion, fig1_runs):
    runs, _ = fig1_runs
    tr = he = 0.0
    mn = 1.0
    for r in runs:
        for s in r.stage_states + r.coupling_trajectory:
            tr, he, mn = max(tr, s.trace_error), max(he, s.hermiticity_error), min(mn, s.min_eigenvalue)
    dist = 0.0
    for w in (1.0, 5.0, 10.0, 15.0, 20.0):
        p = ProtocolParams(w, **BATH)
        a = b = pr.initial_state()
        for stage in model.stage_specs(p):
            L = pr.stage_liouvillian(p, stage)
            a, b = propagate(a, L, stage.duration, EXPM), propagate(b, L, stage.duration, RK4)
        dist = max(dist, nk.frobenius_distance(a.data, b.data))
    ok = tr <= 1e-9 and he <= 1e-9 and mn >= -1e-8 and dist <= 1e-6
    record_criterion(9, "numerical hygiene", ok, f"|Tr-1| {tr:.1e}, herm {he:.1e}, min eig {mn:.1e}, expm-rk4 {dist:.1e}")


def test_criterion_10_determinism(record_criterion, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text('{"omega_over_g": {"start": 1, "stop": 20, "step": 0.5}}')
    outs = []
    for name in ("a.csv", "b.csv"):
        path = tmp_path / name
        subprocess.run([sys.executable, "-m", "ghzbath", "sweep", "--config", str(cfg), "--output", str(path)], check=True, capture_output=True)
        outs.append(path.read_bytes())
    ok = outs[0] == outs[1] and outs[0].count(b"\n") == 40
    record_criterion(10, "sweep determinism", ok, f"{len(outs[0])} bytes, identical={outs[0] == outs[1]}")
