"""Three-stage GHZ protocol: stage chaining, fidelities, leakage and sweeps."""

from __future__ import annotations

import csv
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import mebuilder as me
from . import model
from .dynamics import EXPM, DensityMatrix, EvolutionMethod, propagate, trajectory
from .model import CouplingMode, ProtocolParams, StageKind, StageSpec

log = logging.getLogger(__name__)

#: samples taken across the entangling stage when measuring leakage
LEAKAGE_SAMPLES = 32

SWEEP_HEADER = ("omega_over_g", "F_protocol", "F_ghz_nominal", "F_ghz_optimal", "leakage", "trace_err", "pos_err")


class UndefinedPhaseError(ValueError):
    """The |000>-|111> coherence is too small to define a relative phase."""


def stage_hamiltonian(p: ProtocolParams, stage: StageSpec, mode: CouplingMode = CouplingMode.SPECTRAL) -> np.ndarray:
    if stage.kind is StageKind.COUPLING:
        return model.build_coupling_hamiltonian(p, mode)
    return model.build_rotation_hamiltonian(p, stage.beta)


def _warn_collisions(p: ProtocolParams, tol: float) -> None:
    freqs = model.analytic_bohr_frequencies(p)
    keys = sorted(freqs)
    for i, a in enumerate(keys):
        for b in keys[i + 1 :]:
            if abs(abs(freqs[a]) - abs(freqs[b])) <= tol:
                log.warning("entangling-stage Bohr frequencies w%d and w%d coincide at omega=%g; channels merged", a, b, p.omega)


def stage_liouvillian(p: ProtocolParams, stage: StageSpec, mode: CouplingMode = CouplingMode.SPECTRAL) -> me.Liouvillian:
    h = stage_hamiltonian(p, stage, mode)
    sd = me.SpectralDensity(p.gamma0, p.alpha)
    couplings = [model.pauli_op(j, "x") for j in (1, 2, 3)]
    if stage.kind is StageKind.COUPLING:
        _warn_collisions(p, me.secular_tolerance(np.linalg.eigvalsh(h)))
    channels = me.build_channels(h, couplings, sd)
    return me.assemble_liouvillian(h, channels, stage)


@dataclass(frozen=True)
class Metrics:
    f_protocol: float
    f_ghz: float
    f_ghz_optimal: float
    leakage: float
    trace_err: float
    pos_err: float
    phase_nominal: float
    phase_optimal: float | None


@dataclass
class ProtocolRun:
    params: ProtocolParams
    stages: tuple[StageSpec, ...]
    stage_states: list[DensityMatrix]
    coupling_trajectory: list[DensityMatrix] = field(repr=False)
    ideal_states: list[DensityMatrix] = field(default_factory=list, repr=False)
    metrics: Metrics | None = None

    @property
    def final(self) -> DensityMatrix:
        return self.stage_states[-1]


def initial_state() -> DensityMatrix:
    return DensityMatrix.from_state(model.computational_ket("000"))


def _evolve(p: ProtocolParams, method: EvolutionMethod, mode: CouplingMode, samples: int):
    stages = model.stage_specs(p)
    rho = initial_state()
    states, traj = [], []
    for stage in stages:
        L = stage_liouvillian(p, stage, mode)
        if stage.kind is StageKind.COUPLING:
            traj = trajectory(rho, L, stage.duration, samples, method)
        rho = propagate(rho, L, stage.duration, method)
        states.append(rho)
    return stages, states, traj


def ideal_reference(p: ProtocolParams, method: EvolutionMethod = EXPM, mode: CouplingMode = CouplingMode.SPECTRAL) -> DensityMatrix:
    """Final state of the same pipeline with both baths switched off."""
    return _evolve(p.closed, method, mode, 2)[1][-1]


def fidelity(rho_exp: DensityMatrix, rho: DensityMatrix) -> float:
    if rho_exp.dim != rho.dim:
        raise ValueError(f"dimension mismatch: {rho_exp.dim} vs {rho.dim}")
    f = complex(np.trace(rho_exp.data @ rho.data))
    if abs(f.imag) > 1e-10:
        log.warning("fidelity has imaginary residue %.3e", f.imag)
    return f.real


def fidelity_ghz(rho: DensityMatrix, phi: float) -> float:
    ghz = model.ghz_target(phi)
    return float(np.real(np.vdot(ghz, rho.data @ ghz)))


def fidelity_ghz_optimal(rho: DensityMatrix) -> float:
    """GHZ fidelity maximized over the relative phase: ``(rho_00 + rho_77)/2 + |rho_70|``."""
    d = rho.data
    return float(0.5 * np.real(d[0, 0] + d[-1, -1]) + abs(d[-1, 0]))


def relative_phase(rho: DensityMatrix, tol: float = 1e-12) -> float:
    """``arg <111|rho|000>`` in ``[0, 2pi)``, the GHZ phase maximizing the overlap."""
    d = rho.data
    if np.real(d[0, 0]) <= tol or np.real(d[-1, -1]) <= tol or abs(d[-1, 0]) <= tol:
        raise UndefinedPhaseError(f"|000>-|111> coherence {abs(d[-1, 0]):.3e} too small to define a phase")
    return float(np.angle(d[-1, 0]) % (2 * math.pi))


def leakage_of(states: Iterable[DensityMatrix]) -> float:
    proj = model.symmetric_basis().projector(model.SUBSPACE_LABELS)
    return max(1.0 - float(np.real(np.trace(proj @ s.data))) for s in states)


def leakage(run: ProtocolRun) -> float:
    """Largest population outside span{|000>, |111>, |W>, |W'>} during the entangling stage."""
    if len(run.coupling_trajectory) < 20:
        raise ValueError("leakage needs the entangling stage sampled at >= 20 points")
    return leakage_of(run.coupling_trajectory)


def run_protocol(
    p: ProtocolParams,
    method: EvolutionMethod = EXPM,
    mode: CouplingMode = CouplingMode.SPECTRAL,
    samples: int = LEAKAGE_SAMPLES,
) -> ProtocolRun:
    stages, states, traj = _evolve(p, method, mode, samples)
    ideal = _evolve(p.closed, method, mode, 2)[1]
    run = ProtocolRun(p, stages, states, traj, ideal)
    final, ref = states[-1], ideal[-1]
    try:
        phase_opt = relative_phase(final)
    except UndefinedPhaseError:
        phase_opt = None
    phase_cap = model.nominal_phase(p)
    checked = states + traj
    run.metrics = Metrics(
        f_protocol=fidelity(ref, final),
        f_ghz=fidelity_ghz(final, phase_cap),
        f_ghz_optimal=fidelity_ghz_optimal(final),
        leakage=leakage(run),
        trace_err=max(s.trace_error for s in checked),
        pos_err=max(0.0, -min(s.min_eigenvalue for s in checked)),
        phase_nominal=phase_cap,
        phase_optimal=phase_opt,
    )
    return run


@dataclass(frozen=True)
class SweepRecord:
    omega_over_g: float
    f_protocol: float
    f_ghz_nominal: float
    f_ghz_optimal: float
    leakage: float
    trace_err: float
    pos_err: float
    error: str | None = None

    def row(self) -> tuple[float, ...]:
        return (self.omega_over_g, self.f_protocol, self.f_ghz_nominal, self.f_ghz_optimal, self.leakage, self.trace_err, self.pos_err)


def _sweep_point(args) -> SweepRecord:
    omega, template, method, mode = args
    try:
        m = run_protocol(template.with_omega(omega), method, mode).metrics
    except (ArithmeticError, ValueError) as exc:
        log.error("sweep point omega=%g failed: %s", omega, exc)
        nan = float("nan")
        return SweepRecord(omega, nan, nan, nan, nan, nan, nan, error=str(exc))
    return SweepRecord(omega, m.f_protocol, m.f_ghz, m.f_ghz_optimal, m.leakage, m.trace_err, m.pos_err)


def sweep(
    grid: Sequence[float],
    template: ProtocolParams,
    method: EvolutionMethod = EXPM,
    mode: CouplingMode = CouplingMode.SPECTRAL,
    workers: int | None = None,
) -> list[SweepRecord]:
    """One record per ``omega/g`` in ``grid``, in grid order."""
    grid = [float(x) for x in grid]
    if not grid or any(not x > 0 for x in grid):
        raise ValueError("grid must be non-empty with all omega/g > 0")
    tasks = [(x, template, method, mode) for x in grid]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_sweep_point, tasks))
    return [_sweep_point(t) for t in tasks]


def format_number(x: float, digits: int = 12) -> str:
    return f"{x:.{digits}g}"


def write_sweep_csv(fh, records: Iterable[SweepRecord]) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(SWEEP_HEADER)
    for r in records:
        w.writerow([format_number(x) for x in r.row()])
