"""Secular (Born-Markov + rotating-wave) Lindblad generators at zero temperature.

For a system Hamiltonian ``H`` with eigenprojectors ``P_E`` and a bath
coupling operator ``C``, the jump operator at Bohr frequency ``w >= 0`` is

    A(w) = sum_{E' - E = w} P_E C P_E'

so that ``A(w)`` lowers the energy by ``w``.  Only ``w >= 0`` channels are
kept (the baths are at zero temperature); ``w = 0`` collects the
energy-conserving, dephasing part of ``C``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import numkernel as nk

#: relative secular-grouping tolerance, scaled by ``max|E_n|``
SECULAR_RTOL = 1e-9
_ZERO_JUMP = 1e-13


@dataclass(frozen=True)
class SpectralDensity:
    """Zero-temperature ohmic rate law with a separate zero-frequency rate."""

    gamma0: float = 0.0
    alpha: float = 0.0

    def rate(self, omega: float, tol: float = 1e-12) -> float:
        return ohmic_rate(self, omega, tol)


def ohmic_rate(sd: SpectralDensity, omega: float, tol: float = 1e-12) -> float:
    if omega < -tol:
        raise ValueError(f"negative Bohr frequency {omega!r}: absorption has zero rate at T = 0")
    if abs(omega) <= tol:
        return sd.gamma0
    return sd.alpha * omega


@dataclass(frozen=True)
class DissipationChannel:
    bath: int
    bohr: float
    jump: np.ndarray
    rate: float
    label: str | None = None


@dataclass(frozen=True)
class Liouvillian:
    """Generator acting on column-stacked density matrices."""

    matrix: np.ndarray
    dim: int
    stage: object = None

    def apply(self, rho: np.ndarray) -> np.ndarray:
        return devec(self.matrix @ vec(rho), self.dim)


def vec(rho: np.ndarray) -> np.ndarray:
    return np.asarray(rho).reshape(-1, order="F")


def devec(v: np.ndarray, dim: int) -> np.ndarray:
    return np.asarray(v).reshape((dim, dim), order="F")


def secular_tolerance(eigenvalues: np.ndarray) -> float:
    scale = float(np.max(np.abs(eigenvalues))) if len(eigenvalues) else 0.0
    return SECULAR_RTOL * max(scale, 1.0)


def energy_levels(h: np.ndarray, tol: float | None = None) -> list[tuple[float, np.ndarray]]:
    """Distinct eigenvalues of ``h`` (clustered within ``tol``) with their projectors."""
    eig = nk.eig_hermitian(h, tol=1e-10)
    if tol is None:
        tol = secular_tolerance(eig.eigenvalues)
    clusters: list[list[int]] = []
    for i, e in enumerate(eig.eigenvalues):
        if clusters and e - eig.eigenvalues[clusters[-1][-1]] <= tol:
            clusters[-1].append(i)
        else:
            clusters.append([i])
    levels = []
    for idx in clusters:
        v = eig.eigenvectors[:, idx]
        levels.append((float(np.mean(eig.eigenvalues[idx])), v @ v.conj().T))
    return levels


def _group(freqs: list[float], tol: float) -> list[list[int]]:
    order = sorted(range(len(freqs)), key=lambda i: freqs[i])
    groups: list[list[int]] = []
    for i in order:
        if groups and freqs[i] - freqs[groups[-1][0]] <= tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def _transitions(h: np.ndarray, tol: float | None):
    levels = energy_levels(h, tol)
    if tol is None:
        tol = secular_tolerance(np.array([e for e, _ in levels]))
    pairs = [(lo, hi) for lo in range(len(levels)) for hi in range(lo, len(levels))]
    gaps = [levels[hi][0] - levels[lo][0] for lo, hi in pairs]
    out = []
    for grp in _group(gaps, tol):
        bohr = float(np.mean([gaps[i] for i in grp]))
        if abs(bohr) <= tol:
            bohr = 0.0
        out.append((bohr, [pairs[i] for i in grp]))
    return levels, out, tol


def bohr_frequencies(h: np.ndarray, tol: float | None = None, couplings: Sequence[np.ndarray] | None = None) -> list[float]:
    """Distinct non-negative eigenvalue gaps of ``h``, ascending.

    With ``couplings`` given, only gaps bridged by a non-zero matrix element
    of at least one coupling operator are returned.
    """
    if couplings is None:
        _, groups, _ = _transitions(h, tol)
        return [bohr for bohr, _ in groups]
    found = set()
    for c in couplings:
        found.update(bohr for bohr, _ in jump_operators(h, c, tol))
    return sorted(found)


def jump_operators(h: np.ndarray, coupling: np.ndarray, tol: float | None = None) -> list[tuple[float, np.ndarray]]:
    """``(w, A(w))`` for every ``w >= 0`` with a non-vanishing jump operator."""
    coupling = nk.as_matrix(coupling)
    levels, groups, _ = _transitions(h, tol)
    scale = max(np.linalg.norm(coupling), 1.0)
    out = []
    for bohr, pairs in groups:
        a = np.zeros_like(coupling)
        for lo, hi in pairs:
            a += levels[lo][1] @ coupling @ levels[hi][1]
        if np.linalg.norm(a) > _ZERO_JUMP * scale:
            out.append((bohr, a))
    return out


def build_channels(h: np.ndarray, couplings: Sequence[np.ndarray], sd: SpectralDensity, tol: float | None = None) -> list[DissipationChannel]:
    """One channel per bath per Bohr frequency; bath ``j`` couples through ``couplings[j-1]``."""
    levels, _, tol = _transitions(h, tol)
    channels = []
    for j, c in enumerate(couplings, start=1):
        for bohr, a in jump_operators(h, c, tol):
            channels.append(DissipationChannel(bath=j, bohr=bohr, jump=a, rate=ohmic_rate(sd, bohr, tol)))
    return channels


def dissipator_superop(a: np.ndarray) -> np.ndarray:
    """Column-stacked superoperator of ``rho -> A rho A^dag - {A^dag A, rho}/2``."""
    a = np.asarray(a, dtype=complex)
    eye = np.eye(a.shape[0], dtype=complex)
    ada = a.conj().T @ a
    return np.kron(a.conj(), a) - 0.5 * np.kron(eye, ada) - 0.5 * np.kron(ada.T, eye)


def hamiltonian_superop(h: np.ndarray) -> np.ndarray:
    h = np.asarray(h, dtype=complex)
    eye = np.eye(h.shape[0], dtype=complex)
    return -1j * (np.kron(eye, h) - np.kron(h.T, eye))


def assemble_liouvillian(h: np.ndarray, channels: Sequence[DissipationChannel], stage=None) -> Liouvillian:
    h = nk.as_matrix(h)
    dim = h.shape[0]
    mat = hamiltonian_superop(h)
    for ch in channels:
        if ch.jump.shape != h.shape:
            raise ValueError(f"jump operator of bath {ch.bath} has shape {ch.jump.shape}, expected {h.shape}")
        if ch.rate:
            mat = mat + ch.rate * dissipator_superop(ch.jump)
    return Liouvillian(matrix=mat, dim=dim, stage=stage)


def trace_defect(L: Liouvillian) -> float:
    """``|| vec(I)^dag L ||``; zero for a trace-preserving generator."""
    return float(np.linalg.norm(vec(np.eye(L.dim)).conj() @ L.matrix))
