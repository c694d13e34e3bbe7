"""Density-matrix propagation under a time-independent Liouvillian.

Two independent integrators are provided: the exact semigroup
``exp(L t)`` on the vectorized state, and classical fourth-order
Runge-Kutta on ``drho/dt = L(rho)``.  Results are checked against the
density-matrix invariants after every call and never renormalized.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass

import numpy as np

from . import numkernel as nk
from .mebuilder import Liouvillian, devec, vec

HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-9
POSITIVITY_TOL = 1e-8


class InvariantViolation(ArithmeticError):
    """A propagated state left the set of density matrices."""

    def __init__(self, message: str, trace_err: float, herm_err: float, min_eig: float):
        super().__init__(message)
        self.trace_err = trace_err
        self.herm_err = herm_err
        self.min_eig = min_eig


@dataclass(frozen=True)
class DensityMatrix:
    data: np.ndarray
    time: float = 0.0

    @classmethod
    def from_state(cls, psi, time: float = 0.0) -> DensityMatrix:
        psi = np.asarray(psi, dtype=complex)
        return cls(np.outer(psi, psi.conj()), time)

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    @property
    def trace_error(self) -> float:
        return abs(complex(np.trace(self.data)) - 1.0)

    @property
    def hermiticity_error(self) -> float:
        return float(np.linalg.norm(self.data - self.data.conj().T))

    @property
    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh((self.data + self.data.conj().T) / 2)[0])

    @property
    def purity(self) -> float:
        return float(np.real(np.trace(self.data @ self.data)))

    def check(self) -> DensityMatrix:
        tr, he, me_ = self.trace_error, self.hermiticity_error, self.min_eigenvalue
        if tr > TRACE_TOL or he > HERMITICITY_TOL or me_ < -POSITIVITY_TOL:
            raise InvariantViolation(
                f"density matrix invariants violated at t={self.time:.6g}: "
                f"|Tr-1|={tr:.3e}, ||rho-rho^dag||={he:.3e}, min eig={me_:.3e}",
                tr,
                he,
                me_,
            )
        return self


class Method(enum.Enum):
    SUPEROP_EXPM = "expm"
    RK4 = "rk4"


@dataclass(frozen=True)
class EvolutionMethod:
    selector: Method = Method.SUPEROP_EXPM
    rk4_step_fraction: float = 1e-4

    def __post_init__(self):
        object.__setattr__(self, "selector", Method(self.selector))
        if not 0 < self.rk4_step_fraction <= 1e-2:
            raise ValueError(f"rk4_step_fraction must lie in (0, 0.01], got {self.rk4_step_fraction}")


EXPM = EvolutionMethod(Method.SUPEROP_EXPM)
RK4 = EvolutionMethod(Method.RK4)


def vectorize(rho: DensityMatrix | np.ndarray) -> np.ndarray:
    data = rho.data if isinstance(rho, DensityMatrix) else np.asarray(rho)
    return vec(data).copy()


def devectorize(v: np.ndarray, time: float = 0.0) -> DensityMatrix:
    v = np.asarray(v)
    dim = math.isqrt(v.size)
    if dim * dim != v.size:
        raise ValueError(f"vector of length {v.size} is not a vectorized square matrix")
    return DensityMatrix(devec(v, dim).copy(), time)


def _rk4(lmat: np.ndarray, v: np.ndarray, t: float, nsteps: int) -> np.ndarray:
    h = t / nsteps
    for _ in range(nsteps):
        k1 = lmat @ v
        k2 = lmat @ (v + 0.5 * h * k1)
        k3 = lmat @ (v + 0.5 * h * k2)
        k4 = lmat @ (v + h * k3)
        v = v + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
    return v


def _check_dims(rho: DensityMatrix, L: Liouvillian):
    if rho.dim != L.dim:
        raise ValueError(f"state has dim {rho.dim}, generator acts on dim {L.dim}")


def propagate(rho: DensityMatrix, L: Liouvillian, t: float, method: EvolutionMethod = EXPM) -> DensityMatrix:
    """Evolve ``rho`` for a time ``t`` under ``L``; ``method.rk4_step_fraction`` is relative to ``t``."""
    if t < 0:
        raise ValueError(f"propagation time must be non-negative, got {t}")
    _check_dims(rho, L)
    if t == 0:
        return DensityMatrix(rho.data.copy(), rho.time)
    v = vectorize(rho)
    if method.selector is Method.SUPEROP_EXPM:
        out = nk.expm(L.matrix * t) @ v
    else:
        out = _rk4(L.matrix, v, t, math.ceil(1 / method.rk4_step_fraction))
    return devectorize(out, rho.time + t).check()


def trajectory(rho: DensityMatrix, L: Liouvillian, t: float, samples: int, method: EvolutionMethod = EXPM) -> list[DensityMatrix]:
    """States at ``samples`` uniformly spaced times on ``[0, t]`` (both ends included)."""
    if samples < 2:
        raise ValueError("need at least two samples")
    _check_dims(rho, L)
    dt = t / (samples - 1)
    v = vectorize(rho)
    if method.selector is Method.SUPEROP_EXPM:
        step = nk.expm(L.matrix * dt)
        advance = lambda x: step @ x  # noqa: E731
    else:
        n = max(1, math.ceil(1 / (method.rk4_step_fraction * (samples - 1))))
        advance = lambda x: _rk4(L.matrix, x, dt, n)  # noqa: E731
    out = [DensityMatrix(rho.data.copy(), rho.time)]
    for i in range(1, samples):
        v = advance(v)
        out.append(devectorize(v, rho.time + i * dt).check())
    return out


TRAJECTORY_HEADER_PREFIX = ("t", "purity")


def write_trajectory_csv(path, states: list[DensityMatrix], basis) -> None:
    """One row per sample: time, purity and the populations of ``basis``."""
    header = list(TRAJECTORY_HEADER_PREFIX) + [f"pop_{lab}" for lab in basis.labels]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for s in states:
            pops = basis.populations(s.data)
            w.writerow([f"{s.time:.12g}", f"{s.purity:.12g}"] + [f"{x:.12g}" for x in pops])
