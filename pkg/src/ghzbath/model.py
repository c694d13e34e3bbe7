"""Hamiltonians, stage timings and closed-form states of the three-qubit protocol.

Conventions
-----------
* Units: ``g = 1``; every frequency is a ratio to ``g`` and every time is in
  units of ``1/g``.
* Single-qubit basis ``(|0>, |1>)`` with ``sigma_z|0> = -|0>`` so that
  ``|000>`` is the ground state of ``omega * S_z``.
* Three-qubit computational basis ``|q1 q2 q3>`` with ``q1`` the most
  significant bit (index ``4*q1 + 2*q2 + q3``).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import numkernel as nk

SQRT2 = math.sqrt(2.0)
SQRT3 = math.sqrt(3.0)
SQRT6 = math.sqrt(6.0)
N_QUBITS = 3
DIM = 2**N_QUBITS

I2 = np.eye(2, dtype=complex)
SIGMA_Z = np.diag([-1.0, 1.0]).astype(complex)
SIGMA_MINUS = np.array([[0, 1], [0, 0]], dtype=complex)  # |0><1|
SIGMA_PLUS = SIGMA_MINUS.T.copy()
SIGMA_X = SIGMA_MINUS + SIGMA_PLUS
SIGMA_Y = -1j * (SIGMA_PLUS - SIGMA_MINUS)  # so that sigma_pm = (sigma_x +- i sigma_y)/2

_SINGLE = {"x": SIGMA_X, "y": SIGMA_Y, "z": SIGMA_Z, "+": SIGMA_PLUS, "-": SIGMA_MINUS}


@dataclass(frozen=True)
class ProtocolParams:
    """Physical constants, all in units of the flip-flop coupling ``g``."""

    omega: float
    gtilde: float = 0.1
    gamma0: float = 1e-3
    alpha: float = 1e-3
    g: float = 1.0

    def __post_init__(self):
        if self.g != 1.0:
            raise ValueError("g is the unit of frequency and must equal 1")
        if not self.omega > 0 or not math.isfinite(self.omega):
            raise ValueError(f"omega must be positive and finite, got {self.omega}")
        if not 0 <= self.gtilde < self.g:
            raise ValueError(f"gtilde must satisfy 0 <= gtilde < g, got {self.gtilde}")
        if not self.gamma0 >= 0:
            raise ValueError(f"gamma0 must be >= 0, got {self.gamma0}")
        if not self.alpha >= 0:
            raise ValueError(f"alpha must be >= 0, got {self.alpha}")

    @property
    def detuning_ratio(self) -> float:
        """``omega / (g - gtilde)``."""
        return self.omega / (self.g - self.gtilde)

    @property
    def closed(self) -> ProtocolParams:
        """The same system with both baths switched off."""
        return replace(self, gamma0=0.0, alpha=0.0)

    def with_omega(self, omega: float) -> ProtocolParams:
        return replace(self, omega=omega)


class StageKind(enum.Enum):
    ROTATION_I = "rotation_I"
    COUPLING = "coupling"
    ROTATION_III = "rotation_III"


@dataclass(frozen=True)
class StageSpec:
    kind: StageKind
    duration: float
    beta: float | None = None


BETA_FIRST = math.pi * (1 / SQRT2 + 1)


def beta_third(p: ProtocolParams) -> float:
    return math.pi * (3 + SQRT2) / 2 + math.pi * (3 + SQRT3) * p.detuning_ratio / 8


def rotation_time(p: ProtocolParams) -> float:
    return math.pi / (SQRT2 * p.omega)


def interaction_time(p: ProtocolParams) -> float:
    return math.pi / (2 * (p.g - p.gtilde))


def total_time(p: ProtocolParams) -> float:
    return 2 * rotation_time(p) + interaction_time(p)


def stage_specs(p: ProtocolParams) -> tuple[StageSpec, StageSpec, StageSpec]:
    t_rot = rotation_time(p)
    return (
        StageSpec(StageKind.ROTATION_I, t_rot, BETA_FIRST),
        StageSpec(StageKind.COUPLING, interaction_time(p)),
        StageSpec(StageKind.ROTATION_III, t_rot, beta_third(p)),
    )


def pauli_op(qubit: int, axis: str) -> np.ndarray:
    """Single-qubit operator ``axis`` on ``qubit`` (1-based), identity elsewhere."""
    if qubit not in (1, 2, 3):
        raise ValueError(f"qubit index must be 1, 2 or 3, got {qubit}")
    try:
        single = _SINGLE[axis]
    except KeyError:
        raise ValueError(f"unknown axis {axis!r}; expected one of {sorted(_SINGLE)}") from None
    factors = [I2] * N_QUBITS
    factors[qubit - 1] = single
    return nk.kron_all(*factors)


def embed(single: np.ndarray, qubit: int) -> np.ndarray:
    factors = [I2] * N_QUBITS
    factors[qubit - 1] = np.asarray(single, dtype=complex)
    return nk.kron_all(*factors)


def collective_spin() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(S_x, S_y, S_z)`` with ``S = sum_j sigma^j / 2``."""
    return tuple(sum(pauli_op(j, a) for j in (1, 2, 3)) / 2 for a in "xyz")


def single_rotation_hamiltonian(omega: float, beta: float) -> np.ndarray:
    """One-qubit drive block ``(w/2) sigma_z + (w/2)(e^{i beta} sigma_- + h.c.)``."""
    drive = np.exp(1j * beta) * SIGMA_MINUS
    return 0.5 * omega * SIGMA_Z + 0.5 * omega * (drive + drive.conj().T)


def build_rotation_hamiltonian(p: ProtocolParams, beta: float) -> np.ndarray:
    h1 = single_rotation_hamiltonian(p.omega, beta)
    return sum(embed(h1, j) for j in (1, 2, 3))


def rotation_eigenstates(beta: float) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form dressed states ``(|psi_-eps>, |psi_+eps>)`` of the drive block."""
    up = math.sqrt(2 + SQRT2) / 2
    dn = math.sqrt(2 - SQRT2) / 2
    phase = np.exp(-1j * beta)
    psi_plus = np.array([dn, up * phase], dtype=complex)
    psi_minus = np.array([-up, dn * phase], dtype=complex)
    return psi_minus, psi_plus


class CouplingMode(str, enum.Enum):
    LITERAL = "literal"
    SPECTRAL = "spectral"


@dataclass(frozen=True)
class SymmetricBasis:
    """Joint eigenbasis ``|s12, s, m>`` of ``S12^2``, ``S^2`` and ``S_z``."""

    labels: tuple[str, ...]
    quantum_numbers: tuple[tuple[float, float, float], ...]
    matrix: np.ndarray = field(repr=False)  # columns are the basis vectors

    def __getitem__(self, label: str) -> np.ndarray:
        return self.matrix[:, self.labels.index(label)]

    def projector(self, labels) -> np.ndarray:
        cols = self.matrix[:, [self.labels.index(lab) for lab in labels]]
        return cols @ cols.conj().T

    def populations(self, rho: np.ndarray) -> np.ndarray:
        v = self.matrix
        return np.real(np.einsum("ia,ij,ja->a", v.conj(), rho, v))


def computational_ket(bits: str) -> np.ndarray:
    v = np.zeros(DIM, dtype=complex)
    v[int(bits, 2)] = 1.0
    return v


def symmetric_basis() -> SymmetricBasis:
    k = computational_ket
    vectors = {
        "000": k("000"),
        "111": k("111"),
        "W": (k("100") + k("010") + k("001")) / SQRT3,
        "W'": (k("011") + k("101") + k("110")) / SQRT3,
        "psi1": (k("100") - k("010")) / SQRT2,
        "psi1'": (k("011") - k("101")) / SQRT2,
        "psi2": (k("100") + k("010") - 2 * k("001")) / SQRT6,
        "psi2'": (k("011") + k("101") - 2 * k("110")) / SQRT6,
    }
    qn = {
        "000": (1, 1.5, -1.5),
        "111": (1, 1.5, 1.5),
        "W": (1, 1.5, -0.5),
        "W'": (1, 1.5, 0.5),
        "psi1": (0, 0.5, -0.5),
        "psi1'": (0, 0.5, 0.5),
        "psi2": (1, 0.5, -0.5),
        "psi2'": (1, 0.5, 0.5),
    }
    labels = tuple(vectors)
    return SymmetricBasis(
        labels=labels,
        quantum_numbers=tuple(tuple(float(x) for x in qn[lab]) for lab in labels),
        matrix=np.column_stack([vectors[lab] for lab in labels]),
    )


SUBSPACE_LABELS = ("000", "111", "W", "W'")


def coupling_energies(p: ProtocolParams) -> dict[str, float]:
    """Eigenvalues of the coupling Hamiltonian on the symmetric basis (spectral form)."""
    w, g, gt = p.omega, p.g, p.gtilde
    e_psi = -(g + gt / 2)
    return {
        "000": -1.5 * (w - gt),
        "111": 1.5 * (w + gt),
        "W": -0.5 * (SQRT3 * w - 4 * g + gt),
        "W'": 0.5 * (SQRT3 * w + 4 * g - gt),
        "psi1": e_psi,
        "psi1'": e_psi,
        "psi2": e_psi,
        "psi2'": e_psi,
    }


def build_coupling_hamiltonian(p: ProtocolParams, mode: CouplingMode | str = CouplingMode.SPECTRAL) -> np.ndarray:
    """Entangling-stage Hamiltonian.

    ``LITERAL`` sums the pairwise flip-flop and zz terms on a ring of three
    qubits plus ``(omega/2) sum sigma_z``.  ``SPECTRAL`` is assembled from the
    closed-form eigenvalues on the symmetric basis; the two differ on the
    ``m = +-1/2`` manifolds (``W``, ``W'`` and the ``psi`` doublets).
    """
    mode = CouplingMode(mode)
    if mode is CouplingMode.SPECTRAL:
        basis = symmetric_basis()
        energies = coupling_energies(p)
        diag = np.array([energies[lab] for lab in basis.labels])
        v = basis.matrix
        return (v * diag) @ v.conj().T
    h = np.zeros((DIM, DIM), dtype=complex)
    for i in (1, 2, 3):
        j = i % 3 + 1
        h += 0.5 * p.omega * pauli_op(i, "z")
        h += 0.5 * p.g * (pauli_op(i, "x") @ pauli_op(j, "x") + pauli_op(i, "y") @ pauli_op(j, "y"))
        h += 0.5 * p.gtilde * pauli_op(i, "z") @ pauli_op(j, "z")
    return h


def analytic_bohr_frequencies(p: ProtocolParams) -> dict[int, float]:
    """Closed-form entangling-stage Bohr frequencies, keyed 1..8."""
    w, g, gt = p.omega, p.g, p.gtilde
    return {
        1: (3 - SQRT3) / 2 * w + 2 * (g - gt),
        2: 1.5 * w - (g + 2 * gt),
        3: (3 - SQRT3) / 2 * w - 2 * (g - gt),
        4: 1.5 * w + (g + 2 * gt),
        5: SQRT3 * w,
        6: SQRT3 / 2 * w + 3 * g,
        7: SQRT3 / 2 * w - 3 * g,
        8: 0.0,
    }


def alpha_angle(p: ProtocolParams) -> float:
    return 3 * math.pi * (SQRT3 - 1) * p.detuning_ratio / 8


def theta_angle(p: ProtocolParams) -> float:
    return 3 * math.pi * SQRT2 / 2 + 3 * math.pi * (SQRT3 + 3) * p.detuning_ratio / 8


def ghz_condition_ratio(k: int) -> float:
    """``omega/(g - gtilde)`` at which the closed protocol ends in a GHZ state."""
    if int(k) != k or k < 1:
        raise ValueError(f"k must be a positive integer, got {k}")
    return 8 * k / (3 * (SQRT3 - 1))


def ghz_condition_omega(k: int, gtilde: float = 0.1, g: float = 1.0) -> float:
    return ghz_condition_ratio(k) * (g - gtilde)


def ghz_target(phi: float) -> np.ndarray:
    v = np.zeros(DIM, dtype=complex)
    v[0] = 1.0
    v[DIM - 1] = np.exp(1j * phi)
    return v / SQRT2


def nominal_phase(p: ProtocolParams) -> float:
    """Closed-form GHZ phase used for the fixed-phase fidelity."""
    return 1.5 * math.pi * (SQRT3 + (3 + SQRT3) / 4 * p.detuning_ratio)


@dataclass(frozen=True)
class AnalyticReference:
    stage1_state: np.ndarray
    stage2_state: np.ndarray
    final_state: np.ndarray
    alpha_angle: float
    theta_angle: float

    @property
    def amplitudes(self) -> tuple[complex, complex]:
        """``(A_000, A_111)`` of the final state."""
        return complex(self.final_state[0]), complex(self.final_state[DIM - 1])


def analytic_reference(p: ProtocolParams) -> AnalyticReference:
    basis = symmetric_basis()
    z, o, w_, wp = (basis[lab] for lab in SUBSPACE_LABELS)
    r = p.detuning_ratio
    pi = math.pi
    e = np.exp

    stage1 = (z + o * e(-3j * pi / SQRT2) + SQRT3 * w_ * e(-1j * pi / SQRT2) + SQRT3 * wp * e(-SQRT2 * 1j * pi)) / math.sqrt(8)
    stage2 = (
        z
        + o * e(-1.5j * pi * (r + SQRT2))
        - SQRT3 * w_ * e(1j * pi * ((SQRT3 - 3) * r / 4 - SQRT2 / 2))
        - SQRT3 * wp * e(-1j * pi * ((SQRT3 + 3) * r / 4 + SQRT2))
    ) / math.sqrt(8)
    a, th = alpha_angle(p), theta_angle(p)
    final = 0.5 * ((1j + e(1j * a)) * z + 1j * e(-1j * th) * (1j - e(1j * a)) * o)
    return AnalyticReference(stage1, stage2, final, a, th)
