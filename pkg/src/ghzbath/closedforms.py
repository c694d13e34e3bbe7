"""Hand-derived jump operators for the three stages, used as test fixtures.

The generic builder in :mod:`ghzbath.mebuilder` is authoritative.  The
closed forms here are transcriptions kept for cross-checking it, and
:func:`validation_report` lists how far apart the two are, channel by
channel, measured on the dissipator superoperator (which is blind to the
overall phase of a jump operator).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import mebuilder as me
from . import model
from . import numkernel as nk
from .model import SQRT2, SQRT3, SQRT6, ProtocolParams

#: Tolerance under which stage-1 and stage-2 closed forms count as matching.
MATCH_TOL = 1e-9


def _outer(a, b):
    return np.outer(a, np.conj(b))


def stage1_single_qubit_channels(p: ProtocolParams) -> list[me.DissipationChannel]:
    """Emission (``sqrt2*omega``) and dephasing (0) channels of one qubit under the first drive."""
    minus, plus = model.rotation_eigenstates(model.BETA_FIRST)
    c = math.cos(math.pi / SQRT2)
    s = math.sin(math.pi / SQRT2)
    sd = me.SpectralDensity(p.gamma0, p.alpha)
    a1 = (c / SQRT2 - 1j * s) * _outer(minus, plus)
    a2 = c / SQRT2 * (_outer(minus, minus) - _outer(plus, plus))
    w1 = SQRT2 * p.omega
    return [
        me.DissipationChannel(1, w1, a1, sd.rate(w1), "w1"),
        me.DissipationChannel(1, 0.0, a2, sd.rate(0.0), "w2"),
    ]


def stage1_channels(p: ProtocolParams) -> list[me.DissipationChannel]:
    """Single-qubit closed forms embedded on qubit ``j`` for each bath ``j``."""
    out = []
    for j in (1, 2, 3):
        for ch in stage1_single_qubit_channels(p):
            out.append(me.DissipationChannel(j, ch.bohr, model.embed(ch.jump, j), ch.rate, ch.label))
    return out


# Transitions (lower level, upper level) behind each closed-form entangling-stage operator.
_ENTANGLING_TRANSITIONS = {
    "w1": ("000", "W"),
    "w2": ("000", "psi1"),
    "w3": ("W'", "111"),
    "w4": ("psi1'", "111"),
    "w5": ("W", "W'"),
    "w6": ("W", "psi1'"),
    "w7": ("psi1", "W'"),
    "w8": ("psi1", "psi1"),
}


def entangling_closed_operators(j: int, corrected: bool = True) -> dict[str, np.ndarray]:
    """Closed-form entangling-stage jump operators for bath ``j``.

    With ``corrected=True`` the ``psi1`` term of ``A_j(w7)`` for ``j = 1, 2``
    carries the factor ``(-1)^j`` (as the mirror-image ``A_j(w6)`` does);
    ``corrected=False`` uses ``-1`` for both baths, which contradicts the
    matrix element ``<psi1|sigma_x^2|W'> = +1/sqrt6``.
    """
    b = model.symmetric_basis()
    z, o, w, wp = b["000"], b["111"], b["W"], b["W'"]
    p1, p1p, p2, p2p = b["psi1"], b["psi1'"], b["psi2"], b["psi2'"]
    o_ = _outer
    if j in (1, 2):
        sg = (-1) ** (j + 1)
        w7_sign = (-1) ** j if corrected else -1
        return {
            "w1": o_(z, w) / SQRT3,
            "w2": sg / SQRT2 * o_(z, p1) + o_(z, p2) / SQRT6,
            "w3": o_(wp, o) / SQRT3,
            "w4": sg / SQRT2 * o_(p1p, o) + o_(p2p, o) / SQRT6,
            "w5": 2 / 3 * o_(w, wp),
            "w6": (-1) ** j / SQRT6 * o_(w, p1p) - o_(w, p2p) / (3 * SQRT2),
            "w7": w7_sign / SQRT6 * o_(p1, wp) - o_(p2, wp) / (3 * SQRT2),
            "w8": sg / SQRT3 * (o_(p1, p2p) + o_(p1p, p2) + o_(p2, p1p) + o_(p2p, p1))
            - 2 / 3 * (o_(p2, p2p) + o_(p2p, p2)),
        }
    if j == 3:
        return {
            "w1": o_(z, w) / SQRT3,
            "w2": -math.sqrt(2 / 3) * o_(z, p2),
            "w3": o_(wp, o) / SQRT3,
            "w4": -math.sqrt(2 / 3) * o_(p2p, o),
            "w5": 2 / 3 * o_(w, wp),
            "w6": SQRT2 / 3 * o_(w, p2p),
            "w7": SQRT2 / 3 * o_(p2, wp),
            "w8": -(o_(p1, p1p) + o_(p1p, p1)) + (o_(p2, p2p) + o_(p2p, p2)) / 3,
        }
    raise ValueError(f"bath index must be 1, 2 or 3, got {j}")


def entangling_closed_channels(p: ProtocolParams, corrected: bool = True) -> list[me.DissipationChannel]:
    """All 24 closed-form entangling-stage channels (8 frequencies x 3 baths).

    ``bohr`` is the signed gap of the transition each operator describes,
    taken from the closed-form eigenvalues.  For small ``omega`` some gaps
    turn negative (the listed direction is then absorption).
    """
    energies = model.coupling_energies(p)
    sd = me.SpectralDensity(p.gamma0, p.alpha)
    out = []
    for j in (1, 2, 3):
        for label, a in entangling_closed_operators(j, corrected).items():
            lo, hi = _ENTANGLING_TRANSITIONS[label]
            bohr = energies[hi] - energies[lo]
            rate = sd.rate(bohr) if bohr >= 0 else 0.0
            out.append(me.DissipationChannel(j, bohr, a, rate, label))
    return out


def transform_t_symmetric(p: ProtocolParams) -> np.ndarray:
    """Block form of the dressing unitary ``T`` in the symmetric basis."""
    beta = model.beta_third(p)

    def e(n):
        return np.exp(-1j * n * beta)

    r6 = SQRT6
    b1 = np.array(
        [
            [-(2 + SQRT2), -(4 - 3 * SQRT2), r6, -SQRT3 * (2 - SQRT2)],
            [-(4 - 3 * SQRT2) * e(3), (2 + SQRT2) * e(3), SQRT3 * (2 - SQRT2) * e(3), r6 * e(3)],
            [r6 * e(1), SQRT3 * (2 - SQRT2) * e(1), (3 * SQRT2 - 2) * e(1), -(4 - SQRT2) * e(1)],
            [-SQRT3 * (2 - SQRT2) * e(2), r6 * e(2), -(4 - SQRT2) * e(2), -(3 * SQRT2 - 2) * e(2)],
        ]
    )
    b2 = np.array([[4 * e(1), 4 * (SQRT2 - 1) * e(1)], [4 * (SQRT2 - 1) * e(2), -4 * e(2)]])
    t = np.zeros((8, 8), dtype=complex)
    t[:4, :4] = b1
    t[4:6, 4:6] = b2
    t[6:, 6:] = b2
    return math.sqrt(2 + SQRT2) / 8 * t


def transform_t(p: ProtocolParams) -> np.ndarray:
    """``T`` as an operator on the computational basis."""
    v = model.symmetric_basis().matrix
    return v @ transform_t_symmetric(p) @ v.conj().T


def dressing_unitary(beta: float) -> np.ndarray:
    """``t (x) t (x) t`` with ``t|0> = |psi_-eps>``, ``t|1> = |psi_+eps>``."""
    minus, plus = model.rotation_eigenstates(beta)
    t = np.column_stack([minus, plus])
    return nk.kron_all(t, t, t)


def dressed_closed_operators(p: ProtocolParams, j: int) -> dict[str, np.ndarray]:
    """Closed-form third-stage operators, expressed in the computational basis.

    Only the matrix elements listed below are included; they are
    given in the dressed ("tilde") basis and mapped back through ``T``.
    """
    beta = model.beta_third(p)
    cb, sb = math.cos(beta), math.sin(beta)
    u = model.symmetric_basis().matrix @ transform_t_symmetric(p)  # columns: dressed kets
    labels = model.symmetric_basis().labels
    k = {lab: u[:, i] for i, lab in enumerate(labels)}
    o_ = _outer
    cp = cb + 1j * SQRT2 * sb
    cm = cb - 1j * SQRT2 * sb
    if j in (1, 2):
        a1 = -1 / (2 * SQRT3) * (
            cp * (SQRT2 * o_(k["W"], k["000"]) + SQRT3 * o_(k["psi1"], k["000"]) + o_(k["psi2"], k["000"]))
            + cm * (SQRT2 * o_(k["W'"], k["111"]) + SQRT3 * o_(k["psi1'"], k["111"]) + o_(k["psi2'"], k["111"]))
        )
        diag = {"000": 3, "111": -3, "W": 1, "W'": -1, "psi2": 2, "psi2'": -2}
    elif j == 3:
        a1 = -1 / SQRT6 * (
            cp * (o_(k["W"], k["000"]) - SQRT2 * o_(k["psi2"], k["000"]))
            + cm * (o_(k["W'"], k["111"]) - SQRT2 * o_(k["psi2'"], k["111"]))
        )
        diag = {"000": 3, "111": -3, "W": 1, "W'": -1, "psi1": 3, "psi1'": -3, "psi2": 2, "psi2'": -2}
    else:
        raise ValueError(f"bath index must be 1, 2 or 3, got {j}")
    a2 = -cb / (3 * SQRT2) * sum(c * o_(k[lab], k[lab]) for lab, c in diag.items())
    return {"w1": a1, "w2": a2}


def dressed_closed_channels(p: ProtocolParams) -> list[me.DissipationChannel]:
    sd = me.SpectralDensity(p.gamma0, p.alpha)
    w1 = SQRT2 * p.omega
    out = []
    for j in (1, 2, 3):
        ops = dressed_closed_operators(p, j)
        out.append(me.DissipationChannel(j, w1, ops["w1"], sd.rate(w1), "w1"))
        out.append(me.DissipationChannel(j, 0.0, ops["w2"], sd.rate(0.0), "w2"))
    return out


@dataclass(frozen=True)
class ValidationRow:
    stage: int
    bath: int
    channel: str
    bohr: float
    distance: float
    status: str


def _closest_generic(generic: list[tuple[float, np.ndarray]], bohr: float, tol: float):
    for w, a in generic:
        if abs(w - bohr) <= tol:
            return a
    return None


def _compare(stage, closed, generic_by_bath, tol, enforce) -> list[ValidationRow]:
    rows = []
    for ch in closed:
        if ch.bohr < -tol:
            rows.append(ValidationRow(stage, ch.bath, ch.label, ch.bohr, float("nan"), "absorption-skipped"))
            continue
        gen = _closest_generic(generic_by_bath[ch.bath], max(ch.bohr, 0.0), tol)
        if gen is None:
            rows.append(ValidationRow(stage, ch.bath, ch.label, ch.bohr, float("nan"), "missing"))
            continue
        d = nk.frobenius_distance(me.dissipator_superop(gen), me.dissipator_superop(ch.jump))
        if enforce:
            status = "ok" if d <= MATCH_TOL else "MISMATCH"
        else:
            status = "report"
        rows.append(ValidationRow(stage, ch.bath, ch.label, ch.bohr, d, status))
    return rows


def validation_report(p: ProtocolParams, corrected: bool = True) -> tuple[list[ValidationRow], float]:
    """Per-channel generic-vs-closed-form distances for all stages, and ``||T^dag T - I||``."""
    rows: list[ValidationRow] = []
    sx = [model.pauli_op(j, "x") for j in (1, 2, 3)]

    h1 = model.build_rotation_hamiltonian(p, model.BETA_FIRST)
    gen1 = {j: me.jump_operators(h1, sx[j - 1]) for j in (1, 2, 3)}
    tol1 = me.secular_tolerance(np.linalg.eigvalsh(h1))
    rows += _compare(1, stage1_channels(p), gen1, max(tol1, 1e-9), enforce=True)

    h2 = model.build_coupling_hamiltonian(p, model.CouplingMode.SPECTRAL)
    gen2 = {j: me.jump_operators(h2, sx[j - 1]) for j in (1, 2, 3)}
    tol2 = me.secular_tolerance(np.linalg.eigvalsh(h2))
    rows += _compare(2, entangling_closed_channels(p, corrected), gen2, max(tol2, 1e-9), enforce=True)

    h3 = model.build_rotation_hamiltonian(p, model.beta_third(p))
    gen3 = {j: me.jump_operators(h3, sx[j - 1]) for j in (1, 2, 3)}
    tol3 = me.secular_tolerance(np.linalg.eigvalsh(h3))
    rows += _compare(3, dressed_closed_channels(p), gen3, max(tol3, 1e-9), enforce=False)

    t = transform_t_symmetric(p)
    unitarity = nk.frobenius_distance(t.conj().T @ t, np.eye(8))
    return rows, unitarity


def report_passes(rows: list[ValidationRow]) -> bool:
    """True when every enforced (stage 1 and 2) row is within :data:`MATCH_TOL`."""
    return all(r.status in ("ok", "absorption-skipped", "report") for r in rows)
