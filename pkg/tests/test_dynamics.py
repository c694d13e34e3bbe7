import csv

import numpy as np
import pytest

from ghzbath import mebuilder as me
from ghzbath import model
from ghzbath import numkernel as nk
from ghzbath.dynamics import (
    EXPM,
    RK4,
    DensityMatrix,
    EvolutionMethod,
    InvariantViolation,
    Method,
    devectorize,
    propagate,
    trajectory,
    vectorize,
    write_trajectory_csv,
)
from ghzbath.model import ProtocolParams
from ghzbath.protocol import initial_state, stage_liouvillian

from conftest import random_density


def test_vectorize_round_trip(rng):
    rho = random_density(rng, 8)
    back = devectorize(vectorize(rho), time=1.5)
    assert np.array_equal(back.data, rho) and back.time == 1.5


def test_vectorize_column_stacking():
    rho = np.zeros((8, 8), dtype=complex)
    rho[2, 5] = 1
    v = vectorize(rho)
    assert v[5 * 8 + 2] == 1 and np.count_nonzero(v) == 1
    eye = vectorize(np.eye(8))
    assert list(np.flatnonzero(eye)) == [k * 9 for k in range(8)]


def test_devectorize_rejects_non_square():
    with pytest.raises(ValueError):
        devectorize(np.zeros(10))


def test_propagate_zero_time_and_dim_checks():
    p = ProtocolParams(omega=2.0)
    L = stage_liouvillian(p, model.stage_specs(p)[0])
    rho = initial_state()
    assert np.array_equal(propagate(rho, L, 0.0).data, rho.data)
    with pytest.raises(ValueError):
        propagate(rho, L, -1.0)
    with pytest.raises(ValueError):
        propagate(DensityMatrix(np.eye(2) / 2), L, 1.0)


def test_rk4_step_fraction_bounds():
    with pytest.raises(ValueError):
        EvolutionMethod(Method.RK4, 0.0)
    with pytest.raises(ValueError):
        EvolutionMethod(Method.RK4, 0.5)
    assert EvolutionMethod("rk4").selector is Method.RK4


@pytest.mark.parametrize("omega", [0.5, 3.0, 12.0])
def test_closed_stage1_matches_analytic_state(omega):
    p = ProtocolParams(omega).closed
    stage = model.stage_specs(p)[0]
    out = propagate(initial_state(), stage_liouvillian(p, stage), stage.duration)
    psi = model.analytic_reference(p).stage1_state
    assert np.real(np.vdot(psi, out.data @ psi)) >= 1 - 1e-8


@pytest.mark.parametrize("omega", [2.0, 9.5])
def test_expm_and_rk4_agree_on_entangling_stage(omega):
    p = ProtocolParams(omega, gamma0=1e-3, alpha=1e-3)
    s1, s2, _ = model.stage_specs(p)
    rho = propagate(initial_state(), stage_liouvillian(p, s1), s1.duration)
    L = stage_liouvillian(p, s2)
    a = propagate(rho, L, s2.duration, EXPM)
    b = propagate(rho, L, s2.duration, RK4)
    assert nk.frobenius_distance(a.data, b.data) <= 1e-6


def test_semigroup_property(rng):
    p = ProtocolParams(4.0, gamma0=1e-2, alpha=1e-2)
    L = stage_liouvillian(p, model.stage_specs(p)[1])
    rho = DensityMatrix(random_density(rng, 8))
    whole = propagate(rho, L, 1.3)
    split = propagate(propagate(rho, L, 0.5), L, 0.8)
    assert nk.frobenius_distance(whole.data, split.data) <= 1e-12
    assert split.time == pytest.approx(1.3)


def test_invariants_hold_along_flow():
    p = ProtocolParams(7.0, gamma0=1e-2, alpha=1e-2)
    rho = initial_state()
    for stage in model.stage_specs(p):
        L = stage_liouvillian(p, stage)
        for s in trajectory(rho, L, stage.duration, 25):
            assert s.trace_error <= 1e-9
            assert s.hermiticity_error <= 1e-10
            assert s.min_eigenvalue >= -1e-8
        rho = propagate(rho, L, stage.duration)


def test_trajectory_endpoints_and_methods():
    p = ProtocolParams(3.0)
    stage = model.stage_specs(p)[1]
    L = stage_liouvillian(p, stage)
    rho = initial_state()
    traj = trajectory(rho, L, stage.duration, 21)
    assert len(traj) == 21
    assert traj[0].time == 0 and traj[-1].time == pytest.approx(stage.duration)
    end = propagate(rho, L, stage.duration)
    assert nk.frobenius_distance(traj[-1].data, end.data) <= 1e-10
    traj_rk = trajectory(rho, L, stage.duration, 21, RK4)
    assert nk.frobenius_distance(traj_rk[-1].data, end.data) <= 1e-6
    with pytest.raises(ValueError):
        trajectory(rho, L, 1.0, 1)


def test_non_physical_generator_raises():
    # pure gain on |0><0|: trace grows
    mat = np.zeros((4, 4), dtype=complex)
    mat[0, 0] = 1.0
    L = me.Liouvillian(mat, 2)
    rho = DensityMatrix(np.diag([1.0, 0.0]).astype(complex))
    with pytest.raises(InvariantViolation) as info:
        propagate(rho, L, 1.0)
    assert info.value.trace_err > 1


def test_density_matrix_properties():
    rho = DensityMatrix(np.eye(4, dtype=complex) / 4)
    assert rho.purity == pytest.approx(0.25)
    assert rho.min_eigenvalue == pytest.approx(0.25)
    assert rho.check() is rho


def test_trajectory_csv(tmp_path):
    p = ProtocolParams(3.0)
    stage = model.stage_specs(p)[1]
    traj = trajectory(initial_state(), stage_liouvillian(p, stage), stage.duration, 20)
    path = tmp_path / "traj.csv"
    write_trajectory_csv(path, traj, model.symmetric_basis())
    rows = list(csv.reader(path.open()))
    assert rows[0][:3] == ["t", "purity", "pop_000"]
    assert len(rows) == 21
    for r in rows[1:]:
        assert sum(float(x) for x in r[2:]) == pytest.approx(1.0, abs=1e-9)
