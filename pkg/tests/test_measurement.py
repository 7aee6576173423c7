import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from biortho import measurement as me
from biortho import models, tensor
from biortho.errors import (
    DimensionMismatch,
    InvalidTarget,
    NotAPremeasurement,
    NotHermitian,
    NotNormalized,
)
from biortho.schmidt import AMBIGUOUS, UNIQUE, BasisChange

S = math.sqrt(0.5)
HADAMARD = np.array([[S, S], [S, -S]])
PAULI_Z = np.diag([0.5, -0.5])

seeds = st.integers(min_value=0, max_value=2**32 - 1)


@pytest.fixture(scope="module")
def bbb():
    return models.bit_by_bit_model()


@pytest.fixture(scope="module")
def sg():
    return models.stern_gerlach_model(5, 1)


def explicit_model(u, dim_s, dim_m, ready=None, label="explicit"):
    ready = np.eye(dim_m)[0] if ready is None else ready
    return me.MeasurementModel(
        dim_s, dim_m, tensor.hamiltonian_from_unitary(u), 1.0, ready, np.diag(np.arange(dim_m, dtype=float)), label
    )


def random_premeasurement(dim_s, dim_m, rng):
    """Ideal premeasurement sum_i |a_i><a_i| (x) W_i with random basis and couplings."""
    a = tensor.random_unitary(dim_s, rng)
    ws = [tensor.random_unitary(dim_m, rng) for _ in range(dim_s)]
    u = sum(tensor.kron(np.outer(a[:, i], a[:, i].conj()), ws[i]) for i in range(dim_s))
    return u, a, ws


def align(found, expected):
    """Max |<e_k|f_k>| deficit after the best matching, i.e. equality up to phase and order."""
    return expected.shape[1] - me.basis_match_score(found, expected)


# ------------------------------------------------------------------ model

def test_model_validation():
    with pytest.raises(DimensionMismatch):
        me.MeasurementModel(2, 2, np.zeros((3, 3)), 1.0, [1, 0], PAULI_Z)
    with pytest.raises(NotHermitian):
        me.MeasurementModel(2, 2, np.triu(np.ones((4, 4))), 1.0, [1, 0], PAULI_Z)
    with pytest.raises(NotNormalized):
        me.MeasurementModel(2, 2, np.zeros((4, 4)), 1.0, [1, 1], PAULI_Z)
    with pytest.raises(DimensionMismatch):
        me.MeasurementModel(2, 2, np.zeros((4, 4)), 1.0, [1, 0, 0], PAULI_Z)


def test_evolution_of_zero_coupling_is_identity():
    m = me.MeasurementModel(3, 2, np.zeros((6, 6)), 2.5, [0, 1], PAULI_Z)
    assert np.array_equal(me.evolution_operator(m), np.eye(6))


def test_same_apparatus(bbb):
    assert bbb.same_apparatus(models.bit_by_bit_model())
    assert not bbb.same_apparatus(dataclasses.replace(bbb, delta_t=2.0))
    assert not bbb.same_apparatus(dataclasses.replace(bbb, ready_state=np.array([0, 1])))


# ------------------------------------------------------------------ premeasure

def test_premeasure_x_input(bbb):
    out = me.premeasure(bbb, [S, S])
    assert np.max(np.abs(out.amplitudes - [S, 0, 0, S])) < 1e-12


def test_premeasure_validates_input(bbb):
    with pytest.raises(DimensionMismatch):
        me.premeasure(bbb, [1, 0, 0])
    with pytest.raises(NotNormalized):
        me.premeasure(bbb, [1, 1])


@settings(max_examples=40, deadline=None)
@given(seed=seeds, dims=st.tuples(st.integers(1, 4), st.integers(1, 4)))
def test_premeasure_preserves_norm(seed, dims):
    rng = np.random.default_rng(seed)
    u, _, _ = random_premeasurement(*dims, rng)
    m = explicit_model(u, *dims)
    phi = rng.standard_normal(dims[0]) + 1j * rng.standard_normal(dims[0])
    out = me.premeasure(m, phi / np.linalg.norm(phi))
    assert abs(np.linalg.norm(out.amplitudes) - 1) < 1e-12


@settings(max_examples=30, deadline=None)
@given(seed=seeds)
def test_premeasure_is_linear(seed):
    rng = np.random.default_rng(seed)
    m = models.stern_gerlach_model(5, 1)
    alpha = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    alpha /= np.linalg.norm(alpha)
    lhs = me.premeasure(m, alpha).amplitudes
    rhs = sum(alpha[k] * me.premeasure(m, np.eye(2)[k]).amplitudes for k in range(2))
    assert np.max(np.abs(lhs - rhs)) < 1e-12


# ------------------------------------------------------------------ calibration

def test_calibration_consistency_with_premeasure(sg):
    cal = me.extract_calibration_basis(sg)
    for i in range(2):
        out = me.premeasure(sg, cal.system_basis[:, i]).amplitudes
        assert np.linalg.norm(out - np.kron(cal.system_basis[:, i], cal.pointer_states[:, i])) < 1e-10


def test_swap_is_not_a_premeasurement():
    swap = np.eye(4)[[0, 2, 1, 3]]
    with pytest.raises(NotAPremeasurement):
        me.extract_calibration_basis(explicit_model(swap, 2, 2))


def _conditional_ops_by_hand(u, dim_s, dim_m, ready):
    # K_m[a, b] = sum_j U[(a, m), (b, j)] ready[j], written with explicit indices
    ks = np.zeros((dim_m, dim_s, dim_s), dtype=complex)
    for m in range(dim_m):
        for a in range(dim_s):
            for b in range(dim_s):
                for j in range(dim_m):
                    ks[m, a, b] += u[a * dim_m + m, b * dim_m + j] * ready[j]
    return ks


def test_random_noncommuting_unitary_rejected():
    rng = np.random.default_rng(7)
    for _ in range(50):
        u = tensor.random_unitary(4, rng)
        ks = _conditional_ops_by_hand(u, 2, 2, [1, 0])
        if np.linalg.norm(ks[0] @ ks[1] - ks[1] @ ks[0]) > 0.1:
            break
    else:
        pytest.fail("search found no non-commuting example")
    assert np.allclose(me.conditional_operators(explicit_model(u, 2, 2)), ks, atol=1e-10)
    with pytest.raises(NotAPremeasurement):
        me.extract_calibration_basis(explicit_model(u, 2, 2))


@settings(max_examples=30, deadline=None)
@given(seed=seeds, dim_s=st.integers(1, 4), dim_m=st.integers(1, 4))
def test_calibration_recovers_random_premeasurement(seed, dim_s, dim_m):
    rng = np.random.default_rng(seed)
    u, a, ws = random_premeasurement(dim_s, dim_m, rng)
    m = explicit_model(u, dim_s, dim_m)
    cal = me.extract_calibration_basis(m)
    assert cal.residual < 1e-10
    assert align(cal.system_basis, a) < 1e-8
    for i in range(dim_s):
        j = int(np.argmax(np.abs(a.conj().T @ cal.system_basis[:, i])))
        assert abs(abs(np.vdot(ws[j][:, 0], cal.pointer_states[:, i])) - 1) < 1e-8


def test_calibration_reseeds_on_collision(bbb, monkeypatch):
    monkeypatch.setattr(me, "EIGENVALUE_GAP", 1e6)
    cal = me.extract_calibration_basis(bbb)
    assert cal.attempts == me.MAX_RESEEDS + 1
    assert cal.residual < 1e-10


def test_calibration_is_deterministic(sg):
    a = me.extract_calibration_basis(sg, seed=3)
    b = me.extract_calibration_basis(sg, seed=3)
    assert np.array_equal(a.system_basis, b.system_basis)
    assert np.array_equal(a.pointer_states, b.pointer_states)


# ------------------------------------------------------------------ pointer physicality

def test_pointer_physicality_bit_by_bit(bbb):
    assert list(me.pointer_physicality_check(bbb, np.eye(2))) == [True, True]
    assert list(me.pointer_physicality_check(bbb, HADAMARD)) == [False, False]


def test_pointer_physicality_follows_observable(bbb):
    spin = models.spin_half()
    sx_model = dataclasses.replace(bbb, pointer_observable=spin.sx)
    assert list(me.pointer_physicality_check(sx_model, HADAMARD)) == [True, True]
    assert list(me.pointer_physicality_check(sx_model, np.eye(2))) == [False, False]


def test_pointer_deviation_values(sg):
    p_plus, p_minus = models.lattice_state(5, 1), models.lattice_state(5, -1)
    dev = me.pointer_deviation(sg, np.column_stack([p_plus, S * (p_plus + p_minus)]))
    assert dev[0] < 1e-12
    assert dev[1] == pytest.approx(1.0, abs=1e-12)


def test_pointer_check_dimension(bbb):
    with pytest.raises(DimensionMismatch):
        me.pointer_physicality_check(bbb, np.eye(3))


# ------------------------------------------------------------------ counterfactual

def test_householder_map(rng):
    for _ in range(5):
        x = tensor.random_unitary(4, rng)[:, 0]
        y = tensor.random_unitary(4, rng)[:, 0]
        w = me.householder_map(x, y)
        assert tensor.is_unitary(w)
        assert np.linalg.norm(w @ x - y) < 1e-12
    assert np.allclose(me.householder_map(x, x), np.eye(4))


def test_counterfactual_bit_by_bit_x_targets(bbb):
    cf = me.counterfactual_apparatus(bbb, HADAMARD, HADAMARD)
    assert cf.distance > 0.5
    assert cf.reachable_distance > 0.5
    assert not bbb.same_apparatus(cf.model)
    cal = me.extract_calibration_basis(cf.model)
    assert cal.residual < 1e-10
    assert align(cal.system_basis, HADAMARD) < 1e-10
    assert align(cal.pointer_states, HADAMARD) < 1e-10


def test_counterfactual_own_table_is_same_unitary(bbb, sg):
    for m in (bbb, sg):
        cal = me.extract_calibration_basis(m)
        cf = me.counterfactual_apparatus(m, cal.system_basis, cal.pointer_states)
        assert cf.reachable_distance < 1e-10


def test_counterfactual_stern_gerlach(sg):
    p_plus, p_minus = models.lattice_state(5, 1), models.lattice_state(5, -1)
    z = np.column_stack([S * (p_plus + p_minus), S * (p_plus - p_minus)])
    cf = me.counterfactual_apparatus(sg, HADAMARD, z)
    assert cf.distance > 0.5
    cal = me.extract_calibration_basis(cf.model)
    assert align(cal.system_basis, HADAMARD) < 1e-10
    assert list(cal.sharp) == [False, False]


def test_counterfactual_rejects_bad_targets(bbb):
    with pytest.raises(InvalidTarget):
        me.counterfactual_apparatus(bbb, [[1, 1], [0, 1]], np.eye(2))
    with pytest.raises(InvalidTarget):
        me.counterfactual_apparatus(bbb, np.eye(2), np.ones((2, 2)))
    with pytest.raises(InvalidTarget):
        me.counterfactual_apparatus(bbb, np.eye(2), np.eye(3)[:, :2])


@settings(max_examples=30, deadline=None)
@given(seed=seeds)
def test_counterfactual_distinct_for_nonmonomial_targets(seed):
    rng = np.random.default_rng(seed)
    m = models.bit_by_bit_model()
    a = tensor.random_unitary(2, rng)
    if tensor.monomial_distance(a) < 1e-3:
        return
    cf = me.counterfactual_apparatus(m, a, tensor.random_unitary(2, rng))
    assert cf.distance > 1e-6


def test_x_apparatus_with_x_ready_state_gives_x_correlation():
    # U' = exp(i pi |(x)><(x)| (x) |down><down|) with the pointer ready in |->>
    spin = models.spin_half()
    p = tensor.kron(np.outer(spin.minus_x, spin.minus_x), np.outer(spin.minus_z, spin.minus_z))
    u_prime = tensor.unitary_exp(p, np.pi)
    m = explicit_model(u_prime, 2, 2, ready=spin.plus_x)
    out = me.premeasure(m, spin.plus_z).amplitudes
    expected = S * (np.kron(spin.plus_x, spin.plus_x) + np.kron(spin.minus_x, spin.minus_x))
    assert np.max(np.abs(out - expected)) < 1e-12
    cal = me.extract_calibration_basis(m)
    assert align(cal.system_basis, HADAMARD) < 1e-10
    assert align(cal.pointer_states, HADAMARD) < 1e-10


# ------------------------------------------------------------------ ambiguity

def test_ambiguity_bit_by_bit(bbb):
    rep = me.ambiguity_report(bbb, [S, S], [BasisChange(HADAMARD, 0)])
    assert rep.verdict == AMBIGUOUS
    assert rep.selected_index == 0
    assert rep.match_scores[0] == pytest.approx(2.0)
    assert rep.match_scores[1] == pytest.approx(1.0)
    assert rep.pointer_physicality == [True, False]
    assert align(rep.alternatives[0].left_basis, HADAMARD) < 1e-10
    for d in rep.decompositions:
        assert d.reconstruction_error(rep.final_state) < 1e-12


def test_ambiguity_unique_case(bbb):
    phi = [math.sqrt(1 / 3), math.sqrt(2 / 3)]
    rep = me.ambiguity_report(bbb, phi, [BasisChange(HADAMARD, 0)])
    assert rep.verdict == UNIQUE
    assert rep.selected_index == 0
    assert rep.alternatives == []
    assert rep.skipped == [(0, "class is not degenerate")]


def test_ambiguity_skips_relabeling(sg):
    rep = me.ambiguity_report(sg, [S, S], [BasisChange([[0, 1], [1, 0]], 0), BasisChange(HADAMARD, 3)])
    assert [k for k, _ in rep.skipped] == [0, 1]
    assert len(rep.decompositions) == 1


@settings(max_examples=25, deadline=None)
@given(seed=seeds)
def test_dynamics_selects_exactly_one(seed):
    rng = np.random.default_rng(seed)
    m = models.bit_by_bit_model() if seed % 2 else models.stern_gerlach_model(5, 1)
    phases = np.exp(2j * np.pi * rng.random(2))
    changes = [BasisChange(tensor.random_unitary(2, rng), 0) for _ in range(3)]
    rep = me.ambiguity_report(m, S * phases, changes)
    assert rep.selected_index == 0
    assert sum(s > 2 - me.MATCH_TOL for s in rep.match_scores) == 1
