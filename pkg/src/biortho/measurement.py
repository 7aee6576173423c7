"""Premeasurement engine: evolution, calibration, counterfactual apparatuses.

An apparatus is described by its interaction Hamiltonian, the interaction
time, the ready state of the pointer and the pointer observable. Its
unitary ``U = exp(-i H_int dt)`` fixes which system basis gets correlated
with the pointer; :func:`ambiguity_report` shows that among all the
biorthonormal decompositions of the final state exactly one is the one
produced by ``U``.
"""

import dataclasses
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import schmidt, tensor
from .errors import (
    DimensionMismatch,
    InvalidTarget,
    NotAPremeasurement,
    NotHermitian,
    NotNormalized,
    SelectionError,
)

CALIBRATION_TOL = 1e-10
PHYSICALITY_TOL = 1e-10
MATCH_TOL = 1e-8
MAX_RESEEDS = 5
EIGENVALUE_GAP = 1e-8


@dataclass(frozen=True, eq=False)
class MeasurementModel:
    """System + pointer apparatus. ``h_int`` acts on ``H_S (x) H_M``."""

    dim_s: int
    dim_m: int
    h_int: np.ndarray
    delta_t: float
    ready_state: np.ndarray
    pointer_observable: np.ndarray
    label: str = ""

    def __post_init__(self):
        n = self.dim_s * self.dim_m
        h = tensor.as_matrix(self.h_int, "hInt")
        z = tensor.as_matrix(self.pointer_observable, "pointerObservable")
        ready = tensor.as_vector(self.ready_state, "readyState")
        if self.dim_s < 1 or self.dim_m < 1:
            raise DimensionMismatch("dimensions must be positive")
        if h.shape != (n, n):
            raise DimensionMismatch(f"hInt has shape {h.shape}, expected {(n, n)}")
        if z.shape != (self.dim_m, self.dim_m):
            raise DimensionMismatch(
                f"pointerObservable has shape {z.shape}, expected {(self.dim_m, self.dim_m)}"
            )
        if ready.size != self.dim_m:
            raise DimensionMismatch(f"readyState has {ready.size} entries, expected {self.dim_m}")
        if not tensor.is_hermitian(h):
            raise NotHermitian("hInt is not Hermitian")
        if not tensor.is_hermitian(z):
            raise NotHermitian("pointerObservable is not Hermitian")
        if abs(np.linalg.norm(ready) - 1.0) > tensor.NORM_TOL:
            raise NotNormalized("readyState is not normalized")
        if not np.isfinite(self.delta_t):
            raise ValueError("deltaT must be finite")
        object.__setattr__(self, "h_int", tensor.frozen(h))
        object.__setattr__(self, "pointer_observable", tensor.frozen(z))
        object.__setattr__(self, "ready_state", tensor.frozen(ready))
        object.__setattr__(self, "delta_t", float(self.delta_t))

    @cached_property
    def unitary(self):
        return tensor.frozen(tensor.unitary_exp(self.h_int, -self.delta_t))

    def same_apparatus(self, other, tol=1e-12):
        """Equality of (hInt, deltaT, readyState): our working notion of "same apparatus"."""
        return (
            self.h_int.shape == other.h_int.shape
            and tensor.operator_distance(self.h_int, other.h_int) <= tol
            and abs(self.delta_t - other.delta_t) <= tol
            and float(np.linalg.norm(self.ready_state - other.ready_state)) <= tol
        )


@dataclass(frozen=True, eq=False)
class CalibrationTable:
    system_basis: np.ndarray
    pointer_states: np.ndarray
    pointer_values: np.ndarray
    residual: float
    sharp: tuple
    commutator_defect: float = 0.0
    attempts: int = 1


class Counterfactual(NamedTuple):
    model: MeasurementModel
    unitary: np.ndarray
    distance: float
    reachable_distance: float


@dataclass(frozen=True, eq=False)
class AmbiguityReport:
    final_state: schmidt.BipartiteState
    schmidt: schmidt.SchmidtDecomposition
    dynamical_decomposition: schmidt.SchmidtDecomposition
    calibration: CalibrationTable
    verdict: str
    alternatives: list
    selected_index: int
    match_scores: list
    pointer_physicality: list
    skipped: list = field(default_factory=list)

    @property
    def decompositions(self):
        """The dynamical decomposition followed by every generated alternative."""
        return [self.dynamical_decomposition, *self.alternatives]


def evolution_operator(model):
    return model.unitary


def _system_state(model, system_state):
    phi = tensor.as_vector(system_state, "system state")
    if phi.size != model.dim_s:
        raise DimensionMismatch(f"system state has {phi.size} entries, expected {model.dim_s}")
    if abs(np.linalg.norm(phi) - 1.0) > tensor.NORM_TOL:
        raise NotNormalized(f"system state norm is {np.linalg.norm(phi)!r}")
    return phi


def premeasure(model, system_state):
    """Return ``U (|phi> (x) |z_0>)`` as a :class:`BipartiteState`."""
    phi = _system_state(model, system_state)
    psi = model.unitary @ tensor.kron(phi, model.ready_state)
    return schmidt.BipartiteState(model.dim_s, model.dim_m, psi)


def conditional_operators(model):
    """Stack of ``K_m = (I (x) <m|) U (I (x) |z_0>)`` over the pointer's standard basis.

    Shape ``(dim_m, dim_s, dim_s)``.
    """
    ds, dm = model.dim_s, model.dim_m
    u4 = np.asarray(model.unitary).reshape(ds, dm, ds, dm)
    k = np.einsum("ambn,n->mab", u4, model.ready_state)
    return k


def _commutator_defect(ks):
    worst = 0.0
    for a in ks:
        worst = max(worst, float(np.linalg.norm(a @ tensor.adjoint(a) - tensor.adjoint(a) @ a)))
        for b in ks:
            worst = max(worst, float(np.linalg.norm(a @ b - b @ a)))
    return worst


def _canonical_order(vectors):
    def key(k):
        col = np.round(vectors[:, k], 9)
        return tuple(x for z in col for x in (-z.real, -z.imag))

    return sorted(range(vectors.shape[1]), key=key)


def pointer_deviation(model, states):
    """``||Z v - (v^dagger Z v) v||`` for each column ``v`` of ``states``."""
    v = np.asarray(states, dtype=np.complex128)
    if v.ndim == 1:
        v = v[:, None]
    if v.shape[0] != model.dim_m:
        raise DimensionMismatch(f"pointer states have dimension {v.shape[0]}, expected {model.dim_m}")
    norms = np.linalg.norm(v, axis=0)
    if np.any(np.abs(norms - 1.0) > 1e-10):
        raise NotNormalized("pointer states must be normalized columns")
    zv = model.pointer_observable @ v
    expect = np.einsum("ik,ik->k", v.conj(), zv).real
    return np.linalg.norm(zv - v * expect, axis=0)


def pointer_physicality_check(model, states, tol=PHYSICALITY_TOL):
    """True for each column that is an eigenvector of the pointer observable."""
    return pointer_deviation(model, states) <= tol


def pointer_values(model, states):
    v = np.asarray(states, dtype=np.complex128)
    return np.einsum("ik,ij,jk->k", v.conj(), model.pointer_observable, v).real


def extract_calibration_basis(model, tol=CALIBRATION_TOL, seed=0):
    """Recover the system basis ``{|a_i>}`` and pointer states ``{|z_i>}`` with
    ``U |a_i>|z_0> = |a_i>|z_i>``.

    The conditional operators ``K_m`` of an ideal premeasurement form a
    commuting family of normal matrices. A seeded random Hermitian
    combination of them is diagonalized; if its spectrum has collisions the
    generator is reseeded up to ``MAX_RESEEDS`` times.

    Raises
    ------
    NotAPremeasurement
        If the family does not commute or the calibration residual exceeds
        ``tol``.
    """
    ks = conditional_operators(model)
    defect = _commutator_defect(ks)
    if defect > tol:
        raise NotAPremeasurement(
            f"conditional operators do not form a commuting normal family (defect {defect:.3e})"
        )

    for attempt in range(MAX_RESEEDS + 1):
        rng = np.random.default_rng(seed + attempt)
        g = rng.standard_normal(model.dim_m) + 1j * rng.standard_normal(model.dim_m)
        comb = np.tensordot(g, ks, axes=1)
        w, basis = tensor.hermitian_eig(comb + tensor.adjoint(comb))
        spread = max(1.0, float(np.max(np.abs(w))))
        if model.dim_s == 1 or np.min(np.diff(w)) > EIGENVALUE_GAP * spread:
            break
    basis, _ = tensor.phase_fix(basis)
    basis = basis[:, _canonical_order(basis)]

    u = np.asarray(model.unitary)
    pointers = np.empty((model.dim_m, model.dim_s), dtype=np.complex128)
    residual = 0.0
    for i in range(model.dim_s):
        image = (u @ tensor.kron(basis[:, i], model.ready_state)).reshape(model.dim_s, model.dim_m)
        z = basis[:, i].conj() @ image
        pointers[:, i] = z
        residual = max(residual, float(np.linalg.norm(image - np.outer(basis[:, i], z))))
    if residual > tol:
        raise NotAPremeasurement(f"calibration residual {residual:.3e} exceeds {tol:g}")

    sharp = tuple(bool(x) for x in pointer_deviation(model, pointers) <= PHYSICALITY_TOL)
    return CalibrationTable(
        system_basis=tensor.frozen(basis),
        pointer_states=tensor.frozen(pointers),
        pointer_values=tensor.frozen(pointer_values(model, pointers)),
        residual=residual,
        sharp=sharp,
        commutator_defect=defect,
        attempts=attempt + 1,
    )


def householder_map(x, y):
    """Unitary sending unit vector ``x`` to unit vector ``y``.

    A reflection across ``x - y'`` with ``y' = e^{-i beta} y`` chosen so that
    ``<x|y'>`` is real, followed by the global phase ``e^{i beta}``. Equal to
    the identity when ``y = x``.
    """
    x = np.asarray(x, dtype=np.complex128)
    y = np.asarray(y, dtype=np.complex128)
    overlap = np.vdot(x, y)
    phase = overlap / abs(overlap) if abs(overlap) > 1e-15 else 1.0
    y_real = y / phase
    w = x - y_real
    ww = float(np.vdot(w, w).real)
    n = x.size
    if ww < 1e-30:
        return phase * np.eye(n, dtype=np.complex128)
    return phase * (np.eye(n, dtype=np.complex128) - 2.0 * np.outer(w, w.conj()) / ww)


def reachable_distance(u, v, ready_state, dim_s):
    """``||(U - V)(I (x) |z_0><z_0|)||_F``: distance on the states an apparatus can start from."""
    proj = tensor.kron(np.eye(dim_s), np.outer(ready_state, np.conj(ready_state)))
    return tensor.operator_distance(np.asarray(u) @ proj, np.asarray(v) @ proj)


def counterfactual_apparatus(model, target_system_basis, target_pointer_states, label=None):
    """Build the apparatus whose calibration is the given target table.

    ``U' = sum_i |a'_i><a'_i| (x) W_i`` with ``W_i`` the Householder map
    ``|z_0> -> |z'_i>``. The ready state and pointer observable are kept.
    """
    a = tensor.as_matrix(target_system_basis, "target system basis")
    z = tensor.as_matrix(target_pointer_states, "target pointer states")
    if a.shape != (model.dim_s, model.dim_s) or not tensor.is_unitary(a):
        raise InvalidTarget("target system basis must be a unitary dim_s x dim_s matrix")
    if z.shape != (model.dim_m, model.dim_s):
        raise InvalidTarget(f"target pointer states must have shape {(model.dim_m, model.dim_s)}")
    if np.any(np.abs(np.linalg.norm(z, axis=0) - 1.0) > 1e-10):
        raise InvalidTarget("target pointer states must be normalized")

    u_new = np.zeros((model.dim_s * model.dim_m,) * 2, dtype=np.complex128)
    for i in range(model.dim_s):
        proj = np.outer(a[:, i], a[:, i].conj())
        u_new += tensor.kron(proj, householder_map(model.ready_state, z[:, i]))

    h_new = tensor.hamiltonian_from_unitary(u_new, model.delta_t)
    new_model = dataclasses.replace(
        model, h_int=h_new, label=label or f"{model.label} counterfactual".strip()
    )
    u = model.unitary
    return Counterfactual(
        new_model,
        tensor.frozen(u_new),
        tensor.operator_distance(u, u_new),
        reachable_distance(u, u_new, model.ready_state, model.dim_s),
    )


def basis_match_score(vectors, reference):
    """``max_sigma sum_k |<v_k|r_sigma(k)>|^2``: overlap of two bases up to phase and order."""
    overlaps = np.abs(tensor.adjoint(np.asarray(vectors)) @ np.asarray(reference)) ** 2
    rows, cols = linear_sum_assignment(overlaps, maximize=True)
    return float(overlaps[rows, cols].sum())


def dynamical_decomposition(calibration, system_state, cutoff=schmidt.DEFAULT_CUTOFF,
                            rel_tol=schmidt.DEFAULT_REL_TOL):
    """The decomposition ``sum_i c_i |a_i>|z_i>`` that ``U`` itself produces.

    ``c_i = <a_i|phi>`` in the calibration basis; the phase of ``c_i`` is
    carried by ``|z_i>`` so coefficients are real positive.
    """
    a = np.asarray(calibration.system_basis)
    c = tensor.adjoint(a) @ np.asarray(system_state, dtype=np.complex128)
    mod = np.abs(c)
    order = [k for k in np.argsort(-mod, kind="stable") if mod[k] > cutoff]
    z = np.asarray(calibration.pointer_states)[:, order] * (c[order] / mod[order])
    gram = tensor.adjoint(z) @ z
    if np.linalg.norm(gram - np.eye(len(order))) > 1e-10:
        raise SelectionError(
            "pointer states of the populated calibration terms are not orthonormal; "
            "the correlation is not a biorthonormal decomposition"
        )
    return schmidt.SchmidtDecomposition(
        coefficients=mod[order],
        left_basis=a[:, order],
        right_basis=z,
        classes=tuple(schmidt.degeneracy_classes(mod[order], rel_tol)),
        cutoff=cutoff,
    )


def ambiguity_report(model, system_state, sample_changes=(), *,
                     cutoff=schmidt.DEFAULT_CUTOFF, rel_tol=schmidt.DEFAULT_REL_TOL,
                     tol=CALIBRATION_TOL, seed=0):
    """Premeasure, decompose, generate alternatives and find the one ``U`` selects.

    Changes acting on a singleton class, or monomial changes (pure
    relabelings), cannot produce a distinct decomposition and are listed in
    ``skipped`` instead.
    """
    calibration = extract_calibration_basis(model, tol=tol, seed=seed)
    final = premeasure(model, system_state)
    svd = schmidt.schmidt_decompose(final, cutoff=cutoff, rel_tol=rel_tol)
    dynamical = dynamical_decomposition(calibration, system_state, cutoff, rel_tol)
    if dynamical.reconstruction_error(final) > 1e-10:
        raise SelectionError("calibration expansion does not reproduce the final state")

    alternatives = []
    skipped = []
    for k, change in enumerate(sample_changes):
        if change.class_index >= len(dynamical.classes):
            skipped.append((k, "class index out of range"))
        elif len(dynamical.classes[change.class_index]) < 2:
            skipped.append((k, "class is not degenerate"))
        elif change.matrix.shape[0] != len(dynamical.classes[change.class_index]):
            skipped.append((k, "matrix size does not match class size"))
        elif tensor.is_monomial(change.matrix):
            skipped.append((k, "monomial change is a relabeling"))
        else:
            alternatives.append(schmidt.alternative_decomposition(dynamical, change))

    candidates = [dynamical, *alternatives]
    scores = [basis_match_score(d.left_basis, calibration.system_basis) for d in candidates]
    matched = [i for i, (d, s) in enumerate(zip(candidates, scores)) if s > d.rank - MATCH_TOL]
    if len(matched) != 1:
        raise SelectionError(f"{len(matched)} decompositions match the calibration basis")
    physical = [bool(np.all(pointer_physicality_check(model, d.right_basis))) for d in candidates]
    return AmbiguityReport(
        final_state=final,
        schmidt=svd,
        dynamical_decomposition=dynamical,
        calibration=calibration,
        verdict=svd.verdict,
        alternatives=alternatives,
        selected_index=matched[0],
        match_scores=scores,
        pointer_physicality=physical,
        skipped=skipped,
    )
