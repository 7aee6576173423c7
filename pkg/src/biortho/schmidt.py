"""Biorthonormal (Schmidt) decompositions and their degenerate-spectrum freedom.

A bipartite pure state ``psi = sum_ij C_ij |i>|j>`` is decomposed as
``sum_k c_k |a_k>|z_k>`` with real positive ``c_k`` and orthonormal
``{|a_k>}``, ``{|z_k>}``. When several ``c_k`` coincide, any unitary mixing
of that degeneracy class gives another, equally valid, decomposition.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import tensor
from .errors import DimensionMismatch, NotDegenerate, NotNormalized

DEFAULT_CUTOFF = 1e-12
DEFAULT_REL_TOL = 1e-9

UNIQUE = "UNIQUE"
AMBIGUOUS = "AMBIGUOUS"


@dataclass(frozen=True, eq=False)
class BipartiteState:
    """Normalized pure state on ``H_S (x) H_M``, system-major ordering."""

    dim_s: int
    dim_m: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = tensor.as_vector(self.amplitudes, "amplitudes")
        if self.dim_s < 1 or self.dim_m < 1 or amps.size != self.dim_s * self.dim_m:
            raise DimensionMismatch(
                f"{amps.size} amplitudes do not fit dimensions {self.dim_s} x {self.dim_m}"
            )
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > tensor.NORM_TOL:
            raise NotNormalized(f"state norm is {norm!r}, expected 1 within {tensor.NORM_TOL:g}")
        object.__setattr__(self, "amplitudes", tensor.frozen(amps))

    @classmethod
    def product(cls, system, pointer):
        system = tensor.as_vector(system, "system state")
        pointer = tensor.as_vector(pointer, "pointer state")
        return cls(system.size, pointer.size, tensor.kron(system, pointer))

    def coefficient_matrix(self):
        return self.amplitudes.reshape(self.dim_s, self.dim_m)


@dataclass(frozen=True, eq=False)
class SchmidtDecomposition:
    coefficients: np.ndarray
    left_basis: np.ndarray
    right_basis: np.ndarray
    classes: tuple
    cutoff: float = DEFAULT_CUTOFF

    def __post_init__(self):
        for name in ("coefficients", "left_basis", "right_basis"):
            object.__setattr__(self, name, tensor.frozen(np.array(getattr(self, name))))

    @property
    def rank(self):
        return len(self.coefficients)

    @property
    def verdict(self):
        return classes_verdict(self.classes)

    def amplitudes(self):
        """Reconstruct ``sum_k c_k |a_k> (x) |z_k>`` as a flat amplitude vector."""
        c = self.left_basis * self.coefficients
        return (c @ self.right_basis.T).reshape(-1)

    def reconstruction_error(self, state):
        return float(np.linalg.norm(self.amplitudes() - state.amplitudes))


class BasisChange:
    """Unitary ``M`` acting on one degeneracy class of a decomposition."""

    def __init__(self, matrix, class_index=0):
        self.matrix = tensor.frozen(tensor.require_unitary(matrix, "basis change M"))
        self.class_index = int(class_index)

    def __repr__(self):
        return f"BasisChange(class_index={self.class_index}, size={self.matrix.shape[0]})"


class UniquenessResult(NamedTuple):
    holds: bool
    residual: float
    moduli: np.ndarray | None


def degeneracy_classes(coefficients, rel_tol=DEFAULT_REL_TOL):
    """Group descending coefficients into chained classes of (near-)equal values.

    Neighbours ``c_k``, ``c_{k+1}`` share a class when
    ``|c_k - c_{k+1}| <= rel_tol * max(c_k, c_{k+1})``; chaining makes the
    relation transitive.
    """
    coefficients = np.asarray(coefficients, dtype=float)
    classes = []
    current = []
    for k, c in enumerate(coefficients):
        if current:
            prev = coefficients[current[-1]]
            if abs(prev - c) > rel_tol * max(prev, c):
                classes.append(tuple(current))
                current = []
        current.append(k)
    if current:
        classes.append(tuple(current))
    return classes


def classes_verdict(classes):
    return AMBIGUOUS if any(len(c) >= 2 for c in classes) else UNIQUE


def schmidt_decompose(state, cutoff=DEFAULT_CUTOFF, rel_tol=DEFAULT_REL_TOL):
    """Schmidt decomposition through the eigendecomposition of ``C^dagger C``.

    Singular values are recomputed as ``||C v_k||`` rather than square roots
    of eigenvalues, which keeps them accurate down to the cutoff. Each left
    vector is phase-fixed so its leading entry is real positive; the phase
    is moved onto the matching right vector.
    """
    if not isinstance(state, BipartiteState):
        raise TypeError("state must be a BipartiteState")
    c = np.asarray(state.coefficient_matrix())
    w2, v = tensor.hermitian_eig(tensor.adjoint(c) @ c)
    v = v[:, np.argsort(-w2, kind="stable")]
    w = c @ v
    sigma = np.linalg.norm(w, axis=0)
    order = np.argsort(-sigma, kind="stable")
    keep = [k for k in order if sigma[k] > cutoff]
    sigma = sigma[keep]
    left = w[:, keep] / sigma
    right = np.conj(v[:, keep])
    left, phases = tensor.phase_fix(left)
    right = right * phases
    return SchmidtDecomposition(
        coefficients=sigma,
        left_basis=left,
        right_basis=right,
        classes=tuple(degeneracy_classes(sigma, rel_tol)),
        cutoff=cutoff,
    )


def alternative_decomposition(sd, change):
    """Re-expand ``sd`` after the basis change ``|a_i> = sum_j M_ji |a'_j>``.

    Inside the chosen class the primed bases are ``A' = A M^dagger`` and
    ``c'_j |z'_j> = sum_i c_i M_ji |z_i>``; all other terms are untouched.
    Column ``j`` of the class keeps following ``M``'s row ``j``, so the
    class coefficients are descending only up to rounding.
    """
    try:
        idx = list(sd.classes[change.class_index])
    except IndexError:
        raise DimensionMismatch(
            f"class index {change.class_index} out of range ({len(sd.classes)} classes)"
        ) from None
    if len(idx) < 2:
        raise NotDegenerate(f"class {change.class_index} has a single coefficient")
    m = np.asarray(change.matrix)
    if m.shape[0] != len(idx):
        raise DimensionMismatch(f"M is {m.shape[0]}x{m.shape[0]} but the class has size {len(idx)}")

    left = np.array(sd.left_basis)
    right = np.array(sd.right_basis)
    coeffs = np.array(sd.coefficients)

    left[:, idx] = left[:, idx] @ tensor.adjoint(m)
    weighted = right[:, idx] @ (m * coeffs[idx]).T
    new_c = np.linalg.norm(weighted, axis=0)
    right[:, idx] = weighted / new_c
    coeffs[idx] = new_c
    return SchmidtDecomposition(
        coefficients=coeffs,
        left_basis=left,
        right_basis=right,
        classes=sd.classes,
        cutoff=sd.cutoff,
    )


def uniqueness_condition(coefficients, m, tol=1e-10):
    """Test whether ``M diag(|c|^2) M^dagger`` is diagonal.

    A basis change ``M`` yields a new biorthonormal decomposition exactly
    when this matrix is diagonal; its diagonal then holds ``|c'_j|^2``.
    ``residual`` is the largest off-diagonal modulus.
    """
    c = np.abs(np.asarray(coefficients, dtype=np.complex128))
    m = tensor.require_unitary(m, "M")
    if m.shape[0] != c.size:
        raise DimensionMismatch(f"M is {m.shape[0]}x{m.shape[0]} but there are {c.size} coefficients")
    d = (m * c**2) @ tensor.adjoint(m)
    off = d - np.diag(np.diag(d))
    residual = float(np.max(np.abs(off))) if c.size > 1 else 0.0
    holds = residual <= tol
    moduli = np.sqrt(np.clip(np.diag(d).real, 0.0, None)) if holds else None
    return UniquenessResult(holds, residual, moduli)
