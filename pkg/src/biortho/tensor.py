"""Dense complex linear algebra used by every other module.

Matrices are ``numpy.ndarray`` of dtype ``complex128``; state vectors are
1-D arrays. Bipartite spaces are always ordered system-first, so the
Kronecker index of ``(i_S, i_M)`` is ``i_S * dim_M + i_M``.
"""

import numpy as np

from . import _backend
from .errors import (
    NoConvergence,
    NonFinite,
    NotHermitian,
    NotUnitary,
    ShapeMismatch,
)

HERMITIAN_TOL = 1e-10
UNITARY_TOL = 1e-10
NORM_TOL = 1e-12
MAX_SWEEPS = 100
OFF_DIAGONAL_RTOL = 1e-14


def as_matrix(a, name="matrix"):
    """Return ``a`` as a finite 2-D complex128 array (copying)."""
    m = np.array(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] == 0 or m.shape[1] == 0:
        raise ShapeMismatch(f"{name} must be a non-empty 2-D array, got shape {m.shape}")
    check_finite(m, name)
    return m


def as_vector(v, name="vector"):
    x = np.array(v, dtype=np.complex128)
    if x.ndim != 1 or x.size == 0:
        raise ShapeMismatch(f"{name} must be a non-empty 1-D array, got shape {x.shape}")
    check_finite(x, name)
    return x


def check_finite(a, name="array"):
    if not np.all(np.isfinite(a)):
        raise NonFinite(f"{name} contains NaN or Inf entries")


def frozen(a):
    """Read-only view; value types in this package never mutate their arrays."""
    a = np.asarray(a)
    a.setflags(write=False)
    return a


def adjoint(a):
    return np.conj(np.transpose(a))


def kron(a, b):
    """Kronecker product with row index ``i_a * rows_b + i_b``.

    Vectors are accepted and treated as columns, so ``kron(u, v)`` of two
    kets is again a ket.
    """
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.ndim == 1 and b.ndim == 1:
        return (a[:, None] * b[None, :]).reshape(-1)
    a2 = a.reshape(-1, 1) if a.ndim == 1 else a
    b2 = b.reshape(-1, 1) if b.ndim == 1 else b
    ra, ca = a2.shape
    rb, cb = b2.shape
    return (a2[:, None, :, None] * b2[None, :, None, :]).reshape(ra * rb, ca * cb)


def hermiticity_defect(h):
    """Return ``||H - H^dagger||_F``."""
    return float(np.linalg.norm(h - adjoint(h)))


def is_hermitian(h, tol=HERMITIAN_TOL):
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        return False
    return hermiticity_defect(h) <= tol * max(1.0, float(np.linalg.norm(h)))


def unitarity_defect(u):
    u = np.asarray(u)
    return float(np.linalg.norm(adjoint(u) @ u - np.eye(u.shape[1])))


def is_unitary(u, tol=UNITARY_TOL):
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return unitarity_defect(u) <= tol


def require_unitary(u, name="matrix", tol=UNITARY_TOL):
    u = as_matrix(u, name)
    if u.shape[0] != u.shape[1]:
        raise NotUnitary(f"{name} is not square: shape {u.shape}")
    defect = unitarity_defect(u)
    if defect > tol:
        raise NotUnitary(f"{name} is not unitary: ||M^dagger M - I||_F = {defect:.3e}")
    return u


def hermitian_eig(h, tol=HERMITIAN_TOL):
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Parameters
    ----------
    h : array_like
        Square complex matrix, Hermitian up to ``tol * ||h||_F``.
    tol : float
        Relative Hermiticity tolerance.

    Returns
    -------
    eigenvalues : ndarray of float, ascending
    eigenvectors : ndarray, unitary, columns ordered like ``eigenvalues``

    Raises
    ------
    NotHermitian
        If ``h`` is not square or not Hermitian within tolerance.
    NoConvergence
        If the sweep cap is exceeded.
    """
    a = as_matrix(h, "H")
    n = a.shape[0]
    if a.shape[1] != n:
        raise NotHermitian(f"H must be square, got shape {a.shape}")
    scale = float(np.linalg.norm(a))
    if hermiticity_defect(a) > tol * scale:
        raise NotHermitian(
            f"||H - H^dagger||_F = {hermiticity_defect(a):.3e} exceeds {tol:g} * ||H||_F"
        )
    v = np.eye(n, dtype=np.complex128)
    if scale == 0.0:
        return np.zeros(n), v
    a = np.ascontiguousarray(0.5 * (a + adjoint(a)))
    sweeps = _backend.kernel.jacobi_sweeps(a, v, OFF_DIAGONAL_RTOL * scale, MAX_SWEEPS)
    if sweeps < 0:
        raise NoConvergence(f"Jacobi did not converge within {MAX_SWEEPS} sweeps")
    w = a.diagonal().real
    order = np.argsort(w, kind="stable")
    return w[order].copy(), v[:, order].copy()


def unitary_exp(h, theta):
    """Return ``exp(i * theta * H)`` through the spectral decomposition of H."""
    w, v = hermitian_eig(h)
    return (v * np.exp(1j * theta * w)) @ adjoint(v)


def operator_distance(a, b):
    """Frobenius distance ``||A - B||_F``."""
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.shape != b.shape:
        raise ShapeMismatch(f"cannot compare shapes {a.shape} and {b.shape}")
    return float(np.linalg.norm(a - b))


# Distinct eigenphases collide in a combination only when mirror-symmetric
# about atan(b / a); trying several directions rules that out.
_NORMAL_WEIGHTS = ((1.0, 0.6180339887498949), (0.3090169943749474, 1.0), (1.0, -0.4142135623730950))


def diagonalize_normal(m, tol=1e-9):
    """Eigenvalues and unitary eigenvectors of a normal matrix ``m``.

    The Hermitian and anti-Hermitian parts of a normal matrix commute, so a
    generic real combination of them shares its eigenvectors with ``m``.
    """
    m = as_matrix(m)
    herm = 0.5 * (m + adjoint(m))
    anti = -0.5j * (m - adjoint(m))
    scale = max(1.0, float(np.linalg.norm(m)))
    for a, b in _NORMAL_WEIGHTS:
        _, v = hermitian_eig(a * herm + b * anti)
        d = adjoint(v) @ m @ v
        if np.linalg.norm(d - np.diag(np.diag(d))) <= tol * scale:
            return np.diag(d).copy(), v
    raise NoConvergence("could not diagonalize the matrix; is it normal?")


def hamiltonian_from_unitary(u, delta_t=1.0):
    """Hermitian H with ``exp(-i * H * delta_t) = U``, eigenphases in (-pi, pi].

    Principal spectral logarithm: ``H = -V diag(arg lambda) V^dagger / delta_t``.
    """
    u = require_unitary(u, "U")
    lam, v = diagonalize_normal(u)
    phases = np.angle(lam)
    h = -(v * phases) @ adjoint(v) / delta_t
    return 0.5 * (h + adjoint(h))


def lead_index(x, tol=1e-9):
    """Index of the first entry whose modulus is within ``tol`` of the maximum.

    Tolerant tie-breaking keeps phase conventions stable under rounding.
    """
    mod = np.abs(x)
    return int(np.flatnonzero(mod >= mod.max() - tol)[0])


def phase_fix(vectors):
    """Rotate each column so its leading entry is real and positive.

    Returns the rotated columns and the unit phases that were divided out.
    """
    vectors = np.array(vectors, dtype=np.complex128)
    phases = np.ones(vectors.shape[1], dtype=np.complex128)
    for k in range(vectors.shape[1]):
        i = lead_index(vectors[:, k])
        lead = vectors[i, k]
        if lead != 0:
            phases[k] = lead / abs(lead)
            vectors[:, k] /= phases[k]
            vectors[i, k] = abs(lead)
    return vectors, phases


def random_unitary(n, rng):
    """Haar-random unitary from the QR decomposition of a Ginibre matrix."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_hermitian(n, rng, scale=1.0):
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return scale * 0.5 * (z + adjoint(z))


def monomial_distance(m):
    """Weight of ``m`` lying outside its best permutation pattern.

    ``n - max_sigma sum_i |m_{i, sigma(i)}|^2``; zero exactly for monomial
    (permutation times diagonal phase) unitaries.
    """
    from scipy.optimize import linear_sum_assignment

    w = np.abs(np.asarray(m)) ** 2
    rows, cols = linear_sum_assignment(w, maximize=True)
    return float(w.shape[0] - w[rows, cols].sum())


def is_monomial(m, tol=1e-10):
    return monomial_distance(m) <= tol
