"""Spin-1/2 toolbox and the two worked apparatuses.

``bit_by_bit_model`` couples a spin-1/2 particle to a two-level atom;
``stern_gerlach_model`` couples it to a momentum pointer idealized as a
cyclic lattice of ``N`` sites, on which the interaction is a controlled
shift by ``+k`` / ``-k`` sites.
"""

from dataclasses import dataclass

import numpy as np

from . import tensor
from .errors import InvalidLattice
from .measurement import MeasurementModel

SQRT1_2 = np.sqrt(0.5)


@dataclass(frozen=True, eq=False)
class SpinHalf:
    sx: np.ndarray
    sy: np.ndarray
    sz: np.ndarray
    plus_z: np.ndarray
    minus_z: np.ndarray
    plus_x: np.ndarray
    minus_x: np.ndarray


def spin_half():
    """Spin operators (hbar = 1) and the z and x eigenkets.

    ``plus_x`` and ``minus_x`` are ``(|+> +- |->)/sqrt(2)``; for the atom
    pointer the same kets play the role of ``|->`` and ``|<-``.
    """
    sx = 0.5 * np.array([[0, 1], [1, 0]], dtype=np.complex128)
    sy = 0.5 * np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
    sz = 0.5 * np.array([[1, 0], [0, -1]], dtype=np.complex128)
    up = np.array([1, 0], dtype=np.complex128)
    down = np.array([0, 1], dtype=np.complex128)
    return SpinHalf(
        sx=tensor.frozen(sx),
        sy=tensor.frozen(sy),
        sz=tensor.frozen(sz),
        plus_z=tensor.frozen(up),
        minus_z=tensor.frozen(down),
        plus_x=tensor.frozen(SQRT1_2 * (up + down)),
        minus_x=tensor.frozen(SQRT1_2 * (up - down)),
    )


def bit_by_bit_model():
    """Particle spin measured by a two-level atom.

    ``H_int = -pi |-><-| (x) |<-><<-|`` for ``dt = 1``, ready state ``|up>``,
    pointer observable the atom's ``S_z``.
    """
    s = spin_half()
    proj = tensor.kron(np.outer(s.minus_z, s.minus_z.conj()), np.outer(s.minus_x, s.minus_x.conj()))
    return MeasurementModel(
        dim_s=2,
        dim_m=2,
        h_int=-np.pi * proj,
        delta_t=1.0,
        ready_state=s.plus_z,
        pointer_observable=s.sz,
        label="bit_by_bit",
    )


def lattice_labels(n):
    """Momentum labels ``-(n-1)/2 .. (n-1)/2`` of the lattice sites, in index order."""
    half = (n - 1) // 2
    return np.arange(-half, half + 1)


def lattice_state(n, label):
    """Basis ket ``|p_label>`` of the cyclic momentum lattice."""
    half = (n - 1) // 2
    if not -half <= label <= half:
        raise InvalidLattice(f"label {label} outside lattice of {n} sites")
    e = np.zeros(n, dtype=np.complex128)
    e[label + half] = 1.0
    return e


def cyclic_shift(n, k=1):
    """``T^k`` with ``T |p_m> = |p_{m+1}>`` (indices mod n)."""
    return np.roll(np.eye(n, dtype=np.complex128), k, axis=0)


def stern_gerlach_unitary(n, k):
    s = spin_half()
    return tensor.kron(np.outer(s.plus_z, s.plus_z), cyclic_shift(n, k)) + tensor.kron(
        np.outer(s.minus_z, s.minus_z), cyclic_shift(n, -k)
    )


def stern_gerlach_model(lattice_size=5, shift=1):
    """Stern-Gerlach apparatus on a cyclic momentum lattice.

    The interaction ``U = |+><+| (x) T^k + |-><-| (x) T^-k`` deflects the
    ``S_z = +1/2`` component by ``k`` sites up and ``-1/2`` by ``k`` down.
    ``h_int`` is the principal logarithm of ``U``, so ``exp(-i h_int) = U``.
    """
    n, k = lattice_size, shift
    if isinstance(n, bool) or int(n) != n or isinstance(k, bool) or int(k) != k:
        raise InvalidLattice("lattice size and shift must be integers")
    n, k = int(n), int(k)
    if n < 3 or n % 2 == 0:
        raise InvalidLattice(f"lattice size must be odd and >= 3, got {n}")
    if not 0 < 2 * k < n:
        raise InvalidLattice(f"shift must satisfy 0 < k < N/2, got k={k}, N={n}")
    return MeasurementModel(
        dim_s=2,
        dim_m=n,
        h_int=tensor.hamiltonian_from_unitary(stern_gerlach_unitary(n, k)),
        delta_t=1.0,
        ready_state=lattice_state(n, 0),
        pointer_observable=np.diag(lattice_labels(n)).astype(np.complex128),
        label=f"stern_gerlach(N={n}, k={k})",
    )
