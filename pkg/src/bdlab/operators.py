"""Dense complex operator algebra on finite spin and truncated boson spaces."""

import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np
import numpy.typing as npt

from .errors import CapacityError, NumericError, ShapeError

logger = logging.getLogger("bdlab")

ComplexMatrix = npt.NDArray[np.complex128]

MAX_HILBERT_DIMENSION = 8192
HERMITICITY_TOLERANCE = 1e-12


class Axis(str, Enum):
    """Cartesian component of a spin operator."""

    X = "x"
    Y = "y"
    Z = "z"


def _frozen(matrix: npt.ArrayLike) -> ComplexMatrix:
    array = np.array(matrix, dtype=np.complex128)
    array.setflags(write=False)
    return array


SIGMA_X = _frozen([[0, 1], [1, 0]])
SIGMA_Y = _frozen([[0, -1j], [1j, 0]])
SIGMA_Z = _frozen([[1, 0], [0, -1]])
SIGMA_PLUS = _frozen([[0, 1], [0, 0]])  # raises sigma_z
SIGMA_MINUS = _frozen([[0, 0], [1, 0]])

PAULI = {Axis.X: SIGMA_X, Axis.Y: SIGMA_Y, Axis.Z: SIGMA_Z}


def as_matrix(a: npt.ArrayLike) -> ComplexMatrix:
    """Coerce to a square complex array, rejecting anything else."""
    matrix = np.asarray(a, dtype=np.complex128)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ShapeError(f"Expected a square matrix, got shape {matrix.shape}")
    return matrix


def check_capacity(dim: int, what: str = "operator") -> None:
    if dim > MAX_HILBERT_DIMENSION:
        raise CapacityError(
            f"{what} dimension {dim} exceeds maximum Hilbert dimension "
            f"{MAX_HILBERT_DIMENSION}"
        )


def adjoint(a: npt.ArrayLike) -> ComplexMatrix:
    return as_matrix(a).conj().T


def kron(a: npt.ArrayLike, b: npt.ArrayLike) -> ComplexMatrix:
    """Kronecker product with entry ((i*db + k), (j*db + l)) = a[i, j] * b[k, l]."""
    a, b = as_matrix(a), as_matrix(b)
    check_capacity(a.shape[0] * b.shape[0], "Kronecker product")
    return np.kron(a, b)


def commutator(a: npt.ArrayLike, b: npt.ArrayLike) -> ComplexMatrix:
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape:
        raise ShapeError(f"Cannot commute {a.shape} with {b.shape}")
    return a @ b - b @ a


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """Read-only Hermitian matrix together with its measured Hermiticity defect.

    Construct through :meth:`from_matrix`; matrices whose defect exceeds
    ``HERMITICITY_TOLERANCE`` times their largest entry are rejected, never
    symmetrized.
    """

    matrix: ComplexMatrix
    hermiticity_defect: float

    @classmethod
    def from_matrix(cls, matrix: npt.ArrayLike) -> "HermitianOperator":
        m = as_matrix(matrix)
        check_capacity(m.shape[0])
        m = _frozen(m)
        defect = float(np.max(np.abs(m - m.conj().T)))
        scale = float(np.max(np.abs(m)))
        if defect > HERMITICITY_TOLERANCE * scale:
            raise NumericError(
                f"Matrix is not Hermitian: defect {defect:.3e} at scale {scale:.3e}",
                residual=defect,
            )
        return cls(matrix=m, hermiticity_defect=defect)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __add__(self, other: "HermitianOperator") -> "HermitianOperator":
        if other.dim != self.dim:
            raise ShapeError(f"Cannot add dimension {self.dim} to {other.dim}")
        return HermitianOperator.from_matrix(self.matrix + other.matrix)

    def __sub__(self, other: "HermitianOperator") -> "HermitianOperator":
        return self + other.scale(-1.0)

    def scale(self, factor: float) -> "HermitianOperator":
        return HermitianOperator.from_matrix(float(factor) * self.matrix)

    def kron(self, other: "HermitianOperator") -> "HermitianOperator":
        return HermitianOperator.from_matrix(kron(self.matrix, other.matrix))


def identity(dim: int) -> ComplexMatrix:
    return np.eye(dim, dtype=np.complex128)


def site_sum(n_spins: int, single: npt.ArrayLike) -> ComplexMatrix:
    """Sum of ``single`` acting on each of ``n_spins`` qubits of the product space."""
    if n_spins < 1:
        raise ValueError(f"n_spins must be >= 1, got {n_spins}")
    check_capacity(2**n_spins, f"{n_spins}-spin product space")
    single = as_matrix(single)
    total = single.copy()
    for n in range(1, n_spins):
        total = kron(total, identity(2)) + kron(identity(2**n), single)
    return total


def collective_spin(n_spins: int, axis: Axis | str) -> HermitianOperator:
    """J^axis = (1/N) sum_i sigma_i^axis on the 2^N dimensional product space."""
    pauli = PAULI[Axis(axis)]
    return HermitianOperator.from_matrix(site_sum(n_spins, pauli) / n_spins)


def spin_matrices(spin: float) -> dict[Axis, ComplexMatrix]:
    """Spin-S matrices in the basis m = S, S-1, ..., -S."""
    size = int(round(2 * spin)) + 1
    if size < 1 or abs((size - 1) / 2 - spin) > 1e-12:
        raise ValueError(f"spin must be a non-negative half-integer, got {spin}")
    m = spin - np.arange(size)
    raising = np.diag(np.sqrt((2 * spin - np.arange(size - 1)) * np.arange(1, size)), 1)
    lowering = raising.T
    return {
        Axis.X: 0.5 * (raising + lowering).astype(np.complex128),
        Axis.Y: (-0.5j * (raising - lowering)).astype(np.complex128),
        Axis.Z: np.diag(m).astype(np.complex128),
    }


def spin_raising(spin: float) -> ComplexMatrix:
    s = spin_matrices(spin)
    return s[Axis.X] + 1j * s[Axis.Y]


def boson_ladder(cutoff: int) -> ComplexMatrix:
    """Annihilation operator on the Fock space truncated to ``cutoff`` levels.

    ``[b^dagger, b]`` equals ``-I`` except for the last diagonal entry, which is
    ``cutoff - 1``; callers keep track of that boundary.
    """
    if cutoff < 2:
        raise ValueError(f"Fock cutoff must be >= 2, got {cutoff}")
    check_capacity(cutoff, "Fock space")
    return np.diag(np.sqrt(np.arange(1, cutoff, dtype=float)), 1).astype(np.complex128)
