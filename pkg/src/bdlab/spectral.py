"""Eigendecomposition of a Hamiltonian and the thermal primitives built on it."""

import logging
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import numpy.typing as npt
import scipy.linalg
from scipy.special import logsumexp

from .errors import NumericError, ShapeError
from .operators import ComplexMatrix, HermitianOperator, as_matrix

logger = logging.getLogger("bdlab")

EIGEN_RESIDUAL_TOLERANCE = 1e-10
RealVector = npt.NDArray[np.float64]


def check_beta(beta: float) -> float:
    beta = float(beta)
    if not math.isfinite(beta) or beta <= 0:
        raise ValueError(f"beta must be finite and positive, got {beta}")
    return beta


@dataclass(frozen=True, eq=False)
class EigenbasisObservable:
    """Matrix elements A_mn = <m|A|n> in the energy eigenbasis."""

    elements: ComplexMatrix


@dataclass(frozen=True, eq=False)
class SpectralSystem:
    """Spectrum, eigenbasis and Gibbs weights of one Hamiltonian at one beta.

    ``weights`` sum to one and are computed with the ground energy subtracted
    first; ``log_partition`` carries that shift back, so
    ``log_partition == -beta * energies[0] + log(sum exp(-beta * (E - E_0)))``.
    """

    energies: RealVector
    eigenbasis: ComplexMatrix
    beta: float
    weights: RealVector
    log_partition: float

    @property
    def dim(self) -> int:
        return self.energies.shape[0]

    def check_operand(self, a: npt.ArrayLike) -> ComplexMatrix:
        matrix = as_matrix(a)
        if matrix.shape[0] != self.dim:
            raise ShapeError(
                f"Operand of dimension {matrix.shape[0]} does not match "
                f"system dimension {self.dim}"
            )
        return matrix

    @cached_property
    def energy_gaps(self) -> RealVector:
        """|E_m - E_n| for every pair."""
        return np.abs(np.subtract.outer(self.energies, self.energies))

    @cached_property
    def degenerate_pairs(self) -> npt.NDArray[np.bool_]:
        """Pairs treated as coincident by the Duhamel kernel."""
        magnitude = np.abs(self.energies)
        scale = np.maximum(1.0, np.maximum.outer(magnitude, magnitude))
        return self.energy_gaps <= 1e-8 * scale

    @cached_property
    def leading_weights(self) -> RealVector:
        """max(w_m, w_n): the weight of the lower level of each pair."""
        return np.maximum.outer(self.weights, self.weights)


def decompose(h: HermitianOperator, beta: float) -> SpectralSystem:
    beta = check_beta(beta)
    try:
        energies, eigenbasis = scipy.linalg.eigh(h.matrix)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise NumericError(f"Eigensolver failed: {e}", residual=math.inf) from e

    residual = float(np.max(np.abs(h.matrix @ eigenbasis - eigenbasis * energies)))
    tolerance = EIGEN_RESIDUAL_TOLERANCE * max(1.0, float(np.max(np.abs(energies))))
    if residual > tolerance:
        raise NumericError(
            f"Eigensolver residual {residual:.3e} exceeds {tolerance:.3e}",
            residual=residual,
        )

    exponents = -beta * (energies - energies[0])
    log_norm = float(logsumexp(exponents))
    weights = np.exp(exponents - log_norm)
    logger.debug(
        f"Decomposed dimension {h.dim} at beta={beta}: "
        f"E0={energies[0]:.6g}, residual={residual:.2e}"
    )
    return SpectralSystem(
        energies=energies,
        eigenbasis=eigenbasis,
        beta=beta,
        weights=weights,
        log_partition=-beta * float(energies[0]) + log_norm,
    )


def to_eigenbasis(sys: SpectralSystem, a: npt.ArrayLike) -> EigenbasisObservable:
    matrix = sys.check_operand(a)
    u = sys.eigenbasis
    return EigenbasisObservable(elements=u.conj().T @ matrix @ u)


def gibbs_average(sys: SpectralSystem, a: npt.ArrayLike) -> complex:
    """Sum_n w_n <n|A|n>."""
    matrix = sys.check_operand(a)
    u = sys.eigenbasis
    diagonal = np.sum(u.conj() * (matrix @ u), axis=0)
    return complex(np.dot(sys.weights, diagonal))


def free_energy_density(sys: SpectralSystem, size: float) -> float:
    if size <= 0:
        raise ValueError(f"size must be positive, got {size}")
    return -sys.log_partition / (sys.beta * size)
