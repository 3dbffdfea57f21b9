"""Bogoliubov-Duhamel inner product, the F_k functional family and fluctuation gaps.

Two independent routes compute (A;B): a spectral sum over eigenbasis matrix
elements weighted by the Duhamel kernel, and Gauss-Legendre quadrature of
Z^-1 Tr[exp(-beta(1 - tau)H) A^dagger exp(-beta tau H) B] over tau in [0, 1].
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
import numpy.typing as npt
from scipy.special import roots_legendre

from .errors import NumericError
from .operators import ComplexMatrix, HermitianOperator, adjoint
from .spectral import (
    SpectralSystem,
    check_beta,
    decompose,
    gibbs_average,
    to_eigenbasis,
)

logger = logging.getLogger("bdlab")

DEGENERACY_THRESHOLD = 1e-8
MAX_FUNCTIONAL_ORDER = 12
MAX_QUADRATURE_NODES = 256
OVERFLOW_EXPONENT = 700.0


class Route(str, Enum):
    """How a functional value was obtained."""

    SPECTRAL = "spectral"  # Direct spectral sum over eigenbasis elements
    IDENTITY = "commutator-identity"  # Thermal average of commutator chain links


class GapForm(str, Enum):
    """Equivalent expressions for 1/2<AA^dagger + A^dagger A> - (A;A)."""

    DIRECT = "direct"  # Difference of the two sides
    COTH = "coth"  # Kernel-weighted sum of x coth x - 1
    MEAN = "mean"  # Mean-weight sum of 1 - 1/(x coth x)


@dataclass(frozen=True)
class DuhamelKernelValue:
    value: float

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class FunctionalValue:
    k: int
    value: float
    route: Route


def relative_exponential_decay(x: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """(1 - exp(-x)) / x for x >= 0, equal to 1 at x = 0."""
    x = np.asarray(x, dtype=float)
    small = x < 1e-6
    safe = np.where(small, 1.0, x)
    series = 1.0 - x / 2 + x**2 / 6
    return np.where(small, series, -np.expm1(-safe) / safe)


def x_coth_x(x: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """x coth x, continued by its limit 1 at x = 0."""
    x = np.abs(np.asarray(x, dtype=float))
    small = x < 1e-4
    safe = np.where(small, 1.0, x)
    series = 1.0 + x**2 / 3 - x**4 / 45
    return np.where(small, series, safe / np.tanh(safe))


def duhamel_kernel(e_m: float, e_n: float, beta: float) -> DuhamelKernelValue:
    """(exp(-beta e_m) - exp(-beta e_n)) / (beta (e_n - e_m)), symmetric in e_m, e_n.

    Coincident levels (relative separation below ``DEGENERACY_THRESHOLD``) take
    the series of the analytic limit, whose leading term is exp(-beta e_m).
    """
    beta = check_beta(beta)
    gap = abs(e_m - e_n)
    if gap <= DEGENERACY_THRESHOLD * max(1.0, abs(e_m), abs(e_n)):
        x = beta * gap
        factor = 1.0 - x / 2 + x**2 / 6
    else:
        factor = float(relative_exponential_decay(beta * gap))
    return DuhamelKernelValue(math.exp(-beta * min(e_m, e_n)) * factor)


def kernel_matrix(sys: SpectralSystem) -> npt.NDArray[np.float64]:
    """Z^-1 times the Duhamel kernel for every pair of eigenstates."""
    x = sys.beta * sys.energy_gaps
    decay = relative_exponential_decay(x)
    limit = 1.0 - x / 2 + x**2 / 6
    return sys.leading_weights * np.where(sys.degenerate_pairs, limit, decay)


def bd_inner(sys: SpectralSystem, a: npt.ArrayLike, b: npt.ArrayLike) -> complex:
    """(A;B): antilinear in A, linear in B."""
    a_elements = to_eigenbasis(sys, a).elements
    b_elements = to_eigenbasis(sys, b).elements
    return complex(np.sum(a_elements.conj() * b_elements * kernel_matrix(sys)))


def bd_inner_quadrature(
    h: HermitianOperator,
    beta: float,
    a: npt.ArrayLike,
    b: npt.ArrayLike,
    nodes: int = 32,
) -> complex:
    if nodes < 8:
        raise ValueError(f"At least 8 quadrature nodes are required, got {nodes}")
    sys = decompose(h, beta)
    a, b = sys.check_operand(a), sys.check_operand(b)
    a_dagger = adjoint(a)
    u = sys.eigenbasis
    shifted = sys.energies - sys.energies[0]
    # exp(-beta E_0) / Z in terms of the shift-stable log partition
    normalization = math.exp(-sys.beta * sys.energies[0] - sys.log_partition)

    abscissae, weights = roots_legendre(nodes)
    taus = 0.5 * (abscissae + 1.0)
    total = 0.0j
    for tau, weight in zip(taus, weights, strict=True):
        left = (u * np.exp(-sys.beta * (1.0 - tau) * shifted)) @ u.conj().T
        right = (u * np.exp(-sys.beta * tau * shifted)) @ u.conj().T
        total += 0.5 * weight * np.trace(left @ a_dagger @ right @ b)
    return complex(total * normalization)


def bd_inner_cross_checked(
    h: HermitianOperator,
    beta: float,
    a: npt.ArrayLike,
    b: npt.ArrayLike,
    tolerance: float = 1e-8,
    nodes: int = 32,
) -> tuple[complex, complex, int]:
    """Both routes for (A;B), doubling quadrature nodes until they agree.

    Returns the spectral value, the quadrature value and the node count used.
    The final pair is returned even if the routes still disagree at the cap.
    """
    spectral = bd_inner(decompose(h, beta), a, b)
    while True:
        quadrature = bd_inner_quadrature(h, beta, a, b, nodes)
        if abs(spectral - quadrature) <= tolerance or nodes >= MAX_QUADRATURE_NODES:
            return spectral, quadrature, nodes
        logger.debug(
            f"Routes differ by {abs(spectral - quadrature):.2e} at {nodes} nodes"
        )
        nodes *= 2


def functional_f(sys: SpectralSystem, j: npt.ArrayLike, k: int) -> FunctionalValue:
    """F_k(J;J) = Z^-1 sum |J_ml|^2 |e^-bE_l - (-1)^k e^-bE_m| (b|E_m - E_l|)^(k-1).

    F_0 is (J;J), with coincident levels handled by the kernel limit, and
    0^0 is taken as 1 so that F_1 = <JJ^dagger + J^dagger J>.
    """
    if k < 0 or k > MAX_FUNCTIONAL_ORDER:
        raise ValueError(
            f"Functional order must lie in [0, {MAX_FUNCTIONAL_ORDER}], got {k}"
        )
    elements = np.abs(to_eigenbasis(sys, j).elements) ** 2
    if k == 0:
        return FunctionalValue(
            k, float(np.sum(elements * kernel_matrix(sys))), Route.SPECTRAL
        )

    spread = sys.beta * float(sys.energies[-1] - sys.energies[0])
    if spread > 1.0 and (k - 1) * math.log(spread) > OVERFLOW_EXPONENT:
        raise NumericError(
            f"Power factor overflows for k={k} at beta*spread={spread:.6g}",
            residual=spread,
        )
    w = sys.weights
    if k % 2:
        weight_factor = np.add.outer(w, w)
    else:
        weight_factor = np.abs(np.subtract.outer(w, w))
    power = (sys.beta * sys.energy_gaps) ** (k - 1)
    return FunctionalValue(
        k, float(np.sum(elements * weight_factor * power)), Route.SPECTRAL
    )


def sym_fluctuation(sys: SpectralSystem, a: npt.ArrayLike) -> float:
    """1/2<A^dagger A + A A^dagger> - |<A>|^2."""
    a = sys.check_operand(a)
    a_dagger = adjoint(a)
    symmetric = 0.5 * gibbs_average(sys, a_dagger @ a + a @ a_dagger).real
    return symmetric - abs(gibbs_average(sys, a)) ** 2


def convexity_gap(
    sys: SpectralSystem, a: npt.ArrayLike, form: GapForm = GapForm.DIRECT
) -> float:
    """1/2<AA^dagger + A^dagger A> - (A;A), which is never negative."""
    a = sys.check_operand(a)
    if form is GapForm.DIRECT:
        a_dagger = adjoint(a)
        symmetric = 0.5 * gibbs_average(sys, a @ a_dagger + a_dagger @ a).real
        return symmetric - bd_inner(sys, a, a).real

    elements = np.abs(to_eigenbasis(sys, a).elements) ** 2
    x_coth = x_coth_x(0.5 * sys.beta * sys.energy_gaps)
    if form is GapForm.COTH:
        return float(np.sum(elements * kernel_matrix(sys) * (x_coth - 1.0)))
    mean_weight = 0.5 * np.add.outer(sys.weights, sys.weights)
    return float(np.sum(elements * mean_weight * (1.0 - 1.0 / x_coth)))


def fluctuation_operator(sys: SpectralSystem, a: npt.ArrayLike) -> ComplexMatrix:
    """delta A = A - <A>."""
    a = sys.check_operand(a)
    return a - gibbs_average(sys, a) * np.eye(sys.dim)
