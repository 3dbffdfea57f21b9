"""Commutator chains R_n(J) = [H, R_(n-1)(J)] and the averages they produce."""

import logging
from collections.abc import Iterable
from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt

from .duhamel import FunctionalValue, Route, bd_inner, functional_f
from .errors import ConsistencyError, ShapeError
from .operators import ComplexMatrix, HermitianOperator, adjoint, as_matrix, commutator
from .spectral import SpectralSystem, gibbs_average

logger = logging.getLogger("bdlab")

MAX_CHAIN_DEPTH = 8
IMAGINARY_TOLERANCE = 1e-9
DELTA_TOLERANCE = 1e-10


@dataclass(frozen=True, eq=False)
class CommutatorChain:
    base: ComplexMatrix
    links: tuple[ComplexMatrix, ...]
    hamiltonian: HermitianOperator

    @property
    def depth(self) -> int:
        return len(self.links) - 1

    def link(self, n: int) -> ComplexMatrix:
        if n > self.depth:
            raise ValueError(f"Chain has depth {self.depth}, link {n} requested")
        return self.links[n]


@dataclass(frozen=True)
class ConditionsReport:
    """|<J>| and the F_2n, F_(2n+1) values whose size scaling is tested."""

    n_max: int
    j_mean: complex
    f_even: dict[int, float] = field(default_factory=dict)
    f_odd: dict[int, float] = field(default_factory=dict)

    @property
    def j_mean_abs(self) -> float:
        return abs(self.j_mean)


def build_chain(h: HermitianOperator, j: npt.ArrayLike, n: int) -> CommutatorChain:
    if not 0 <= n <= MAX_CHAIN_DEPTH:
        raise ValueError(f"Chain depth must lie in [0, {MAX_CHAIN_DEPTH}], got {n}")
    base = as_matrix(j)
    if base.shape[0] != h.dim:
        raise ShapeError(
            f"Observable dimension {base.shape[0]} does not match Hamiltonian {h.dim}"
        )
    links = [base]
    for _ in range(n):
        links.append(commutator(h.matrix, links[-1]))
    return CommutatorChain(base=base, links=tuple(links), hamiltonian=h)


def _real_average(sys: SpectralSystem, operator: ComplexMatrix, label: str) -> float:
    average = gibbs_average(sys, operator)
    if abs(average.imag) > IMAGINARY_TOLERANCE * max(1.0, abs(average.real)):
        raise ConsistencyError(
            f"{label} has imaginary part {average.imag:.3e} (real {average.real:.6g})"
        )
    return average.real


def f_even_via_identity(
    sys: SpectralSystem, chain: CommutatorChain, n: int
) -> FunctionalValue:
    """F_2n = beta^(2n-1) <[R_n^dagger, R_(n-1)]> for n >= 1."""
    if n < 1:
        raise ValueError(f"Identity route for F_2n needs n >= 1, got {n}")
    r_n, r_prev = chain.link(n), chain.link(n - 1)
    value = _real_average(sys, commutator(adjoint(r_n), r_prev), f"F_{2 * n}")
    return FunctionalValue(2 * n, sys.beta ** (2 * n - 1) * value, Route.IDENTITY)


def f_odd_via_identity(
    sys: SpectralSystem, chain: CommutatorChain, n: int
) -> FunctionalValue:
    """F_(2n+1) = beta^(2n) <R_n R_n^dagger + R_n^dagger R_n>."""
    r_n = chain.link(n)
    r_dagger = adjoint(r_n)
    value = _real_average(sys, r_n @ r_dagger + r_dagger @ r_n, f"F_{2 * n + 1}")
    return FunctionalValue(2 * n + 1, sys.beta ** (2 * n) * value, Route.IDENTITY)


def delta_n(sys: SpectralSystem, chain: CommutatorChain, n: int) -> float:
    """1/2<R_n^dagger R_n + R_n R_n^dagger> - (R_n;R_n), never negative."""
    r_n = chain.link(n)
    r_dagger = adjoint(r_n)
    symmetric = 0.5 * gibbs_average(sys, r_dagger @ r_n + r_n @ r_dagger).real
    delta = symmetric - bd_inner(sys, r_n, r_n).real
    if delta < -DELTA_TOLERANCE * max(1.0, symmetric):
        raise ConsistencyError(f"Delta_{n} = {delta:.3e} is negative")
    return delta


def functional_table(
    sys: SpectralSystem, j: npt.ArrayLike, orders: Iterable[int]
) -> dict[int, float]:
    """Spectral F_k for each requested order."""
    return {k: functional_f(sys, j, k).value for k in sorted(set(orders))}


def evaluate_conditions(
    sys: SpectralSystem, chain: CommutatorChain, n_max: int
) -> ConditionsReport:
    report = ConditionsReport(n_max=n_max, j_mean=gibbs_average(sys, chain.base))
    for n in range(n_max + 1):
        report.f_odd[n] = f_odd_via_identity(sys, chain, n).value
        if n >= 1:
            report.f_even[n] = f_even_via_identity(sys, chain, n).value
    logger.debug(
        f"Conditions to n={n_max}: |<J>|={report.j_mean_abs:.6g}, "
        f"F_even={report.f_even}, F_odd={report.f_odd}"
    )
    return report


def chain_average_defect(sys: SpectralSystem, chain: CommutatorChain) -> float:
    """Largest |<R_i>| for i >= 1, relative to the link norm."""
    defects = [
        abs(gibbs_average(sys, link)) / max(1.0, float(np.max(np.abs(link))))
        for link in chain.links[1:]
    ]
    return max(defects, default=0.0)
