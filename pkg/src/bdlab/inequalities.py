"""Generalized Harris, Ginibre and Bogoliubov (Jr.) inequalities with explicit slack.

Every family bounds 1/2 F_(2n+1) from below by F_2n and from above by F_2n
plus a family-specific term built from higher functionals. Reports are
evaluated from a table of F_k values, so a blocked system can feed the
sector-combined table and a plain system its spectral one.
"""

import logging
from collections.abc import Mapping
from dataclasses import dataclass
from enum import Enum

from .chains import CommutatorChain, functional_table
from .duhamel import MAX_FUNCTIONAL_ORDER
from .errors import ConsistencyError
from .spectral import SpectralSystem

logger = logging.getLogger("bdlab")

NEGATIVE_BASE_TOLERANCE = 1e-12
SATURATION_THRESHOLD = 1e-12


class InequalityFamily(str, Enum):
    HARRIS_GEN = "harris_gen"  # F_2n <= F_(2n+1)/2 <= F_2n + F_(2n+2)/12
    GINIBRE_GEN = "ginibre_gen"  # Upper term from (J;J) and F_2k(2n+1)
    BPR_GEN = "bpr_gen"  # Upper term from (J;J) and F_(2(2nk+n+k)+1)
    ALT_EVEN = "alt_even"  # Upper term from F_2n and F_2(n+k)
    ALT_ODD = "alt_odd"  # Upper term from F_2n and F_(2(n+k)+1)


@dataclass(frozen=True)
class InequalityReport:
    family: InequalityFamily
    n: int
    k: int
    lhs: float
    rhs_lower: float
    rhs_upper: float
    slack_lower: float
    slack_upper: float
    passed: bool

    @property
    def saturated(self) -> bool:
        return (
            abs(self.slack_lower) <= SATURATION_THRESHOLD
            and abs(self.slack_upper) <= SATURATION_THRESHOLD
        )


def required_orders(family: InequalityFamily, n: int, k: int = 1) -> set[int]:
    """Every F order the family's check at (n, k) reads."""
    if n < 0 or k < 1:
        raise ValueError(f"Need n >= 0 and k >= 1, got n={n}, k={k}")
    base = {2 * n, 2 * n + 1}
    match InequalityFamily(family):
        case InequalityFamily.HARRIS_GEN:
            return base | {2 * n + 2}
        case InequalityFamily.GINIBRE_GEN:
            return base | {0, 2 * k * (2 * n + 1)}
        case InequalityFamily.BPR_GEN:
            return base | {0, 2 * (2 * n * k + n + k) + 1}
        case InequalityFamily.ALT_EVEN:
            return base | {2 * (n + k)}
        case InequalityFamily.ALT_ODD:
            return base | {2 * (n + k) + 1}
    raise ValueError(f"Unknown inequality family {family}")


def within_cap(family: InequalityFamily, n: int, k: int = 1) -> bool:
    return max(required_orders(family, n, k)) <= MAX_FUNCTIONAL_ORDER


def nonnegative_power(base: float, exponent: float, label: str) -> float:
    """Real principal power of a quantity that is nonnegative up to roundoff."""
    if base < -NEGATIVE_BASE_TOLERANCE:
        raise ConsistencyError(f"{label} = {base:.3e} is negative")
    return max(base, 0.0) ** exponent


def _upper_term(
    family: InequalityFamily, n: int, k: int, table: Mapping[int, float]
) -> float:
    def power(order: int, exponent: float) -> float:
        return nonnegative_power(table[order], exponent, f"F_{order}")

    match family:
        case InequalityFamily.HARRIS_GEN:
            return table[2 * n + 2] / 12
        case InequalityFamily.GINIBRE_GEN:
            p = 2 * k
            return 0.5 * power(0, (p - 1) / p) * power(p * (2 * n + 1), 1 / p)
        case InequalityFamily.BPR_GEN:
            q = 2 * k + 1
            order = 2 * (2 * n * k + n + k) + 1
            return 0.5 * power(0, (q - 1) / q) * power(order, 1 / q)
        case InequalityFamily.ALT_EVEN:
            p = 2 * k
            return 0.5 * power(2 * n, (p - 1) / p) * power(2 * (n + k), 1 / p)
        case InequalityFamily.ALT_ODD:
            q = 2 * k + 1
            return 0.5 * power(2 * n, (q - 1) / q) * power(2 * (n + k) + 1, 1 / q)
    raise ValueError(f"Unknown inequality family {family}")


def check_family(
    family: InequalityFamily | str, n: int, k: int, table: Mapping[int, float]
) -> InequalityReport:
    """Evaluate one family at (n, k) from a table of F values.

    The slack tolerance is 1e-10 * max(1, |lhs|); failures are reported, not
    raised.
    """
    family = InequalityFamily(family)
    if family is InequalityFamily.HARRIS_GEN:
        k = 1
    missing = required_orders(family, n, k) - set(table)
    if missing:
        raise KeyError(f"F table lacks orders {sorted(missing)} for {family.value}")

    lhs = 0.5 * table[2 * n + 1]
    rhs_lower = table[2 * n]
    rhs_upper = rhs_lower + _upper_term(family, n, k, table)
    slack_lower = lhs - rhs_lower
    slack_upper = rhs_upper - lhs
    tolerance = 1e-10 * max(1.0, abs(lhs))
    passed = slack_lower >= -tolerance and slack_upper >= -tolerance
    if not passed:
        logger.warning(
            f"{family.value}(n={n}, k={k}) fails: lhs={lhs:.12g}, "
            f"bounds=[{rhs_lower:.12g}, {rhs_upper:.12g}]"
        )
    return InequalityReport(
        family=family,
        n=n,
        k=k,
        lhs=lhs,
        rhs_lower=rhs_lower,
        rhs_upper=rhs_upper,
        slack_lower=slack_lower,
        slack_upper=slack_upper,
        passed=passed,
    )


def _check_on_chain(
    family: InequalityFamily,
    sys: SpectralSystem,
    chain: CommutatorChain,
    n: int,
    k: int,
) -> InequalityReport:
    if chain.depth < n:
        raise ValueError(f"Chain depth {chain.depth} too shallow for n={n}")
    if not within_cap(family, n, k):
        raise ValueError(
            f"{family.value}(n={n}, k={k}) needs F orders above {MAX_FUNCTIONAL_ORDER}"
        )
    table = functional_table(sys, chain.base, required_orders(family, n, k))
    return check_family(family, n, k, table)


def harris_gen(sys: SpectralSystem, chain: CommutatorChain, n: int) -> InequalityReport:
    return _check_on_chain(InequalityFamily.HARRIS_GEN, sys, chain, n, 1)


def ginibre_gen(
    sys: SpectralSystem, chain: CommutatorChain, n: int, k: int
) -> InequalityReport:
    return _check_on_chain(InequalityFamily.GINIBRE_GEN, sys, chain, n, k)


def bpr_gen(
    sys: SpectralSystem, chain: CommutatorChain, n: int, k: int
) -> InequalityReport:
    return _check_on_chain(InequalityFamily.BPR_GEN, sys, chain, n, k)


def alt_even(
    sys: SpectralSystem, chain: CommutatorChain, n: int, k: int
) -> InequalityReport:
    return _check_on_chain(InequalityFamily.ALT_EVEN, sys, chain, n, k)


def alt_odd(
    sys: SpectralSystem, chain: CommutatorChain, n: int, k: int
) -> InequalityReport:
    return _check_on_chain(InequalityFamily.ALT_ODD, sys, chain, n, k)


def family_grid(n_max: int, k_max: int) -> list[tuple[InequalityFamily, int, int]]:
    """(family, n, k) combinations whose F orders stay within the cap."""
    grid = []
    for family in InequalityFamily:
        harris = family is InequalityFamily.HARRIS_GEN
        k_values = range(1, 2 if harris else k_max + 1)
        for n in range(n_max + 1):
            for k in k_values:
                if within_cap(family, n, k):
                    grid.append((family, n, k))
    return grid


def sweep_families(
    table: Mapping[int, float], n_max: int, k_max: int
) -> list[InequalityReport]:
    return [check_family(f, n, k, table) for f, n, k in family_grid(n_max, k_max)]


def catalogue_from_table(
    table: Mapping[int, float], beta: float, n_max: int, k_max: int
) -> list[InequalityReport]:
    """Delta_n against each family's bound, in the unscaled form.

    lhs is Delta_n = beta^-2n (F_(2n+1)/2 - F_2n), rhs_upper the family's upper
    term scaled the same way and rhs_lower zero.
    """
    reports = []
    for report in sweep_families(table, n_max, k_max):
        scale = beta ** (-2 * report.n)
        lhs = scale * report.slack_lower
        rhs_upper = scale * (report.rhs_upper - report.rhs_lower)
        tolerance = 1e-10 * max(1.0, scale * report.lhs)
        reports.append(
            InequalityReport(
                family=report.family,
                n=report.n,
                k=report.k,
                lhs=lhs,
                rhs_lower=0.0,
                rhs_upper=rhs_upper,
                slack_lower=lhs,
                slack_upper=rhs_upper - lhs,
                passed=lhs >= -tolerance and rhs_upper - lhs >= -tolerance,
            )
        )
    return reports


def bound_catalogue(
    sys: SpectralSystem, chain: CommutatorChain, n_max: int, k_max: int
) -> list[InequalityReport]:
    table = functional_table(sys, chain.base, table_orders(n_max, k_max))
    return catalogue_from_table(table, sys.beta, n_max, k_max)


def table_orders(n_max: int, k_max: int) -> set[int]:
    """All F orders a full family sweep to (n_max, k_max) reads."""
    orders: set[int] = set()
    for family, n, k in family_grid(n_max, k_max):
        orders |= required_orders(family, n, k)
    return orders
