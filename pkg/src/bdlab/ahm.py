"""Approximating Hamiltonian method: free-energy gaps and the bounds around them.

The trial Hamiltonians H_0 of both models are sums of identical one-site terms
(plus a free shifted boson for Dicke), so f[H_0] is evaluated from a batched
2x2 diagonalization. f[H] always comes from the exact model spectrum.
"""

import logging
import math
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import numpy.typing as npt
from scipy.optimize import minimize
from scipy.special import logsumexp

from .chains import build_chain
from .duhamel import bd_inner
from .errors import NumericError, VerificationError
from .models import (
    DickeSpec,
    HeisenbergSpec,
    ModelSpec,
    SectorSpectra,
    below_cutoff_projector,
    converge_fock_cutoff,
    dicke_f2,
    dicke_f3,
    dicke_f4,
    dicke_matrix,
    dicke_r2,
    dicke_system,
    measure_commutator_sign,
    model_system,
)
from .operators import (
    SIGMA_MINUS,
    SIGMA_PLUS,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    ComplexMatrix,
    HermitianOperator,
    adjoint,
    commutator,
)
from .spectral import decompose, free_energy_density, gibbs_average

logger = logging.getLogger("bdlab")

GAP_TOLERANCE = 1e-9
IDENTITY_TOLERANCE = 1e-6
MEAN_TOLERANCE = 1e-8
REALITY_TOLERANCE = 1e-10
NOISE_FLOOR_RATIO = 1e-5
PAULI_STACK = np.stack([SIGMA_X, SIGMA_Y, SIGMA_Z])


@dataclass(frozen=True)
class SeedGrid:
    """Coarse grid applied to every real coordinate of the parameters."""

    low: float = -2.0
    high: float = 2.0
    step: float = 0.25

    def __post_init__(self):
        if self.step <= 0 or self.high < self.low:
            raise ValueError(f"Empty seed grid {self}")

    def points(self) -> npt.NDArray[np.float64]:
        count = int(math.floor((self.high - self.low) / self.step + 1e-9)) + 1
        return self.low + self.step * np.arange(count)


@dataclass(frozen=True)
class VariationalResult:
    params_opt: tuple[complex, ...]
    f_approx_min: float
    f_model: float
    gap: float
    iterations: int
    converged: bool


@dataclass(frozen=True)
class SusceptibilityCheck:
    channel: int
    second_derivative_fd: float
    duhamel_value: float
    residual: float
    beta: float
    size: float

    @property
    def relative_residual(self) -> float:
        return self.residual / max(abs(self.second_derivative_fd), 1e-300)


def _sources(spec: ModelSpec, nu: Sequence[complex] | None) -> tuple[complex, ...]:
    if nu is None:
        return (0j,) * spec.channel_count
    return tuple(complex(v) for v in nu)


def _vector_to_params(x: npt.ArrayLike) -> tuple[complex, ...]:
    x = np.asarray(x, dtype=float)
    return tuple(complex(re, im) for re, im in zip(x[0::2], x[1::2], strict=True))


def _params_to_vector(params: Sequence[complex]) -> npt.NDArray[np.float64]:
    return np.array([c for p in params for c in (complex(p).real, complex(p).imag)])


def free_boson_density(spec: DickeSpec) -> float:
    """ln(1 - exp(-beta omega)) / (beta V): independent of every parameter."""
    return math.log(-math.expm1(-spec.beta * spec.omega)) / (spec.beta * spec.size)


def _site_free_energies(
    spec: ModelSpec, x: npt.ArrayLike, nu: tuple[complex, ...]
) -> npt.NDArray[np.float64]:
    """f[H_0] for every row of real parameter coordinates ``x``."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    params = x[:, 0::2] + 1j * x[:, 1::2]
    nu_arr = np.asarray(nu, dtype=complex)
    if isinstance(spec, HeisenbergSpec):
        g = np.asarray(spec.couplings)
        fields = np.tile(np.asarray(spec.h), (x.shape[0], 1))
        fields[:, :2] += 2 * g * params.real + 2 * nu_arr.real
        site = -np.einsum("ms,sij->mij", fields, PAULI_STACK)
        log_z = logsumexp(-spec.beta * np.linalg.eigvalsh(site), axis=1)
        return -log_z / spec.beta + np.sum(g * np.abs(params) ** 2, axis=1)

    eta = params[:, 0]
    strength = spec.coupling**2 / spec.omega
    site = 0.5 * spec.epsilon * SIGMA_Z - strength * (
        eta[:, None, None] * SIGMA_MINUS + eta.conj()[:, None, None] * SIGMA_PLUS
    )
    log_z = logsumexp(-spec.beta * np.linalg.eigvalsh(site), axis=1)
    matter = -spec.n_spins / (spec.beta * spec.size) * log_z + strength * np.abs(
        eta
    ) ** 2
    (source,) = nu_arr
    boson = (
        free_boson_density(spec)
        - abs(source) ** 2 / spec.omega
        + 2 * spec.coupling / spec.omega * (source.conjugate() * eta).real
    )
    return matter + boson


def approximating_free_energy(
    spec: ModelSpec, params: Sequence[complex], nu: Sequence[complex] | None = None
) -> float:
    return float(
        _site_free_energies(spec, _params_to_vector(params), _sources(spec, nu))[0]
    )


@lru_cache(maxsize=512)
def _model_free_energy(spec: ModelSpec, nu: tuple[complex, ...]) -> float:
    return model_system(spec, nu).decompose(spec.beta).free_energy_density(spec.size)


def model_free_energy(spec: ModelSpec, nu: Sequence[complex] | None = None) -> float:
    return _model_free_energy(spec, _sources(spec, nu))


def converge_free_energy_cutoff(spec: DickeSpec, cutoff_max: int = 128) -> DickeSpec:
    """Escalated Fock cutoff at which f[H] is stable; f[H_0] has no cutoff."""
    converged, _ = converge_fock_cutoff(
        spec, lambda s: {"f_model": model_free_energy(s)}, cutoff_max
    )
    return converged


def free_energy_gap(
    spec: ModelSpec, params: Sequence[complex], nu: Sequence[complex] | None = None
) -> float:
    """f[H_0(params, nu)] - f[H(nu)]."""
    return approximating_free_energy(spec, params, nu) - model_free_energy(spec, nu)


def minimize_gap(
    spec: ModelSpec,
    nu: Sequence[complex] | None = None,
    seed_grid: SeedGrid | None = None,
) -> VariationalResult:
    """Grid scan of every real coordinate, then Powell refinement from the best seed."""
    nu = _sources(spec, nu)
    seed_grid = seed_grid or SeedGrid()
    axes = [seed_grid.points()] * (2 * spec.channel_count)
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(axes))
    values = _site_free_energies(spec, grid, nu)
    seed = grid[int(np.argmin(values))]
    logger.debug(f"Best of {len(grid)} seeds: {seed} -> {values.min():.12g}")

    result = minimize(
        lambda x: float(_site_free_energies(spec, x, nu)[0]),
        seed,
        method="Powell",
        options={"xtol": 1e-6, "ftol": 1e-12, "maxiter": 10_000},
    )
    f_approx = float(result.fun)
    f_model = model_free_energy(spec, nu)
    gap = f_approx - f_model
    if gap < -GAP_TOLERANCE:
        logger.warning(f"Negative free-energy gap {gap:.3e} at the optimum")
    if not result.success:
        logger.warning(f"Gap refinement did not converge: {result.message}")
    return VariationalResult(
        params_opt=_vector_to_params(result.x),
        f_approx_min=f_approx,
        f_model=f_model,
        gap=gap,
        iterations=int(result.nit),
        converged=bool(result.success),
    )


def _spectra(spec: ModelSpec, nu: Sequence[complex] | None) -> SectorSpectra:
    return model_system(spec, _sources(spec, nu)).decompose(spec.beta)


def heisenberg_upper_bound(
    spec: HeisenbergSpec, nu: Sequence[complex] | None = None
) -> float:
    """sum_s g_s <(A_s - <A_s>)(A_s - <A_s>)^dagger> in the Gibbs state of H(nu)."""
    spectra = _spectra(spec, nu)
    bound = 0.0
    for g, name in zip(spec.couplings, ("Jx", "Jy"), strict=True):
        mean = spectra.expectation(lambda o, n=name: o[n]).real
        square = spectra.expectation(lambda o, n=name: o[n] @ o[n]).real
        bound += g * (square - mean**2)
    return bound


def _channel_operator(spec: ModelSpec, channel: int) -> Callable[..., ComplexMatrix]:
    if not 0 <= channel < spec.channel_count:
        raise ValueError(f"{type(spec).__name__} has no channel {channel}")
    if isinstance(spec, HeisenbergSpec):
        name = ("Jx", "Jy")[channel]
        return lambda o: o[name]
    return lambda o: o["b"] / math.sqrt(spec.size)


def _wirtinger_laplacian(
    f: Callable[[complex], float], nu0: complex, step: float
) -> tuple[float, float]:
    """1/4 (f_rr + f_ii) by 5-point stencils, with its roundoff floor."""
    center = f(nu0)
    samples = [center]
    second = 0.0
    for direction in (1.0, 1j):
        p1, m1 = f(nu0 + step * direction), f(nu0 - step * direction)
        p2, m2 = f(nu0 + 2 * step * direction), f(nu0 - 2 * step * direction)
        samples += [p1, m1, p2, m2]
        second += (-p2 + 16 * p1 - 30 * center + 16 * m1 - m2) / (12 * step**2)
    floor = 64 * np.finfo(float).eps * max(1.0, max(map(abs, samples))) / (
        12 * step**2
    )
    return 0.25 * second, floor


def _susceptibility(
    f: Callable[[complex], float],
    nu0: complex,
    step: float,
    duhamel_value: float,
    beta: float,
    size: float,
    channel: int,
) -> SusceptibilityCheck:
    if step <= 0:
        raise ValueError(f"Finite-difference step must be positive, got {step}")
    fd, floor = _wirtinger_laplacian(f, nu0, step)
    if floor > NOISE_FLOOR_RATIO * abs(fd):
        raise NumericError(
            f"Finite-difference noise floor {floor:.2e} swamps the second derivative "
            f"{fd:.3e}; try a larger step than {step}",
            residual=floor,
        )
    residual = abs(fd + beta * size * duhamel_value)
    check = SusceptibilityCheck(channel, fd, duhamel_value, residual, beta, size)
    logger.debug(
        f"Susceptibility channel {channel}: fd={fd:.10g}, "
        f"-beta*size*(dJ;dJ)={-beta * size * duhamel_value:.10g}, "
        f"relative residual {check.relative_residual:.2e}"
    )
    return check


def susceptibility_check(
    spec: ModelSpec,
    channel: int = 0,
    nu0: Sequence[complex] | None = None,
    step: float = 1e-3,
) -> SusceptibilityCheck:
    """d^2 f / d nu* d nu against -beta |L| (dA;dA) for one source channel."""
    build = _channel_operator(spec, channel)
    base = _sources(spec, nu0)

    def f(value: complex) -> float:
        nu = list(base)
        nu[channel] = value
        return model_free_energy(spec, nu)

    spectra = _spectra(spec, base)
    mean = spectra.expectation(build)
    inner = spectra.combine(lambda sys, o: bd_inner(sys, build(o), build(o))).real
    return _susceptibility(
        f, base[channel], step, inner - abs(mean) ** 2, spec.beta, spec.size, channel
    )


def operator_susceptibility(
    h: HermitianOperator,
    beta: float,
    a: npt.ArrayLike,
    size: float,
    step: float = 1e-3,
) -> SusceptibilityCheck:
    """Same comparison for H - size (nu A^dagger + nu* A) on a plain operator."""
    a = np.asarray(a, dtype=complex)
    a_dagger = adjoint(a)

    def f(value: complex) -> float:
        source = size * (value * a_dagger + np.conj(value) * a)
        shifted = HermitianOperator.from_matrix(h.matrix - source)
        return free_energy_density(decompose(shifted, beta), size)

    sys = decompose(h, beta)
    inner = bd_inner(sys, a, a).real - abs(gibbs_average(sys, a)) ** 2
    return _susceptibility(f, 0j, step, inner, beta, size, 0)


def source_response(
    spec: ModelSpec,
    channel: int = 0,
    nu0: Sequence[complex] | None = None,
    step: float = 1e-4,
) -> tuple[complex, complex]:
    """df/d nu* by central differences, and the expected -<A> of the channel."""
    build = _channel_operator(spec, channel)
    base = _sources(spec, nu0)

    def f(value: complex) -> float:
        nu = list(base)
        nu[channel] = value
        return model_free_energy(spec, nu)

    center = base[channel]
    d_real = (f(center + step) - f(center - step)) / (2 * step)
    d_imag = (f(center + 1j * step) - f(center - 1j * step)) / (2 * step)
    return 0.5 * (d_real + 1j * d_imag), -_spectra(spec, base).expectation(build)


def dicke_source_mean(spec: DickeSpec, nu: complex) -> tuple[complex, complex]:
    """V^-1/2 <b> in H(nu) and (nu - lambda <A>) / omega."""
    spectra = _spectra(spec, (nu,))
    b_mean = spectra.expectation(lambda o: o["b"]) / math.sqrt(spec.size)
    a_mean = spectra.expectation(lambda o: o["A"])
    return b_mean, (nu - spec.coupling * a_mean) / spec.omega


@dataclass(frozen=True)
class IdentityCheck:
    name: str
    lhs: float
    rhs: float
    tolerance: float
    detail: str = ""

    @property
    def residual(self) -> float:
        return abs(self.lhs - self.rhs)

    @property
    def passed(self) -> bool:
        return self.residual <= self.tolerance * max(1.0, abs(self.lhs), abs(self.rhs))


@dataclass(frozen=True)
class InequalityCheck:
    """lower <= upper up to ``tolerance``, with the slack upper - lower."""

    name: str
    lower: float
    upper: float
    tolerance: float = 1e-10

    @property
    def slack(self) -> float:
        return self.upper - self.lower

    @property
    def passed(self) -> bool:
        return self.slack >= -self.tolerance * max(1.0, abs(self.upper))


@dataclass(frozen=True)
class DickeIdentityReport:
    spec: DickeSpec
    commutator_sign: int
    quantities: Mapping[str, complex]
    identities: tuple[IdentityCheck, ...] = ()
    inequalities: tuple[InequalityCheck, ...] = ()

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.identities) and all(
            c.passed for c in self.inequalities
        )

    def require(self) -> None:
        failed = [c.name for c in self.identities if not c.passed]
        failed += [c.name for c in self.inequalities if not c.passed]
        if failed:
            raise VerificationError(
                f"Dicke identities fail at V={self.spec.size:g}, "
                f"cutoff {self.spec.fock_cutoff}: {', '.join(failed)}"
            )


def dicke_quantities(spec: DickeSpec) -> dict[str, complex]:
    """Every average and Duhamel product the Dicke checks read."""
    spectra = dicke_system(spec).decompose(spec.beta)
    sign, _ = measure_commutator_sign(spec)
    root_v = math.sqrt(spec.size)

    def inner(x: str, y: str) -> complex:
        return spectra.combine(lambda sys, o: bd_inner(sys, o[x], o[y]))

    table = spectra.functional_table(lambda o: o["b"] / root_v, (2, 3, 4))
    return {
        "bb": inner("b", "b"),
        "bA": inner("b", "A"),
        "Ab": inner("A", "b"),
        "AA": inner("A", "A"),
        "b_mean": spectra.expectation(lambda o: o["b"]),
        "A_mean": spectra.expectation(lambda o: o["A"]),
        "n_b": spectra.expectation(lambda o: adjoint(o["b"]) @ o["b"]),
        "bdag_A": spectra.expectation(lambda o: adjoint(o["b"]) @ o["A"]),
        "b_Adag": spectra.expectation(lambda o: o["b"] @ adjoint(o["A"])),
        "A_Adag": spectra.expectation(lambda o: o["A"] @ adjoint(o["A"])),
        "F2": table[2],
        "F3": table[3],
        "F4": table[4],
        "F3_closed": dicke_f3(spec, spectra),
        "F4_closed": dicke_f4(spec, spectra, sign),
    }


def _operator_defects(spec: DickeSpec, sign: int) -> tuple[float, float, float]:
    """max |[T, A] - eps A|, max |([H, b] + omega b + V^1/2 lambda A) P| and the
    relative defect of the R_2(V^-1/2 b) closed form below the top two levels."""
    algebra, equation, second = 0.0, 0.0, 0.0
    root_v = math.sqrt(spec.size)
    for sector in dicke_system(spec).sectors:
        o = sector.observables
        matter_dim = o["T"].shape[0] // spec.fock_cutoff
        algebra = max(
            algebra,
            float(np.max(np.abs(commutator(o["T"], o["A"]) - spec.epsilon * o["A"]))),
        )
        h = dicke_matrix(spec, o)
        residual = (
            commutator(h, o["b"])
            + spec.omega * o["b"]
            + root_v * spec.coupling * o["A"]
        )
        projector = below_cutoff_projector(spec, matter_dim)
        equation = max(equation, float(np.max(np.abs(residual @ projector))))

        link = build_chain(sector.hamiltonian, o["b"] / root_v, 2).link(2)
        defect = (link - dicke_r2(spec, o, sign)) @ below_cutoff_projector(
            spec, matter_dim, margin=2
        )
        scale = max(1.0, float(np.max(np.abs(link))))
        second = max(second, float(np.max(np.abs(defect))) / scale)
    return algebra, equation, second


def dicke_identity_suite(spec: DickeSpec, cutoff_max: int = 128) -> DickeIdentityReport:
    """Duhamel-product identities of the Dicke model at a converged Fock cutoff."""
    spec, q = converge_fock_cutoff(spec, dicke_quantities, cutoff_max)
    sign, sign_residual = measure_commutator_sign(spec)
    algebra, equation, second = _operator_defects(spec, sign)
    v, lam, omega, beta = spec.size, spec.coupling, spec.omega, spec.beta
    free = 1.0 / (beta * omega)
    bb, ba, ab, aa = (q[k].real for k in ("bb", "bA", "Ab", "AA"))
    n_b = q["n_b"].real
    b_mean, a_mean = q["b_mean"], q["A_mean"]

    root_v = math.sqrt(v)
    b_expected = -root_v * lam / omega * a_mean
    identities = (
        IdentityCheck(
            "bb_vs_bA", bb, free - root_v * lam / omega * ba, IDENTITY_TOLERANCE
        ),
        IdentityCheck("Ab_vs_AA", -ab, root_v * lam / omega * aa, IDENTITY_TOLERANCE),
        IdentityCheck("bA_symmetric", ba, ab, IDENTITY_TOLERANCE),
        IdentityCheck(
            "bb_vs_AA", bb, free + v * lam**2 / omega**2 * aa, IDENTITY_TOLERANCE
        ),
        IdentityCheck("b_mean_re", b_mean.real, b_expected.real, MEAN_TOLERANCE),
        IdentityCheck("b_mean_im", b_mean.imag, b_expected.imag, MEAN_TOLERANCE),
        IdentityCheck(
            "bdagA_real", q["bdag_A"].real, q["b_Adag"].real, REALITY_TOLERANCE
        ),
        IdentityCheck("F2", q["F2"].real, dicke_f2(spec), IDENTITY_TOLERANCE),
        IdentityCheck(
            "F3_closed_form", q["F3"].real, q["F3_closed"].real, IDENTITY_TOLERANCE
        ),
        IdentityCheck(
            "F4_closed_form",
            q["F4"].real,
            q["F4_closed"].real,
            IDENTITY_TOLERANCE,
            f"commutator sign {sign:+d}",
        ),
        IdentityCheck(
            "commutator_proportional_to_T",
            sign_residual,
            0.0,
            1e-12,
            f"[A^dagger, A] = {sign:+d} (2/(eps V^2)) T",
        ),
        IdentityCheck("T_A_commutator", algebra, 0.0, 1e-12),
        IdentityCheck(
            "H_b_commutator", equation, 0.0, 1e-10, "checked below the Fock cutoff"
        ),
        IdentityCheck(
            "R2_closed_form",
            second,
            0.0,
            1e-10,
            f"checked below the top two Fock levels, sign {sign:+d}",
        ),
    )
    inequalities = (
        InequalityCheck("harris_lower", bb, n_b + 0.5),
        InequalityCheck("harris_upper", n_b + 0.5, bb + beta * omega / 12),
    )
    report = DickeIdentityReport(
        spec=spec,
        commutator_sign=sign,
        quantities=q,
        identities=identities,
        inequalities=inequalities,
    )
    log = logger.info if report.passed else logger.warning
    log(
        f"Dicke suite V={v:g}, lambda={lam:g}, cutoff {spec.fock_cutoff}: "
        f"{'pass' if report.passed else 'FAIL'}"
    )
    return report


@dataclass(frozen=True)
class SchwarzReport:
    volume: float
    lhs: float
    rhs: float
    n_b_density: float

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    @property
    def passed(self) -> bool:
        return self.slack >= -1e-12 * max(1.0, self.rhs)


def schwarz_bound_check(spec: DickeSpec, cutoff_max: int = 128) -> SchwarzReport:
    """|<V^-1/2 b^dagger A>| <= <V^-1 b^dagger b>^1/2 <A A^dagger>^1/2."""
    spec, q = converge_fock_cutoff(spec, dicke_quantities, cutoff_max)
    n_b = q["n_b"].real / spec.size
    return SchwarzReport(
        volume=spec.size,
        lhs=abs(q["bdag_A"]) / math.sqrt(spec.size),
        rhs=math.sqrt(max(n_b, 0.0)) * math.sqrt(max(q["A_Adag"].real, 0.0)),
        n_b_density=n_b,
    )


@dataclass(frozen=True)
class DickeGapBounds:
    """0 <= gap_min <= gap_at_mean <= cross_term <= majorant, all per volume."""

    volume: float
    gamma: float
    gap_min: float
    gap_at_mean: float
    cross_term: float
    majorant: float
    free_boson: float
    chain: tuple[InequalityCheck, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.chain)


def dicke_gap_bounds(
    spec: DickeSpec,
    nu: Sequence[complex] | None = None,
    gamma: float = 1.0 / 3.0,
    seed_grid: SeedGrid | None = None,
) -> DickeGapBounds:
    """Evaluate each stage of the Dicke gap majorization at eta = <A>."""
    nu = _sources(spec, nu)
    spectra = _spectra(spec, nu)
    root_v = math.sqrt(spec.size)
    a_mean = spectra.expectation(lambda o: o["A"])
    b_mean = spectra.expectation(lambda o: o["b"])

    def centred(o: Mapping[str, ComplexMatrix]) -> tuple[ComplexMatrix, ComplexMatrix]:
        unit = np.eye(o["A"].shape[0])
        return o["A"] - a_mean * unit, o["b"] - b_mean * unit

    def cross(o: Mapping[str, ComplexMatrix]) -> ComplexMatrix:
        da, db = centred(o)
        return adjoint(da) @ db + da @ adjoint(db)

    def matter(o: Mapping[str, ComplexMatrix]) -> ComplexMatrix:
        da, _ = centred(o)
        return adjoint(da) @ da

    def boson(o: Mapping[str, ComplexMatrix]) -> ComplexMatrix:
        _, db = centred(o)
        return adjoint(db) @ db

    lam, omega = spec.coupling, spec.omega
    cross_term = -lam / root_v * spectra.expectation(cross).real
    majorant = spec.size ** (-0.5 - gamma) * lam**2 / omega * spectra.expectation(
        matter
    ).real + spec.size ** (-0.5 + gamma) * omega * spectra.expectation(boson).real
    gap_min = minimize_gap(spec, nu, seed_grid).gap
    gap_at_mean = free_energy_gap(spec, (a_mean,), nu)
    chain = (
        InequalityCheck("gap_nonnegative", 0.0, gap_min, GAP_TOLERANCE),
        InequalityCheck("gap_min_below_mean", gap_min, gap_at_mean, GAP_TOLERANCE),
        InequalityCheck("gap_below_cross", gap_at_mean, cross_term, GAP_TOLERANCE),
        InequalityCheck("cross_below_majorant", cross_term, majorant, GAP_TOLERANCE),
    )
    return DickeGapBounds(
        volume=spec.size,
        gamma=gamma,
        gap_min=gap_min,
        gap_at_mean=gap_at_mean,
        cross_term=cross_term,
        majorant=majorant,
        free_boson=free_boson_density(spec),
        chain=chain,
    )
