"""Anisotropic mean-field Heisenberg and single-mode Dicke models.

Both Hamiltonians commute with the total spin of the matter subsystem, so the
2^N product space splits into spin-S sectors, each repeated d(N, S) times.
Every model is therefore held as a :class:`BlockedSystem`; the plain product
space is the special case of a single sector with multiplicity one.
"""

import logging
import math
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np
from scipy.special import logsumexp

from .chains import functional_table
from .errors import CapacityError, ConfigurationError, ShapeError, VerificationError
from .operators import (
    MAX_HILBERT_DIMENSION,
    SIGMA_PLUS,
    SIGMA_Z,
    Axis,
    ComplexMatrix,
    HermitianOperator,
    adjoint,
    as_matrix,
    boson_ladder,
    check_capacity,
    collective_spin,
    commutator,
    identity,
    kron,
    site_sum,
    spin_matrices,
    spin_raising,
)
from .spectral import SpectralSystem, decompose, gibbs_average

logger = logging.getLogger("bdlab")

# The Heisenberg Hamiltonian is already beta*H; temperature lives in g and h.
HEISENBERG_BETA = 1.0
CUTOFF_STEP = 4
CUTOFF_TOLERANCE = 1e-8


class Representation(str, Enum):
    """How the spin part of a model is laid out."""

    FULL = "full"  # Whole 2^N product space
    BLOCKED = "blocked"  # Every total-spin sector with its multiplicity
    SYMMETRIC = "symmetric"  # Maximal total spin only, flagged in every output


@dataclass(frozen=True)
class HeisenbergSpec:
    n_spins: int
    g_x: float = 1.0
    g_y: float = 0.5
    h: tuple[float, float, float] = (0.0, 0.3, 0.5)
    representation: Representation = Representation.BLOCKED

    def __post_init__(self):
        if self.n_spins < 1:
            raise ConfigurationError(f"n_spins must be >= 1, got {self.n_spins}")
        if self.g_x < 0 or self.g_y < 0:
            raise ConfigurationError(
                f"Couplings must be non-negative, got g_x={self.g_x}, g_y={self.g_y}"
            )
        if len(self.h) != 3:
            raise ConfigurationError(f"Field must have 3 components, got {self.h}")
        object.__setattr__(self, "h", tuple(float(c) for c in self.h))
        object.__setattr__(self, "representation", Representation(self.representation))
        if self.representation is Representation.FULL:
            check_capacity(2**self.n_spins, f"{self.n_spins}-spin product space")

    @property
    def size(self) -> float:
        return float(self.n_spins)

    @property
    def beta(self) -> float:
        return HEISENBERG_BETA

    @property
    def couplings(self) -> tuple[float, float]:
        return (self.g_x, self.g_y)

    channel_count = 2


@dataclass(frozen=True)
class DickeSpec:
    n_spins: int
    volume: float | None = None
    epsilon: float = 1.0
    omega: float = 1.0
    coupling: float = 0.3
    fock_cutoff: int = 16
    beta: float = 1.0
    representation: Representation = Representation.BLOCKED

    def __post_init__(self):
        if self.n_spins < 1:
            raise ConfigurationError(f"n_spins must be >= 1, got {self.n_spins}")
        if self.volume is None:
            object.__setattr__(self, "volume", float(self.n_spins))
        if self.size <= 0:
            raise ConfigurationError(f"volume must be positive, got {self.volume}")
        if self.omega <= 0:
            raise ConfigurationError(f"omega must be positive, got {self.omega}")
        if self.beta <= 0:
            raise ConfigurationError(f"beta must be positive, got {self.beta}")
        if self.fock_cutoff < 2:
            raise ConfigurationError(
                f"fock_cutoff must be >= 2, got {self.fock_cutoff}"
            )
        object.__setattr__(self, "representation", Representation(self.representation))
        matter = (
            2**self.n_spins
            if self.representation is Representation.FULL
            else self.n_spins + 1
        )
        check_capacity(matter * self.fock_cutoff, "Dicke matter x Fock space")

    @property
    def size(self) -> float:
        return float(self.volume)  # type: ignore[arg-type]

    def with_cutoff(self, cutoff: int) -> "DickeSpec":
        return replace(self, fock_cutoff=cutoff)

    channel_count = 1


ModelSpec = HeisenbergSpec | DickeSpec


@dataclass(frozen=True, eq=False)
class Sector:
    """One total-spin block: its Hamiltonian and the model's observables on it."""

    spin: float | None
    multiplicity: int
    hamiltonian: HermitianOperator
    observables: Mapping[str, ComplexMatrix] = field(default_factory=dict)


@dataclass(frozen=True, eq=False)
class BlockedSystem:
    sectors: tuple[Sector, ...]
    symmetric_only: bool = False

    @property
    def dimension(self) -> int:
        return sum(s.multiplicity * s.hamiltonian.dim for s in self.sectors)

    def map_hamiltonians(
        self, build: Callable[[Sector], ComplexMatrix]
    ) -> "BlockedSystem":
        """Same sectors and observables, Hamiltonian replaced by ``build(sector)``."""
        return BlockedSystem(
            sectors=tuple(
                replace(s, hamiltonian=HermitianOperator.from_matrix(build(s)))
                for s in self.sectors
            ),
            symmetric_only=self.symmetric_only,
        )

    def as_operator(self) -> HermitianOperator:
        if len(self.sectors) != 1 or self.sectors[0].multiplicity != 1:
            raise ShapeError("Only a single-sector system is a plain operator")
        return self.sectors[0].hamiltonian

    def decompose(self, beta: float) -> "SectorSpectra":
        spectra = tuple(decompose(s.hamiltonian, beta) for s in self.sectors)
        log_terms = np.array(
            [
                math.log(s.multiplicity) + spectrum.log_partition
                for s, spectrum in zip(self.sectors, spectra, strict=True)
            ]
        )
        log_partition = float(logsumexp(log_terms))
        return SectorSpectra(
            sectors=self.sectors,
            spectra=spectra,
            probabilities=np.exp(log_terms - log_partition),
            log_partition=log_partition,
            beta=beta,
        )


Evaluation = Callable[[SpectralSystem, Mapping[str, ComplexMatrix]], complex]
Builder = Callable[[Mapping[str, ComplexMatrix]], ComplexMatrix]


@dataclass(frozen=True, eq=False)
class SectorSpectra:
    """Per-sector spectra and the probability p_S = d_S Z_S / Z of each sector.

    Quantities linear in the Gibbs state combine as sum_S p_S q_S.
    """

    sectors: tuple[Sector, ...]
    spectra: tuple[SpectralSystem, ...]
    probabilities: np.ndarray
    log_partition: float
    beta: float

    def combine(self, evaluate: Evaluation) -> complex:
        return complex(
            sum(
                p * evaluate(spectrum, sector.observables)
                for p, spectrum, sector in zip(
                    self.probabilities, self.spectra, self.sectors, strict=True
                )
            )
        )

    def expectation(self, build: Builder) -> complex:
        return self.combine(lambda sys, obs: gibbs_average(sys, build(obs)))

    def functional_table(
        self, build: Builder, orders: Sequence[int]
    ) -> dict[int, float]:
        table = dict.fromkeys(sorted(set(orders)), 0.0)
        for p, spectrum, sector in zip(
            self.probabilities, self.spectra, self.sectors, strict=True
        ):
            for k, value in functional_table(
                spectrum, build(sector.observables), table
            ).items():
                table[k] += float(p) * value
        return table

    def free_energy_density(self, size: float) -> float:
        if size <= 0:
            raise ValueError(f"size must be positive, got {size}")
        return -self.log_partition / (self.beta * size)


def spin_multiplicity(n_spins: int, spin: float) -> int:
    """d(N, S) = C(N, N/2 - S) - C(N, N/2 - S - 1)."""
    t = n_spins / 2 - spin
    if t < 0 or abs(t - round(t)) > 1e-12:
        return 0
    t = int(round(t))
    return math.comb(n_spins, t) - (math.comb(n_spins, t - 1) if t >= 1 else 0)


def spin_sectors(
    n_spins: int, representation: Representation
) -> list[tuple[float | None, int]]:
    """(total spin, multiplicity) pairs; a single ``(None, 1)`` for the full space."""
    if representation is Representation.FULL:
        return [(None, 1)]
    spins = [n_spins / 2 - t for t in range(n_spins // 2 + 1)]
    if representation is Representation.SYMMETRIC:
        spins = spins[:1]
    return [(s, spin_multiplicity(n_spins, s)) for s in spins]


def _heisenberg_spin_operators(
    spec: HeisenbergSpec, spin: float | None
) -> dict[str, ComplexMatrix]:
    if spin is None:
        return {
            f"J{a.value}": collective_spin(spec.n_spins, a).matrix for a in Axis
        }
    s = spin_matrices(spin)
    return {f"J{a.value}": (2.0 / spec.n_spins) * s[a] for a in Axis}


def heisenberg_matrix(
    spec: HeisenbergSpec, ops: Mapping[str, ComplexMatrix]
) -> ComplexMatrix:
    """-N g_x Jx^2 - N g_y Jy^2 - N h.J."""
    jx, jy, jz = ops["Jx"], ops["Jy"], ops["Jz"]
    h_x, h_y, h_z = spec.h
    return -spec.n_spins * (
        spec.g_x * jx @ jx + spec.g_y * jy @ jy + h_x * jx + h_y * jy + h_z * jz
    )


def heisenberg_system(spec: HeisenbergSpec) -> BlockedSystem:
    sectors = []
    for spin, multiplicity in spin_sectors(spec.n_spins, spec.representation):
        ops = _heisenberg_spin_operators(spec, spin)
        sectors.append(
            Sector(
                spin=spin,
                multiplicity=multiplicity,
                hamiltonian=HermitianOperator.from_matrix(heisenberg_matrix(spec, ops)),
                observables=ops,
            )
        )
    logger.debug(
        f"Heisenberg N={spec.n_spins} ({spec.representation.value}): "
        f"{len(sectors)} sector(s)"
    )
    return BlockedSystem(
        tuple(sectors), spec.representation is Representation.SYMMETRIC
    )


def build_heisenberg(spec: HeisenbergSpec) -> HermitianOperator | BlockedSystem:
    system = heisenberg_system(spec)
    if spec.representation is Representation.FULL:
        return system.as_operator()
    return system


def _dicke_operators(spec: DickeSpec, spin: float | None) -> dict[str, ComplexMatrix]:
    if spin is None:
        t_matter = 0.5 * spec.epsilon * site_sum(spec.n_spins, SIGMA_Z)
        a_matter = site_sum(spec.n_spins, SIGMA_PLUS) / spec.size
    else:
        t_matter = spec.epsilon * spin_matrices(spin)[Axis.Z]
        a_matter = spin_raising(spin) / spec.size
    matter_dim = t_matter.shape[0]
    check_capacity(matter_dim * spec.fock_cutoff, "Dicke sector")
    boson_identity = identity(spec.fock_cutoff)
    return {
        "T": kron(t_matter, boson_identity),
        "A": kron(a_matter, boson_identity),
        "b": kron(identity(matter_dim), boson_ladder(spec.fock_cutoff)),
    }


def dicke_matrix(spec: DickeSpec, ops: Mapping[str, ComplexMatrix]) -> ComplexMatrix:
    """T + omega b^dagger b + V^1/2 lambda (A^dagger b + A b^dagger)."""
    t, a, b = ops["T"], ops["A"], ops["b"]
    a_dag, b_dag = adjoint(a), adjoint(b)
    return (
        t
        + spec.omega * b_dag @ b
        + math.sqrt(spec.size) * spec.coupling * (a_dag @ b + a @ b_dag)
    )


def dicke_system(spec: DickeSpec) -> BlockedSystem:
    sectors = []
    for spin, multiplicity in spin_sectors(spec.n_spins, spec.representation):
        ops = _dicke_operators(spec, spin)
        sectors.append(
            Sector(
                spin=spin,
                multiplicity=multiplicity,
                hamiltonian=HermitianOperator.from_matrix(dicke_matrix(spec, ops)),
                observables=ops,
            )
        )
    if spec.representation is Representation.SYMMETRIC:
        logger.info(
            f"Dicke N={spec.n_spins}: symmetric sector only, results are restricted "
            f"to total spin {spec.n_spins / 2}"
        )
    return BlockedSystem(
        tuple(sectors), spec.representation is Representation.SYMMETRIC
    )


def build_dicke(spec: DickeSpec) -> HermitianOperator | BlockedSystem:
    system = dicke_system(spec)
    if spec.representation is Representation.FULL:
        return system.as_operator()
    return system


def model_system(
    spec: ModelSpec, nu: Sequence[complex] | None = None
) -> BlockedSystem:
    """The model in blocks, with sources nu applied when any is non-zero."""
    if isinstance(spec, HeisenbergSpec):
        system = heisenberg_system(spec)
    else:
        system = dicke_system(spec)
    if nu is not None and any(nu):
        system = _with_sources(system, spec, nu)
    return system


def _check_channels(spec: ModelSpec, values: Sequence[complex], what: str) -> None:
    if len(values) != spec.channel_count:
        raise ShapeError(
            f"{type(spec).__name__} has {spec.channel_count} channel(s), "
            f"got {len(values)} {what}"
        )


def heisenberg_channels(
    ops: Mapping[str, ComplexMatrix],
) -> tuple[ComplexMatrix, ...]:
    """Self-adjoint channels A_1 = J^x, A_2 = J^y."""
    return (ops["Jx"], ops["Jy"])


def source_term(
    spec: ModelSpec, ops: Mapping[str, ComplexMatrix], nu: Sequence[complex]
) -> ComplexMatrix:
    """-|L| sum(nu A^dagger + nu* A) for spin channels, -V^1/2 (nu* b + nu b^dagger)."""
    _check_channels(spec, nu, "source(s)")
    if isinstance(spec, HeisenbergSpec):
        term = np.zeros_like(ops["Jx"])
        for value, channel in zip(nu, heisenberg_channels(ops), strict=True):
            term -= spec.size * (value * adjoint(channel) + np.conj(value) * channel)
        return term
    b = ops["b"]
    (value,) = nu
    return -math.sqrt(spec.size) * (np.conj(value) * b + value * adjoint(b))


def _with_sources(
    system: BlockedSystem, spec: ModelSpec, nu: Sequence[complex]
) -> BlockedSystem:
    _check_channels(spec, nu, "source(s)")
    return system.map_hamiltonians(
        lambda s: s.hamiltonian.matrix + source_term(spec, s.observables, nu)
    )


def add_sources(
    h: HermitianOperator | BlockedSystem, spec: ModelSpec, nu: Sequence[complex]
) -> HermitianOperator | BlockedSystem:
    _check_channels(spec, nu, "source(s)")
    if isinstance(h, BlockedSystem):
        return _with_sources(h, spec, nu)
    ops = model_system(replace(spec, representation=Representation.FULL)).sectors[0]
    if ops.hamiltonian.dim != h.dim:
        raise ShapeError(f"Operator dimension {h.dim} does not match the model")
    return HermitianOperator.from_matrix(
        h.matrix + source_term(spec, ops.observables, nu)
    )


def approximating_matrix(
    spec: ModelSpec, ops: Mapping[str, ComplexMatrix], params: Sequence[complex]
) -> ComplexMatrix:
    _check_channels(spec, params, "parameter(s)")
    if isinstance(spec, HeisenbergSpec):
        jx, jy, jz = ops["Jx"], ops["Jy"], ops["Jz"]
        h_x, h_y, h_z = spec.h
        result = -spec.size * (h_x * jx + h_y * jy + h_z * jz)
        unit = identity(jx.shape[0])
        for a, g, channel in zip(
            params, spec.couplings, heisenberg_channels(ops), strict=True
        ):
            result -= (
                spec.size
                * g
                * (a * adjoint(channel) + np.conj(a) * channel - abs(a) ** 2 * unit)
            )
        return result
    t, a, b = ops["T"], ops["A"], ops["b"]
    (eta,) = params
    unit = identity(t.shape[0])
    strength = spec.size * spec.coupling**2 / spec.omega
    shifted = b + math.sqrt(spec.size) * spec.coupling / spec.omega * eta * unit
    return (
        spec.omega * adjoint(shifted) @ shifted
        + t
        - strength * (eta * adjoint(a) + np.conj(eta) * a - abs(eta) ** 2 * unit)
    )


def build_approximating(
    spec: ModelSpec, params: Sequence[complex]
) -> HermitianOperator | BlockedSystem:
    """H_0(a) = T - |L| sum g_s (a_s A_s^dagger + a_s* A_s - |a_s|^2).

    The Dicke variant replaces b by the shifted boson b + V^1/2 (lambda/omega) eta.
    """
    _check_channels(spec, params, "parameter(s)")
    system = model_system(spec).map_hamiltonians(
        lambda s: approximating_matrix(spec, s.observables, params)
    )
    if spec.representation is Representation.FULL:
        return system.as_operator()
    return system


def heisenberg_r1(
    spec: HeisenbergSpec, ops: Mapping[str, ComplexMatrix]
) -> ComplexMatrix:
    """[beta H, J^x] = 2i[g_y(JyJz + JzJy) + h_y Jz - h_z Jy]."""
    jy, jz = ops["Jy"], ops["Jz"]
    _, h_y, h_z = spec.h
    return 2j * (spec.g_y * (jy @ jz + jz @ jy) + h_y * jz - h_z * jy)


def heisenberg_r2(
    spec: HeisenbergSpec, ops: Mapping[str, ComplexMatrix]
) -> ComplexMatrix:
    """[beta H, R_1(J^x)] written out in collective operators."""
    jx, jy, jz = ops["Jx"], ops["Jy"], ops["Jz"]
    g_x, g_y = spec.g_x, spec.g_y
    h_x, h_y, h_z = spec.h

    def anti(p: ComplexMatrix, q: ComplexMatrix) -> ComplexMatrix:
        return p @ q + q @ p

    cubic_y = jy @ jy @ jx + 2 * jy @ jx @ jy + jx @ jy @ jy
    cubic_z = jz @ jz @ jx + 2 * jz @ jx @ jz + jx @ jz @ jz
    return (
        4 * g_y * (g_y - g_x) * cubic_y
        + 4 * g_x * g_y * cubic_z
        + 4 * (2 * g_y - g_x) * h_y * anti(jx, jy)
        - 4 * (g_x + g_y) * h_z * anti(jx, jz)
        + 8 * g_y * h_x * (jz @ jz - jy @ jy)
        + 4 * (h_y**2 + h_z**2) * jx
        - 4 * h_x * h_y * jy
        - 4 * h_x * h_z * jz
    )


def heisenberg_f2(spec: HeisenbergSpec, spectra: SectorSpectra) -> float:
    """(4/N){2 g_y [<Jy^2> - <Jz^2>] + h_y <Jy> + h_z <Jz>}."""
    _, h_y, h_z = spec.h
    value = spectra.expectation(
        lambda o: 2 * spec.g_y * (o["Jy"] @ o["Jy"] - o["Jz"] @ o["Jz"])
        + h_y * o["Jy"]
        + h_z * o["Jz"]
    )
    return 4.0 / spec.n_spins * value.real


def heisenberg_f3(spec: HeisenbergSpec, spectra: SectorSpectra) -> float:
    """8 <K^2> with R_1(J^x) = 2iK."""

    def k_squared(o: Mapping[str, ComplexMatrix]) -> ComplexMatrix:
        k = heisenberg_r1(spec, o) / 2j
        return k @ k

    return 8.0 * spectra.expectation(k_squared).real


def measure_commutator_sign(spec: DickeSpec) -> tuple[int, float]:
    """Sign s with [A^dagger, A] = s (2/(epsilon V^2)) T on the matter space.

    Returns the sign and the relative residual of the proportionality.
    """
    if spec.epsilon == 0:
        raise ValueError("The commutator relation needs a non-zero level splitting")
    spin = None if spec.representation is Representation.FULL else spec.n_spins / 2
    if spin is None:
        t = 0.5 * spec.epsilon * site_sum(spec.n_spins, SIGMA_Z)
        a = site_sum(spec.n_spins, SIGMA_PLUS) / spec.size
    else:
        t = spec.epsilon * spin_matrices(spin)[Axis.Z]
        a = spin_raising(spin) / spec.size
    measured = commutator(adjoint(a), a)
    reference = 2.0 / (spec.epsilon * spec.size**2) * t
    ratio = np.vdot(reference, measured).real / np.vdot(reference, reference).real
    sign = 1 if ratio >= 0 else -1
    residual = float(
        np.max(np.abs(measured - sign * reference)) / np.max(np.abs(reference))
    )
    logger.debug(f"Measured [A^dagger, A] sign {sign:+d}, residual {residual:.2e}")
    return sign, residual


def dicke_r1(spec: DickeSpec, ops: Mapping[str, ComplexMatrix]) -> ComplexMatrix:
    """[H, V^-1/2 b] = -omega V^-1/2 b - lambda A, away from the Fock cutoff."""
    return -spec.omega * ops["b"] / math.sqrt(spec.size) - spec.coupling * ops["A"]


def dicke_r2(
    spec: DickeSpec, ops: Mapping[str, ComplexMatrix], sign: int
) -> ComplexMatrix:
    """omega^2 V^-1/2 b + lambda(omega - epsilon) A - s 2 lambda^2/(eps V^3/2) b T."""
    v, lam = spec.size, spec.coupling
    return (
        spec.omega**2 * ops["b"] / math.sqrt(v)
        + lam * (spec.omega - spec.epsilon) * ops["A"]
        - sign * 2 * lam**2 / (spec.epsilon * v**1.5) * ops["b"] @ ops["T"]
    )


def dicke_f2(spec: DickeSpec) -> float:
    return spec.beta * spec.omega / spec.size


def dicke_f3(spec: DickeSpec, spectra: SectorSpectra) -> float:
    """beta^2 [omega^2/V <b^dag b + b b^dag> + 2 omega lambda V^-1/2 <b^dag A + b A^dag>
    + lambda^2 <A^dag A + A A^dag>]."""
    v, lam, omega = spec.size, spec.coupling, spec.omega

    def bracket(o: Mapping[str, ComplexMatrix]) -> ComplexMatrix:
        b, a = o["b"], o["A"]
        b_dag, a_dag = adjoint(b), adjoint(a)
        return (
            omega**2 / v * (b_dag @ b + b @ b_dag)
            + 2 * omega * lam / math.sqrt(v) * (b_dag @ a + b @ a_dag)
            + lam**2 * (a_dag @ a + a @ a_dag)
        )

    return spec.beta**2 * spectra.expectation(bracket).real


def dicke_f4(spec: DickeSpec, spectra: SectorSpectra, sign: int) -> float:
    """(beta omega)^3/V [1 - s 2 lambda^2 (2 omega - eps)/(eps omega^3 V) <T>
    + s 2 lambda^3/(omega^3 V^1/2) <b^dag A>]."""
    v, lam, omega, eps = spec.size, spec.coupling, spec.omega, spec.epsilon
    mean_t = spectra.expectation(lambda o: o["T"]).real
    mean_ba = spectra.expectation(lambda o: adjoint(o["b"]) @ o["A"]).real
    correction = (
        1
        - sign * 2 * lam**2 * (2 * omega - eps) / (eps * omega**3 * v) * mean_t
        + sign * 2 * lam**3 / (omega**3 * math.sqrt(v)) * mean_ba
    )
    return (spec.beta * omega) ** 3 / v * correction


def below_cutoff_projector(
    spec: DickeSpec, matter_dim: int, margin: int = 1
) -> ComplexMatrix:
    """Projector onto boson levels 0 .. cutoff - 1 - margin on a matter x Fock block.

    With margin n, R_n(b) times this projector matches the untruncated link.
    """
    if not 1 <= margin < spec.fock_cutoff:
        raise ValueError(f"margin must lie in [1, {spec.fock_cutoff}), got {margin}")
    levels = np.ones(spec.fock_cutoff)
    levels[-margin:] = 0.0
    return kron(identity(matter_dim), np.diag(levels))


def converge_fock_cutoff(
    spec: DickeSpec,
    evaluate: Callable[[DickeSpec], Mapping[str, complex]],
    cutoff_max: int = 128,
) -> tuple[DickeSpec, dict[str, complex]]:
    """Escalate the Fock cutoff until ``evaluate`` is stable.

    Quantities are compared at cutoffs d and d + 4; d doubles until every one
    moves by less than 1e-8 relative, and never passes ``cutoff_max``.
    """
    cutoff = spec.fock_cutoff
    while True:
        try:
            coarse_spec = spec.with_cutoff(cutoff)
            fine_spec = spec.with_cutoff(cutoff + CUTOFF_STEP)
        except CapacityError as e:
            raise VerificationError(f"Fock cutoff escalation stopped: {e}") from e
        coarse = evaluate(coarse_spec)
        fine = dict(evaluate(fine_spec))
        moved = {
            key: abs(fine[key] - coarse[key]) / max(1.0, abs(fine[key]))
            for key in fine
        }
        worst = max(moved, key=moved.__getitem__, default=None)
        if worst is None or moved[worst] < CUTOFF_TOLERANCE:
            logger.info(
                f"Fock cutoff converged at {fine_spec.fock_cutoff} "
                f"(V={spec.size:g}, lambda={spec.coupling:g})"
            )
            return fine_spec, fine
        if cutoff >= cutoff_max:
            raise VerificationError(
                f"Fock cutoff did not converge by {cutoff_max}: "
                f"'{worst}' still moves by {moved[worst]:.3e}"
            )
        logger.info(
            f"Fock cutoff {cutoff} not converged ('{worst}' moves by "
            f"{moved[worst]:.2e}), escalating"
        )
        cutoff = min(2 * cutoff, cutoff_max)


@dataclass(frozen=True)
class RandomSpec:
    """Random Hermitian H and random observable J of dimension ``dim``."""

    dim: int
    seed: int = 0
    beta: float = 1.0

    def __post_init__(self):
        if self.dim < 2 or self.dim > MAX_HILBERT_DIMENSION:
            raise ConfigurationError(f"Random model dimension {self.dim} out of range")

    @property
    def size(self) -> float:
        return float(self.dim)


def random_hermitian(dim: int, rng: np.random.Generator) -> ComplexMatrix:
    """(X + X^dagger) / (2 sqrt(dim)) with X complex Gaussian, spectrum O(1)."""
    x = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (x + x.conj().T) / (2.0 * math.sqrt(dim))


def random_operator(dim: int, rng: np.random.Generator) -> ComplexMatrix:
    x = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return x / math.sqrt(dim)


def random_model(spec: RandomSpec) -> tuple[HermitianOperator, ComplexMatrix]:
    rng = np.random.default_rng([spec.seed, spec.dim])
    h = HermitianOperator.from_matrix(random_hermitian(spec.dim, rng))
    return h, as_matrix(random_hermitian(spec.dim, rng))
