from collections.abc import Callable

import numpy as np
import pytest

from bdlab.config import LabConfig
from bdlab.models import DickeSpec, HeisenbergSpec, random_hermitian, random_operator
from bdlab.operators import SIGMA_Z, ComplexMatrix, HermitianOperator
from bdlab.spectral import SpectralSystem, decompose


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def random_hermitian_factory(
    rng: np.random.Generator,
) -> Callable[[int], HermitianOperator]:
    def _hermitian_factory(dim: int) -> HermitianOperator:
        return HermitianOperator.from_matrix(random_hermitian(dim, rng))

    return _hermitian_factory


@pytest.fixture
def random_operator_factory(
    rng: np.random.Generator,
) -> Callable[[int], ComplexMatrix]:
    def _operator_factory(dim: int) -> ComplexMatrix:
        return random_operator(dim, rng)

    return _operator_factory


@pytest.fixture
def random_system_factory(
    random_hermitian_factory,
) -> Callable[[int, float], SpectralSystem]:
    def _system_factory(dim: int, beta: float = 1.0) -> SpectralSystem:
        return decompose(random_hermitian_factory(dim), beta)

    return _system_factory


@pytest.fixture
def two_level() -> SpectralSystem:
    return decompose(HermitianOperator.from_matrix(SIGMA_Z), 1.0)


@pytest.fixture
def heisenberg_spec() -> HeisenbergSpec:
    return HeisenbergSpec(n_spins=4)


@pytest.fixture
def dicke_spec() -> DickeSpec:
    return DickeSpec(n_spins=2, coupling=0.3, fock_cutoff=12)


@pytest.fixture
def default_config() -> LabConfig:
    return LabConfig()


@pytest.fixture
def small_config() -> LabConfig:
    return LabConfig(n_spins_min=2, n_spins_max=4, n_spins_step=2, n_max=1, k_max=2)
