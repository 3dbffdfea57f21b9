import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bdlab.errors import ShapeError
from bdlab.models import random_hermitian, random_operator
from bdlab.operators import SIGMA_Z, HermitianOperator
from bdlab.spectral import (
    check_beta,
    decompose,
    free_energy_density,
    gibbs_average,
    to_eigenbasis,
)


@pytest.mark.parametrize("beta", [0.0, -1.0, math.inf, math.nan])
def test_check_beta_rejects(beta: float):
    with pytest.raises(ValueError):
        check_beta(beta)


def test_two_level_weights(two_level):
    assert two_level.energies == pytest.approx([-1.0, 1.0])
    assert two_level.weights == pytest.approx(
        [1 / (1 + math.exp(-2)), math.exp(-2) / (1 + math.exp(-2))]
    )
    assert two_level.log_partition == pytest.approx(math.log(2 * math.cosh(1.0)))
    assert gibbs_average(two_level, SIGMA_Z).real == pytest.approx(-math.tanh(1.0))
    assert free_energy_density(two_level, 1.0) == pytest.approx(
        -math.log(2 * math.cosh(1.0))
    )


def test_large_beta_does_not_overflow():
    h = HermitianOperator.from_matrix(1e3 * SIGMA_Z)
    sys = decompose(h, 1e3)
    assert np.all(np.isfinite(sys.weights))
    assert sys.weights.sum() == pytest.approx(1.0)
    assert sys.log_partition == pytest.approx(1e6)


def test_operand_dimension_checked(two_level):
    with pytest.raises(ShapeError):
        gibbs_average(two_level, np.eye(3))


def test_free_energy_rejects_bad_size(two_level):
    with pytest.raises(ValueError):
        free_energy_density(two_level, 0.0)


def test_eigenbasis_diagonalizes(random_system_factory):
    sys = random_system_factory(6, 1.0)
    h = sys.eigenbasis @ np.diag(sys.energies) @ sys.eigenbasis.conj().T
    elements = to_eigenbasis(sys, h).elements
    assert np.allclose(elements, np.diag(sys.energies))


def test_degenerate_pairs_flagged():
    sys = decompose(HermitianOperator.from_matrix(np.diag([0.0, 0.0, 1.0])), 1.0)
    assert sys.degenerate_pairs[0, 1]
    assert not sys.degenerate_pairs[0, 2]


@settings(max_examples=25, deadline=None)
@given(
    seed=st.integers(min_value=0, max_value=2**32 - 1),
    beta=st.floats(min_value=0.05, max_value=20.0),
)
def test_gibbs_average_matches_trace(seed: int, beta: float):
    rng = np.random.default_rng(seed)
    h = HermitianOperator.from_matrix(random_hermitian(5, rng))
    sys = decompose(h, beta)
    rho = sys.eigenbasis @ np.diag(sys.weights) @ sys.eigenbasis.conj().T
    a = random_operator(5, rng)
    assert gibbs_average(sys, a) == pytest.approx(np.trace(rho @ a), abs=1e-12)
    assert sys.weights.sum() == pytest.approx(1.0)


def test_high_temperature_flat_trace(rng):
    h = HermitianOperator.from_matrix(random_hermitian(5, rng))
    a = random_operator(5, rng)
    sys = decompose(h, 1e-6)
    assert sys.weights == pytest.approx(np.full(5, 0.2), rel=1e-4)
    assert gibbs_average(sys, a) == pytest.approx(np.trace(a) / 5, rel=1e-4, abs=1e-5)


@pytest.mark.parametrize("shift", [-3.0, 0.5, 40.0])
def test_free_energy_shift(rng, shift: float):
    matrix = random_hermitian(6, rng)
    base = decompose(HermitianOperator.from_matrix(matrix), 2.0)
    moved = decompose(HermitianOperator.from_matrix(matrix + shift * np.eye(6)), 2.0)
    expected = free_energy_density(base, 3.0) + shift / 3.0
    assert free_energy_density(moved, 3.0) == pytest.approx(expected, rel=1e-12)
