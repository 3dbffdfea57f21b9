import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bdlab.duhamel import (
    MAX_FUNCTIONAL_ORDER,
    GapForm,
    Route,
    bd_inner,
    bd_inner_cross_checked,
    bd_inner_quadrature,
    convexity_gap,
    duhamel_kernel,
    fluctuation_operator,
    functional_f,
    relative_exponential_decay,
    sym_fluctuation,
    x_coth_x,
)
from bdlab.errors import NumericError
from bdlab.models import random_hermitian, random_operator
from bdlab.operators import SIGMA_X, SIGMA_Z, HermitianOperator, adjoint, commutator
from bdlab.spectral import decompose, gibbs_average


def test_two_level_inner_product(two_level):
    assert bd_inner(two_level, SIGMA_X, SIGMA_X).real == pytest.approx(
        math.tanh(1.0), abs=1e-12
    )


@pytest.mark.parametrize(
    "k, expected",
    [
        (0, math.tanh(1.0)),
        (1, 2.0),
        (2, 4 * math.tanh(1.0)),
        (3, 8.0),
        (4, 16 * math.tanh(1.0)),
    ],
)
def test_two_level_functionals(two_level, k: int, expected: float):
    value = functional_f(two_level, SIGMA_X, k)
    assert value.k == k
    assert value.route is Route.SPECTRAL
    assert value.value == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("k", [-1, MAX_FUNCTIONAL_ORDER + 1])
def test_functional_order_range(two_level, k: int):
    with pytest.raises(ValueError):
        functional_f(two_level, SIGMA_X, k)


def test_functional_overflow_guard():
    sys = decompose(HermitianOperator.from_matrix(1e30 * SIGMA_Z), 1.0)
    with pytest.raises(NumericError):
        functional_f(sys, SIGMA_X, MAX_FUNCTIONAL_ORDER)


def test_kernel_symmetric_and_continuous():
    assert float(duhamel_kernel(0.3, 1.1, 2.0)) == pytest.approx(
        float(duhamel_kernel(1.1, 0.3, 2.0))
    )
    assert float(duhamel_kernel(0.5, 0.5, 2.0)) == pytest.approx(math.exp(-1.0))
    near = float(duhamel_kernel(0.5, 0.5 + 1e-7, 2.0))
    assert near == pytest.approx(math.exp(-1.0), rel=1e-6)


def test_relative_decay_limits():
    values = relative_exponential_decay([0.0, 1e-9, 1.0, 800.0])
    assert values[0] == 1.0
    assert values[1] == pytest.approx(1.0)
    assert values[2] == pytest.approx(1 - math.exp(-1.0))
    assert values[3] == pytest.approx(1 / 800)


def test_x_coth_x_bounds():
    x = np.logspace(-8, 3, 200)
    values = x_coth_x(x)
    assert x_coth_x(0.0) == 1.0
    assert np.all(values >= 1.0)
    assert np.all(values <= 1.0 + x**2 / 3 + 1e-12)
    assert np.all(values <= 1.0 + x + 1e-12)


@pytest.mark.parametrize("beta", [0.1, 1.0, 10.0])
def test_quadrature_matches_spectral(
    random_hermitian_factory, random_operator_factory, beta: float
):
    h = random_hermitian_factory(8)
    a, b = random_operator_factory(8), random_operator_factory(8)
    spectral = bd_inner(decompose(h, beta), a, b)
    assert bd_inner_quadrature(h, beta, a, b) == pytest.approx(spectral, abs=1e-8)


def test_cross_checked_routes(random_hermitian_factory, random_operator_factory):
    h = random_hermitian_factory(4)
    a = random_operator_factory(4)
    spectral, quadrature, nodes = bd_inner_cross_checked(h, 5.0, a, a)
    assert abs(spectral - quadrature) <= 1e-8
    assert nodes >= 32


def test_quadrature_needs_nodes(random_hermitian_factory):
    h = random_hermitian_factory(2)
    with pytest.raises(ValueError):
        bd_inner_quadrature(h, 1.0, SIGMA_X, SIGMA_X, nodes=4)


def test_degenerate_spectrum_reduces_to_average():
    h = HermitianOperator.from_matrix(np.diag([0.0, 0.0, 2.0]))
    sys = decompose(h, 1.0)
    a = np.zeros((3, 3), dtype=complex)
    a[0, 1] = 1.0
    assert bd_inner(sys, a, a).real == pytest.approx(
        gibbs_average(sys, adjoint(a) @ a).real
    )


@settings(max_examples=25, deadline=None)
@given(
    seed=st.integers(min_value=0, max_value=2**32 - 1),
    beta=st.sampled_from([0.3, 1.0, 4.0]),
)
def test_inner_product_properties(seed: int, beta: float):
    rng = np.random.default_rng(seed)
    h = HermitianOperator.from_matrix(random_hermitian(6, rng))
    a, b = random_operator(6, rng), random_operator(6, rng)
    sys = decompose(h, beta)

    ab = bd_inner(sys, a, b)
    assert ab == pytest.approx(np.conj(bd_inner(sys, b, a)), abs=1e-10)
    assert ab == pytest.approx(bd_inner(sys, adjoint(b), adjoint(a)), abs=1e-10)
    assert bd_inner(sys, a, a).real >= -1e-12
    assert abs(bd_inner(sys, a, a).imag) <= 1e-12

    lhs = beta * bd_inner(sys, a, commutator(h.matrix, b))
    rhs = gibbs_average(sys, commutator(adjoint(a), b))
    assert lhs == pytest.approx(rhs, abs=1e-10)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**32 - 1))
def test_convexity_gap_forms(seed: int):
    rng = np.random.default_rng(seed)
    sys = decompose(HermitianOperator.from_matrix(random_hermitian(6, rng)), 2.0)
    a = random_operator(6, rng)
    direct = convexity_gap(sys, a, GapForm.DIRECT)
    assert direct >= -1e-12
    assert convexity_gap(sys, a, GapForm.COTH) == pytest.approx(direct, abs=1e-10)
    assert convexity_gap(sys, a, GapForm.MEAN) == pytest.approx(direct, abs=1e-10)


def test_fluctuation_exceeds_inner_product(
    random_system_factory, random_operator_factory
):
    sys = random_system_factory(5, 1.5)
    a = random_operator_factory(5)
    delta = fluctuation_operator(sys, a)
    assert abs(gibbs_average(sys, delta)) <= 1e-12
    assert sym_fluctuation(sys, a) >= bd_inner(sys, delta, delta).real - 1e-12


def test_commuting_pair_has_no_gap():
    sys = decompose(HermitianOperator.from_matrix(np.diag([0.0, 1.0, 3.0])), 1.0)
    a = np.diag([1.0, -2.0, 0.5])
    assert convexity_gap(sys, a) == pytest.approx(0.0, abs=1e-14)
