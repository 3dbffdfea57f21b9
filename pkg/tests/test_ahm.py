import math
from dataclasses import replace

import numpy as np
import pytest

from bdlab.ahm import (
    SeedGrid,
    converge_free_energy_cutoff,
    dicke_gap_bounds,
    dicke_identity_suite,
    dicke_source_mean,
    free_boson_density,
    free_energy_gap,
    heisenberg_upper_bound,
    minimize_gap,
    model_free_energy,
    operator_susceptibility,
    schwarz_bound_check,
    source_response,
    susceptibility_check,
)
from bdlab.errors import NumericError, VerificationError
from bdlab.models import DickeSpec, HeisenbergSpec
from bdlab.operators import SIGMA_X, SIGMA_Z, HermitianOperator


def test_seed_grid():
    points = SeedGrid().points()
    assert len(points) == 17
    assert points[0] == -2.0
    assert points[-1] == pytest.approx(2.0)
    with pytest.raises(ValueError):
        SeedGrid(step=0.0)


def test_free_boson_density():
    spec = DickeSpec(n_spins=2, omega=2.0, beta=0.5)
    assert free_boson_density(spec) == pytest.approx(
        math.log(1 - math.exp(-1.0)) / (0.5 * 2)
    )


def test_heisenberg_gap_sandwich(heisenberg_spec):
    result = minimize_gap(heisenberg_spec)
    assert result.converged
    assert len(result.params_opt) == 2
    assert result.gap >= -1e-9
    assert result.gap <= heisenberg_upper_bound(heisenberg_spec) + 1e-9
    assert result.gap == pytest.approx(
        free_energy_gap(heisenberg_spec, result.params_opt), abs=1e-12
    )


def test_heisenberg_gap_without_coupling():
    spec = HeisenbergSpec(n_spins=4, g_x=0.0, g_y=0.0)
    assert free_energy_gap(spec, (0, 0)) == pytest.approx(0.0, abs=1e-10)
    assert minimize_gap(spec).gap == pytest.approx(0.0, abs=1e-10)


@pytest.mark.parametrize("couplings", [(0.3, 0.2), (1.0, 0.5)])
def test_heisenberg_gap_decreases_with_size(couplings: tuple[float, float]):
    g_x, g_y = couplings
    gaps = [
        minimize_gap(HeisenbergSpec(n_spins=n, g_x=g_x, g_y=g_y)).gap
        for n in (2, 4, 8)
    ]
    assert gaps[0] >= gaps[1] - 1e-10
    assert gaps[1] >= gaps[2] - 1e-10


def test_gap_minimum_is_local(heisenberg_spec, rng):
    result = minimize_gap(heisenberg_spec)
    optimum = np.array(result.params_opt)
    for _ in range(8):
        direction = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        moved = optimum + 1e-3 * direction / np.linalg.norm(direction)
        assert free_energy_gap(heisenberg_spec, tuple(moved)) >= result.gap - 1e-8


def test_symmetric_phase_optimum_at_origin():
    spec = HeisenbergSpec(n_spins=4, g_x=0.2, g_y=0.1, h=(0.0, 0.0, 0.0))
    result = minimize_gap(spec)
    assert np.max(np.abs(result.params_opt)) <= 1e-4
    assert result.gap >= -1e-9


def test_heisenberg_susceptibility(heisenberg_spec):
    for channel in (0, 1):
        check = susceptibility_check(heisenberg_spec, channel)
        assert check.second_derivative_fd < 0
        assert check.relative_residual <= 1e-4


def test_susceptibility_noise_floor(heisenberg_spec):
    with pytest.raises(NumericError):
        susceptibility_check(heisenberg_spec, 0, step=1e-7)
    with pytest.raises(ValueError):
        susceptibility_check(heisenberg_spec, 2)


def test_two_level_susceptibility():
    h = HermitianOperator.from_matrix(SIGMA_Z)
    check = operator_susceptibility(h, 1.0, SIGMA_X, 1.0)
    assert check.second_derivative_fd == pytest.approx(-math.tanh(1.0), rel=1e-6)
    assert check.relative_residual <= 1e-6


@pytest.mark.parametrize("nu", [(0.0, 0.0), (0.05, -0.02j)])
def test_heisenberg_source_response(heisenberg_spec, nu):
    derivative, expected = source_response(heisenberg_spec, 0, nu)
    assert derivative == pytest.approx(expected, abs=1e-6)


def test_sources_lower_free_energy(heisenberg_spec):
    assert model_free_energy(heisenberg_spec, (0.1, 0.0)) < model_free_energy(
        heisenberg_spec
    )


def test_dicke_source_mean():
    spec = DickeSpec(n_spins=2, coupling=0.3, fock_cutoff=32)
    b_mean, expected = dicke_source_mean(spec, 0.05)
    assert b_mean == pytest.approx(expected, abs=1e-8)
    derivative, response = source_response(spec, 0, (0.05,))
    assert derivative == pytest.approx(response, abs=1e-6)


@pytest.mark.parametrize("coupling", [0.2, 1.0])
def test_dicke_identity_suite(dicke_spec, coupling: float):
    report = dicke_identity_suite(replace(dicke_spec, coupling=coupling), 128)
    assert report.passed, [c.name for c in report.identities if not c.passed]
    report.require()
    assert report.commutator_sign == -1
    assert report.spec.fock_cutoff > dicke_spec.fock_cutoff
    assert abs(report.quantities["b_mean"]) <= 1e-10
    second = next(c for c in report.identities if c.name == "R2_closed_form")
    assert second.passed
    assert second.residual <= 1e-10


def test_dicke_identity_suite_cutoff_failure():
    spec = DickeSpec(n_spins=2, coupling=10.0, fock_cutoff=2)
    with pytest.raises(VerificationError):
        dicke_identity_suite(spec, cutoff_max=8)


def test_dicke_schwarz_bound(dicke_spec):
    report = schwarz_bound_check(dicke_spec)
    assert report.passed
    assert report.n_b_density >= 0.0
    assert report.volume == dicke_spec.size
    assert report.slack > 0


def test_dicke_schwarz_lhs_bounded():
    reports = [
        schwarz_bound_check(DickeSpec(n_spins=n, coupling=0.3, fock_cutoff=12))
        for n in (2, 4, 6)
    ]
    assert all(r.slack > 0 for r in reports)
    assert max(r.lhs for r in reports) <= 2.0 * reports[0].lhs


def test_free_energy_cutoff_converges(dicke_spec):
    small = replace(dicke_spec, fock_cutoff=4)
    converged = converge_free_energy_cutoff(small)
    assert converged.fock_cutoff > 4
    wider = converged.with_cutoff(converged.fock_cutoff + 8)
    assert model_free_energy(converged) == pytest.approx(
        model_free_energy(wider), rel=1e-7
    )


def test_dicke_gap_chain():
    spec = DickeSpec(n_spins=4, coupling=0.3, fock_cutoff=32)
    bounds = dicke_gap_bounds(spec)
    assert bounds.passed, [c.name for c in bounds.chain if not c.passed]
    assert bounds.gamma == pytest.approx(1 / 3)
    assert bounds.free_boson == pytest.approx(free_boson_density(spec))
    assert np.isfinite(bounds.majorant)
