import math
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest
import yaml

from bdlab.chains import functional_table
from bdlab.config import LabConfig, ModelKind
from bdlab.errors import VerificationError
from bdlab.harness import (
    CSV_HEADER,
    Check,
    Measurement,
    ScalingSeries,
    VerifyReport,
    bound_check,
    chain_checks,
    close_check,
    condition_checks,
    dicke_f2_series,
    duhamel_checks,
    emit_csv,
    exponent_check,
    fit_scaling,
    heisenberg_scaling_series,
    inequality_checks,
    read_csv,
    run_sweep,
    run_verify,
    sweep_orders,
    table_measurements,
    worst_check,
)
from bdlab.models import Representation
from bdlab.operators import SIGMA_X


def test_fit_recovers_power_law():
    points = [(n, 3.0 * n**-0.5) for n in (2, 4, 8, 16, 32)]
    series = fit_scaling("f_even", points, n=1, k=2)
    assert series.fitted
    assert series.exponent == pytest.approx(-0.5)
    assert math.exp(series.intercept) == pytest.approx(3.0)
    assert series.fit_r2 == pytest.approx(1.0)


def test_fit_needs_points_above_floor():
    points = [(2, 1.0), (4, 0.5), (8, 1e-16), (16, 0.0), (32, 0.1)]
    series = fit_scaling("delta", points)
    assert not series.fitted
    assert series.exponent is None
    assert len(series.points) == 5


def test_sweep_orders_cover_conditions():
    orders = sweep_orders(2, 3)
    assert set(range(6)) <= set(orders)
    assert orders == sorted(orders)
    assert max(orders) <= 12


def test_table_measurements(two_level):
    table = functional_table(two_level, SIGMA_X, sweep_orders(1, 2))
    rows = table_measurements("random", 2.0, 1.0, table, 0j, 1, 2)
    quantities = {r.quantity for r in rows}
    assert {"j_mean_abs", "f_even", "f_odd", "delta"} <= quantities
    assert "slack_upper:harris_gen" in quantities
    f_odd = {r.n: r.value for r in rows if r.quantity == "f_odd"}
    assert f_odd == pytest.approx({0: 2.0, 1: 8.0})
    delta = next(r for r in rows if r.quantity == "delta" and r.n == 0)
    assert delta.value == pytest.approx(1.0 - math.tanh(1.0))


def test_csv_layout(tmp_path: Path):
    rows = [
        Measurement("heisenberg", 4.0, 1.0, "f_odd", 1, 3, 0.1),
        Measurement("heisenberg", 6.0, 1.0, "f_odd", 1, 3, 1 / 3),
    ]
    path = tmp_path / "out" / "sweep.csv"
    emit_csv(rows, path)
    lines = path.read_bytes().decode().split("\n")
    assert lines[0] == ",".join(CSV_HEADER)
    assert lines[1] == "heisenberg,4,1,f_odd,1,3,0.10000000000000001"
    assert b"\r" not in path.read_bytes()
    assert read_csv(path) == rows


def test_check_helpers():
    assert close_check("x", 1.0 + 1e-9, 1.0, 1e-8).passed
    assert not close_check("x", 1.1, 1.0, 1e-8).passed
    assert close_check("scaled", 1000.0 + 1e-6, 1000.0, 1e-8).passed
    assert bound_check("b", -1e-13, 1e-12).passed
    assert not bound_check("b", -1e-3, 1e-12).passed
    check = worst_check("w", [1e-12, 3e-11], 1e-10)
    assert check.passed
    assert check.value == pytest.approx(3e-11)
    assert worst_check("empty", [], 0.0).passed


def test_verify_report_yaml():
    report = VerifyReport(
        [Check("good", 0.0, 1e-10, True), Check("bad", 1.0, 1e-10, False, "why")]
    )
    assert not report.passed
    assert [c.name for c in report.failures] == ["bad"]
    data = yaml.safe_load(report.to_yaml())
    assert data["passed"] is False
    assert [c["name"] for c in data["checks"]] == ["good", "bad"]
    assert data["checks"][1]["detail"] == "why"
    assert data["symmetric_only"] is False
    flagged = yaml.safe_load(VerifyReport(symmetric_only=True).to_yaml())
    assert flagged["symmetric_only"] is True


def test_duhamel_checks_pass():
    checks = duhamel_checks(np.random.default_rng(0))
    assert all(c.passed for c in checks), [c.name for c in checks if not c.passed]
    assert "two_level_F3" in {c.name for c in checks}


def test_chain_checks_pass(small_config):
    checks = chain_checks(np.random.default_rng(1), small_config)
    assert all(c.passed for c in checks), [c.name for c in checks if not c.passed]


def test_inequality_checks_pass(small_config):
    checks = inequality_checks(np.random.default_rng(2), small_config)
    assert all(c.passed for c in checks), [c.name for c in checks if not c.passed]


def test_random_sweep(tmp_path: Path, small_config: LabConfig):
    config = replace(small_config, model=ModelKind.RANDOM, threads=2)
    output = tmp_path / "random.csv"
    result = run_sweep(config, output)
    assert result.failed_sizes == []
    sizes = [m.size for m in result.measurements]
    assert sizes == sorted(sizes)
    assert set(sizes) == {2.0, 4.0}
    assert read_csv(output) == result.measurements
    assert all(not s.fitted for s in result.series)


def test_heisenberg_sweep(small_config: LabConfig):
    result = run_sweep(small_config)
    gaps = [m for m in result.measurements if m.quantity == "ahm_gap"]
    bounds = [m for m in result.measurements if m.quantity == "ahm_upper_bound"]
    assert len(gaps) == len(bounds) == 2
    for gap, bound in zip(gaps, bounds, strict=True):
        assert -1e-9 <= gap.value <= bound.value + 1e-9


def test_sweep_fails_when_most_sizes_fail(small_config: LabConfig):
    config = replace(
        small_config,
        model=ModelKind.DICKE,
        coupling=10.0,
        fock_cutoff=2,
        fock_cutoff_max=8,
    )
    with pytest.raises(VerificationError):
        run_sweep(config)


def test_exponent_check():
    sizes = (4, 6, 8, 10)
    decaying = fit_scaling("f_even", [(n, 2.0 / n) for n in sizes], 1, 2)
    assert exponent_check("F2", decaying, -0.7, upper=True).passed
    assert not exponent_check("F2", decaying, -1.3, upper=True).passed
    assert exponent_check("F2", decaying, -1.3, upper=False).value == pytest.approx(0.3)
    vanished = fit_scaling("delta", [(n, 0.0) for n in sizes], 1, 0)
    assert exponent_check("delta", vanished, -0.7, upper=True).passed
    assert not exponent_check("delta", vanished, -0.3, upper=False).passed
    assert not exponent_check("absent", None, -0.7, upper=True).passed


def _series(quantity: str, n: int, k: int, law) -> ScalingSeries:
    return fit_scaling(quantity, [(s, law(s)) for s in (4, 6, 8, 10, 12)], n, k)


def test_condition_checks():
    series = [
        _series("f_even", 1, 2, lambda s: 3.0 / s),
        _series("delta", 0, 0, lambda s: 0.1 * s**-1.5),
        _series("delta", 1, 0, lambda s: 0.2 / s),
        _series("f_odd", 0, 1, lambda s: 0.8),
        _series("f_odd", 1, 3, lambda s: s**-1.2),
    ]
    checks = condition_checks("toy", series, 1)
    assert all(c.passed for c in checks), [c.name for c in checks if not c.passed]
    assert {c.name for c in checks} == {
        "toy_F2_exponent",
        "toy_F2_exponent_floor",
        "toy_delta0_exponent",
        "toy_delta1_exponent",
        "toy_F1_exponent",
        "toy_F3_exponent",
    }

    series[3] = _series("f_odd", 0, 1, lambda s: 1.0 / s)
    failed = [c.name for c in condition_checks("toy", series, 1) if not c.passed]
    assert failed == ["toy_F1_exponent"]


def test_heisenberg_scaling_conditions(default_config: LabConfig):
    series = heisenberg_scaling_series(default_config)
    checks = condition_checks("heisenberg", series, 2)
    assert all(c.passed for c in checks), [c.detail for c in checks if not c.passed]
    f2 = next(s for s in series if (s.quantity, s.n) == ("f_even", 1))
    assert -1.3 <= f2.exponent <= -0.7


def test_dicke_f2_exponent(default_config: LabConfig):
    series = dicke_f2_series(default_config)
    assert series.fitted
    assert series.exponent == pytest.approx(-1.0, abs=1e-6)
    for volume, value in series.points:
        expected = default_config.beta * default_config.omega / volume
        assert value == pytest.approx(expected)


def test_symmetric_sweep_is_labelled(small_config: LabConfig):
    config = replace(small_config, representation=Representation.SYMMETRIC)
    result = run_sweep(config)
    assert {m.model for m in result.measurements} == {"heisenberg:symmetric"}
    assert {m.model for m in run_sweep(small_config).measurements} == {"heisenberg"}


@pytest.mark.slow
def test_run_verify(small_config: LabConfig):
    report = run_verify(small_config)
    assert report.passed, [c.name for c in report.failures]
    names = {c.name for c in report.checks}
    assert "dicke_gap_decay" in names
    assert "ahm_gap_zero_coupling" in names
    assert "dicke_F2_exponent" in names
    assert "heisenberg_delta1_exponent" in names
    assert not report.symmetric_only
    assert run_verify(small_config).to_yaml() == report.to_yaml()
