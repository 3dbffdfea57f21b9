import subprocess
import sys
from pathlib import Path

import pytest
import yaml

from bdlab import __version__
from bdlab.__main__ import main


def test_cli_version():
    cmd = [sys.executable, "-m", "bdlab", "--version"]
    assert subprocess.check_output(cmd).decode().strip() == __version__


@pytest.mark.parametrize(
    "args",
    [
        [],
        ["calibrate"],
        ["sweep", "--threads"],
    ],
)
def test_cli_bad_args(args: list[str]):
    cmd = [sys.executable, "-m", "bdlab"] + args
    with pytest.raises(subprocess.CalledProcessError):
        subprocess.check_output(cmd, stderr=subprocess.STDOUT)


@pytest.mark.parametrize(
    "args",
    [
        ["sweep", "--set", "no_such_key=1"],
        ["sweep", "--set", "beta"],
        ["sweep", "--config", "absent.yml"],
        ["ahm-gap", "--set", "model=random"],
        ["ahm-gap", "--set", "n_spins_min=5", "--set", "n_spins_max=3"],
    ],
)
def test_cli_configuration_errors(args: list[str]):
    assert main(args) == 2


def test_cli_random_sweep(tmp_path: Path):
    output = tmp_path / "sweep.csv"
    args = ["sweep", "--set", "model=random", "--set", "n_spins_max=4"]
    assert main(args + ["--seed", "7", "--threads", "2", "--out", str(output)]) == 0
    assert output.read_text().startswith("model,size,beta,quantity,n,k,value\n")


def test_cli_ahm_gap(tmp_path: Path):
    output = tmp_path / "gap.yml"
    args = ["ahm-gap", "--set", "n_spins_max=4", "--out", str(output)]
    assert main(args) == 0
    rows = yaml.safe_load(output.read_text())
    assert [row["size"] for row in rows] == [2.0, 4.0]
    assert all(row["gap"] >= -1e-9 for row in rows)


def test_cli_dicke_suite(tmp_path: Path):
    config_path = tmp_path / "dicke.cfg"
    config_path.write_text("model = dicke\nn_spins_max = 4\nfock_cutoff = 8\n")
    output = tmp_path / "suite.yml"
    assert main(["dicke-suite", "-c", str(config_path), "-o", str(output)]) == 0
    summary = yaml.safe_load(output.read_text())
    assert all(entry["passed"] for entry in summary)
    assert all(entry["commutator_sign"] == -1 for entry in summary)


def test_cli_verify_cutoff_failure(tmp_path: Path):
    config_path = tmp_path / "failing.yml"
    config_path.write_text(
        "n_spins_max: 4\nfock_cutoff: 2\nfock_cutoff_max: 8\nlambda: 10\n"
    )
    assert main(["verify", "--config", str(config_path)]) == 1


def test_cli_config_directory(tmp_path: Path):
    assert main(["sweep", "--config", str(tmp_path)]) == 2


def test_cli_unreadable_yaml(tmp_path: Path):
    config_path = tmp_path / "broken.yml"
    config_path.write_text("model: [heisenberg\n")
    assert main(["sweep", "--config", str(config_path)]) == 2


def test_cli_dicke_ahm_gap(tmp_path: Path):
    output = tmp_path / "dicke_gap.yml"
    args = ["ahm-gap", "--set", "model=dicke", "--set", "n_spins_max=4"]
    assert main(args + ["--set", "fock_cutoff=4", "--out", str(output)]) == 0
    rows = yaml.safe_load(output.read_text())
    assert [row["size"] for row in rows] == [2.0, 4.0]
    assert all(row["fock_cutoff"] > 4 for row in rows)
    assert all(row["symmetric_only"] is False for row in rows)
    assert all(row["gap"] >= -1e-9 for row in rows)


def test_cli_symmetric_ahm_gap(tmp_path: Path):
    output = tmp_path / "symmetric_gap.yml"
    args = ["ahm-gap", "--set", "n_spins_max=4", "--set", "representation=symmetric"]
    assert main(args + ["--out", str(output)]) == 0
    assert all(row["symmetric_only"] for row in yaml.safe_load(output.read_text()))
