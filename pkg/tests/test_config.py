from pathlib import Path

import pytest

from bdlab.config import LabConfig, ModelKind
from bdlab.errors import ConfigurationError
from bdlab.models import Representation


def test_config_to_yaml_equals_from_file(tmp_path: Path, default_config: LabConfig):
    config_path = tmp_path / "config.yml"
    default_config.to_yaml(config_path)
    loaded_config = LabConfig.from_file(config_path, {})
    assert default_config == loaded_config
    assert "lambda: 0.3" in config_path.read_text()


def test_config_from_flat_file(tmp_path: Path):
    config_path = tmp_path / "run.cfg"
    config_path.write_text(
        "# Dicke sweep\n"
        "model = dicke\n"
        "lambda = 0.7  # subcritical\n"
        "n_spins_max = 6\n"
        "volume_override = none\n"
        "representation = symmetric\n"
        "debug = yes\n"
    )
    config = LabConfig.from_file(config_path)
    assert config.model is ModelKind.DICKE
    assert config.coupling == 0.7
    assert config.size_grid == [2, 4, 6]
    assert config.volume_override is None
    assert config.representation is Representation.SYMMETRIC
    assert config.debug


def test_overrides_win(tmp_path: Path):
    config_path = tmp_path / "config.yaml"
    config_path.write_text("seed: 3\nthreads: 2\n")
    config = LabConfig.from_file(config_path, {"seed": "11"})
    assert (config.seed, config.threads) == (11, 2)


@pytest.mark.parametrize(
    "data",
    [
        {"no_such_key": 1},
        {"beta": "hot"},
        {"beta": 0},
        {"seed": 1.5},
        {"model": "ising"},
        {"n_spins_min": 6, "n_spins_max": 4},
        {"fock_cutoff": 64, "fock_cutoff_max": 32},
        {"g_x": -0.1},
        {"threads": 0},
        {"debug": "maybe"},
    ],
)
def test_bad_configuration(data: dict):
    with pytest.raises(ConfigurationError):
        LabConfig.from_mapping(data)


def test_missing_config_file(tmp_path: Path):
    with pytest.raises(ConfigurationError):
        LabConfig.from_file(tmp_path / "absent.yml")


def test_yaml_must_be_mapping(tmp_path: Path):
    config_path = tmp_path / "list.yml"
    config_path.write_text("- 1\n- 2\n")
    with pytest.raises(ConfigurationError):
        LabConfig.from_file(config_path)


def test_specs_follow_config():
    config = LabConfig(coupling=0.4, volume_override=10.0, fock_cutoff=8, seed=5)
    dicke = config.dicke_spec(4)
    assert (dicke.coupling, dicke.size, dicke.fock_cutoff) == (0.4, 10.0, 8)
    heisenberg = config.heisenberg_spec(4)
    assert heisenberg.h == (config.h_x, config.h_y, config.h_z)
    assert config.random_spec(6).seed == 5
