import os
from collections.abc import Callable, Mapping
from dataclasses import asdict, dataclass
from enum import Enum
from pathlib import Path
from typing import Any

import yaml

from .errors import ConfigurationError
from .models import DickeSpec, HeisenbergSpec, RandomSpec, Representation
from .utils import parse_flat_config


class ModelKind(str, Enum):
    """Which Hamiltonian a sweep runs on."""

    HEISENBERG = "heisenberg"  # Infinitely coordinated anisotropic spin model
    DICKE = "dicke"  # Single-mode Dicke model on a truncated Fock space
    RANDOM = "random"  # Random Hermitian H and J, size is the dimension


def _boolean(value: Any) -> bool:
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in ("1", "true", "yes", "on"):
        return True
    if text in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {value!r}")


def _integer(value: Any) -> int:
    if isinstance(value, bool):
        raise ValueError(f"not an integer: {value!r}")
    number = float(value)
    if not number.is_integer():
        raise ValueError(f"not an integer: {value!r}")
    return int(number)


def _optional_float(value: Any) -> float | None:
    if value is None or str(value).strip().lower() in ("", "none", "null"):
        return None
    return float(value)


def _optional_text(value: Any) -> str | None:
    if value is None or str(value).strip() == "":
        return None
    return str(value)


# File and CLI spelling of the coupling constant
KEY_ALIASES = {"lambda": "coupling"}


@dataclass(frozen=False)
class LabConfig:
    model: ModelKind = ModelKind.HEISENBERG
    n_spins_min: int = 2
    n_spins_max: int = 8
    n_spins_step: int = 2
    g_x: float = 1.0
    g_y: float = 0.5
    h_x: float = 0.0
    h_y: float = 0.3
    h_z: float = 0.5
    beta: float = 1.0
    epsilon: float = 1.0
    omega: float = 1.0
    coupling: float = 0.3
    volume_override: float | None = None
    fock_cutoff: int = 16
    fock_cutoff_max: int = 128
    n_max: int = 2
    k_max: int = 3
    representation: Representation = Representation.BLOCKED
    seed: int = 0
    threads: int = 1
    output_path: str | None = None
    debug: bool = False

    @property
    def size_grid(self) -> list[int]:
        return list(range(self.n_spins_min, self.n_spins_max + 1, self.n_spins_step))

    def validate(self) -> "LabConfig":
        if self.n_spins_step < 1:
            raise ConfigurationError(
                f"n_spins_step must be >= 1, got {self.n_spins_step}"
            )
        if self.n_spins_min < 1 or not self.size_grid:
            raise ConfigurationError(
                f"Empty size grid: n_spins from {self.n_spins_min} "
                f"to {self.n_spins_max}"
            )
        for name in ("beta", "omega"):
            if getattr(self, name) <= 0:
                raise ConfigurationError(f"{name} must be positive")
        if self.volume_override is not None and self.volume_override <= 0:
            raise ConfigurationError("volume_override must be positive")
        if self.fock_cutoff < 2 or self.fock_cutoff_max < self.fock_cutoff:
            raise ConfigurationError(
                f"Need 2 <= fock_cutoff <= fock_cutoff_max, got "
                f"{self.fock_cutoff} and {self.fock_cutoff_max}"
            )
        if not 0 <= self.n_max <= 8:
            raise ConfigurationError(f"n_max must lie in [0, 8], got {self.n_max}")
        if self.k_max < 1:
            raise ConfigurationError(f"k_max must be >= 1, got {self.k_max}")
        if self.threads < 1:
            raise ConfigurationError(f"threads must be >= 1, got {self.threads}")
        if self.g_x < 0 or self.g_y < 0:
            raise ConfigurationError("Couplings g_x and g_y must be non-negative")
        return self

    @staticmethod
    def from_mapping(data: Mapping[str, Any]) -> "LabConfig":
        values: dict[str, Any] = {}
        for key, raw in data.items():
            name = KEY_ALIASES.get(key, key)
            if name not in CONVERTERS:
                raise ConfigurationError(f"Unknown configuration key '{key}'")
            try:
                values[name] = CONVERTERS[name](raw)
            except (TypeError, ValueError) as e:
                raise ConfigurationError(f"Bad value for '{key}': {e}") from e
        return LabConfig(**values).validate()

    @staticmethod
    def from_file(
        file_path: Path | None, overrides: Mapping[str, Any] | None = None
    ) -> "LabConfig":
        """File values first, then ``overrides`` on top."""
        data: dict[str, Any] = {}
        if file_path is not None:
            if not os.path.exists(file_path):
                raise ConfigurationError(f"Config file {file_path} does not exist.")
            try:
                if file_path.suffix in (".yml", ".yaml"):
                    with open(file_path, encoding="utf-8") as f:
                        loaded = yaml.safe_load(f) or {}
                    if not isinstance(loaded, dict):
                        raise ConfigurationError(f"{file_path} is not a YAML mapping")
                    data.update(loaded)
                else:
                    data.update(parse_flat_config(file_path))
            except (OSError, UnicodeDecodeError, yaml.YAMLError) as e:
                raise ConfigurationError(f"Cannot read {file_path}: {e}") from e
        data.update(overrides or {})
        return LabConfig.from_mapping(data)

    def to_yaml(self, file_path: Path) -> None:
        data = {}
        for key, value in asdict(self).items():
            if isinstance(value, Enum):
                value = value.value
            data["lambda" if key == "coupling" else key] = value
        with open(file_path, "w", encoding="utf-8") as f:
            yaml.dump(data, f, sort_keys=False)

    def heisenberg_spec(self, n_spins: int) -> HeisenbergSpec:
        return HeisenbergSpec(
            n_spins=n_spins,
            g_x=self.g_x,
            g_y=self.g_y,
            h=(self.h_x, self.h_y, self.h_z),
            representation=self.representation,
        )

    def dicke_spec(self, n_spins: int) -> DickeSpec:
        return DickeSpec(
            n_spins=n_spins,
            volume=self.volume_override,
            epsilon=self.epsilon,
            omega=self.omega,
            coupling=self.coupling,
            fock_cutoff=self.fock_cutoff,
            beta=self.beta,
            representation=self.representation,
        )

    def random_spec(self, dim: int) -> RandomSpec:
        return RandomSpec(dim=dim, seed=self.seed, beta=self.beta)


CONVERTERS: dict[str, Callable[[Any], Any]] = {
    "model": ModelKind,
    "n_spins_min": _integer,
    "n_spins_max": _integer,
    "n_spins_step": _integer,
    "g_x": float,
    "g_y": float,
    "h_x": float,
    "h_y": float,
    "h_z": float,
    "beta": float,
    "epsilon": float,
    "omega": float,
    "coupling": float,
    "volume_override": _optional_float,
    "fock_cutoff": _integer,
    "fock_cutoff_max": _integer,
    "n_max": _integer,
    "k_max": _integer,
    "representation": Representation,
    "seed": _integer,
    "threads": _integer,
    "output_path": _optional_text,
    "debug": _boolean,
}
