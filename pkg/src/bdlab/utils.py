import logging
from pathlib import Path

from .errors import ConfigurationError

logger = logging.getLogger("bdlab")


def split_assignment(item: str) -> tuple[str, str]:
    """``key = value`` -> (key, value), both stripped."""
    key, sep, value = item.partition("=")
    key = key.strip()
    if not sep or not key:
        raise ConfigurationError(f"Expected KEY=VALUE, got {item!r}")
    return key, value.strip()


def parse_flat_config(file_path: Path) -> dict[str, str]:
    """Read one ``key = value`` pair per line; ``#`` starts a comment."""
    if not file_path.exists() or not file_path.is_file():
        raise FileNotFoundError(f"Config file not found: {file_path}")

    data: dict[str, str] = {}
    with open(file_path, encoding="utf-8") as f:
        for number, raw in enumerate(f, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                key, value = split_assignment(line)
            except ConfigurationError as e:
                raise ConfigurationError(f"{file_path}:{number}: {e}") from e
            if key in data:
                logger.warning(f"{file_path}:{number}: '{key}' set twice, last wins")
            data[key] = value
    logger.debug(f"Parsed {len(data)} keys from {file_path}")
    return data


def write_text(file_path: Path, text: str) -> None:
    """UTF-8 with LF line endings on every platform."""
    file_path.parent.mkdir(parents=True, exist_ok=True)
    with open(file_path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)
