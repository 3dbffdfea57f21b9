"""Interface for ``python -m bdlab``."""

import logging
import sys
from argparse import ArgumentParser, Namespace
from collections.abc import Sequence
from pathlib import Path
from typing import Any

import yaml

from . import __version__
from .ahm import converge_free_energy_cutoff, dicke_identity_suite, minimize_gap
from .config import LabConfig, ModelKind
from .errors import ConfigurationError, LabError
from .harness import run_sweep, run_verify
from .models import DickeSpec, HeisenbergSpec, model_system
from .utils import split_assignment, write_text

__all__ = ["main"]

logging.basicConfig()

logger = logging.getLogger("bdlab")


class ColorFormatter(logging.Formatter):
    """ANSI color formatter for warnings and errors."""

    COLOR_MAP = {
        logging.DEBUG: "\033[36m",  # Cyan
        logging.INFO: "\033[32m",  # Green
        logging.WARNING: "\033[33;1m",  # Bright Yellow
        logging.ERROR: "\033[31;1m",  # Bright Red
        logging.CRITICAL: "\033[41;97m",  # White on Red bg
    }
    RESET = "\033[0m"

    def __init__(self, fmt: str, use_color: bool = True):
        super().__init__(fmt)
        self.use_color = use_color

    def format(self, record: logging.LogRecord) -> str:
        original_levelname = record.levelname
        # Pad to the length of "CRITICAL" so columns line up with or without color
        padded_levelname = original_levelname.ljust(8)
        if self.use_color and record.levelno in self.COLOR_MAP:
            padded_levelname = (
                f"{self.COLOR_MAP[record.levelno]}{padded_levelname}{self.RESET}"
            )
        record.levelname = padded_levelname
        base = super().format(record)
        record.levelname = original_levelname
        return base


handler = logging.StreamHandler()
use_color = sys.stderr.isatty()
fmt = "%(asctime)s | %(levelname)-8s | %(name)s | %(message)s"
handler.setFormatter(ColorFormatter(fmt, use_color=use_color))
logger.addHandler(handler)
logger.setLevel(logging.INFO)
logger.propagate = False


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(
        prog="bdlab",
        description="Duhamel inner products, F_k functionals and thermal "
        "inequalities by exact diagonalization.",
    )
    parser.add_argument(
        "-v",
        "--version",
        action="version",
        version=__version__,
    )
    parser.add_argument(
        "-d", "--debug", action="store_true", help="Enable debug logging"
    )

    common = ArgumentParser(add_help=False)
    common.add_argument(
        "-c", "--config", type=Path, help="YAML or key = value configuration file."
    )
    common.add_argument("-o", "--out", type=Path, help="Output file.")
    common.add_argument("--seed", type=int, help="Seed for random instances.")
    common.add_argument("--threads", type=int, help="Worker threads for sweeps.")
    common.add_argument(
        "--set",
        dest="overrides",
        metavar="KEY=VALUE",
        action="append",
        default=[],
        help="Override one configuration key, may be repeated.",
    )

    commands = parser.add_subparsers(dest="command", required=True)
    commands.add_parser(
        "verify", parents=[common], help="Run every invariant check once."
    )
    commands.add_parser(
        "sweep", parents=[common], help="Measure over the size grid and write CSV."
    )
    commands.add_parser(
        "dicke-suite",
        parents=[common],
        help="Dicke identities at a converged Fock cutoff for every size.",
    )
    commands.add_parser(
        "ahm-gap",
        parents=[common],
        help="Minimized approximating-Hamiltonian gap for every size.",
    )
    return parser


def load_config(args: Namespace) -> LabConfig:
    overrides: dict[str, Any] = dict(split_assignment(item) for item in args.overrides)
    for key in ("seed", "threads"):
        if getattr(args, key) is not None:
            overrides[key] = getattr(args, key)
    config = LabConfig.from_file(args.config, overrides)
    if config.debug:
        logger.setLevel(logging.DEBUG)
    if args.config is not None:
        logger.debug(f"Loaded configuration from {args.config}")
    return config


def output_path(args: Namespace, config: LabConfig) -> Path | None:
    if args.out is not None:
        return args.out
    return Path(config.output_path) if config.output_path else None


def verify(config: LabConfig, out: Path | None) -> int:
    report = run_verify(config)
    if out is not None:
        write_text(out, report.to_yaml())
        logger.info(f"Wrote {out}")
    if not report.passed:
        names = ", ".join(c.name for c in report.failures)
        logger.error(f"{len(report.failures)} check(s) failed: {names}")
        return 1
    logger.info(f"All {len(report.checks)} checks passed")
    return 0


def sweep(config: LabConfig, out: Path | None) -> int:
    result = run_sweep(config, out)
    logger.info(
        f"{len(result.measurements)} measurements over "
        f"{len(config.size_grid) - len(result.failed_sizes)} size(s)"
    )
    return 0


def dicke_suite(config: LabConfig, out: Path | None) -> int:
    summary = []
    for n in config.size_grid:
        report = dicke_identity_suite(config.dicke_spec(n), config.fock_cutoff_max)
        summary.append(
            {
                "volume": report.spec.size,
                "fock_cutoff": report.spec.fock_cutoff,
                "symmetric_only": model_system(report.spec).symmetric_only,
                "commutator_sign": report.commutator_sign,
                "passed": report.passed,
                "identities": {c.name: c.residual for c in report.identities},
                "inequalities": {c.name: c.slack for c in report.inequalities},
            }
        )
        if out is not None:
            write_text(out, yaml.dump(summary, sort_keys=False))
        report.require()
        logger.info(f"Dicke identities hold at V={report.spec.size:g}")
    return 0


def ahm_gap(config: LabConfig, out: Path | None) -> int:
    if config.model is ModelKind.RANDOM:
        raise ConfigurationError("ahm-gap needs model heisenberg or dicke")
    rows = []
    for n in config.size_grid:
        spec: HeisenbergSpec | DickeSpec
        if config.model is ModelKind.DICKE:
            spec = converge_free_energy_cutoff(
                config.dicke_spec(n), config.fock_cutoff_max
            )
        else:
            spec = config.heisenberg_spec(n)
        result = minimize_gap(spec)
        logger.info(
            f"N={n}: gap {result.gap:.6e} after {result.iterations} iteration(s)"
        )
        row: dict[str, Any] = {
            "size": spec.size,
            "gap": result.gap,
            "f_approx_min": result.f_approx_min,
            "f_model": result.f_model,
            "params_opt": [[p.real, p.imag] for p in result.params_opt],
            "converged": result.converged,
            "symmetric_only": model_system(spec).symmetric_only,
        }
        if isinstance(spec, DickeSpec):
            row["fock_cutoff"] = spec.fock_cutoff
        rows.append(row)
    if out is not None:
        write_text(out, yaml.dump(rows, sort_keys=False))
        logger.info(f"Wrote {out}")
    return 0


COMMANDS = {
    "verify": verify,
    "sweep": sweep,
    "dicke-suite": dicke_suite,
    "ahm-gap": ahm_gap,
}


def main(argv: Sequence[str] | None = None) -> int:
    """Argument parser for the CLI."""
    args = build_parser().parse_args(argv)
    logger.info(f"bdlab version {__version__}")

    logger.setLevel(logging.INFO)
    if args.debug:
        logger.setLevel(logging.DEBUG)

    try:
        config = load_config(args)
        return COMMANDS[args.command](config, output_path(args, config))
    except LabError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
