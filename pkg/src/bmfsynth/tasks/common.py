from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Callable, List, Optional

from ..config import RunConfig, load_run_config
from ..errors import ConfigError, SynthesisError
from ..qor import Metric

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_THRESHOLD = 4
EXIT_USAGE = 64


class UsageExitParser(argparse.ArgumentParser):
    """argparse with the conventional usage-error exit status."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _taus(value: str) -> List[float]:
    try:
        return [float(item) for item in value.split(",") if item.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"invalid tau list {value!r}") from exc


def add_run_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="Run configuration (JSON or YAML); flags override it.")
    parser.add_argument("--input", type=Path, help="Input BLIF netlist.")
    parser.add_argument("-k", type=int, help="Maximum boundary inputs per subcircuit (default 10).")
    parser.add_argument("-m", type=int, help="Maximum boundary outputs per subcircuit (default 10).")
    parser.add_argument("--out", type=Path, help="Output directory (default data/runs).")
    parser.add_argument("--workers", type=int, help="Worker processes (default: available CPUs).")


def add_exploration_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--metric", choices=[metric.value for metric in Metric], help="Error metric.")
    parser.add_argument(
        "--threshold",
        type=float,
        nargs="+",
        help="Error threshold(s); a design is written for each (default 0.05).",
    )
    parser.add_argument("--taus", type=_taus, help="Comma-separated association thresholds to sweep.")
    parser.add_argument("--semiring", choices=["or", "xor"], help="Decompressor algebra.")
    parser.add_argument("--weights", choices=["uniform", "pow2"], help="Column weights for the factorization.")
    parser.add_argument("--samples", type=int, help="Monte Carlo samples at commit and verification.")
    parser.add_argument(
        "--probe-samples",
        dest="probe_samples",
        type=int,
        help="Samples per candidate probe (default 10^5, capped at --samples).",
    )
    parser.add_argument("--seed", type=int, help="Master seed.")
    parser.add_argument("--words", help='Output words, e.g. "sum:s8..s0;diff:d8..d0".')


def resolve_config(args: argparse.Namespace) -> RunConfig:
    base = load_run_config(args.config) if getattr(args, "config", None) else RunConfig()
    config = base.with_overrides(
        input=getattr(args, "input", None),
        k=getattr(args, "k", None),
        m=getattr(args, "m", None),
        output_dir=getattr(args, "out", None),
        workers=getattr(args, "workers", None),
        metric=getattr(args, "metric", None),
        thresholds=getattr(args, "threshold", None),
        taus=getattr(args, "taus", None),
        semiring=getattr(args, "semiring", None),
        weights=getattr(args, "weights", None),
        samples=getattr(args, "samples", None),
        probe_samples=getattr(args, "probe_samples", None),
        seed=getattr(args, "seed", None),
        words=getattr(args, "words", None),
    )
    return config


def require_input(config: RunConfig) -> Path:
    if config.input is None:
        raise ConfigError("No input netlist given (use --input or set 'input' in the config file)")
    return config.input


def guarded(run: Callable[[], int]) -> int:
    """Run a task body and map library errors to exit codes."""
    try:
        return run()
    except SynthesisError as exc:
        logger.error("%s", exc)
        return exc.exit_code
    except FileNotFoundError as exc:
        logger.error("%s", exc)
        return ConfigError.exit_code


def finish(code: Optional[int]) -> None:
    if code:
        sys.exit(code)
