from __future__ import annotations

import argparse
import logging
from pathlib import Path
from typing import List, Sequence

from ..benchmarks import BENCHMARKS
from ..blif import write_blif
from .common import UsageExitParser, finish, guarded

logger = logging.getLogger(__name__)


def run(names: Sequence[str], output_dir: Path) -> List[Path]:
    unknown = [name for name in names if name not in BENCHMARKS]
    if unknown:
        raise ValueError(f"Unknown benchmark(s): {', '.join(unknown)}. Available: {', '.join(sorted(BENCHMARKS))}")
    output_dir = output_dir.expanduser().resolve()
    written: List[Path] = []
    for name in names:
        benchmark = BENCHMARKS[name]
        netlist = benchmark.build()
        path = write_blif(netlist, output_dir / f"{name}.blif")
        logger.info(
            "Stored %s (%d inputs, %d outputs, %d gates) at %s; words: %s",
            name,
            len(netlist.inputs),
            len(netlist.outputs),
            len(netlist),
            path,
            benchmark.words,
        )
        written.append(path)
    return written


def build_parser() -> argparse.ArgumentParser:
    parser = UsageExitParser(description="Write generated benchmark circuits as BLIF.")
    parser.add_argument("names", nargs="*", help=f"Benchmarks to write (default: all of {', '.join(BENCHMARKS)}).")
    parser.add_argument("-o", "--output-dir", type=Path, default=Path("data/blif"), help="Destination directory.")
    return parser


def main(argv: list[str] | None = None) -> None:
    logging.basicConfig(level=logging.INFO, format="[%(levelname)s] %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    unknown = [name for name in args.names if name not in BENCHMARKS]
    if unknown:
        parser.error(f"unknown benchmark(s): {', '.join(unknown)}")

    def _body() -> int:
        run(args.names or list(BENCHMARKS), args.output_dir)
        return 0

    finish(guarded(_body))


if __name__ == "__main__":
    main()
