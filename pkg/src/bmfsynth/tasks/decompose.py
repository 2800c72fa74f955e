from __future__ import annotations

import argparse
import logging
from pathlib import Path

from ..blif import read_blif, write_blif
from ..config import RunConfig
from ..partition import decompose, extract, validate_partition
from ..serialization import dump_json, partition_report
from .common import UsageExitParser, add_run_arguments, finish, guarded, require_input, resolve_config

logger = logging.getLogger(__name__)


def run(config: RunConfig) -> Path:
    netlist = read_blif(require_input(config))
    partition = decompose(netlist, config.k, config.m)
    validate_partition(netlist, partition)

    output_dir = config.output_dir.expanduser().resolve()
    report_path = output_dir / f"{netlist.name}_partition.json"
    dump_json(
        {"model": netlist.name, "k": config.k, "m": config.m, "subcircuits": partition_report(partition)},
        report_path,
    )
    blif_dir = output_dir / f"{netlist.name}_subcircuits"
    for sub in partition.subcircuits:
        write_blif(extract(netlist, sub), blif_dir / f"{netlist.name}_s{sub.id}.blif")
    logger.info("Stored partition report at %s", report_path)
    logger.info("Stored %d subcircuit netlists under %s", len(partition), blif_dir)
    return report_path


def build_parser() -> argparse.ArgumentParser:
    parser = UsageExitParser(description="Split a BLIF netlist into k-input, m-output subcircuits.")
    add_run_arguments(parser)
    return parser


def main(argv: list[str] | None = None) -> None:
    logging.basicConfig(level=logging.INFO, format="[%(levelname)s] %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)

    def _body() -> int:
        run(resolve_config(args))
        return 0

    finish(guarded(_body))


if __name__ == "__main__":
    main()
