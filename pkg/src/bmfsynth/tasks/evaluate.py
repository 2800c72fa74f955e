from __future__ import annotations

import argparse
import json
import logging
from pathlib import Path
from typing import Optional

from ..blif import read_blif
from ..qor import DEFAULT_SAMPLES, Metric, QorReport, measure
from ..serialization import dump_json, qor_report_to_dict
from .common import UsageExitParser, finish, guarded

logger = logging.getLogger(__name__)


def run(
    golden_path: Path,
    approx_path: Path,
    metric: Metric | str = Metric.RELATIVE,
    words: Optional[str] = None,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
    exhaustive: Optional[bool] = None,
    workers: int = 1,
    output_path: Optional[Path] = None,
) -> QorReport:
    golden = read_blif(golden_path)
    approx = read_blif(approx_path)
    report = measure(golden, approx, metric, words, samples=samples, seed=seed, exhaustive=exhaustive, workers=workers)
    logger.info(
        "%s error of %s against %s: %.6g (%d %s samples)",
        report.metric.value,
        approx.name,
        golden.name,
        report.value,
        report.samples,
        "exhaustive" if report.exhaustive else "random",
    )
    if output_path is not None:
        dump_json(qor_report_to_dict(report), output_path)
        logger.info("Stored QoR report at %s", output_path)
    return report


def build_parser() -> argparse.ArgumentParser:
    parser = UsageExitParser(description="Measure the error of an approximate BLIF netlist against the accurate one.")
    parser.add_argument("golden", type=Path, help="Accurate netlist (BLIF).")
    parser.add_argument("approx", type=Path, help="Approximate netlist (BLIF) with identical ports.")
    parser.add_argument("--metric", choices=[metric.value for metric in Metric], default=Metric.RELATIVE.value)
    parser.add_argument("--words", help='Output words, e.g. "sum:s8..s0".')
    parser.add_argument("--samples", type=int, default=DEFAULT_SAMPLES, help="Monte Carlo samples.")
    parser.add_argument("--seed", type=int, default=0, help="Sampling seed.")
    parser.add_argument(
        "--exhaustive",
        action=argparse.BooleanOptionalAction,
        default=None,
        help="Force (or forbid) evaluation over every input assignment.",
    )
    parser.add_argument("--workers", type=int, default=1, help="Worker processes.")
    parser.add_argument("-o", "--output", type=Path, help="Write the report JSON here as well.")
    return parser


def main(argv: list[str] | None = None) -> None:
    logging.basicConfig(level=logging.INFO, format="[%(levelname)s] %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)

    def _body() -> int:
        report = run(
            golden_path=args.golden,
            approx_path=args.approx,
            metric=args.metric,
            words=args.words,
            samples=args.samples,
            seed=args.seed,
            exhaustive=args.exhaustive,
            workers=args.workers,
            output_path=args.output,
        )
        print(json.dumps(qor_report_to_dict(report), indent=2))
        return 0

    finish(guarded(_body))


if __name__ == "__main__":
    main()
