from __future__ import annotations

import argparse
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List

from .. import __version__
from ..blif import read_blif, write_blif
from ..config import RunConfig
from ..explore import (
    build_circuit,
    degrees_for_threshold,
    explore,
    pareto_report,
    profile_all,
    qor_value,
    verify,
)
from ..partition import decompose, validate_partition
from ..qor import PRNG_ID, derive_seed
from ..resynth import area_proxy
from ..serialization import dump_json, partition_report
from .common import (
    EXIT_OK,
    EXIT_THRESHOLD,
    UsageExitParser,
    add_exploration_arguments,
    add_run_arguments,
    finish,
    guarded,
    require_input,
    resolve_config,
)

logger = logging.getLogger(__name__)

EVALUATION_BUDGET_SECONDS = 30.0
PROFILE_BUDGET_SECONDS = 60.0
AREA_NOTE = "Area proxy covers the partitioned combinational nodes only; registers and control paths are not modelled."


@dataclass
class ExploreOutcome:
    summary: str
    manifest_path: Path
    exit_code: int
    results: List[Dict[str, Any]] = field(default_factory=list)


def run(config: RunConfig) -> ExploreOutcome:
    timings: Dict[str, float] = {}
    warnings: List[str] = []

    started = time.perf_counter()
    netlist = read_blif(require_input(config))
    timings["parse"] = time.perf_counter() - started

    started = time.perf_counter()
    partition = decompose(netlist, config.k, config.m)
    validate_partition(netlist, partition)
    timings["decompose"] = time.perf_counter() - started

    cache = profile_all(netlist, partition, config.asso_config(), workers=config.workers)
    timings["profile"] = cache.seconds
    if cache.seconds > PROFILE_BUDGET_SECONDS:
        warnings.append(f"profiling took {cache.seconds:.1f}s, above {PROFILE_BUDGET_SECONDS:.0f}s")

    started = time.perf_counter()
    interp = config.interpretation()
    result = explore(
        netlist,
        partition,
        cache,
        config.metric,
        interp,
        config.threshold,
        samples=config.samples,
        seed=config.seed,
        probe_samples=config.probe_samples,
        workers=config.workers,
    )
    timings["explore"] = time.perf_counter() - started

    output_dir = config.output_dir.expanduser().resolve()
    trajectory_path = output_dir / f"{netlist.name}_trajectory.csv"
    output_dir.mkdir(parents=True, exist_ok=True)
    pareto_report(result.trajectory).to_csv(trajectory_path, index=False)
    logger.info("Stored trajectory at %s", trajectory_path)

    original_area = area_proxy(netlist).two_input_gate_equivalents
    results: List[Dict[str, Any]] = []
    exit_code = EXIT_OK
    for threshold in sorted(set(config.thresholds)):
        degrees = degrees_for_threshold(result.trajectory, threshold)
        design = build_circuit(netlist, partition, cache, dict(enumerate(degrees)))
        started = time.perf_counter()
        report = verify(netlist, design, config.metric, interp, config.samples, config.seed, workers=config.workers)
        elapsed = time.perf_counter() - started
        timings.setdefault("evaluation", elapsed)
        if elapsed > EVALUATION_BUDGET_SECONDS:
            warnings.append(f"one {report.samples}-sample evaluation took {elapsed:.1f}s, above {EVALUATION_BUDGET_SECONDS:.0f}s")

        area = area_proxy(design).two_input_gate_equivalents
        saving = 1.0 - area / original_area if original_area else 0.0
        measured = qor_value(report)
        meets = measured <= threshold + 3.0 * report.stderr
        if not meets:
            exit_code = EXIT_THRESHOLD
            logger.warning("Verified %s error %.5f is above the threshold %.5f", config.metric.value, measured, threshold)
        blif_path = write_blif(design, output_dir / f"{netlist.name}_approx_{threshold:g}.blif")
        logger.info("Stored design for threshold %g at %s", threshold, blif_path)
        results.append(
            {
                "threshold": threshold,
                "degrees": list(degrees),
                "area": area,
                "area_saving": saving,
                "verified": report.to_dict(),
                "meets_threshold": meets,
                "blif": blif_path,
            }
        )

    committed = [point for point in result.trajectory[1:] if point.accepted]
    final = results[-1]
    manifest_path = output_dir / f"{netlist.name}_manifest.json"
    dump_json(
        {
            "tool": "bmfsynth",
            "version": __version__,
            "model": netlist.name,
            "config": config.to_dict(),
            "seeds": {"exploration": config.seed, "verification": derive_seed(config.seed, "verify")},
            "prng": PRNG_ID,
            "thresholds": sorted(set(config.thresholds)),
            "probe_samples": config.probe_samples,
            "timings": timings,
            "partition": partition_report(partition),
            "original_area": original_area,
            "steps": len(committed),
            "results": results,
            "warnings": warnings,
            "notes": [AREA_NOTE],
        },
        manifest_path,
    )
    for warning in warnings:
        logger.warning("%s", warning)
    logger.info("Stored run manifest at %s", manifest_path)

    summary = (
        f"steps={len(committed)} final_error={qor_value_of(final):.6g} area_saving={final['area_saving']:.4f}"
    )
    return ExploreOutcome(summary=summary, manifest_path=manifest_path, exit_code=exit_code, results=results)


def qor_value_of(result: Dict[str, Any]) -> float:
    verified = result["verified"]
    return verified["normalized"] if verified["metric"] == "absolute" else verified["value"]


def build_parser() -> argparse.ArgumentParser:
    parser = UsageExitParser(description="Approximate a BLIF netlist under an error threshold.")
    add_run_arguments(parser)
    add_exploration_arguments(parser)
    return parser


def main(argv: list[str] | None = None) -> None:
    logging.basicConfig(level=logging.INFO, format="[%(levelname)s] %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)

    def _body() -> int:
        outcome = run(resolve_config(args))
        print(outcome.summary)
        return outcome.exit_code

    finish(guarded(_body))


if __name__ == "__main__":
    main()
