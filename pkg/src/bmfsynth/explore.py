"""
Design-space exploration over per-subcircuit factorization degrees.

Every subcircuit is profiled once at every degree below its output count. The greedy loop
then lowers one degree per step, always the one whose probe costs the least accuracy,
until the next committed step would break the error threshold.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from multiprocessing import Pool
from multiprocessing.pool import ThreadPool
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
import pandas as pd

from .bmf import AssoConfig, FactorResult
from .boolmat import BitMatrix, pack_bits, unpack_bits
from .errors import BudgetError, ConfigError, PartitionError
from .netlist import DEFAULT_TRUTH_TABLE_CAP, Netlist, simulate_words, truth_table
from .partition import Partition, extract, substitute
from .qor import (
    DEFAULT_SAMPLES,
    ErrorAccumulator,
    Metric,
    OutputInterpretation,
    QorReport,
    derive_seed,
    draw_inputs,
    is_exhaustive,
    measure,
    resolve_interpretation,
    score,
)
from .resynth import AreaCost, approximate_with_factor, area_proxy

logger = logging.getLogger(__name__)

DEFAULT_PROBE_SAMPLES = 100_000


@dataclass(frozen=True)
class ProfileEntry:
    degree: int
    factor: FactorResult
    table: BitMatrix
    netlist: Netlist
    area: AreaCost


@dataclass(frozen=True)
class SubcircuitProfile:
    sid: int
    netlist: Netlist
    table: BitMatrix
    area: AreaCost
    entries: Dict[int, ProfileEntry] = field(default_factory=dict, hash=False)

    @property
    def outputs(self) -> int:
        return len(self.netlist.outputs)

    @property
    def approximable(self) -> bool:
        return self.outputs >= 2

    def _entry(self, degree: int) -> Optional[ProfileEntry]:
        if degree == self.outputs:
            return None
        try:
            return self.entries[degree]
        except KeyError as exc:
            raise ConfigError(f"Subcircuit {self.sid} has no profile at degree {degree}") from exc

    def table_at(self, degree: int) -> BitMatrix:
        entry = self._entry(degree)
        return self.table if entry is None else entry.table

    def area_at(self, degree: int) -> AreaCost:
        entry = self._entry(degree)
        return self.area if entry is None else entry.area

    def netlist_at(self, degree: int) -> Netlist:
        entry = self._entry(degree)
        return self.netlist if entry is None else entry.netlist


@dataclass(frozen=True)
class ProfileCache:
    profiles: Tuple[SubcircuitProfile, ...]
    config: AssoConfig
    seconds: float = 0.0

    def __getitem__(self, sid: int) -> SubcircuitProfile:
        return self.profiles[sid]

    def __len__(self) -> int:
        return len(self.profiles)

    @property
    def approximable(self) -> List[int]:
        return [profile.sid for profile in self.profiles if profile.approximable]

    def original_area(self) -> AreaCost:
        return sum((profile.area for profile in self.profiles), AreaCost(0.0))

    def area_for(self, degrees: Mapping[int, int]) -> AreaCost:
        return sum((profile.area_at(degrees[profile.sid]) for profile in self.profiles), AreaCost(0.0))


def _profile_one(sub_netlist: Netlist, sid: int, cfg: AssoConfig, cap: int) -> SubcircuitProfile:
    table = truth_table(sub_netlist, cap=cap)
    entries: Dict[int, ProfileEntry] = {}
    for degree in range(1, len(sub_netlist.outputs)):
        netlist, reconstruction, factor = approximate_with_factor(sub_netlist, degree, cfg, table=table)
        entries[degree] = ProfileEntry(
            degree=degree,
            factor=factor,
            table=reconstruction,
            netlist=netlist,
            area=area_proxy(netlist),
        )
    return SubcircuitProfile(sid=sid, netlist=sub_netlist, table=table, area=area_proxy(sub_netlist), entries=entries)


def profile_all(
    netlist: Netlist,
    partition: Partition,
    cfg: AssoConfig,
    workers: int = 1,
    cap: int = DEFAULT_TRUTH_TABLE_CAP,
) -> ProfileCache:
    """Factorize and resynthesize every subcircuit at every degree 1..m_i-1."""
    if partition.k > cap:
        raise BudgetError(f"Partition input bound k={partition.k} exceeds the truth-table cap of {cap}")
    started = time.perf_counter()
    tasks = [(extract(netlist, sub), sub.id, cfg, cap) for sub in partition.subcircuits]
    if workers > 1 and len(tasks) > 1:
        with Pool(processes=min(workers, len(tasks))) as pool:
            profiles = pool.starmap(_profile_one, tasks)
    else:
        profiles = [_profile_one(*task) for task in tasks]
    seconds = time.perf_counter() - started
    cache = ProfileCache(profiles=tuple(profiles), config=cfg, seconds=seconds)
    logger.info(
        "Profiled %d subcircuits (%d approximable, %d degrees) in %.2fs",
        len(profiles),
        len(cache.approximable),
        sum(len(profile.entries) for profile in profiles),
        seconds,
    )
    return cache


@dataclass(frozen=True)
class TrajectoryPoint:
    step: int
    subcircuit: Optional[int]
    degree_before: Optional[int]
    degree_after: Optional[int]
    qor: float
    relative: float
    absolute: float
    hamming: float
    area: float
    degrees: Tuple[int, ...]
    accepted: bool = True


@dataclass
class ExplorationState:
    degrees: Dict[int, int]
    trajectory: List[TrajectoryPoint] = field(default_factory=list)
    circuit: Optional[Netlist] = None

    def degree_vector(self) -> Tuple[int, ...]:
        return tuple(self.degrees[sid] for sid in sorted(self.degrees))

    def committed(self) -> List[TrajectoryPoint]:
        return [point for point in self.trajectory if point.accepted]


@dataclass(frozen=True)
class ExplorationResult:
    netlist: Netlist
    trajectory: Tuple[TrajectoryPoint, ...]
    state: ExplorationState = field(compare=False)

    def __iter__(self) -> Iterator[object]:
        return iter((self.netlist, self.trajectory))


class BlockEvaluator:
    """
    Evaluates the whole circuit at block level: every subcircuit is a lookup table over its
    boundary inputs, applied in quotient topological order on a fixed sample set.
    """

    def __init__(
        self,
        netlist: Netlist,
        partition: Partition,
        cache: ProfileCache,
        degrees: Mapping[int, int],
        samples: int,
        seed: int,
        exhaustive: Optional[bool] = None,
    ) -> None:
        self.netlist = netlist
        self.partition = partition
        self.order = partition.topological_order()
        self.quotient = partition.quotient_graph()
        self.exhaustive = is_exhaustive(len(netlist.inputs), samples, exhaustive)
        self.seed = seed

        chunks = list(draw_inputs(len(netlist.inputs), samples, seed, self.exhaustive))
        bits = np.concatenate([unpack_bits(words, count) for words, count in chunks], axis=1)
        self.count = bits.shape[1]
        self.golden = unpack_bits(simulate_words(netlist, pack_bits(bits)), self.count)
        self.tables: Dict[int, np.ndarray] = {
            sid: cache[sid].table_at(degree).to_array() for sid, degree in degrees.items()
        }
        self.values: Dict[str, np.ndarray] = {name: bits[i] for i, name in enumerate(netlist.inputs)}
        for sid in self.order:
            self.values.update(self._evaluate_block(sid, self.tables[sid], self.values))

    def _evaluate_block(
        self, sid: int, table: np.ndarray, values: Mapping[str, np.ndarray]
    ) -> Dict[str, np.ndarray]:
        sub = self.partition[sid]
        index = np.zeros(self.count, dtype=np.int64)
        for net in sub.boundary_inputs:
            index = (index << 1) | values[net]
        outputs = table[index]
        return {net: outputs[:, j] for j, net in enumerate(sub.boundary_outputs)}

    def _propagate(self, overrides: Mapping[int, np.ndarray]) -> Dict[str, np.ndarray]:
        dirty = set(overrides)
        for sid in overrides:
            dirty.update(nx.descendants(self.quotient, sid))
        values = dict(self.values)
        for sid in self.order:
            if sid in dirty:
                values.update(self._evaluate_block(sid, overrides.get(sid, self.tables[sid]), values))
        return values

    def output_bits(self, values: Optional[Mapping[str, np.ndarray]] = None) -> np.ndarray:
        values = self.values if values is None else values
        if not self.netlist.outputs:
            return np.zeros((0, self.count), dtype=bool)
        return np.stack([values[name] for name in self.netlist.outputs])

    def score_with(
        self, overrides: Mapping[int, BitMatrix], metric: Metric, words: Sequence[Sequence[int]]
    ) -> QorReport:
        values = self._propagate({sid: table.to_array() for sid, table in overrides.items()})
        accumulator = ErrorAccumulator()
        accumulator.add(*score(self.golden, self.output_bits(values), metric, words))
        return accumulator.report(metric, self.seed, self.exhaustive)

    def commit(self, sid: int, table: BitMatrix) -> None:
        array = table.to_array()
        self.values = self._propagate({sid: array})
        self.tables[sid] = array


def _all_errors(
    evaluator: BlockEvaluator, overrides: Mapping[int, BitMatrix], words: Optional[List[List[int]]]
) -> Dict[Metric, float]:
    errors = {Metric.HAMMING: evaluator.score_with(overrides, Metric.HAMMING, []).value}
    if words is None:
        errors[Metric.RELATIVE] = math.nan
        errors[Metric.ABSOLUTE] = math.nan
    else:
        errors[Metric.RELATIVE] = evaluator.score_with(overrides, Metric.RELATIVE, words).value
        errors[Metric.ABSOLUTE] = evaluator.score_with(overrides, Metric.ABSOLUTE, words).normalized
    return errors


def qor_value(report: QorReport) -> float:
    """The figure compared against the threshold: the normalized form for absolute error."""
    return report.normalized if report.metric is Metric.ABSOLUTE else report.value


def _numeric_words(netlist: Netlist, interp: OutputInterpretation) -> Optional[List[List[int]]]:
    try:
        interp.validate(netlist.outputs, Metric.RELATIVE)
    except ConfigError:
        return None
    return interp.indices(netlist.outputs)


def explore(
    netlist: Netlist,
    partition: Partition,
    cache: ProfileCache,
    metric: Metric | str,
    interp: Optional[OutputInterpretation | str],
    threshold: float,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
    probe_samples: Optional[int] = None,
    workers: int = 1,
) -> ExplorationResult:
    metric = Metric.parse(metric)
    if not threshold > 0:
        raise ConfigError(f"Error threshold must be positive, got {threshold}")
    if len(cache) != len(partition):
        raise PartitionError(f"Profile cache covers {len(cache)} subcircuits, partition has {len(partition)}")
    interp = resolve_interpretation(netlist, metric, interp)
    words = interp.indices(netlist.outputs)
    numeric = _numeric_words(netlist, interp)
    probe_samples = samples if probe_samples is None else min(probe_samples, samples)

    state = ExplorationState(degrees={profile.sid: profile.outputs for profile in cache.profiles})
    committer = BlockEvaluator(netlist, partition, cache, state.degrees, samples, seed)
    prober = committer
    if probe_samples < samples and not committer.exhaustive:
        prober = BlockEvaluator(netlist, partition, cache, state.degrees, probe_samples, seed)

    original = cache.original_area().two_input_gate_equivalents
    initial = committer.score_with({}, metric, words)
    assert qor_value(initial) == 0.0, "reference circuit must reproduce itself"
    state.trajectory.append(
        TrajectoryPoint(
            step=0,
            subcircuit=None,
            degree_before=None,
            degree_after=None,
            qor=0.0,
            relative=0.0 if numeric is not None else math.nan,
            absolute=0.0 if numeric is not None else math.nan,
            hamming=0.0,
            area=original,
            degrees=state.degree_vector(),
        )
    )

    step = 0
    pool = ThreadPool(processes=workers) if workers > 1 else None
    try:
        while True:
            candidates = [sid for sid, degree in sorted(state.degrees.items()) if degree > 1]
            if not candidates:
                logger.info("Every subcircuit is at degree 1; exploration finished")
                break

            def probe(sid: int) -> Tuple[float, float, int]:
                profile = cache[sid]
                degree = state.degrees[sid]
                report = prober.score_with({sid: profile.table_at(degree - 1)}, metric, words)
                saving = profile.area_at(degree).two_input_gate_equivalents - profile.area_at(
                    degree - 1
                ).two_input_gate_equivalents
                return qor_value(report), -saving, sid

            ranked = pool.map(probe, candidates) if pool is not None else [probe(sid) for sid in candidates]
            _, _, best = min(ranked)
            profile = cache[best]
            before = state.degrees[best]
            table = profile.table_at(before - 1)
            report = committer.score_with({best: table}, metric, words)
            value = qor_value(report)
            errors = _all_errors(committer, {best: table}, numeric)
            step += 1
            degrees_after = dict(state.degrees)
            degrees_after[best] = before - 1
            point = TrajectoryPoint(
                step=step,
                subcircuit=best,
                degree_before=before,
                degree_after=before - 1,
                qor=value,
                relative=errors[Metric.RELATIVE],
                absolute=errors[Metric.ABSOLUTE],
                hamming=errors[Metric.HAMMING],
                area=cache.area_for(degrees_after).two_input_gate_equivalents,
                degrees=tuple(degrees_after[sid] for sid in sorted(degrees_after)),
                accepted=value <= threshold,
            )
            state.trajectory.append(point)
            if not point.accepted:
                logger.info(
                    "Step %d: subcircuit %d f %d -> %d gives %s=%.5f above %.5f; rolled back",
                    step,
                    best,
                    before,
                    before - 1,
                    metric.value,
                    value,
                    threshold,
                )
                break
            state.degrees = degrees_after
            committer.commit(best, table)
            if prober is not committer:
                prober.commit(best, table)
            logger.info(
                "Step %d: subcircuit %d f %d -> %d, %s=%.5f, area=%.0f",
                step,
                best,
                before,
                before - 1,
                metric.value,
                value,
                point.area,
            )
    finally:
        if pool is not None:
            pool.close()
            pool.join()

    state.circuit = build_circuit(netlist, partition, cache, state.degrees)
    return ExplorationResult(netlist=state.circuit, trajectory=tuple(state.trajectory), state=state)


def build_circuit(netlist: Netlist, partition: Partition, cache: ProfileCache, degrees: Mapping[int, int]) -> Netlist:
    """Substitute every subcircuit below its full degree with its profiled approximation."""
    circuit = netlist
    for sub in partition.subcircuits:
        profile = cache[sub.id]
        degree = degrees.get(sub.id, profile.outputs)
        if degree < profile.outputs:
            circuit = substitute(circuit, sub, profile.netlist_at(degree))
    return circuit


def degrees_for_threshold(trajectory: Sequence[TrajectoryPoint], threshold: float) -> Tuple[int, ...]:
    """Degree vector the greedy loop would stop at for a threshold no larger than the explored one."""
    chosen = trajectory[0].degrees
    for point in trajectory[1:]:
        if not point.accepted or point.qor > threshold:
            break
        chosen = point.degrees
    return chosen


def verify(
    golden: Netlist,
    approx: Netlist,
    metric: Metric | str,
    interp: Optional[OutputInterpretation | str],
    samples: int,
    seed: int,
    workers: int = 1,
) -> QorReport:
    """Re-measure on an independent stream derived from ``seed``."""
    return measure(golden, approx, metric, interp, samples, derive_seed(seed, "verify"), workers=workers)


def pareto_report(trajectory: Sequence[TrajectoryPoint]) -> pd.DataFrame:
    if not trajectory:
        raise ValueError("Trajectory is empty")
    original = trajectory[0].area
    rows = [
        {
            "step": point.step,
            "relative_error": point.relative,
            "normalized_absolute_error": point.absolute,
            "area": point.area,
            "normalized_area": point.area / original if original else 1.0,
            "hamming_error": point.hamming,
            "qor": point.qor,
            "subcircuit": point.subcircuit,
            "degree_before": point.degree_before,
            "degree_after": point.degree_after,
        }
        for point in trajectory
        if point.accepted
    ]
    return pd.DataFrame(rows)
