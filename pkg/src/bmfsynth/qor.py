"""
Quality-of-result measurement between an accurate and an approximate netlist.

Inputs are uniform random bits drawn chunk by chunk from ``numpy`` PCG64 streams spawned
off one ``SeedSequence``, so a report depends on the seed and the sample count only, never
on how many workers evaluated the chunks. When the whole input space fits into the
sample budget every assignment is evaluated once instead.
"""

from __future__ import annotations

import logging
import math
import re
import zlib
from dataclasses import dataclass
from enum import Enum
from multiprocessing import Pool
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .boolmat import pack_bits, unpack_bits, word_count
from .errors import BudgetError, ConfigError, PortMismatchError
from .netlist import Netlist, simulate_words

logger = logging.getLogger(__name__)

PRNG_ID = "PCG64"
CHUNK_SAMPLES = 1 << 16
DEFAULT_SAMPLES = 1_000_000
EXHAUSTIVE_CAP = 20
MAX_WORD_BITS = 64

_RANGE = re.compile(r"^(.*?)(\d+)\.\.(.*?)(\d+)$")


class Metric(str, Enum):
    RELATIVE = "relative"
    ABSOLUTE = "absolute"
    HAMMING = "hamming"

    @classmethod
    def parse(cls, value: object) -> "Metric":
        if isinstance(value, Metric):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError as exc:
            choices = ", ".join(metric.value for metric in cls)
            raise ConfigError(f"Unknown metric {value!r}; expected one of {choices}") from exc


@dataclass(frozen=True)
class OutputWord:
    name: str
    # most significant bit first
    bits: Tuple[str, ...]

    @property
    def max_value(self) -> int:
        return (1 << len(self.bits)) - 1


@dataclass(frozen=True)
class OutputInterpretation:
    words: Tuple[OutputWord, ...] = ()

    @classmethod
    def single_word(cls, outputs: Sequence[str], name: str = "y") -> "OutputInterpretation":
        return cls(words=(OutputWord(name=name, bits=tuple(outputs)),))

    @classmethod
    def parse(cls, text: str) -> "OutputInterpretation":
        """Parse ``"sum:s7..s0;carry:c"``; a word is a comma list of nets or ``prefixHI..prefixLO`` ranges."""
        words: List[OutputWord] = []
        for index, entry in enumerate(part.strip() for part in text.split(";")):
            if not entry:
                continue
            name, _, body = entry.rpartition(":")
            name = name.strip() or f"w{index}"
            bits: List[str] = []
            for token in (item.strip() for item in body.split(",")):
                if not token:
                    continue
                bits.extend(_expand_range(token))
            if not bits:
                raise ConfigError(f"Output word {name!r} names no outputs")
            words.append(OutputWord(name=name, bits=tuple(bits)))
        if not words:
            raise ConfigError(f"Empty output interpretation {text!r}")
        return cls(words=tuple(words))

    def validate(self, outputs: Sequence[str], metric: Metric) -> None:
        known = set(outputs)
        used: List[str] = []
        for word in self.words:
            if metric is not Metric.HAMMING and len(word.bits) > MAX_WORD_BITS:
                raise ConfigError(f"Output word {word.name} has {len(word.bits)} bits, limit is {MAX_WORD_BITS}")
            for bit in word.bits:
                if bit not in known:
                    raise ConfigError(f"Output word {word.name} names unknown output {bit!r}")
            used.extend(word.bits)
        if len(set(used)) != len(used):
            raise ConfigError("Output words overlap")
        if metric is not Metric.HAMMING and len(used) != len(known):
            missing = [name for name in outputs if name not in set(used)]
            raise ConfigError(f"Outputs {', '.join(missing[:5])} are not part of any word for the {metric.value} metric")

    def indices(self, outputs: Sequence[str]) -> List[List[int]]:
        position = {name: i for i, name in enumerate(outputs)}
        return [[position[bit] for bit in word.bits] for word in self.words]


def _expand_range(token: str) -> List[str]:
    match = _RANGE.match(token)
    if match is None:
        return [token]
    head, start, tail_prefix, stop = match.groups()
    if tail_prefix and tail_prefix != head:
        return [token]
    first, last = int(start), int(stop)
    step = -1 if last < first else 1
    return [f"{head}{i}" for i in range(first, last + step, step)]


def resolve_interpretation(
    netlist: Netlist, metric: Metric, interp: Optional[OutputInterpretation | str] = None
) -> OutputInterpretation:
    if interp is None:
        # hamming is per bit; wide output lists get no numeric word
        if metric is Metric.HAMMING and len(netlist.outputs) > MAX_WORD_BITS:
            interp = OutputInterpretation()
        else:
            interp = OutputInterpretation.single_word(netlist.outputs)
    elif isinstance(interp, str):
        interp = OutputInterpretation.parse(interp)
    interp.validate(netlist.outputs, metric)
    return interp


@dataclass(frozen=True)
class QorReport:
    metric: Metric
    value: float
    normalized: float
    samples: int
    seed: int
    exhaustive: bool
    stderr: float = 0.0
    prng: str = PRNG_ID

    def to_dict(self) -> dict:
        return {
            "metric": self.metric.value,
            "value": self.value,
            "normalized": self.normalized,
            "samples": self.samples,
            "seed": self.seed,
            "exhaustive": self.exhaustive,
            "stderr": self.stderr,
            "prng": self.prng,
        }


def derive_seed(seed: int, purpose: str) -> int:
    """Seed for an independent stream tied to ``seed`` and a purpose label."""
    sequence = np.random.SeedSequence([int(seed), zlib.crc32(purpose.encode("utf-8"))])
    return int(sequence.generate_state(1, np.uint32)[0])


def is_exhaustive(k: int, samples: int, exhaustive: Optional[bool] = None) -> bool:
    if exhaustive is None:
        return k <= EXHAUSTIVE_CAP and (1 << k) <= samples
    if exhaustive and k > EXHAUSTIVE_CAP:
        raise BudgetError(f"Exhaustive evaluation of {k} inputs exceeds the cap of {EXHAUSTIVE_CAP}")
    return exhaustive


def _exhaustive_chunk(k: int, start: int, count: int) -> np.ndarray:
    rows = np.arange(start, start + count, dtype=np.int64)
    bits = np.array([(rows >> (k - 1 - i)) & 1 for i in range(k)], dtype=bool).reshape(k, count)
    return pack_bits(bits)


def _random_chunk(k: int, count: int, child: np.random.SeedSequence) -> np.ndarray:
    rng = np.random.Generator(np.random.PCG64(child))
    return rng.integers(0, np.iinfo(np.uint64).max, size=(k, word_count(count)), dtype=np.uint64, endpoint=True)


@dataclass(frozen=True)
class _ChunkSpec:
    k: int
    count: int
    start: int = 0
    child: Optional[np.random.SeedSequence] = None

    def words(self) -> np.ndarray:
        if self.child is None:
            return _exhaustive_chunk(self.k, self.start, self.count)
        return _random_chunk(self.k, self.count, self.child)


def _chunk_specs(k: int, samples: int, seed: int, exhaustive: bool) -> List[_ChunkSpec]:
    if exhaustive:
        total = 1 << k
        return [_ChunkSpec(k, min(CHUNK_SAMPLES, total - start), start=start) for start in range(0, total, CHUNK_SAMPLES)]
    if samples < 1:
        raise ConfigError(f"Sample count must be at least 1, got {samples}")
    chunks = math.ceil(samples / CHUNK_SAMPLES)
    children = np.random.SeedSequence(int(seed)).spawn(chunks)
    return [
        _ChunkSpec(k, min(CHUNK_SAMPLES, samples - i * CHUNK_SAMPLES), child=child) for i, child in enumerate(children)
    ]


def draw_inputs(
    k: int, samples: int, seed: int, exhaustive: Optional[bool] = None
) -> Iterator[Tuple[np.ndarray, int]]:
    """Yield ``(packed words of shape (k, W), sample count)`` chunks."""
    for spec in _chunk_specs(k, samples, seed, is_exhaustive(k, samples, exhaustive)):
        yield spec.words(), spec.count


def word_values(bits: np.ndarray, columns: Sequence[int]) -> np.ndarray:
    """Unsigned integer per sample from the given output rows, first row most significant."""
    values = np.zeros(bits.shape[1], dtype=np.uint64)
    for column in columns:
        values = (values << np.uint64(1)) | bits[column].astype(np.uint64)
    return values


def score(
    golden_bits: np.ndarray, approx_bits: np.ndarray, metric: Metric, words: Sequence[Sequence[int]]
) -> Tuple[np.ndarray, np.ndarray]:
    """Per-sample error and normalized error for boolean (outputs, samples) arrays."""
    if metric is Metric.HAMMING:
        rows = golden_bits.shape[0]
        errors = (golden_bits != approx_bits).sum(axis=0) / max(rows, 1)
        return errors, errors
    count = golden_bits.shape[1]
    raw = np.zeros(count, dtype=np.float64)
    normalized = np.zeros(count, dtype=np.float64)
    for columns in words:
        golden = word_values(golden_bits, columns)
        approx = word_values(approx_bits, columns)
        distance = np.where(golden >= approx, golden - approx, approx - golden).astype(np.float64)
        if metric is Metric.RELATIVE:
            term = distance / np.maximum(golden.astype(np.float64), 1.0)
            raw += term
            normalized += term
        else:
            raw += distance
            normalized += distance / float((1 << len(columns)) - 1)
    scale = 1.0 / max(len(words), 1)
    return raw * scale, normalized * scale


class ErrorAccumulator:
    """Running sums over sample chunks; chunk order fixes the floating-point result."""

    def __init__(self) -> None:
        self.count = 0
        self.total = 0.0
        self.total_sq = 0.0
        self.normalized = 0.0

    def add(self, raw: np.ndarray, normalized: np.ndarray) -> None:
        self.count += int(raw.size)
        self.total += float(raw.sum())
        self.total_sq += float(np.square(raw).sum())
        self.normalized += float(normalized.sum())

    def merge(self, other: "ErrorAccumulator") -> None:
        self.count += other.count
        self.total += other.total
        self.total_sq += other.total_sq
        self.normalized += other.normalized

    def report(self, metric: Metric, seed: int, exhaustive: bool) -> QorReport:
        count = max(self.count, 1)
        mean = self.total / count
        stderr = 0.0
        if not exhaustive and self.count > 1:
            variance = max(self.total_sq / count - mean * mean, 0.0) * count / (count - 1)
            stderr = math.sqrt(variance / count)
        return QorReport(
            metric=metric,
            value=max(mean, 0.0),
            normalized=max(self.normalized / count, 0.0),
            samples=self.count,
            seed=int(seed),
            exhaustive=exhaustive,
            stderr=stderr,
        )


def _evaluate_chunk(
    golden: Netlist, approx: Netlist, metric: Metric, words: List[List[int]], spec: _ChunkSpec
) -> ErrorAccumulator:
    packed = spec.words()
    golden_bits = unpack_bits(simulate_words(golden, packed), spec.count)
    approx_bits = unpack_bits(simulate_words(approx, packed), spec.count)
    accumulator = ErrorAccumulator()
    accumulator.add(*score(golden_bits, approx_bits, metric, words))
    return accumulator


def check_ports(golden: Netlist, approx: Netlist) -> None:
    if golden.inputs != approx.inputs or golden.outputs != approx.outputs:
        raise PortMismatchError(
            f"Port lists differ: {golden.name} has {len(golden.inputs)}/{len(golden.outputs)} ports, "
            f"{approx.name} has {len(approx.inputs)}/{len(approx.outputs)}"
        )


def measure(
    golden: Netlist,
    approx: Netlist,
    metric: Metric | str,
    interp: Optional[OutputInterpretation | str] = None,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
    exhaustive: Optional[bool] = None,
    workers: int = 1,
) -> QorReport:
    metric = Metric.parse(metric)
    check_ports(golden, approx)
    interp = resolve_interpretation(golden, metric, interp)
    words = interp.indices(golden.outputs)
    k = len(golden.inputs)
    full = is_exhaustive(k, samples, exhaustive)
    specs = _chunk_specs(k, samples, seed, full)
    tasks = [(golden, approx, metric, words, spec) for spec in specs]

    if workers > 1 and len(tasks) > 1:
        with Pool(processes=min(workers, len(tasks))) as pool:
            parts = pool.starmap(_evaluate_chunk, tasks)
    else:
        parts = [_evaluate_chunk(*task) for task in tasks]

    accumulator = ErrorAccumulator()
    for part in parts:
        accumulator.merge(part)
    report = accumulator.report(metric, seed, full)
    logger.debug(
        "Measured %s error %.6f over %d %s samples",
        metric.value,
        report.value,
        report.samples,
        "exhaustive" if full else "random",
    )
    return report


def avg_relative_error(
    golden: Netlist,
    approx: Netlist,
    interp: Optional[OutputInterpretation | str] = None,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
    **kwargs,
) -> QorReport:
    return measure(golden, approx, Metric.RELATIVE, interp, samples, seed, **kwargs)


def avg_absolute_error(
    golden: Netlist,
    approx: Netlist,
    interp: Optional[OutputInterpretation | str] = None,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
    **kwargs,
) -> QorReport:
    return measure(golden, approx, Metric.ABSOLUTE, interp, samples, seed, **kwargs)


def hamming_error_rate(
    golden: Netlist, approx: Netlist, samples: int = DEFAULT_SAMPLES, seed: int = 0, **kwargs
) -> QorReport:
    return measure(golden, approx, Metric.HAMMING, None, samples, seed, **kwargs)


def exhaustive_qor(
    golden: Netlist,
    approx: Netlist,
    metric: Metric | str,
    interp: Optional[OutputInterpretation | str] = None,
    workers: int = 1,
) -> QorReport:
    k = len(golden.inputs)
    if k > EXHAUSTIVE_CAP:
        raise BudgetError(f"Exhaustive evaluation of {k} inputs exceeds the cap of {EXHAUSTIVE_CAP}")
    return measure(golden, approx, metric, interp, samples=1 << k, seed=0, exhaustive=True, workers=workers)
