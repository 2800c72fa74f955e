"""
Bit-packed Boolean matrices and their products over the OR semi-ring and the XOR field.

Rows are stored as little-endian ``uint64`` words: column ``j`` lives in word ``j // 64``
at bit ``j % 64``. Padding bits past ``cols`` are always zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence, Tuple

import numpy as np

from .errors import DimensionError

WORD_BITS = 64


class Semiring(str, Enum):
    OR = "or"
    XOR = "xor"

    @classmethod
    def parse(cls, value: object) -> "Semiring":
        if isinstance(value, Semiring):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError as exc:
            raise ValueError(f"Unknown semiring {value!r}; expected 'or' or 'xor'") from exc


def word_count(bits: int) -> int:
    return -(-bits // WORD_BITS)


def pack_bits(bits: np.ndarray) -> np.ndarray:
    """Pack a 2-D boolean array along its last axis into uint64 words."""
    bits = np.asarray(bits, dtype=bool)
    rows, count = bits.shape
    padded = np.zeros((rows, word_count(count) * WORD_BITS), dtype=bool)
    padded[:, :count] = bits
    packed = np.packbits(padded, axis=1, bitorder="little")
    return np.ascontiguousarray(packed).view("<u8").astype(np.uint64)


def unpack_bits(words: np.ndarray, count: int) -> np.ndarray:
    words = np.ascontiguousarray(words, dtype="<u8")
    raw = np.unpackbits(words.view(np.uint8), axis=1, bitorder="little")
    return raw[:, :count].astype(bool)


def popcount(words: np.ndarray) -> int:
    words = np.ascontiguousarray(words, dtype="<u8")
    return int(np.unpackbits(words.view(np.uint8)).sum())


class BitMatrix:
    """Immutable Boolean matrix. Holds truth tables and their factors."""

    __slots__ = ("rows", "cols", "_words")

    def __init__(self, rows: int, cols: int, words: np.ndarray) -> None:
        if rows < 0 or cols < 0:
            raise DimensionError(f"Negative matrix shape {rows}x{cols}")
        words = np.array(words, dtype=np.uint64, copy=True).reshape(rows, word_count(cols))
        tail = cols % WORD_BITS
        if tail and rows:
            words[:, -1] &= np.uint64((1 << tail) - 1)
        words.setflags(write=False)
        self.rows = rows
        self.cols = cols
        self._words = words

    @classmethod
    def from_array(cls, array: np.ndarray) -> "BitMatrix":
        array = np.asarray(array, dtype=bool)
        if array.ndim != 2:
            raise DimensionError(f"Expected a 2-D array, got shape {array.shape}")
        return cls(array.shape[0], array.shape[1], pack_bits(array))

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int]], cols: int | None = None) -> "BitMatrix":
        data = [list(row) for row in rows]
        width = cols if cols is not None else (len(data[0]) if data else 0)
        if any(len(row) != width for row in data):
            raise DimensionError("Rows of unequal length")
        return cls.from_array(np.array(data, dtype=bool).reshape(len(data), width))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(rows, cols, np.zeros((rows, word_count(cols)), dtype=np.uint64))

    @classmethod
    def identity(cls, size: int) -> "BitMatrix":
        return cls.from_array(np.eye(size, dtype=bool))

    @classmethod
    def from_text(cls, text: str) -> "BitMatrix":
        lines = [line.strip() for line in text.strip().splitlines() if line.strip()]
        if not lines:
            raise DimensionError("Empty matrix dump")
        try:
            rows, cols = (int(token) for token in lines[0].split())
        except ValueError as exc:
            raise DimensionError(f"Bad matrix header {lines[0]!r}") from exc
        body = lines[1:]
        if len(body) != rows or any(len(line) != cols or set(line) - {"0", "1"} for line in body):
            raise DimensionError(f"Matrix dump does not match header {rows}x{cols}")
        return cls.from_rows(([ch == "1" for ch in line] for line in body), cols=cols)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.rows, self.cols

    @property
    def words(self) -> np.ndarray:
        return self._words

    def get(self, i: int, j: int) -> bool:
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(f"({i}, {j}) outside {self.rows}x{self.cols} matrix")
        return bool((int(self._words[i, j // WORD_BITS]) >> (j % WORD_BITS)) & 1)

    def set(self, i: int, j: int, value: bool) -> "BitMatrix":
        """Return a copy with cell (i, j) replaced; the receiver is left unchanged."""
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(f"({i}, {j}) outside {self.rows}x{self.cols} matrix")
        words = self._words.copy()
        mask = np.uint64(1 << (j % WORD_BITS))
        if value:
            words[i, j // WORD_BITS] |= mask
        else:
            words[i, j // WORD_BITS] &= ~mask
        return BitMatrix(self.rows, self.cols, words)

    def to_array(self) -> np.ndarray:
        if self.rows == 0:
            return np.zeros((0, self.cols), dtype=bool)
        return unpack_bits(self._words, self.cols)

    def row(self, i: int) -> Tuple[int, ...]:
        return tuple(int(bit) for bit in self.to_array()[i])

    def to_text(self) -> str:
        lines = [f"{self.rows} {self.cols}"]
        lines.extend("".join("1" if bit else "0" for bit in row) for row in self.to_array())
        return "\n".join(lines) + "\n"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self._words, other._words))

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self._words.tobytes()))

    def __repr__(self) -> str:
        return f"BitMatrix({self.rows}x{self.cols})"


@dataclass(frozen=True)
class WeightVector:
    weights: Tuple[float, ...]

    def __post_init__(self) -> None:
        values = tuple(float(w) for w in self.weights)
        if any(w < 0 for w in values):
            raise ValueError(f"Weights must be non-negative: {values}")
        if values and not any(w > 0 for w in values):
            raise ValueError("Weights must not all be zero")
        object.__setattr__(self, "weights", values)

    @classmethod
    def uniform(cls, size: int) -> "WeightVector":
        return cls(tuple(1.0 for _ in range(size)))

    @classmethod
    def powers_of_two(cls, size: int) -> "WeightVector":
        # column 0 is the most significant bit
        return cls(tuple(float(2 ** (size - 1 - j)) for j in range(size)))

    def as_array(self) -> np.ndarray:
        return np.array(self.weights, dtype=np.float64)

    def __len__(self) -> int:
        return len(self.weights)


def _check_same_shape(a: BitMatrix, b: BitMatrix) -> None:
    if a.shape != b.shape:
        raise DimensionError(f"Shape mismatch: {a.rows}x{a.cols} vs {b.rows}x{b.cols}")


def bool_product(b: BitMatrix, c: BitMatrix, semiring: Semiring = Semiring.OR) -> BitMatrix:
    """Boolean product B·C; AND for multiplication, OR or XOR for addition."""
    if b.cols != c.rows:
        raise DimensionError(
            f"Cannot multiply {b.rows}x{b.cols} by {c.rows}x{c.cols}: inner dimensions differ"
        )
    semiring = Semiring.parse(semiring)
    result = np.zeros((b.rows, word_count(c.cols)), dtype=np.uint64)
    selectors = b.to_array()
    for l in range(b.cols):
        rows = selectors[:, l]
        if semiring is Semiring.OR:
            result[rows] |= c.words[l]
        else:
            result[rows] ^= c.words[l]
    return BitMatrix(b.rows, c.cols, result)


def hamming(a: BitMatrix, b: BitMatrix) -> int:
    _check_same_shape(a, b)
    return popcount(a.words ^ b.words)


def weighted_distance(a: BitMatrix, b: BitMatrix, weights: WeightVector | Sequence[float]) -> float:
    """Column-weighted mismatch count: sum over differing cells (i, j) of w[j]."""
    _check_same_shape(a, b)
    w = weights.as_array() if isinstance(weights, WeightVector) else np.asarray(weights, dtype=np.float64)
    if w.shape != (a.cols,):
        raise DimensionError(f"Weight vector of length {w.size} does not match {a.cols} columns")
    mismatches = (a.to_array() != b.to_array()).sum(axis=0)
    return float(mismatches @ w)
