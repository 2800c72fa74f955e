"""
ASSO-style Boolean matrix factorization with column weights, plus an exhaustive oracle.

The greedy cover follows the association-matrix construction: every column of M
proposes a candidate basis row made of the columns it is associated with at
confidence ``tau``; candidates are then picked one per degree by weighted cover gain.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .boolmat import BitMatrix, Semiring, WeightVector, bool_product, weighted_distance
from .errors import BudgetError, DimensionError

logger = logging.getLogger(__name__)

DEFAULT_TAUS: Tuple[float, ...] = (0.6, 0.7, 0.8, 0.9, 1.0)
ORACLE_BUDGET = 24
WEIGHT_MODES = {"pow2", "uniform"}


@dataclass(frozen=True)
class AssoConfig:
    taus: Tuple[float, ...] = DEFAULT_TAUS
    semiring: Semiring = Semiring.OR
    weights: Optional[WeightVector] = None
    weight_mode: str = "pow2"
    allow_zero_gain: bool = False

    def __post_init__(self) -> None:
        taus = tuple(float(t) for t in self.taus)
        if not taus:
            raise ValueError("At least one association threshold is required")
        for tau in taus:
            if not 0.0 < tau <= 1.0:
                raise ValueError(f"Association threshold {tau} outside (0, 1]")
        if self.weight_mode not in WEIGHT_MODES:
            raise ValueError(f"Unknown weight mode {self.weight_mode!r}; expected one of {sorted(WEIGHT_MODES)}")
        object.__setattr__(self, "taus", taus)
        object.__setattr__(self, "semiring", Semiring.parse(self.semiring))

    def weights_for(self, cols: int) -> WeightVector:
        if self.weights is not None:
            if len(self.weights) != cols:
                raise DimensionError(f"Weight vector of length {len(self.weights)} does not match {cols} columns")
            return self.weights
        if self.weight_mode == "uniform":
            return WeightVector.uniform(cols)
        return WeightVector.powers_of_two(cols)


@dataclass(frozen=True)
class FactorResult:
    B: BitMatrix
    C: BitMatrix
    f: int
    tau: Optional[float]
    error: float
    semiring: Semiring
    # weighted error after each consumed basis vector, starting from the empty cover
    history: Tuple[float, ...] = field(default=(), compare=False)


def _candidate_matrix(matrix: BitMatrix, tau: float) -> np.ndarray:
    if matrix.rows == 0 or matrix.cols == 0:
        raise DimensionError(f"Cannot factorize an empty {matrix.rows}x{matrix.cols} matrix")
    if not 0.0 < tau <= 1.0:
        raise ValueError(f"Association threshold {tau} outside (0, 1]")
    data = matrix.to_array().astype(np.int64)
    gram = data.T @ data
    candidates: List[np.ndarray] = []
    seen = set()
    for i in range(matrix.cols):
        if gram[i, i] == 0:
            row = np.zeros(matrix.cols, dtype=bool)
            row[i] = True
        else:
            row = gram[i] / gram[i, i] >= tau
        key = row.tobytes()
        if key in seen:
            continue
        seen.add(key)
        candidates.append(row)
    return np.array(candidates, dtype=bool)


def association_candidates(matrix: BitMatrix, tau: float) -> List[Tuple[int, ...]]:
    """Thresholded rows of the column association matrix, duplicates removed."""
    return [tuple(int(bit) for bit in row) for row in _candidate_matrix(matrix, tau)]


def _check_degree(matrix: BitMatrix, degree: int) -> None:
    if not 1 <= degree <= matrix.cols:
        raise DimensionError(f"Factorization degree {degree} outside 1..{matrix.cols}")


def _exact(matrix: BitMatrix, cfg: AssoConfig, tau: Optional[float]) -> FactorResult:
    return FactorResult(
        B=matrix,
        C=BitMatrix.identity(matrix.cols),
        f=matrix.cols,
        tau=tau,
        error=0.0,
        semiring=cfg.semiring,
        history=(0.0,),
    )


def asso_factorize(matrix: BitMatrix, degree: int, cfg: AssoConfig, tau: Optional[float] = None) -> FactorResult:
    _check_degree(matrix, degree)
    tau = cfg.taus[0] if tau is None else float(tau)
    if degree == matrix.cols:
        return _exact(matrix, cfg, tau)

    weights = cfg.weights_for(matrix.cols)
    w = weights.as_array()
    target = matrix.to_array()
    candidates = _candidate_matrix(matrix, tau)
    candidate_weights = candidates.T.astype(np.float64)
    xor = cfg.semiring is Semiring.XOR

    b = np.zeros((matrix.rows, degree), dtype=bool)
    c = np.zeros((degree, matrix.cols), dtype=bool)
    recon = np.zeros_like(target)
    history = [float(((recon != target) * w).sum())]

    for step in range(degree):
        if xor:
            signed = np.where(target != recon, 1.0, -1.0)
        else:
            signed = np.where(target, 1.0, -1.0) * ~recon
        gains = (signed * w) @ candidate_weights
        totals = np.where(gains > 0, gains, 0.0).sum(axis=0)
        best = int(np.argmax(totals))
        if totals[best] <= 0 and not cfg.allow_zero_gain:
            logger.debug("Greedy cover stopped after %d of %d basis vectors (tau=%.2f)", step, degree, tau)
            break
        column = gains[:, best] > 0
        b[:, step] = column
        c[step] = candidates[best]
        cover = np.outer(column, candidates[best])
        recon = recon ^ cover if xor else recon | cover
        history.append(float(((recon != target) * w).sum()))

    b_matrix = BitMatrix.from_array(b)
    c_matrix = BitMatrix.from_array(c)
    error = weighted_distance(matrix, bool_product(b_matrix, c_matrix, cfg.semiring), weights)
    return FactorResult(
        B=b_matrix,
        C=c_matrix,
        f=degree,
        tau=tau,
        error=error,
        semiring=cfg.semiring,
        history=tuple(history),
    )


def factorize_best(matrix: BitMatrix, degree: int, cfg: AssoConfig) -> FactorResult:
    """Sweep every association threshold and keep the most accurate factorization."""
    _check_degree(matrix, degree)
    best: Optional[FactorResult] = None
    for tau in sorted(cfg.taus):
        result = asso_factorize(matrix, degree, cfg, tau=tau)
        if best is None or result.error < best.error:
            best = result
    assert best is not None
    return best


def _popcount(values: np.ndarray) -> np.ndarray:
    x = values.astype(np.uint64)
    x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
    x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
    x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return ((x * np.uint64(0x0101010101010101)) >> np.uint64(56)).astype(np.int64)


def oracle_factorize(
    matrix: BitMatrix,
    degree: int,
    semiring: Semiring = Semiring.OR,
    weights: Optional[WeightVector | Sequence[float]] = None,
) -> FactorResult:
    """
    Exhaustive minimum-error factorization for small matrices.

    Every B in {0,1}^(rows x degree) is enumerated in lexicographic (row-major) order;
    for a fixed B each column of C is chosen independently among the 2^degree basis
    subsets. The first optimum found is kept, which is the lexicographically smallest (B, C).
    """
    rows, cols = matrix.shape
    if degree < 1:
        raise DimensionError(f"Factorization degree {degree} must be at least 1")
    if rows * degree > ORACLE_BUDGET:
        raise BudgetError(f"Oracle enumeration over {rows}x{degree} bits exceeds the budget of {ORACLE_BUDGET}")
    semiring = Semiring.parse(semiring)
    if weights is None:
        weights = WeightVector.uniform(cols)
    elif not isinstance(weights, WeightVector):
        weights = WeightVector(tuple(weights))
    if len(weights) != cols:
        raise DimensionError(f"Weight vector of length {len(weights)} does not match {cols} columns")
    w = weights.as_array()

    target = matrix.to_array()
    shifts = np.array([rows - 1 - r for r in range(rows)], dtype=np.int64)
    column_codes = (target.astype(np.int64) << shifts[:, None]).sum(axis=0)

    bits = rows * degree
    subsets = 1 << degree
    batch = max(1, (1 << 21) // (subsets * max(cols, 1)))
    best_error = np.inf
    best_code = 0
    best_choice = np.zeros(cols, dtype=np.int64)

    for start in range(0, 1 << bits, batch):
        codes = np.arange(start, min(1 << bits, start + batch), dtype=np.int64)
        basis = np.zeros((codes.size, degree), dtype=np.int64)
        for r in range(rows):
            for l in range(degree):
                bit = (codes >> (bits - 1 - (r * degree + l))) & 1
                basis[:, l] |= bit << (rows - 1 - r)
        recon = np.zeros((codes.size, subsets), dtype=np.int64)
        for subset in range(1, subsets):
            low = subset & -subset
            basis_index = degree - low.bit_length()
            previous = recon[:, subset ^ low]
            recon[:, subset] = previous ^ basis[:, basis_index] if semiring is Semiring.XOR else previous | basis[:, basis_index]
        mismatches = _popcount(recon[:, :, None] ^ column_codes[None, None, :])
        choice = mismatches.argmin(axis=1)
        errors = mismatches.min(axis=1) @ w
        index = int(np.argmin(errors))
        if errors[index] < best_error:
            best_error = float(errors[index])
            best_code = int(codes[index])
            best_choice = choice[index]

    b = np.array(
        [[(best_code >> (bits - 1 - (r * degree + l))) & 1 for l in range(degree)] for r in range(rows)],
        dtype=bool,
    )
    c = np.array(
        [[(int(best_choice[j]) >> (degree - 1 - l)) & 1 for j in range(cols)] for l in range(degree)],
        dtype=bool,
    )
    b_matrix = BitMatrix.from_array(b.reshape(rows, degree))
    c_matrix = BitMatrix.from_array(c.reshape(degree, cols))
    error = weighted_distance(matrix, bool_product(b_matrix, c_matrix, semiring), weights)
    return FactorResult(B=b_matrix, C=c_matrix, f=degree, tau=None, error=error, semiring=semiring, history=(error,))
