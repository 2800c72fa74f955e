import numpy as np
import pytest

from bmfsynth.bmf import AssoConfig, asso_factorize, association_candidates, factorize_best, oracle_factorize
from bmfsynth.boolmat import BitMatrix, Semiring, WeightVector, bool_product, hamming, weighted_distance
from bmfsynth.benchmarks import random_truth_table
from bmfsynth.errors import BudgetError, DimensionError

UNIFORM = AssoConfig(weight_mode="uniform")


def test_association_candidates():
    assert sorted(association_candidates(BitMatrix.identity(2), 1.0)) == [(0, 1), (1, 0)]
    assert association_candidates(BitMatrix.from_rows([[1, 1], [0, 0], [1, 1]]), 1.0) == [(1, 1)]
    assert association_candidates(BitMatrix.from_rows([[1, 1], [1, 0]]), 0.5) == [(1, 1)]


def test_full_degree_is_exact():
    for semiring in Semiring:
        result = asso_factorize(BitMatrix.identity(4), 4, AssoConfig(semiring=semiring))
        assert result.error == 0.0
        assert bool_product(result.B, result.C, semiring) == BitMatrix.identity(4)


@pytest.mark.parametrize("semiring", list(Semiring))
def test_full_degree_is_exact_on_random_matrices(semiring, rng):
    cfg = AssoConfig(semiring=semiring)
    for _ in range(250):
        rows, cols = int(rng.integers(1, 9)), int(rng.integers(1, 7))
        matrix = BitMatrix.from_array(rng.integers(0, 2, size=(rows, cols)))
        result = factorize_best(matrix, cols, cfg)
        assert result.error == 0.0
        assert bool_product(result.B, result.C, semiring) == matrix


def test_rank_one_matrix_is_recovered():
    matrix = bool_product(BitMatrix.from_rows([[1], [1], [0], [1]]), BitMatrix.from_rows([[1, 0, 1]]))
    result = asso_factorize(matrix, 1, AssoConfig())
    assert result.error == 0.0
    assert bool_product(result.B, result.C) == matrix


def test_block_diagonal_needs_two_vectors():
    matrix = BitMatrix.from_rows([[1, 1, 0, 0], [1, 1, 0, 0], [0, 0, 1, 1], [0, 0, 1, 1]])
    result = asso_factorize(matrix, 2, AssoConfig())
    assert result.error == 0.0
    assert oracle_factorize(matrix, 2).error == 0.0


def test_identity_at_degree_one_keeps_lowest_tau_on_ties():
    result = factorize_best(BitMatrix.identity(2), 1, AssoConfig(taus=(1.0, 0.5), weight_mode="uniform"))
    assert result.error == 1.0
    assert result.tau == 0.5
    assert result.B.shape == (2, 1)
    assert result.C.shape == (1, 2)


def test_degree_bounds():
    with pytest.raises(DimensionError):
        asso_factorize(BitMatrix.identity(3), 0, AssoConfig())
    with pytest.raises(DimensionError):
        asso_factorize(BitMatrix.identity(3), 4, AssoConfig())


def test_reported_error_and_history(rng):
    for semiring in Semiring:
        cfg = AssoConfig(semiring=semiring)
        for _ in range(20):
            matrix = BitMatrix.from_array(rng.integers(0, 2, size=(32, 6)))
            result = factorize_best(matrix, 3, cfg)
            recon = bool_product(result.B, result.C, semiring)
            assert result.error == weighted_distance(matrix, recon, cfg.weights_for(6))
            assert all(later <= earlier for earlier, later in zip(result.history, result.history[1:]))
            assert result.history[-1] == result.error


def test_oracle_small_cases():
    assert oracle_factorize(BitMatrix.identity(2), 1).error == 1.0
    assert oracle_factorize(BitMatrix.from_rows([[1, 1], [1, 1]]), 1).error == 0.0
    assert oracle_factorize(BitMatrix.identity(3), 3).error == 0.0
    with pytest.raises(BudgetError):
        oracle_factorize(BitMatrix.zeros(16, 4), 2)


def test_greedy_never_beats_oracle(rng):
    for _ in range(200):
        rows, cols = int(rng.integers(2, 7)), int(rng.integers(2, 5))
        matrix = BitMatrix.from_array(rng.integers(0, 2, size=(rows, cols)))
        for degree in range(1, min(cols, 12 // rows) + 1):
            for semiring in Semiring:
                cfg = AssoConfig(semiring=semiring, weight_mode="uniform")
                greedy = factorize_best(matrix, degree, cfg)
                oracle = oracle_factorize(matrix, degree, semiring)
                assert greedy.error >= oracle.error
                assert oracle.error == hamming(matrix, bool_product(oracle.B, oracle.C, semiring))


@pytest.mark.slow
def test_greedy_never_beats_oracle_on_taller_matrices(rng):
    for _ in range(50):
        matrix = BitMatrix.from_array(rng.integers(0, 2, size=(6, 4)))
        for degree in (1, 2, 3):
            greedy = factorize_best(matrix, degree, UNIFORM)
            assert greedy.error >= oracle_factorize(matrix, degree).error


def test_error_does_not_grow_with_degree(rng):
    for _ in range(20):
        matrix = BitMatrix.from_array(rng.integers(0, 2, size=(16, 5)))
        errors = [factorize_best(matrix, degree, UNIFORM).error for degree in range(1, 6)]
        assert errors == sorted(errors, reverse=True)
        assert errors[-1] == 0.0


def test_significance_weights_favour_high_bits():
    weights = WeightVector.powers_of_two(8)
    wins = trials = 0
    for seed in range(50):
        matrix = random_truth_table(6, 8, seed=seed)
        for degree in (2, 4, 6):
            weighted = factorize_best(matrix, degree, AssoConfig(weight_mode="pow2"))
            plain = factorize_best(matrix, degree, UNIFORM)
            weighted_error = weighted_distance(matrix, bool_product(weighted.B, weighted.C), weights)
            plain_error = weighted_distance(matrix, bool_product(plain.B, plain.C), weights)
            trials += 1
            wins += weighted_error <= plain_error
    assert wins / trials >= 0.6


def test_explicit_weight_vector_must_match_columns():
    cfg = AssoConfig(weights=WeightVector.uniform(3))
    with pytest.raises(DimensionError):
        asso_factorize(BitMatrix.identity(4), 2, cfg)


def test_config_rejects_bad_taus():
    with pytest.raises(ValueError):
        AssoConfig(taus=(0.0,))
    with pytest.raises(ValueError):
        AssoConfig(taus=())
    assert AssoConfig(taus=[1, 0.5]).taus == (1.0, 0.5)
    assert np.array_equal(AssoConfig().weights_for(3).as_array(), [4.0, 2.0, 1.0])
