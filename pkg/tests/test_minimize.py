import numpy as np
import pytest

from bmfsynth.errors import BudgetError
from bmfsynth.minimize import cube_literals, cube_to_string, minimize, prime_implicants, string_to_cube


def _onset(n, minterms):
    onset = np.zeros(1 << n, dtype=bool)
    onset[list(minterms)] = True
    return onset


def _covered(cubes, n):
    index = np.arange(1 << n)
    covered = np.zeros(1 << n, dtype=bool)
    for mask, value in cubes:
        covered |= (index & ~mask) == value
    return covered


def test_cube_strings():
    assert cube_to_string(string_to_cube("1-0"), 3) == "1-0"
    assert cube_literals(string_to_cube("1-0"), 3) == 2
    assert string_to_cube("---") == (0b111, 0)


def test_trivial_functions():
    assert minimize(_onset(2, []), 2) == []
    assert [cube_to_string(c, 2) for c in minimize(_onset(2, range(4)), 2)] == ["--"]
    assert [cube_to_string(c, 2) for c in minimize(_onset(2, [3]), 2)] == ["11"]
    assert [cube_to_string(c, 2) for c in minimize(_onset(2, [1, 2, 3]), 2)] == ["-1", "1-"]


def test_cyclic_prime_implicants():
    onset = _onset(3, [0, 1, 2, 5, 6, 7])
    primes = {cube_to_string(c, 3) for c in prime_implicants(onset, 3)}
    assert primes == {"00-", "0-0", "-01", "-10", "1-1", "11-"}
    cover = minimize(onset, 3)
    assert {cube_to_string(c, 3) for c in cover} <= primes
    assert np.array_equal(_covered(cover, 3), onset)


def test_random_covers_are_exact_and_prime(rng):
    for n in (4, 5, 6):
        for _ in range(15):
            onset = rng.integers(0, 2, size=1 << n).astype(bool)
            cover = minimize(onset, n)
            assert np.array_equal(_covered(cover, n), onset)
            for mask, value in cover:
                for position in range(n):
                    bit = 1 << position
                    if mask & bit:
                        continue
                    grown = (mask | bit, value & ~bit)
                    assert (_covered([grown], n) & ~onset).any()


def test_input_limit():
    with pytest.raises(BudgetError):
        prime_implicants(np.zeros(1 << 13, dtype=bool), 13)
    with pytest.raises(ValueError):
        minimize(np.zeros(5, dtype=bool), 2)
