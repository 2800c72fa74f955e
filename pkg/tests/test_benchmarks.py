import pytest

from bmfsynth.benchmarks import (
    BENCHMARKS,
    array_multiplier,
    butterfly,
    mac_core,
    random_circuit,
    random_truth_table,
    sad,
)
from bmfsynth.netlist import simulate, truth_table
from bmfsynth.qor import OutputInterpretation, Metric


def _bits(value, width):
    return [int(bit) for bit in format(value, f"0{width}b")]


def _int(bits):
    return int("".join(str(bit) for bit in bits), 2)


def test_multiplier(rng):
    netlist = array_multiplier(4)
    for a, b in rng.integers(0, 16, size=(40, 2)):
        assert _int(simulate(netlist, _bits(int(a), 4) + _bits(int(b), 4))) == a * b


def test_butterfly(rng):
    netlist = butterfly(4)
    for a, b in rng.integers(0, 16, size=(40, 2)):
        out = simulate(netlist, _bits(int(a), 4) + _bits(int(b), 4))
        assert _int(out[:5]) == a + b
        assert _int(out[5:]) == (int(a) - int(b)) % 32


def test_sum_of_absolute_differences(rng):
    netlist = sad(4, 3)
    for _ in range(40):
        pairs = rng.integers(0, 16, size=(3, 2))
        vector = []
        for a, b in pairs:
            vector += _bits(int(a), 4) + _bits(int(b), 4)
        assert _int(simulate(netlist, vector)) == sum(abs(int(a) - int(b)) for a, b in pairs)


def test_mac_core(rng):
    netlist = mac_core(3)
    for a, b, acc in zip(*(rng.integers(0, limit, size=30) for limit in (8, 8, 64))):
        vector = _bits(int(a), 3) + _bits(int(b), 3) + _bits(int(acc), 6)
        assert _int(simulate(netlist, vector)) == a * b + acc


def test_random_circuits_follow_their_table():
    assert truth_table(random_circuit(4, 3, seed=2)) == random_truth_table(4, 3, seed=2)
    assert random_truth_table(4, 3, seed=2) != random_truth_table(4, 3, seed=3)


@pytest.mark.parametrize("name", sorted(BENCHMARKS))
def test_registered_word_specs_cover_every_output(name):
    benchmark = BENCHMARKS[name]
    netlist = benchmark.build()
    OutputInterpretation.parse(benchmark.words).validate(netlist.outputs, Metric.RELATIVE)
