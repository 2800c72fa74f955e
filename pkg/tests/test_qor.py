import numpy as np
import pytest

from bmfsynth.boolmat import BitMatrix
from bmfsynth.errors import BudgetError, ConfigError, PortMismatchError
from bmfsynth.netlist import GateKind, LogicNode, Netlist, from_truth_table
from bmfsynth.qor import (
    Metric,
    OutputInterpretation,
    avg_absolute_error,
    avg_relative_error,
    derive_seed,
    draw_inputs,
    exhaustive_qor,
    hamming_error_rate,
    measure,
)


def _constant_word(name: str, value: int, width: int) -> Netlist:
    outputs = tuple(f"y{i}" for i in reversed(range(width)))
    nodes = tuple(
        LogicNode.gate(GateKind.CONST1 if (value >> i) & 1 else GateKind.CONST0, f"y{i}") for i in range(width)
    )
    return Netlist(name=name, inputs=("x",), outputs=outputs, nodes=nodes)


def test_identical_circuits_have_no_error(adder8):
    for metric in Metric:
        report = measure(adder8, adder8, metric, samples=4096, seed=3)
        assert report.value == 0.0
        assert report.normalized == 0.0


def test_relative_error_of_a_single_word():
    report = avg_relative_error(_constant_word("golden", 4, 3), _constant_word("approx", 2, 3))
    assert report.exhaustive
    assert report.value == pytest.approx(0.5)


def test_absolute_error_is_normalized_by_word_range():
    report = avg_absolute_error(_constant_word("golden", 8, 4), _constant_word("approx", 6, 4))
    assert report.value == pytest.approx(2.0)
    assert report.normalized == pytest.approx(2.0 / 15.0)


def test_relative_error_guards_zero_reference():
    report = avg_relative_error(_constant_word("golden", 0, 3), _constant_word("approx", 3, 3))
    assert report.value == pytest.approx(3.0)


def test_hamming_rate_of_one_inverted_output():
    inputs = ("a", "b", "c", "d")
    outputs = tuple(f"y{i}" for i in range(4))
    golden = Netlist(
        name="wires",
        inputs=inputs,
        outputs=outputs,
        nodes=tuple(LogicNode.gate(GateKind.BUF, out, name) for out, name in zip(outputs, inputs)),
    )
    flipped = Netlist(
        name="wires",
        inputs=inputs,
        outputs=outputs,
        nodes=golden.nodes[:3] + (LogicNode.gate(GateKind.NOT, "y3", "d"),),
    )
    report = hamming_error_rate(golden, flipped)
    assert report.exhaustive
    assert report.value == pytest.approx(0.25)


def test_hamming_rate_counts_flipped_table_entries(rng):
    table = rng.integers(0, 2, size=(16, 4)).astype(bool)
    for flips in (1, 5, 17):
        cells = rng.choice(64, size=flips, replace=False)
        changed = table.copy().reshape(-1)
        changed[cells] ^= True
        golden = from_truth_table(BitMatrix.from_array(table))
        approx = from_truth_table(BitMatrix.from_array(changed.reshape(16, 4)))
        assert exhaustive_qor(golden, approx, "hamming").value == pytest.approx(flips / 64)


def test_truncated_adder_matches_closed_form(adder8, truncate):
    approx = truncate(adder8, ["s0"])
    report = exhaustive_qor(adder8, approx, Metric.RELATIVE)
    a, b = np.meshgrid(np.arange(256), np.arange(256))
    total = (a + b).astype(float)
    expected = np.mean(((a + b) & 1) / np.maximum(total, 1.0))
    assert report.value == pytest.approx(expected)
    assert report.samples == 1 << 16
    assert report.stderr == 0.0


def test_sampling_agrees_with_exhaustive(adder8, truncate):
    approx = truncate(adder8, ["s0", "s1", "s2"])
    for metric in Metric:
        exact = exhaustive_qor(adder8, approx, metric)
        sampled = measure(adder8, approx, metric, samples=200_000, seed=11, exhaustive=False)
        assert not sampled.exhaustive
        assert sampled.samples == 200_000
        assert abs(sampled.value - exact.value) <= 4 * sampled.stderr + 1e-12


def test_reports_are_reproducible(adder32, truncate):
    approx = truncate(adder32, ["s0", "s1"])
    first = measure(adder32, approx, "relative", samples=5000, seed=7)
    second = measure(adder32, approx, "relative", samples=5000, seed=7)
    assert first == second
    assert not first.exhaustive


def test_worker_count_does_not_change_the_result(adder32, truncate):
    approx = truncate(adder32, ["s0", "s3"])
    serial = measure(adder32, approx, "absolute", samples=150_000, seed=5, workers=1)
    parallel = measure(adder32, approx, "absolute", samples=150_000, seed=5, workers=2)
    assert serial == parallel


def test_draw_inputs_chunks():
    chunks = list(draw_inputs(3, 10, seed=0))
    assert [count for _, count in chunks] == [8]
    sampled = list(draw_inputs(40, 70_000, seed=1))
    assert [count for _, count in sampled] == [65_536, 70_000 - 65_536]
    assert sampled[0][0].shape == (40, 1024)


def test_derived_seeds():
    assert derive_seed(0, "verify") == derive_seed(0, "verify")
    assert derive_seed(0, "verify") != derive_seed(1, "verify")
    assert derive_seed(0, "verify") != derive_seed(0, "explore")


def test_output_words():
    interp = OutputInterpretation.parse("sum:s7..s0;c:c")
    assert interp.words[0].bits == tuple(f"s{i}" for i in reversed(range(8)))
    assert interp.words[1].bits == ("c",)
    assert OutputInterpretation.parse("w:y0..y2").words[0].bits == ("y0", "y1", "y2")

    outputs = ("s1", "s0", "c")
    partial = OutputInterpretation.parse("s:s1..s0")
    partial.validate(outputs, Metric.HAMMING)
    with pytest.raises(ConfigError):
        partial.validate(outputs, Metric.RELATIVE)
    with pytest.raises(ConfigError):
        OutputInterpretation.parse("s:s2..s0").validate(outputs, Metric.HAMMING)
    with pytest.raises(ConfigError):
        Metric.parse("psnr")


def test_two_words_are_averaged():
    golden = _constant_word("g", 0b0100, 4)
    approx = _constant_word("a", 0b0010, 4)
    report = measure(golden, approx, "relative", "hi:y3,y2;lo:y1,y0")
    # high word 1 -> 0 gives 1.0, low word 0 -> 2 gives 2.0 with the zero guard
    assert report.value == pytest.approx(1.5)


def test_port_mismatch(adder8, and2):
    with pytest.raises(PortMismatchError):
        measure(adder8, and2, "hamming")


def test_exhaustive_cap():
    inputs = tuple(f"x{i}" for i in range(21))
    wide = Netlist(name="wide", inputs=inputs, outputs=("y",), nodes=(LogicNode.gate(GateKind.OR, "y", *inputs),))
    with pytest.raises(BudgetError):
        exhaustive_qor(wide, wide, "hamming")
    with pytest.raises(BudgetError):
        measure(wide, wide, "hamming", exhaustive=True)


@pytest.mark.slow
def test_million_samples_agree_with_exhaustive(mult8, truncate):
    approx = truncate(mult8, ["p0", "p1", "p2", "p3"])
    for metric in Metric:
        exact = exhaustive_qor(mult8, approx, metric)
        sampled = measure(mult8, approx, metric, samples=1_000_000, seed=2, exhaustive=False)
        assert abs(sampled.value - exact.value) <= 3 * sampled.stderr + 1e-12


def _wide(kind_of_last: GateKind, width: int = 70) -> Netlist:
    outputs = tuple(f"y{i}" for i in range(width))
    kinds = [GateKind.AND] * (width - 1) + [kind_of_last]
    nodes = tuple(LogicNode.gate(kind, out, "a", "b") for kind, out in zip(kinds, outputs))
    return Netlist(name="wide", inputs=("a", "b"), outputs=outputs, nodes=nodes)


def test_hamming_accepts_more_outputs_than_a_machine_word():
    golden = _wide(GateKind.AND)
    assert hamming_error_rate(golden, golden, samples=16, seed=0).value == 0.0
    report = hamming_error_rate(golden, _wide(GateKind.OR), samples=16, seed=0)
    assert report.exhaustive
    assert report.value == pytest.approx(0.5 / 70)

    spanning = OutputInterpretation.single_word(golden.outputs)
    spanning.validate(golden.outputs, Metric.HAMMING)
    with pytest.raises(ConfigError):
        spanning.validate(golden.outputs, Metric.RELATIVE)
    with pytest.raises(ConfigError):
        measure(golden, golden, "relative", samples=16)
