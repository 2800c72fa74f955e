import pytest

from bmfsynth.blif import emit_blif, parse_blif, read_blif, write_blif
from bmfsynth.errors import BlifSyntaxError, NetlistError
from bmfsynth.netlist import GateKind, LogicNode, Netlist, simulate_batch

AND_BLIF = """\
.model and2
.inputs a b
.outputs y
.names a b y
11 1
.end
"""

HEADER = ".model m\n.inputs a b\n.outputs y\n"


def test_parse_and_gate():
    netlist = parse_blif(AND_BLIF)
    assert netlist.name == "and2"
    assert netlist.inputs == ("a", "b")
    assert netlist.node("y").kind is GateKind.PLA
    assert netlist.node("y").cubes == ("11",)


def test_comments_and_continuations():
    text = """\
# half adder
.model ha
.inputs a \\
  b
.outputs s c   # two outputs
.names a b s
01 1
10 1
.names a b c
11 1
.end
"""
    netlist = parse_blif(text)
    assert netlist.inputs == ("a", "b")
    assert simulate_batch(netlist, [[0, 1], [1, 1]]) == [(1, 0), (0, 1)]


def test_constants():
    netlist = parse_blif(".model c\n.inputs a\n.outputs one zero\n.names one\n1\n.names zero\n.end\n")
    assert netlist.node("one").kind is GateKind.CONST1
    assert netlist.node("zero").kind is GateKind.CONST0
    assert ".names one\n1\n" in emit_blif(netlist)


def test_latch_is_rejected():
    with pytest.raises(BlifSyntaxError, match="sequential not supported") as excinfo:
        parse_blif(".model s\n.inputs d\n.outputs q\n.latch d q 0\n.end\n")
    assert excinfo.value.exit_code == 1
    assert excinfo.value.line == 4


def test_hierarchy_is_rejected():
    with pytest.raises(BlifSyntaxError, match="hierarchical"):
        parse_blif(".model h\n.inputs a\n.outputs y\n.subckt inv a=a y=y\n.end\n")


@pytest.mark.parametrize(
    "body, line",
    [
        (".names a b y\n1x 1\n", 5),
        (".names a b y\n11 0\n", 5),
        (".names a b y\n111 1\n", 5),
        ("11 1\n", 4),
        (".frobnicate\n", 4),
    ],
)
def test_syntax_errors_carry_line_numbers(body, line):
    with pytest.raises(BlifSyntaxError) as excinfo:
        parse_blif(HEADER + body + ".end\n")
    assert excinfo.value.line == line


def test_structural_errors_surface_from_netlist():
    with pytest.raises(NetlistError, match="cycle"):
        parse_blif(".model loop\n.inputs a\n.outputs p\n.names a q p\n11 1\n.names p q\n1 1\n.end\n")
    with pytest.raises(NetlistError, match="undriven"):
        parse_blif(".model open\n.inputs a\n.outputs y\n.end\n")


def test_primitives_are_emitted_as_covers(rng):
    inputs = ("a", "b", "c")
    nodes = tuple(
        LogicNode.gate(kind, f"y_{kind.value}", *inputs)
        for kind in (GateKind.AND, GateKind.OR, GateKind.NAND, GateKind.NOR, GateKind.XOR, GateKind.XNOR)
    ) + (LogicNode.gate(GateKind.NOT, "y_not", "a"), LogicNode.gate(GateKind.BUF, "y_buf", "b"))
    netlist = Netlist(name="prims", inputs=inputs, outputs=tuple(node.output for node in nodes), nodes=nodes)
    parsed = parse_blif(emit_blif(netlist))
    vectors = rng.integers(0, 2, size=(40, 3)).tolist()
    assert simulate_batch(parsed, vectors) == simulate_batch(netlist, vectors)
    assert ".names b y_buf\n1 1\n" in emit_blif(netlist)


def test_round_trip_is_stable(mult8, rng):
    assert len(mult8) > 100
    first = parse_blif(emit_blif(mult8))
    second = parse_blif(emit_blif(first))
    assert second.structurally_equal(first)
    vectors = rng.integers(0, 2, size=(500, 16)).tolist()
    assert simulate_batch(first, vectors) == simulate_batch(mult8, vectors)


def test_long_port_lists_wrap(adder32):
    text = emit_blif(adder32)
    assert all(len(line) <= 80 for line in text.splitlines())
    assert parse_blif(text).inputs == adder32.inputs


def test_files(tmp_path, full_adder):
    path = write_blif(full_adder, tmp_path / "nested" / "fa.blif")
    assert read_blif(path).inputs == full_adder.inputs
    with pytest.raises(FileNotFoundError):
        read_blif(tmp_path / "missing.blif")
