import networkx as nx
import pytest

from bmfsynth.errors import PartitionError, PortMismatchError
from bmfsynth.netlist import GateKind, LogicNode, Netlist, simulate, simulate_batch, truth_table
from bmfsynth.partition import Subcircuit, boundary, decompose, extract, substitute, validate_partition
from bmfsynth.qor import exhaustive_qor


def _bounds_hold(partition):
    return all(
        sub.num_inputs <= partition.k and 1 <= sub.num_outputs <= partition.m for sub in partition.subcircuits
    )


def test_small_circuit_is_one_subcircuit(full_adder):
    partition = decompose(full_adder, 10, 10)
    assert len(partition) == 1
    sub = partition[0]
    assert sub.boundary_inputs == ("a", "b", "cin")
    assert set(sub.boundary_outputs) == {"s", "cout"}

    extracted = extract(full_adder, sub)
    original = truth_table(full_adder).to_array()
    copy = truth_table(extracted).to_array()
    for j, name in enumerate(extracted.outputs):
        assert (copy[:, j] == original[:, full_adder.outputs.index(name)]).all()


@pytest.mark.parametrize("k, m", [(4, 4), (6, 3), (3, 2)])
def test_adder_partitions_are_valid(adder8, k, m):
    partition = decompose(adder8, k, m)
    validate_partition(adder8, partition)
    assert _bounds_hold(partition)
    assert nx.is_directed_acyclic_graph(partition.quotient_graph())
    assert sorted(partition.topological_order()) == list(range(len(partition)))


def test_multiplier_needs_several_subcircuits(mult8):
    partition = decompose(mult8, 10, 10)
    validate_partition(mult8, partition)
    assert len(partition) >= 2


def test_decomposition_is_deterministic(adder8):
    first = decompose(adder8, 4, 4)
    second = decompose(adder8, 4, 4)
    assert first.subcircuits == second.subcircuits


def test_wide_node_cannot_be_cut():
    from bmfsynth.benchmarks import majority

    with pytest.raises(PartitionError, match="fanins"):
        decompose(majority(5), 4, 4)
    with pytest.raises(PartitionError):
        decompose(majority(3), 0, 1)


def test_subcircuits_agree_with_parent_simulation(adder8, rng, all_net_values):
    partition = decompose(adder8, 4, 4)
    for vector in rng.integers(0, 2, size=(100, 16)).tolist():
        values = all_net_values(adder8, vector)
        for sub in partition.subcircuits:
            local = simulate(extract(adder8, sub), [values[name] for name in sub.boundary_inputs])
            assert local == tuple(values[name] for name in sub.boundary_outputs)


def test_substituting_the_original_changes_nothing(adder8):
    partition = decompose(adder8, 4, 4)
    circuit = adder8
    for sub in partition.subcircuits:
        circuit = substitute(circuit, sub, extract(adder8, sub))
    assert exhaustive_qor(adder8, circuit, "hamming").value == 0.0


def _and_or() -> Netlist:
    return Netlist(
        name="andor",
        inputs=("a", "b", "c"),
        outputs=("z",),
        nodes=(LogicNode.gate(GateKind.AND, "y", "a", "b"), LogicNode.gate(GateKind.OR, "z", "y", "c")),
    )


def test_substitute_constant_zero():
    netlist = _and_or()
    sub = Subcircuit(id=0, nodes=("y",), boundary_inputs=("a", "b"), boundary_outputs=("y",))
    assert boundary(netlist, ["y"]) == (sub.boundary_inputs, sub.boundary_outputs)
    zero = Netlist(name="zero", inputs=("p", "q"), outputs=("r",), nodes=(LogicNode.gate(GateKind.CONST0, "r"),))
    replaced = substitute(netlist, sub, zero)
    vectors = [[a, b, c] for a in (0, 1) for b in (0, 1) for c in (0, 1)]
    assert simulate_batch(replaced, vectors) == [(c,) for _, _, c in vectors]


def test_substitute_passthrough_output():
    netlist = _and_or()
    sub = Subcircuit(id=0, nodes=("y",), boundary_inputs=("a", "b"), boundary_outputs=("y",))
    wire = Netlist(name="wire", inputs=("p", "q"), outputs=("p",), nodes=())
    replaced = substitute(netlist, sub, wire)
    assert replaced.node("y").kind is GateKind.BUF
    assert simulate(replaced, [1, 0, 0]) == (1,)


def test_substitute_checks_ports_and_staleness():
    netlist = _and_or()
    sub = Subcircuit(id=0, nodes=("y",), boundary_inputs=("a", "b"), boundary_outputs=("y",))
    narrow = Netlist(name="n", inputs=("p",), outputs=("r",), nodes=(LogicNode.gate(GateKind.BUF, "r", "p"),))
    with pytest.raises(PortMismatchError):
        substitute(netlist, sub, narrow)
    stale = Subcircuit(id=1, nodes=("gone",), boundary_inputs=("a",), boundary_outputs=("gone",))
    with pytest.raises(PartitionError, match="stale"):
        extract(netlist, stale)


def test_validation_catches_tampering(adder8):
    partition = decompose(adder8, 4, 4)
    broken = type(partition)(
        subcircuits=partition.subcircuits[1:],
        assignment=partition.assignment,
        k=partition.k,
        m=partition.m,
    )
    with pytest.raises(PartitionError):
        validate_partition(adder8, broken)
