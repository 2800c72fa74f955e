"""
Combinational gate-level netlists: validation, scalar and word-parallel simulation,
and exhaustive truth-table extraction.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from functools import cached_property, reduce
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from .boolmat import BitMatrix, pack_bits, unpack_bits
from .errors import BudgetError, DimensionError, NetlistError

logger = logging.getLogger(__name__)

DEFAULT_TRUTH_TABLE_CAP = 10

_ALL_ONES = np.uint64(0xFFFFFFFFFFFFFFFF)


class GateKind(str, Enum):
    AND = "and"
    OR = "or"
    NOT = "not"
    XOR = "xor"
    NAND = "nand"
    NOR = "nor"
    XNOR = "xnor"
    BUF = "buf"
    CONST0 = "const0"
    CONST1 = "const1"
    PLA = "pla"


UNARY_KINDS = {GateKind.NOT, GateKind.BUF}
CONSTANT_KINDS = {GateKind.CONST0, GateKind.CONST1}
NARY_KINDS = {GateKind.AND, GateKind.OR, GateKind.XOR, GateKind.NAND, GateKind.NOR, GateKind.XNOR}


@dataclass(frozen=True)
class LogicNode:
    output: str
    kind: GateKind
    fanins: Tuple[str, ...] = ()
    # on-set cover rows over {0,1,-}, one character per fanin; PLA nodes only
    cubes: Tuple[str, ...] = ()

    def __post_init__(self) -> None:
        kind = GateKind(self.kind)
        fanins = tuple(self.fanins)
        cubes = tuple(sorted(set(self.cubes)))
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "fanins", fanins)
        object.__setattr__(self, "cubes", cubes)
        arity = len(fanins)
        if kind in UNARY_KINDS and arity != 1:
            raise NetlistError(f"Node {self.output}: {kind.value} takes exactly one fanin, got {arity}")
        if kind in CONSTANT_KINDS and arity != 0:
            raise NetlistError(f"Node {self.output}: {kind.value} takes no fanins, got {arity}")
        if kind in NARY_KINDS and arity < 2:
            raise NetlistError(f"Node {self.output}: {kind.value} needs at least two fanins, got {arity}")
        if kind is GateKind.PLA:
            for cube in cubes:
                if len(cube) != arity or set(cube) - {"0", "1", "-"}:
                    raise NetlistError(f"Node {self.output}: cube {cube!r} does not match {arity} fanins")
        elif cubes:
            raise NetlistError(f"Node {self.output}: only PLA nodes carry cubes")

    @classmethod
    def gate(cls, kind: GateKind, output: str, *fanins: str) -> "LogicNode":
        return cls(output=output, kind=kind, fanins=fanins)

    @classmethod
    def pla(cls, output: str, fanins: Sequence[str], cubes: Iterable[str]) -> "LogicNode":
        return cls(output=output, kind=GateKind.PLA, fanins=tuple(fanins), cubes=tuple(cubes))

    def renamed(self, mapping: Mapping[str, str]) -> "LogicNode":
        return LogicNode(
            output=mapping.get(self.output, self.output),
            kind=self.kind,
            fanins=tuple(mapping.get(name, name) for name in self.fanins),
            cubes=self.cubes,
        )

    def evaluate(self, values: Sequence[int]) -> int:
        kind = self.kind
        if kind is GateKind.PLA:
            for cube in self.cubes:
                if all(ch == "-" or int(ch) == bit for ch, bit in zip(cube, values)):
                    return 1
            return 0
        if kind is GateKind.CONST0:
            return 0
        if kind is GateKind.CONST1:
            return 1
        if kind is GateKind.BUF:
            return values[0]
        if kind is GateKind.NOT:
            return 1 - values[0]
        if kind in (GateKind.AND, GateKind.NAND):
            result = int(all(values))
        elif kind in (GateKind.OR, GateKind.NOR):
            result = int(any(values))
        else:
            result = sum(values) & 1
        return 1 - result if kind in (GateKind.NAND, GateKind.NOR, GateKind.XNOR) else result

    def evaluate_words(self, operands: Sequence[np.ndarray], width: int) -> np.ndarray:
        kind = self.kind
        if kind is GateKind.PLA:
            acc = np.zeros(width, dtype=np.uint64)
            for cube in self.cubes:
                term = np.full(width, _ALL_ONES, dtype=np.uint64)
                for ch, operand in zip(cube, operands):
                    if ch == "1":
                        term &= operand
                    elif ch == "0":
                        term &= ~operand
                acc |= term
            return acc
        if kind is GateKind.CONST0:
            return np.zeros(width, dtype=np.uint64)
        if kind is GateKind.CONST1:
            return np.full(width, _ALL_ONES, dtype=np.uint64)
        if kind is GateKind.BUF:
            return operands[0].copy()
        if kind is GateKind.NOT:
            return ~operands[0]
        if kind in (GateKind.AND, GateKind.NAND):
            result = reduce(np.bitwise_and, operands)
        elif kind in (GateKind.OR, GateKind.NOR):
            result = reduce(np.bitwise_or, operands)
        else:
            result = reduce(np.bitwise_xor, operands)
        return ~result if kind in (GateKind.NAND, GateKind.NOR, GateKind.XNOR) else result


@dataclass(frozen=True)
class Netlist:
    """Validated combinational DAG; ``nodes`` is kept in a stable topological order."""

    name: str
    inputs: Tuple[str, ...]
    outputs: Tuple[str, ...]
    nodes: Tuple[LogicNode, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        object.__setattr__(self, "nodes", _validated_order(self.name, self.inputs, self.outputs, tuple(self.nodes)))

    @cached_property
    def drivers(self) -> Dict[str, LogicNode]:
        return {node.output: node for node in self.nodes}

    @cached_property
    def fanouts(self) -> Dict[str, Tuple[str, ...]]:
        consumers: Dict[str, List[str]] = {name: [] for name in self.inputs}
        for node in self.nodes:
            consumers.setdefault(node.output, [])
        for node in self.nodes:
            for name in dict.fromkeys(node.fanins):
                consumers[name].append(node.output)
        return {name: tuple(items) for name, items in consumers.items()}

    @cached_property
    def levels(self) -> Dict[str, int]:
        level = {name: 0 for name in self.inputs}
        for node in self.nodes:
            level[node.output] = 1 + max((level[name] for name in node.fanins), default=0)
        return level

    @cached_property
    def net_order(self) -> Dict[str, int]:
        order = {name: i for i, name in enumerate(self.inputs)}
        for node in self.nodes:
            order[node.output] = len(order)
        return order

    def node(self, name: str) -> LogicNode:
        try:
            return self.drivers[name]
        except KeyError as exc:
            raise NetlistError(f"No node drives net {name!r} in {self.name}") from exc

    def structurally_equal(self, other: "Netlist") -> bool:
        return (
            self.name == other.name
            and self.inputs == other.inputs
            and self.outputs == other.outputs
            and self.drivers == other.drivers
        )

    def __len__(self) -> int:
        return len(self.nodes)


def _validated_order(
    name: str, inputs: Tuple[str, ...], outputs: Tuple[str, ...], nodes: Tuple[LogicNode, ...]
) -> Tuple[LogicNode, ...]:
    if len(set(inputs)) != len(inputs):
        raise NetlistError(f"{name}: duplicate primary input names")
    if len(set(outputs)) != len(outputs):
        raise NetlistError(f"{name}: duplicate primary output names")
    input_set = set(inputs)
    drivers: Dict[str, LogicNode] = {}
    for node in nodes:
        if node.output in input_set:
            raise NetlistError(f"{name}: net {node.output!r} is driven by a node and is also a primary input")
        if node.output in drivers:
            raise NetlistError(f"{name}: net {node.output!r} has more than one driver")
        drivers[node.output] = node
    for node in nodes:
        for fanin in node.fanins:
            if fanin not in drivers and fanin not in input_set:
                raise NetlistError(f"{name}: net {fanin!r} feeding {node.output!r} is undriven")
    for output in outputs:
        if output not in drivers and output not in input_set:
            raise NetlistError(f"{name}: primary output {output!r} is undriven")

    position = {node.output: i for i, node in enumerate(nodes)}
    graph = nx.DiGraph()
    graph.add_nodes_from(position)
    for node in nodes:
        for fanin in node.fanins:
            if fanin in drivers:
                graph.add_edge(fanin, node.output)
    if not nx.is_directed_acyclic_graph(graph):
        cycle = [edge[0] for edge in nx.find_cycle(graph)]
        raise NetlistError(f"{name}: combinational cycle through {' -> '.join(cycle)}")
    order = nx.lexicographical_topological_sort(graph, key=position.__getitem__)
    return tuple(drivers[net] for net in order)


def exhaustive_inputs(count: int) -> np.ndarray:
    """All 2^count assignments as a (count, 2^count) boolean array; input 0 is the MSB of the row index."""
    rows = np.arange(1 << count, dtype=np.int64)
    return np.array([(rows >> (count - 1 - i)) & 1 for i in range(count)], dtype=bool).reshape(count, 1 << count)


def simulate(netlist: Netlist, vector: Sequence[int]) -> Tuple[int, ...]:
    if len(vector) != len(netlist.inputs):
        raise DimensionError(f"{netlist.name}: expected {len(netlist.inputs)} input bits, got {len(vector)}")
    values: Dict[str, int] = {name: int(bool(bit)) for name, bit in zip(netlist.inputs, vector)}
    for node in netlist.nodes:
        values[node.output] = node.evaluate([values[name] for name in node.fanins])
    return tuple(values[name] for name in netlist.outputs)


def simulate_words(netlist: Netlist, words: np.ndarray) -> np.ndarray:
    """Evaluate packed input columns (one uint64 row per primary input); returns one row per output."""
    words = np.asarray(words, dtype=np.uint64)
    if words.ndim != 2 or words.shape[0] != len(netlist.inputs):
        raise DimensionError(f"{netlist.name}: expected {len(netlist.inputs)} packed input rows, got shape {words.shape}")
    width = words.shape[1]
    values: Dict[str, np.ndarray] = {name: words[i] for i, name in enumerate(netlist.inputs)}
    for node in netlist.nodes:
        values[node.output] = node.evaluate_words([values[name] for name in node.fanins], width)
    if not netlist.outputs:
        return np.zeros((0, width), dtype=np.uint64)
    return np.stack([values[name] for name in netlist.outputs])


def simulate_bits(netlist: Netlist, bits: np.ndarray) -> np.ndarray:
    """Boolean (inputs, samples) in, boolean (outputs, samples) out."""
    bits = np.asarray(bits, dtype=bool)
    count = bits.shape[1]
    return unpack_bits(simulate_words(netlist, pack_bits(bits)), count)


def simulate_batch(netlist: Netlist, vectors: Sequence[Sequence[int]]) -> List[Tuple[int, ...]]:
    if len(vectors) == 0:
        return []
    width = len(netlist.inputs)
    for vector in vectors:
        if len(vector) != width:
            raise DimensionError(f"{netlist.name}: expected {width} input bits, got {len(vector)}")
    bits = np.array(vectors, dtype=bool).reshape(len(vectors), width).T
    outputs = simulate_bits(netlist, bits)
    return [tuple(int(bit) for bit in outputs[:, i]) for i in range(outputs.shape[1])]


def truth_table(netlist: Netlist, cap: int = DEFAULT_TRUTH_TABLE_CAP) -> BitMatrix:
    count = len(netlist.inputs)
    if count > cap:
        raise BudgetError(f"{netlist.name}: truth table over {count} inputs exceeds the cap of {cap}")
    outputs = simulate_bits(netlist, exhaustive_inputs(count))
    return BitMatrix.from_array(outputs.T)


def from_truth_table(
    table: BitMatrix,
    inputs: Optional[Sequence[str]] = None,
    outputs: Optional[Sequence[str]] = None,
    name: str = "table",
) -> Netlist:
    """Minterm-cover netlist whose exhaustive truth table is ``table``."""
    count = table.rows.bit_length() - 1
    if table.rows != 1 << count:
        raise DimensionError(f"Truth table with {table.rows} rows is not a power of two")
    inputs = tuple(inputs) if inputs is not None else tuple(f"x{i}" for i in range(count))
    outputs = tuple(outputs) if outputs is not None else tuple(f"y{j}" for j in range(table.cols))
    if len(inputs) != count or len(outputs) != table.cols:
        raise DimensionError(f"Port names do not match a {table.rows}x{table.cols} truth table")
    data = table.to_array()
    nodes = []
    for j, output in enumerate(outputs):
        column = data[:, j]
        if column.all():
            nodes.append(LogicNode.gate(GateKind.CONST1, output))
        elif not column.any():
            nodes.append(LogicNode.gate(GateKind.CONST0, output))
        else:
            cubes = [format(row, f"0{count}b") for row in np.nonzero(column)[0]]
            nodes.append(LogicNode.pla(output, inputs, cubes))
    return Netlist(name=name, inputs=inputs, outputs=outputs, nodes=tuple(nodes))


def sweep(netlist: Netlist) -> Netlist:
    """Drop nodes that reach no primary output."""
    drivers = netlist.drivers
    live = set()
    stack = [name for name in netlist.outputs if name in drivers]
    while stack:
        name = stack.pop()
        if name in live:
            continue
        live.add(name)
        stack.extend(fanin for fanin in drivers[name].fanins if fanin in drivers)
    if len(live) == len(netlist.nodes):
        return netlist
    return Netlist(
        name=netlist.name,
        inputs=netlist.inputs,
        outputs=netlist.outputs,
        nodes=tuple(node for node in netlist.nodes if node.output in live),
    )
