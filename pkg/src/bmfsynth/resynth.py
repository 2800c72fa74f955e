"""
Hardware for a factorization: the compressor realizes B, the decompressor combines its
signals according to C, and ``area_proxy`` prices the result in two-input gate equivalents.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Set, Tuple

import numpy as np

from .bmf import AssoConfig, FactorResult, factorize_best
from .boolmat import BitMatrix, Semiring, bool_product
from .errors import DimensionError
from .minimize import cube_to_string, minimize, string_to_cube
from .netlist import DEFAULT_TRUTH_TABLE_CAP, GateKind, LogicNode, Netlist, sweep, truth_table

logger = logging.getLogger(__name__)

# PLA nodes wider than this are priced from their own cover instead of a minimized one
AREA_MINIMIZE_LIMIT = 10


@dataclass(frozen=True, order=True)
class AreaCost:
    two_input_gate_equivalents: float

    def __post_init__(self) -> None:
        if self.two_input_gate_equivalents < 0:
            raise ValueError(f"Area cannot be negative: {self.two_input_gate_equivalents}")

    def __add__(self, other: "AreaCost") -> "AreaCost":
        return AreaCost(self.two_input_gate_equivalents + other.two_input_gate_equivalents)

    def __float__(self) -> float:
        return float(self.two_input_gate_equivalents)


def _cover_cost(cubes: Sequence[str]) -> int:
    if not cubes:
        return 0
    ands = sum(max(len(cube) - cube.count("-") - 1, 0) for cube in cubes)
    return ands + len(cubes) - 1


@lru_cache(maxsize=4096)
def _pla_cost(width: int, cubes: Tuple[str, ...]) -> int:
    if width > AREA_MINIMIZE_LIMIT:
        return _cover_cost(cubes)
    index = np.arange(1 << width)
    onset = np.zeros(1 << width, dtype=bool)
    for cube in cubes:
        mask, value = string_to_cube(cube)
        onset |= (index & ~mask) == value
    cover = minimize(onset, width)
    return _cover_cost([cube_to_string(cube, width) for cube in cover])


def node_cost(node: LogicNode) -> int:
    kind = node.kind
    if kind is GateKind.PLA:
        return _pla_cost(len(node.fanins), node.cubes)
    if kind in (GateKind.NOT, GateKind.BUF, GateKind.CONST0, GateKind.CONST1):
        return 0
    return len(node.fanins) - 1


def area_proxy(netlist: Netlist) -> AreaCost:
    return AreaCost(float(sum(node_cost(node) for node in netlist.nodes)))


def _check_rows(matrix: BitMatrix, k: int) -> None:
    if matrix.rows != 1 << k:
        raise DimensionError(f"Compressor table has {matrix.rows} rows, expected 2^{k} = {1 << k}")


def _sop_node(output: str, column: np.ndarray, inputs: Sequence[str]) -> LogicNode:
    if column.all():
        return LogicNode.gate(GateKind.CONST1, output)
    if not column.any():
        return LogicNode.gate(GateKind.CONST0, output)
    k = len(inputs)
    cover = [cube_to_string(cube, k) for cube in minimize(column, k)]
    support = [i for i in range(k) if any(cube[i] != "-" for cube in cover)]
    return LogicNode.pla(
        output,
        [inputs[i] for i in support],
        ["".join(cube[i] for i in support) for cube in cover],
    )


def _cone(reference: Netlist, net: str) -> List[str]:
    drivers = reference.drivers
    seen: Set[str] = set()
    stack = [net]
    while stack:
        name = stack.pop()
        if name in seen or name not in drivers:
            continue
        seen.add(name)
        stack.extend(drivers[name].fanins)
    return [node.output for node in reference.nodes if node.output in seen]


def compressor_from_B(
    B: BitMatrix,
    k: int,
    input_names: Optional[Sequence[str]] = None,
    output_names: Optional[Sequence[str]] = None,
    name: str = "compressor",
    reference: Optional[Netlist] = None,
) -> Netlist:
    """
    k-input, f-output netlist whose truth table is B.

    Each column becomes one minimized SOP node. When ``reference`` (a netlist over the same
    inputs) already computes a column as one of its outputs and that logic is cheaper, the
    reference cone is reused instead.
    """
    _check_rows(B, k)
    inputs = tuple(input_names) if input_names is not None else tuple(f"x{i}" for i in range(k))
    outputs = tuple(output_names) if output_names is not None else tuple(f"f{l}" for l in range(B.cols))
    if len(inputs) != k or len(outputs) != B.cols:
        raise DimensionError(f"Port names do not match a {k}-input, {B.cols}-output compressor")

    data = B.to_array()
    reuse: Dict[bytes, str] = {}
    reference_nodes: Dict[str, LogicNode] = {}
    prefix = ""
    if reference is not None and reference.inputs != inputs:
        logger.debug("Reference %s has different inputs; synthesizing every column as SOP", reference.name)
        reference = None
    if reference is not None:
        table = truth_table(reference, cap=max(k, DEFAULT_TRUTH_TABLE_CAP)).to_array()
        for j, net in enumerate(reference.outputs):
            if net in reference.drivers:
                reuse.setdefault(table[:, j].tobytes(), net)
        prefix = "_r"
        taken = set(inputs) | set(outputs)
        while any(prefix + node.output in taken for node in reference.nodes):
            prefix = "_" + prefix

    nodes: List[LogicNode] = []
    for l, output in enumerate(outputs):
        column = data[:, l]
        sop = _sop_node(output, column, inputs)
        source = reuse.get(column.tobytes())
        if source is not None and reference is not None:
            cone = _cone(reference, source)
            cone_cost = sum(node_cost(reference.drivers[n]) for n in cone)
            if cone_cost < node_cost(sop):
                mapping = {node.output: prefix + node.output for node in reference.nodes}
                for n in cone:
                    reference_nodes.setdefault(n, reference.drivers[n].renamed(mapping))
                nodes.append(LogicNode.gate(GateKind.BUF, output, prefix + source))
                continue
        nodes.append(sop)
    nodes.extend(reference_nodes.values())
    return Netlist(name=name, inputs=inputs, outputs=outputs, nodes=tuple(nodes))


def _balanced_tree(kind: GateKind, output: str, operands: Sequence[str]) -> List[LogicNode]:
    level = list(operands)
    nodes: List[LogicNode] = []
    counter = 0
    while len(level) > 2:
        paired: List[str] = []
        for i in range(0, len(level) - 1, 2):
            net = f"{output}_t{counter}"
            counter += 1
            nodes.append(LogicNode.gate(kind, net, level[i], level[i + 1]))
            paired.append(net)
        if len(level) % 2:
            paired.append(level[-1])
        level = paired
    nodes.append(LogicNode.gate(kind, output, *level))
    return nodes


def decompressor_from_C(
    C: BitMatrix,
    semiring: Semiring = Semiring.OR,
    input_names: Optional[Sequence[str]] = None,
    output_names: Optional[Sequence[str]] = None,
    name: str = "decompressor",
) -> Netlist:
    if C.rows == 0 or C.cols == 0:
        raise DimensionError(f"Decompressor table must be nonempty, got {C.rows}x{C.cols}")
    semiring = Semiring.parse(semiring)
    inputs = tuple(input_names) if input_names is not None else tuple(f"f{l}" for l in range(C.rows))
    outputs = tuple(output_names) if output_names is not None else tuple(f"y{j}" for j in range(C.cols))
    if len(inputs) != C.rows or len(outputs) != C.cols:
        raise DimensionError(f"Port names do not match a {C.rows}x{C.cols} decompressor")
    kind = GateKind.XOR if semiring is Semiring.XOR else GateKind.OR
    data = C.to_array()
    nodes: List[LogicNode] = []
    for j, output in enumerate(outputs):
        selected = [inputs[l] for l in np.nonzero(data[:, j])[0]]
        if not selected:
            nodes.append(LogicNode.gate(GateKind.CONST0, output))
        elif len(selected) == 1:
            nodes.append(LogicNode.gate(GateKind.BUF, output, selected[0]))
        else:
            nodes.extend(_balanced_tree(kind, output, selected))
    return Netlist(name=name, inputs=inputs, outputs=outputs, nodes=tuple(nodes))


def resynthesize(
    factor: FactorResult,
    inputs: Sequence[str],
    outputs: Sequence[str],
    name: str,
    reference: Optional[Netlist] = None,
) -> Netlist:
    k = len(inputs)
    inputs = tuple(inputs)
    outputs = tuple(outputs)
    taken = set(inputs) | set(outputs)
    prefix = "_c"
    while any(net.startswith(prefix) for net in taken):
        prefix = "_" + prefix
    signals = tuple(f"{prefix}{l}" for l in range(factor.f))

    compressor = compressor_from_B(factor.B, k, inputs, signals, name=f"{name}_compressor", reference=reference)
    decompressor = decompressor_from_C(factor.C, factor.semiring, signals, outputs, name=f"{name}_decompressor")
    tree_mapping = {
        node.output: f"{prefix}d_{node.output}" for node in decompressor.nodes if node.output not in set(outputs)
    }
    nodes = list(compressor.nodes)
    nodes.extend(node.renamed(tree_mapping) for node in decompressor.nodes)
    return sweep(Netlist(name=name, inputs=inputs, outputs=outputs, nodes=tuple(nodes)))


def approximate_subcircuit(
    s_netlist: Netlist,
    f: int,
    cfg: AssoConfig,
    cap: int = DEFAULT_TRUTH_TABLE_CAP,
) -> Tuple[Netlist, BitMatrix]:
    netlist, table, _ = approximate_with_factor(s_netlist, f, cfg, cap=cap)
    return netlist, table


def approximate_with_factor(
    s_netlist: Netlist,
    f: int,
    cfg: AssoConfig,
    cap: int = DEFAULT_TRUTH_TABLE_CAP,
    table: Optional[BitMatrix] = None,
) -> Tuple[Netlist, BitMatrix, FactorResult]:
    matrix = table if table is not None else truth_table(s_netlist, cap=cap)
    factor = factorize_best(matrix, f, cfg)
    netlist = resynthesize(
        factor,
        s_netlist.inputs,
        s_netlist.outputs,
        name=f"{s_netlist.name}_f{f}",
        reference=s_netlist,
    )
    reconstruction = bool_product(factor.B, factor.C, factor.semiring)
    logger.debug(
        "Approximated %s at f=%d: tau=%s error=%.3f area=%.0f",
        s_netlist.name,
        f,
        factor.tau,
        factor.error,
        area_proxy(netlist).two_input_gate_equivalents,
    )
    return netlist, reconstruction, factor
