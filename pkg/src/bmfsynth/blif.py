"""
Reader and writer for the combinational BLIF subset:
``.model``, ``.inputs``, ``.outputs``, ``.names`` with on-set covers, and ``.end``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import product
from pathlib import Path
from typing import Iterator, List, Optional, Tuple

from .errors import BlifSyntaxError
from .netlist import GateKind, LogicNode, Netlist

logger = logging.getLogger(__name__)

SEQUENTIAL_DIRECTIVES = {".latch", ".mlatch", ".clock", ".start_kiss"}
HIERARCHICAL_DIRECTIVES = {".subckt", ".gate", ".search"}
LINE_WIDTH = 78


@dataclass
class _Cover:
    fanins: List[str]
    output: str
    line: int
    rows: List[str] = field(default_factory=list)

    def to_node(self) -> LogicNode:
        if not self.fanins:
            kind = GateKind.CONST1 if self.rows else GateKind.CONST0
            return LogicNode.gate(kind, self.output)
        return LogicNode.pla(self.output, self.fanins, self.rows)


def _logical_lines(text: str) -> Iterator[Tuple[int, List[str]]]:
    """Yield (first physical line number, tokens) with comments stripped and continuations joined."""
    pending: List[str] = []
    start = 0
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not pending:
            start = number
        if line.endswith("\\"):
            pending.extend(line[:-1].split())
            continue
        pending.extend(line.split())
        if pending:
            yield start, pending
        pending = []
    if pending:
        yield start, pending


def parse_blif(text: str) -> Netlist:
    name: Optional[str] = None
    inputs: List[str] = []
    outputs: List[str] = []
    covers: List[_Cover] = []
    current: Optional[_Cover] = None
    ended = False

    for number, tokens in _logical_lines(text):
        if ended:
            break
        head = tokens[0]
        if not head.startswith("."):
            if current is None:
                raise BlifSyntaxError(f"cover row {' '.join(tokens)!r} outside a .names block", number)
            current.rows.append(_parse_row(tokens, current, number))
            continue

        current = None
        directive = head.lower()
        if directive == ".model":
            if name is not None:
                raise BlifSyntaxError("multiple models are not supported", number)
            name = tokens[1] if len(tokens) > 1 else "top"
        elif directive == ".inputs":
            inputs.extend(tokens[1:])
        elif directive == ".outputs":
            outputs.extend(tokens[1:])
        elif directive == ".names":
            if len(tokens) < 2:
                raise BlifSyntaxError(".names needs at least an output net", number)
            current = _Cover(fanins=tokens[1:-1], output=tokens[-1], line=number)
            covers.append(current)
        elif directive == ".end":
            ended = True
        elif directive in SEQUENTIAL_DIRECTIVES:
            raise BlifSyntaxError(f"{directive}: sequential not supported", number)
        elif directive in HIERARCHICAL_DIRECTIVES:
            raise BlifSyntaxError(f"{directive}: hierarchical and mapped netlists not supported", number)
        else:
            raise BlifSyntaxError(f"unknown directive {head}", number)

    if name is None:
        raise BlifSyntaxError("missing .model")
    nodes = tuple(cover.to_node() for cover in covers)
    netlist = Netlist(name=name, inputs=tuple(inputs), outputs=tuple(outputs), nodes=nodes)
    logger.debug("Parsed model %s: %d inputs, %d outputs, %d nodes", name, len(inputs), len(outputs), len(nodes))
    return netlist


def _parse_row(tokens: List[str], cover: _Cover, number: int) -> str:
    width = len(cover.fanins)
    if width == 0:
        if tokens != ["1"]:
            if tokens == ["0"]:
                raise BlifSyntaxError(f"off-set cover for {cover.output} not supported", number)
            raise BlifSyntaxError(f"bad constant row {' '.join(tokens)!r} for {cover.output}", number)
        return ""
    if len(tokens) != 2:
        raise BlifSyntaxError(f"expected '<plane> <value>' in cover of {cover.output}", number)
    plane, value = tokens
    if value == "0":
        raise BlifSyntaxError(f"off-set cover for {cover.output} not supported", number)
    if value != "1":
        raise BlifSyntaxError(f"bad output value {value!r} in cover of {cover.output}", number)
    if len(plane) != width or set(plane) - {"0", "1", "-"}:
        raise BlifSyntaxError(f"cube {plane!r} does not match {width} fanins of {cover.output}", number)
    return plane


def _primitive_rows(node: LogicNode) -> List[str]:
    n = len(node.fanins)
    kind = node.kind
    if kind is GateKind.PLA:
        return list(node.cubes)
    if kind is GateKind.CONST1:
        return [""]
    if kind is GateKind.CONST0:
        return []
    if kind is GateKind.BUF:
        return ["1"]
    if kind is GateKind.NOT:
        return ["0"]
    if kind is GateKind.AND:
        return ["1" * n]
    if kind is GateKind.NOR:
        return ["0" * n]
    if kind is GateKind.OR:
        return ["-" * i + "1" + "-" * (n - 1 - i) for i in range(n)]
    if kind is GateKind.NAND:
        return ["-" * i + "0" + "-" * (n - 1 - i) for i in range(n)]
    parity = 1 if kind is GateKind.XOR else 0
    return sorted(
        "".join(bits) for bits in product("01", repeat=n) if bits.count("1") % 2 == parity
    )


def _wrapped(directive: str, names: Tuple[str, ...]) -> List[str]:
    lines: List[str] = []
    current = directive
    for name in names:
        if len(current) + 1 + len(name) > LINE_WIDTH and current != directive:
            lines.append(current + " \\")
            current = " "
        current = f"{current} {name}"
    lines.append(current)
    return lines


def emit_blif(netlist: Netlist) -> str:
    lines = [f".model {netlist.name}"]
    lines.extend(_wrapped(".inputs", netlist.inputs))
    lines.extend(_wrapped(".outputs", netlist.outputs))
    levels = netlist.levels
    for node in sorted(netlist.nodes, key=lambda item: (levels[item.output], item.output)):
        lines.append(" ".join([".names", *node.fanins, node.output]))
        for row in sorted(_primitive_rows(node)):
            lines.append(f"{row} 1" if row else "1")
    lines.append(".end")
    return "\n".join(lines) + "\n"


def read_blif(path: Path) -> Netlist:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"BLIF file not found: {path}")
    netlist = parse_blif(path.read_text(encoding="utf-8"))
    logger.info("Loaded %s from %s (%d nodes)", netlist.name, path, len(netlist))
    return netlist


def write_blif(netlist: Netlist, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(emit_blif(netlist), encoding="utf-8")
    return path
