"""
Generated combinational benchmark circuits built from primitive gates.

Operands are unsigned and declared MSB-first on the ports (``a7 .. a0``); every
generator also names its outputs MSB-first so that ``s8..s0`` style word specs apply.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .boolmat import BitMatrix
from .netlist import GateKind, LogicNode, Netlist, from_truth_table, sweep

logger = logging.getLogger(__name__)


class CircuitBuilder:
    def __init__(self, name: str) -> None:
        self.name = name
        self.inputs: List[str] = []
        self.nodes: List[LogicNode] = []
        self._counter = 0
        self._zero: Optional[str] = None

    def input(self, name: str) -> str:
        self.inputs.append(name)
        return name

    def operand(self, prefix: str, width: int) -> List[str]:
        """Declare ``prefix{width-1} .. prefix0``; returns the nets LSB first."""
        names = [self.input(f"{prefix}{i}") for i in reversed(range(width))]
        return names[::-1]

    def gate(self, kind: GateKind, *fanins: str) -> str:
        net = f"_g{self._counter}"
        self._counter += 1
        self.nodes.append(LogicNode.gate(kind, net, *fanins))
        return net

    def zero(self) -> str:
        if self._zero is None:
            self._zero = self.gate(GateKind.CONST0)
        return self._zero

    def add_bits(self, bits: Sequence[str]) -> Tuple[str, Optional[str]]:
        """Sum and carry of up to three bits of equal weight."""
        if len(bits) == 1:
            return bits[0], None
        if len(bits) == 2:
            a, b = bits
            return self.gate(GateKind.XOR, a, b), self.gate(GateKind.AND, a, b)
        a, b, c = bits
        half = self.gate(GateKind.XOR, a, b)
        total = self.gate(GateKind.XOR, half, c)
        carry = self.gate(GateKind.OR, self.gate(GateKind.AND, a, b), self.gate(GateKind.AND, half, c))
        return total, carry

    def ripple_add(self, x: Sequence[Optional[str]], y: Sequence[Optional[str]], carry: Optional[str] = None) -> List[str]:
        """LSB-first addition; ``None`` operand bits are zero. Result is one bit wider."""
        width = max(len(x), len(y))
        result: List[str] = []
        for i in range(width):
            bits = [bit for bit in (_at(x, i), _at(y, i), carry) if bit is not None]
            if not bits:
                result.append(self.zero())
                carry = None
                continue
            total, carry = self.add_bits(bits)
            result.append(total)
        result.append(carry if carry is not None else self.zero())
        return result

    def build(self, outputs: Sequence[Tuple[str, str]]) -> Netlist:
        """Rename driving nets to their port names; buffers cover inputs and shared nets."""
        drivers = {node.output for node in self.nodes}
        mapping: Dict[str, str] = {}
        buffers: List[LogicNode] = []
        for port, net in outputs:
            if net in drivers and net not in mapping:
                mapping[net] = port
            else:
                buffers.append(LogicNode(output=port, kind=GateKind.BUF, fanins=(net,)))
        nodes = [node.renamed(mapping) for node in self.nodes]
        nodes.extend(buffer.renamed(mapping) for buffer in buffers)
        netlist = sweep(
            Netlist(
                name=self.name,
                inputs=tuple(self.inputs),
                outputs=tuple(port for port, _ in outputs),
                nodes=tuple(nodes),
            )
        )
        logger.debug("Built %s: %d inputs, %d outputs, %d gates", self.name, len(self.inputs), len(outputs), len(netlist))
        return netlist


def _at(bits: Sequence[Optional[str]], index: int) -> Optional[str]:
    return bits[index] if index < len(bits) else None


def _ports(prefix: str, bits: Sequence[str]) -> List[Tuple[str, str]]:
    """MSB-first port list for LSB-first nets."""
    return [(f"{prefix}{i}", bits[i]) for i in reversed(range(len(bits)))]


def ripple_carry_adder(width: int) -> Netlist:
    builder = CircuitBuilder(f"adder{width}")
    a = builder.operand("a", width)
    b = builder.operand("b", width)
    return builder.build(_ports("s", builder.ripple_add(a, b)))


def _multiply(builder: CircuitBuilder, a: Sequence[str], b: Sequence[str]) -> List[str]:
    width_a, width_b = len(a), len(b)
    acc: List[Optional[str]] = [builder.gate(GateKind.AND, a[j], b[0]) for j in range(width_a)]
    acc.extend([None] * width_b)
    for i in range(1, width_b):
        carry: Optional[str] = None
        for j in range(width_a):
            weight = i + j
            bits = [bit for bit in (acc[weight], builder.gate(GateKind.AND, a[j], b[i]), carry) if bit is not None]
            acc[weight], carry = builder.add_bits(bits)
        acc[i + width_a] = carry
    return [bit if bit is not None else builder.zero() for bit in acc]


def array_multiplier(width: int) -> Netlist:
    builder = CircuitBuilder(f"mult{width}")
    a = builder.operand("a", width)
    b = builder.operand("b", width)
    return builder.build(_ports("p", _multiply(builder, a, b)))


def _subtract(builder: CircuitBuilder, a: Sequence[str], b: Sequence[str]) -> List[str]:
    """a - b over len(a) + 1 bits, two's complement; the top bit is the borrow."""
    inverted = [builder.gate(GateKind.NOT, bit) for bit in b]
    one = builder.gate(GateKind.CONST1)
    total = builder.ripple_add(a, inverted, carry=one)
    total[-1] = builder.gate(GateKind.NOT, total[-1])
    return total


def butterfly(width: int) -> Netlist:
    builder = CircuitBuilder(f"but{width}")
    a = builder.operand("a", width)
    b = builder.operand("b", width)
    total = builder.ripple_add(a, b)
    difference = _subtract(builder, a, b)
    return builder.build(_ports("s", total) + _ports("d", difference))


def _absolute_difference(builder: CircuitBuilder, a: Sequence[str], b: Sequence[str]) -> List[str]:
    difference = _subtract(builder, a, b)
    sign = difference[-1]
    flipped = [builder.gate(GateKind.XOR, bit, sign) for bit in difference[:-1]]
    result: List[str] = []
    carry: Optional[str] = sign
    for bit in flipped:
        total, carry = builder.add_bits([bit, carry] if carry is not None else [bit])
        result.append(total)
    return result


def sad(width: int, pairs: int) -> Netlist:
    """Sum of |a_p - b_p| over ``pairs`` operand pairs."""
    builder = CircuitBuilder(f"sad{width}x{pairs}")
    operands = [(builder.operand(f"a{p}_", width), builder.operand(f"b{p}_", width)) for p in range(pairs)]
    terms = [_absolute_difference(builder, a, b) for a, b in operands]
    total: List[Optional[str]] = list(terms[0])
    for term in terms[1:]:
        total = list(builder.ripple_add(total, term))
    out_width = width + max(pairs - 1, 0).bit_length()
    bits = [bit if bit is not None else builder.zero() for bit in total[:out_width]]
    bits.extend(builder.zero() for _ in range(out_width - len(bits)))
    return builder.build(_ports("sad", bits))


def mac_core(width: int) -> Netlist:
    """One combinational evaluation of ``a * b + acc`` with a ``2 * width`` bit accumulator."""
    builder = CircuitBuilder(f"mac{width}")
    a = builder.operand("a", width)
    b = builder.operand("b", width)
    acc = builder.operand("acc", 2 * width)
    product = _multiply(builder, a, b)
    return builder.build(_ports("y", builder.ripple_add(product, acc)))


def majority(n: int) -> Netlist:
    if n < 1:
        raise ValueError(f"Majority needs at least one input, got {n}")
    inputs = tuple(f"x{i}" for i in range(n))
    needed = n // 2 + 1
    cubes = ["".join("1" if i in chosen else "-" for i in range(n)) for chosen in combinations(range(n), needed)]
    return Netlist(name=f"maj{n}", inputs=inputs, outputs=("y",), nodes=(LogicNode.pla("y", inputs, cubes),))


def random_truth_table(k: int, m: int, seed: int = 0) -> BitMatrix:
    rng = np.random.default_rng(seed)
    return BitMatrix.from_array(rng.integers(0, 2, size=(1 << k, m)).astype(bool))


def random_circuit(k: int, m: int, seed: int = 0) -> Netlist:
    return from_truth_table(random_truth_table(k, m, seed), name=f"rand{k}x{m}_{seed}")


@dataclass(frozen=True)
class Benchmark:
    name: str
    build: Callable[[], Netlist]
    # output word spec for the relative and absolute metrics
    words: str

    def interpretation(self) -> str:
        return self.words


def _word(prefix: str, width: int) -> str:
    return f"{prefix}:{prefix}{width - 1}..{prefix}0"


BENCHMARKS: Dict[str, Benchmark] = {
    "adder8": Benchmark("adder8", lambda: ripple_carry_adder(8), _word("s", 9)),
    "adder32": Benchmark("adder32", lambda: ripple_carry_adder(32), _word("s", 33)),
    "mult8": Benchmark("mult8", lambda: array_multiplier(8), _word("p", 16)),
    "but8": Benchmark("but8", lambda: butterfly(8), f"{_word('s', 9)};{_word('d', 9)}"),
    "sad4x4": Benchmark("sad4x4", lambda: sad(4, 4), _word("sad", 6)),
    "mac4": Benchmark("mac4", lambda: mac_core(4), _word("y", 9)),
    "maj5": Benchmark("maj5", lambda: majority(5), "y:y"),
}
