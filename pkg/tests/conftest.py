from __future__ import annotations

from typing import Callable, Dict, Iterable

import numpy as np
import pytest

from bmfsynth.benchmarks import array_multiplier, majority, ripple_carry_adder
from bmfsynth.netlist import GateKind, LogicNode, Netlist, sweep


def gate(kind: GateKind, output: str, *fanins: str) -> LogicNode:
    return LogicNode.gate(kind, output, *fanins)


@pytest.fixture
def and2() -> Netlist:
    return Netlist(name="and2", inputs=("a", "b"), outputs=("y",), nodes=(gate(GateKind.AND, "y", "a", "b"),))


@pytest.fixture
def half_adder() -> Netlist:
    return Netlist(
        name="ha",
        inputs=("a", "b"),
        outputs=("s", "c"),
        nodes=(gate(GateKind.XOR, "s", "a", "b"), gate(GateKind.AND, "c", "a", "b")),
    )


@pytest.fixture
def full_adder() -> Netlist:
    return Netlist(
        name="fa",
        inputs=("a", "b", "cin"),
        outputs=("s", "cout"),
        nodes=(
            gate(GateKind.XOR, "p", "a", "b"),
            gate(GateKind.XOR, "s", "p", "cin"),
            gate(GateKind.AND, "g", "a", "b"),
            gate(GateKind.AND, "t", "p", "cin"),
            gate(GateKind.OR, "cout", "g", "t"),
        ),
    )


@pytest.fixture(scope="session")
def adder8() -> Netlist:
    return ripple_carry_adder(8)


@pytest.fixture(scope="session")
def adder4() -> Netlist:
    return ripple_carry_adder(4)


@pytest.fixture(scope="session")
def adder32() -> Netlist:
    return ripple_carry_adder(32)


@pytest.fixture(scope="session")
def mult8() -> Netlist:
    return array_multiplier(8)


@pytest.fixture
def maj3() -> Netlist:
    return majority(3)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


def _zeroed(netlist: Netlist, outputs: Iterable[str]) -> Netlist:
    zeroed = set(outputs)
    nodes = [node for node in netlist.nodes if node.output not in zeroed]
    nodes.extend(gate(GateKind.CONST0, name) for name in zeroed)
    return sweep(Netlist(name=f"{netlist.name}_trunc", inputs=netlist.inputs, outputs=netlist.outputs, nodes=tuple(nodes)))


@pytest.fixture
def truncate() -> Callable[[Netlist, Iterable[str]], Netlist]:
    """Replace the named outputs by constant zero."""
    return _zeroed


def net_values(netlist: Netlist, vector) -> Dict[str, int]:
    values = {name: int(bit) for name, bit in zip(netlist.inputs, vector)}
    for node in netlist.nodes:
        values[node.output] = node.evaluate([values[name] for name in node.fanins])
    return values


@pytest.fixture
def all_net_values() -> Callable[[Netlist, object], Dict[str, int]]:
    return net_values
