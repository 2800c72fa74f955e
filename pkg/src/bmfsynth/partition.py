"""
k x m cuts: disjoint clusters of gates with at most ``k`` boundary inputs and ``m``
boundary outputs whose quotient graph stays acyclic, plus subcircuit extraction and
substitution.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Set, Tuple

import networkx as nx

from .errors import PartitionError, PortMismatchError
from .netlist import GateKind, LogicNode, Netlist

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Subcircuit:
    id: int
    nodes: Tuple[str, ...]
    boundary_inputs: Tuple[str, ...]
    boundary_outputs: Tuple[str, ...]

    @property
    def num_inputs(self) -> int:
        return len(self.boundary_inputs)

    @property
    def num_outputs(self) -> int:
        return len(self.boundary_outputs)


@dataclass(frozen=True)
class Partition:
    subcircuits: Tuple[Subcircuit, ...]
    assignment: Dict[str, int] = field(hash=False)
    k: int
    m: int

    def __getitem__(self, sid: int) -> Subcircuit:
        return self.subcircuits[sid]

    def __len__(self) -> int:
        return len(self.subcircuits)

    def quotient_graph(self) -> nx.DiGraph:
        """Subcircuits as vertices; an edge a -> b when a boundary output of a feeds b."""
        graph = nx.DiGraph()
        graph.add_nodes_from(sub.id for sub in self.subcircuits)
        producers = {net: sub.id for sub in self.subcircuits for net in sub.boundary_outputs}
        for sub in self.subcircuits:
            for net in sub.boundary_inputs:
                source = producers.get(net)
                if source is not None and source != sub.id:
                    graph.add_edge(source, sub.id)
        return graph

    def topological_order(self) -> List[int]:
        return list(nx.lexicographical_topological_sort(self.quotient_graph()))


def boundary(netlist: Netlist, members: Iterable[str]) -> Tuple[Tuple[str, ...], Tuple[str, ...]]:
    """Boundary inputs and outputs of a node set, both in netlist net order."""
    members = set(members)
    fanouts = netlist.fanouts
    primary_outputs = set(netlist.outputs)
    inputs: Set[str] = set()
    outputs: Set[str] = set()
    for name in members:
        node = netlist.drivers[name]
        inputs.update(fanin for fanin in node.fanins if fanin not in members)
        consumers = fanouts[name]
        if name in primary_outputs or not consumers or any(c not in members for c in consumers):
            outputs.add(name)
    order = netlist.net_order
    return tuple(sorted(inputs, key=order.__getitem__)), tuple(sorted(outputs, key=order.__getitem__))


def _cone_order(netlist: Netlist) -> List[str]:
    """Depth-first postorder from each primary output in turn, then any logic left over."""
    drivers = netlist.drivers
    visited: Set[str] = set()
    order: List[str] = []
    roots = [name for name in netlist.outputs if name in drivers]
    roots.extend(node.output for node in netlist.nodes)
    for root in roots:
        if root in visited:
            continue
        stack: List[Tuple[str, int]] = [(root, 0)]
        visited.add(root)
        while stack:
            name, index = stack.pop()
            fanins = drivers[name].fanins
            while index < len(fanins) and (fanins[index] not in drivers or fanins[index] in visited):
                index += 1
            if index < len(fanins):
                child = fanins[index]
                stack.append((name, index + 1))
                stack.append((child, 0))
                visited.add(child)
            else:
                order.append(name)
    return order


class _Cluster:
    __slots__ = ("id", "members", "inputs", "outputs")

    def __init__(self, cid: int) -> None:
        self.id = cid
        self.members: Set[str] = set()
        self.inputs: Set[str] = set()
        self.outputs: Set[str] = set()


class _Clustering:
    """Greedy placement state. Nodes arrive in a topological order."""

    def __init__(self, netlist: Netlist, k: int, m: int) -> None:
        self.netlist = netlist
        self.k = k
        self.m = m
        self.clusters: Dict[int, _Cluster] = {}
        self.assignment: Dict[str, int] = {}
        self.quotient = nx.DiGraph()
        self.primary_outputs = set(netlist.outputs)

    def _grown(self, cluster: _Cluster, name: str) -> Tuple[Set[str], Set[str]]:
        node = self.netlist.drivers[name]
        fanouts = self.netlist.fanouts
        inputs = cluster.inputs | {f for f in node.fanins if f not in cluster.members}
        outputs = set(cluster.outputs)
        outputs.add(name)
        members = cluster.members | {name}
        for fanin in node.fanins:
            if fanin in cluster.members and fanin not in self.primary_outputs:
                if all(c in members for c in fanouts[fanin]):
                    outputs.discard(fanin)
        return inputs, outputs

    def _source_clusters(self, name: str) -> Set[int]:
        return {self.assignment[f] for f in self.netlist.drivers[name].fanins if f in self.assignment}

    def _creates_cycle(self, target: int, sources: Iterable[int]) -> bool:
        return any(source != target and nx.has_path(self.quotient, target, source) for source in sources)

    def place(self, name: str) -> None:
        sources = self._source_clusters(name)
        candidates = set(sources)
        if self.clusters:
            candidates.add(max(self.clusters))
        best: Optional[Tuple[Tuple[int, int], int, Set[str], Set[str]]] = None
        for cid in candidates:
            cluster = self.clusters[cid]
            inputs, outputs = self._grown(cluster, name)
            if len(inputs) > self.k or len(outputs) > self.m:
                continue
            if self._creates_cycle(cid, sources):
                continue
            growth = len(inputs) + len(outputs) - len(cluster.inputs) - len(cluster.outputs)
            key = (growth, -cid)
            if best is None or key < best[0]:
                best = (key, cid, inputs, outputs)
        if best is None:
            cid = len(self.clusters)
            self.clusters[cid] = _Cluster(cid)
            self.quotient.add_node(cid)
            inputs, outputs = self._grown(self.clusters[cid], name)
        else:
            _, cid, inputs, outputs = best
        cluster = self.clusters[cid]
        cluster.members.add(name)
        cluster.inputs = inputs
        cluster.outputs = outputs
        self.assignment[name] = cid
        for source in sources:
            if source != cid:
                self.quotient.add_edge(source, cid)

    def _quotient_from(self, assignment: Mapping[str, int]) -> nx.DiGraph:
        graph = nx.DiGraph()
        graph.add_nodes_from(set(assignment.values()))
        for node in self.netlist.nodes:
            target = assignment[node.output]
            for fanin in node.fanins:
                source = assignment.get(fanin)
                if source is not None and source != target:
                    graph.add_edge(source, target)
        return graph

    def refine(self) -> int:
        """One pass of single-node moves that shrink the cut or empty a cluster."""
        moves = 0
        fanouts = self.netlist.fanouts
        for node in self.netlist.nodes:
            name = node.output
            home = self.assignment[name]
            neighbours = {self.assignment[f] for f in node.fanins if f in self.assignment}
            neighbours.update(self.assignment[c] for c in fanouts[name])
            neighbours.discard(home)
            for target in sorted(neighbours):
                source_cluster = self.clusters[home]
                target_cluster = self.clusters[target]
                left = source_cluster.members - {name}
                joined = target_cluster.members | {name}
                new_target = boundary(self.netlist, joined)
                if len(new_target[0]) > self.k or len(new_target[1]) > self.m:
                    continue
                new_source: Tuple[Tuple[str, ...], Tuple[str, ...]] = ((), ())
                if left:
                    new_source = boundary(self.netlist, left)
                    if len(new_source[0]) > self.k or len(new_source[1]) > self.m:
                        continue
                before = sum(len(c.inputs) + len(c.outputs) for c in (source_cluster, target_cluster))
                after = sum(len(part) for part in new_source) + sum(len(part) for part in new_target)
                if left and after >= before:
                    continue
                trial = dict(self.assignment)
                trial[name] = target
                if not nx.is_directed_acyclic_graph(self._quotient_from(trial)):
                    continue
                self.assignment = trial
                target_cluster.members = joined
                target_cluster.inputs, target_cluster.outputs = set(new_target[0]), set(new_target[1])
                if left:
                    source_cluster.members = left
                    source_cluster.inputs, source_cluster.outputs = set(new_source[0]), set(new_source[1])
                else:
                    del self.clusters[home]
                moves += 1
                break
        return moves


def decompose(netlist: Netlist, k: int, m: int) -> Partition:
    if k < 1 or m < 1:
        raise PartitionError(f"Cut bounds must be positive, got k={k}, m={m}")
    for node in netlist.nodes:
        fanin_count = len(set(node.fanins))
        if fanin_count > k:
            raise PartitionError(f"Node {node.output} has {fanin_count} fanins, more than k={k}")

    state = _Clustering(netlist, k, m)
    for name in _cone_order(netlist):
        state.place(name)
    greedy_count = len(state.clusters)
    moves = state.refine()
    partition = _finalize(netlist, state.assignment, k, m)
    logger.info(
        "Decomposed %s into %d subcircuits (k=%d, m=%d; greedy %d, %d refinement moves)",
        netlist.name,
        len(partition),
        k,
        m,
        greedy_count,
        moves,
    )
    return partition


def _finalize(netlist: Netlist, assignment: Mapping[str, int], k: int, m: int) -> Partition:
    position = {node.output: i for i, node in enumerate(netlist.nodes)}
    groups: Dict[int, List[str]] = {}
    for node in netlist.nodes:
        groups.setdefault(assignment[node.output], []).append(node.output)

    graph = nx.DiGraph()
    graph.add_nodes_from(groups)
    for node in netlist.nodes:
        target = assignment[node.output]
        for fanin in node.fanins:
            source = assignment.get(fanin)
            if source is not None and source != target:
                graph.add_edge(source, target)
    first = {cid: position[names[0]] for cid, names in groups.items()}
    order = list(nx.lexicographical_topological_sort(graph, key=first.__getitem__))
    renumber = {old: new for new, old in enumerate(order)}

    subcircuits = []
    for old in order:
        names = tuple(groups[old])
        inputs, outputs = boundary(netlist, names)
        subcircuits.append(Subcircuit(id=renumber[old], nodes=names, boundary_inputs=inputs, boundary_outputs=outputs))
    final_assignment = {name: renumber[cid] for name, cid in assignment.items()}
    return Partition(subcircuits=tuple(subcircuits), assignment=final_assignment, k=k, m=m)


def validate_partition(netlist: Netlist, partition: Partition) -> None:
    """Independent check of cover, bounds, boundaries and quotient acyclicity."""
    seen: Dict[str, int] = {}
    for index, sub in enumerate(partition.subcircuits):
        if sub.id != index:
            raise PartitionError(f"Subcircuit at position {index} carries id {sub.id}")
        if not sub.nodes:
            raise PartitionError(f"Subcircuit {sub.id} is empty")
        for name in sub.nodes:
            if name not in netlist.drivers:
                raise PartitionError(f"Subcircuit {sub.id} names unknown node {name}")
            if name in seen:
                raise PartitionError(f"Node {name} is in subcircuits {seen[name]} and {sub.id}")
            seen[name] = sub.id
        inputs, outputs = boundary(netlist, sub.nodes)
        if (inputs, outputs) != (sub.boundary_inputs, sub.boundary_outputs):
            raise PartitionError(f"Subcircuit {sub.id} boundary does not match its node set")
        if len(inputs) > partition.k or not 1 <= len(outputs) <= partition.m:
            raise PartitionError(
                f"Subcircuit {sub.id} has {len(inputs)} inputs and {len(outputs)} outputs "
                f"(bounds k={partition.k}, m={partition.m})"
            )
    missing = [node.output for node in netlist.nodes if node.output not in seen]
    if missing:
        raise PartitionError(f"Nodes not covered by any subcircuit: {', '.join(missing[:5])}")
    if seen != dict(partition.assignment):
        raise PartitionError("Node assignment disagrees with subcircuit membership")
    if not nx.is_directed_acyclic_graph(partition.quotient_graph()):
        raise PartitionError("Quotient graph of the partition has a cycle")


def _check_current(netlist: Netlist, sub: Subcircuit) -> None:
    stale = [name for name in sub.nodes if name not in netlist.drivers]
    if stale:
        raise PartitionError(f"Subcircuit {sub.id} is stale: {', '.join(stale[:5])} not in {netlist.name}")


def extract(netlist: Netlist, sub: Subcircuit) -> Netlist:
    _check_current(netlist, sub)
    return Netlist(
        name=f"{netlist.name}_s{sub.id}",
        inputs=sub.boundary_inputs,
        outputs=sub.boundary_outputs,
        nodes=tuple(netlist.drivers[name] for name in sub.nodes),
    )


def _unique_prefix(netlist: Netlist, sub: Subcircuit, replacement: Netlist) -> str:
    prefix = f"s{sub.id}_"
    taken = set(netlist.net_order)
    internal = [node.output for node in replacement.nodes]
    while any(prefix + name in taken for name in internal):
        prefix = "_" + prefix
    return prefix


def substitute(netlist: Netlist, sub: Subcircuit, replacement: Netlist) -> Netlist:
    """Splice ``replacement`` in place of ``sub``; ports are matched by position."""
    if len(replacement.inputs) != sub.num_inputs or len(replacement.outputs) != sub.num_outputs:
        raise PortMismatchError(
            f"Replacement {replacement.name} has {len(replacement.inputs)}/{len(replacement.outputs)} ports, "
            f"subcircuit {sub.id} needs {sub.num_inputs}/{sub.num_outputs}"
        )
    _check_current(netlist, sub)

    prefix = _unique_prefix(netlist, sub, replacement)
    mapping = dict(zip(replacement.inputs, sub.boundary_inputs))
    for node in replacement.nodes:
        mapping[node.output] = prefix + node.output
    bridges: List[LogicNode] = []
    for local, target in zip(replacement.outputs, sub.boundary_outputs):
        if local in replacement.drivers:
            mapping[local] = target
        else:
            bridges.append(LogicNode.gate(GateKind.BUF, target, mapping[local]))

    removed = set(sub.nodes)
    kept = [node for node in netlist.nodes if node.output not in removed]
    spliced = [node.renamed(mapping) for node in replacement.nodes]
    return Netlist(
        name=netlist.name,
        inputs=netlist.inputs,
        outputs=netlist.outputs,
        nodes=tuple(kept + spliced + bridges),
    )
