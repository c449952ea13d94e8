"""Directed-network data model: graphs, node sets, problem instances.

Node ids are 1-based everywhere at the interface (v1..vn); bitmask
internals are 0-based and never leak out. All types are immutable after
construction, so everything here is safe for concurrent reads.
"""

from __future__ import annotations

from array import array
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable, Iterator

import numpy as np

from netdecouple import kernels
from netdecouple.errors import InstanceViolation, NetworkError


def _bits(mask: int) -> Iterator[int]:
    """Yield the set bit positions of ``mask`` in ascending order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class NodeSet:
    """Sorted, duplicate-free set of node ids out of 1..n.

    Doubles as a coordinate subspace: node v corresponds to the elementary
    basis vector e_v, so unions/intersections of node sets coincide with
    sums/intersections of the spanned subspaces.
    """

    members: tuple[int, ...]
    n: int

    def __post_init__(self):
        members = tuple(sorted(set(int(v) for v in self.members)))
        if members and (members[0] < 1 or members[-1] > self.n):
            raise NetworkError(
                f"node ids must lie in 1..{self.n}, got {members}"
            )
        object.__setattr__(self, "members", members)

    @classmethod
    def of(cls, members: Iterable[int], n: int) -> NodeSet:
        return cls(tuple(members), n)

    @classmethod
    def empty(cls, n: int) -> NodeSet:
        return cls((), n)

    @classmethod
    def full(cls, n: int) -> NodeSet:
        return cls(tuple(range(1, n + 1)), n)

    @classmethod
    def from_mask(cls, mask: int, n: int) -> NodeSet:
        return cls(tuple(b + 1 for b in _bits(mask)), n)

    @cached_property
    def mask(self) -> int:
        """0-based bitmask; bit v-1 is set iff node v is a member."""
        m = 0
        for v in self.members:
            m |= 1 << (v - 1)
        return m

    def _check(self, other: NodeSet) -> None:
        if self.n != other.n:
            raise NetworkError("node sets range over different graphs")

    def union(self, other: NodeSet) -> NodeSet:
        self._check(other)
        return NodeSet.from_mask(self.mask | other.mask, self.n)

    def intersection(self, other: NodeSet) -> NodeSet:
        self._check(other)
        return NodeSet.from_mask(self.mask & other.mask, self.n)

    def difference(self, other: NodeSet) -> NodeSet:
        self._check(other)
        return NodeSet.from_mask(self.mask & ~other.mask, self.n)

    def complement(self) -> NodeSet:
        return NodeSet.from_mask(~self.mask & ((1 << self.n) - 1), self.n)

    def issubset(self, other: NodeSet) -> bool:
        self._check(other)
        return self.mask & ~other.mask == 0

    def isdisjoint(self, other: NodeSet) -> bool:
        self._check(other)
        return self.mask & other.mask == 0

    __or__ = union
    __and__ = intersection
    __sub__ = difference
    __le__ = issubset

    def __contains__(self, v: int) -> bool:
        return 1 <= v <= self.n and (self.mask >> (v - 1)) & 1 == 1

    def __iter__(self) -> Iterator[int]:
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __bool__(self) -> bool:
        return bool(self.members)

    def __repr__(self) -> str:
        inner = ", ".join(f"v{v}" for v in self.members)
        return "{" + inner + "}"


@dataclass(frozen=True)
class Network:
    """Weighted digraph on nodes 1..n.

    At most one edge per ordered pair, every stored weight nonzero.
    Self-loops are allowed but never contribute to boundaries or paths.
    Edges are kept sorted by (tail, head); that order is the canonical
    edge index used by ``reachable_avoiding`` and the flow kernels.
    """

    n: int
    edges: tuple[tuple[int, int, float], ...]

    def __post_init__(self):
        if self.n < 1:
            raise NetworkError("node count must be positive")
        seen = set()
        norm = []
        for tail, head, weight in self.edges:
            tail, head, weight = int(tail), int(head), float(weight)
            if not (1 <= tail <= self.n and 1 <= head <= self.n):
                raise NetworkError(f"edge ({tail},{head}) out of range 1..{self.n}")
            if (tail, head) in seen:
                raise NetworkError(f"duplicate edge ({tail},{head})")
            if weight == 0.0:
                raise NetworkError(f"edge ({tail},{head}) has zero weight")
            seen.add((tail, head))
            norm.append((tail, head, weight))
        norm.sort(key=lambda e: (e[0], e[1]))
        object.__setattr__(self, "edges", tuple(norm))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple], default_weight: float = 1.0) -> Network:
        """Build from (tail, head) pairs or (tail, head, weight) triples."""
        full = []
        for e in edges:
            if len(e) == 2:
                full.append((e[0], e[1], default_weight))
            else:
                full.append(tuple(e))
        return cls(n, tuple(full))

    @property
    def q(self) -> int:
        return len(self.edges)

    @cached_property
    def nodes(self) -> NodeSet:
        return NodeSet.full(self.n)

    @cached_property
    def edge_index(self) -> dict[tuple[int, int], int]:
        """Canonical index of each (tail, head) pair in ``edges``."""
        return {(t, h): k for k, (t, h, _) in enumerate(self.edges)}

    @cached_property
    def weight_map(self) -> dict[tuple[int, int], float]:
        return {(t, h): w for t, h, w in self.edges}

    @cached_property
    def csr(self) -> tuple[array, array]:
        """(starts, heads) adjacency over 0-based ids, kernel-ready.

        heads[k] is the 0-based head of canonical edge k; edges of node v
        occupy heads[starts[v]:starts[v+1]] in ascending head order.
        """
        starts = array("i", [0] * (self.n + 1))
        heads = array("i", [0] * self.q)
        for tail, _, _ in self.edges:
            starts[tail] += 1
        for v in range(self.n):
            starts[v + 1] += starts[v]
        # edges are sorted by (tail, head), so a single pass fills in order
        pos = array("i", starts[:-1])
        for k, (tail, head, _) in enumerate(self.edges):
            heads[pos[tail - 1]] = head - 1
            pos[tail - 1] += 1
        return starts, heads

    @cached_property
    def out_masks(self) -> tuple[int, ...]:
        """Per-node successor bitmask (0-based, self bit included)."""
        masks = [0] * self.n
        for tail, head, _ in self.edges:
            masks[tail - 1] |= 1 << (head - 1)
        return tuple(masks)

    @cached_property
    def in_masks(self) -> tuple[int, ...]:
        masks = [0] * self.n
        for tail, head, _ in self.edges:
            masks[head - 1] |= 1 << (tail - 1)
        return tuple(masks)

    def has_edge(self, tail: int, head: int) -> bool:
        return (tail, head) in self.edge_index


def neighbors(net: Network, v: int, direction: str) -> NodeSet:
    """Out- or in-neighbors of node v; a self-loop contributes v to both."""
    if not (1 <= v <= net.n):
        raise NetworkError(f"unknown node id v{v}")
    if direction == "out":
        return NodeSet.from_mask(net.out_masks[v - 1], net.n)
    if direction == "in":
        return NodeSet.from_mask(net.in_masks[v - 1], net.n)
    raise ValueError(f"direction must be 'out' or 'in', got {direction!r}")


def boundary(net: Network, wset: NodeSet, side: str) -> NodeSet:
    """In-boundary (nodes of W with an edge out of W) or out-boundary
    (nodes outside W with an edge from W). Self-loops never cross."""
    wmask = wset.mask
    if side == "in":
        got = 0
        for v in _bits(wmask):
            if net.out_masks[v] & ~wmask:
                got |= 1 << v
        return NodeSet.from_mask(got, net.n)
    if side == "out":
        got = 0
        for v in _bits(wmask):
            got |= net.out_masks[v]
        return NodeSet.from_mask(got & ~wmask, net.n)
    raise ValueError(f"side must be 'in' or 'out', got {side!r}")


def transpose(net: Network) -> Network:
    """Reverse every edge, keeping weights."""
    return Network(net.n, tuple((h, t, w) for t, h, w in net.edges))


def reachable_avoiding(
    net: Network,
    sources: NodeSet,
    removed_nodes: NodeSet | None = None,
    removed_edges: Iterable[tuple[int, int]] = (),
) -> NodeSet:
    """Forward-reachable set, skipping removed nodes and edges.

    Sources inside ``removed_nodes`` are dropped; surviving sources are
    included in the result.
    """
    removed_mask = removed_nodes.mask if removed_nodes is not None else 0
    edge_mask = 0
    for tail, head in removed_edges:
        try:
            edge_mask |= 1 << net.edge_index[(tail, head)]
        except KeyError:
            raise NetworkError(f"no edge ({tail},{head}) to remove") from None
    starts, heads = net.csr
    got = kernels.reachable_mask(
        net.n, starts, heads, sources.mask, removed_mask, edge_mask
    )
    return NodeSet.from_mask(got, net.n)


def indicator_matrix(net: Network) -> np.ndarray:
    """Unweighted adjacency: entry (j, i) is 1 iff the edge vi -> vj exists."""
    m = np.zeros((net.n, net.n))
    for tail, head, _ in net.edges:
        m[head - 1, tail - 1] = 1.0
    return m


@dataclass(frozen=True)
class ProblemInstance:
    """A network with its role sets: disturbances D, targets T, and the
    optional input set B and output set C."""

    network: Network
    disturbances: NodeSet
    targets: NodeSet
    inputs: NodeSet | None = None
    outputs: NodeSet | None = None

    def __post_init__(self):
        n = self.network.n
        for name, ns in (
            ("disturbances", self.disturbances),
            ("targets", self.targets),
            ("inputs", self.inputs),
            ("outputs", self.outputs),
        ):
            if ns is not None and ns.n != n:
                raise NetworkError(f"{name} indexed over {ns.n} nodes, network has {n}")

    @property
    def n(self) -> int:
        return self.network.n

    def with_inputs(self, inputs: NodeSet) -> ProblemInstance:
        return replace(self, inputs=inputs)

    def with_outputs(self, outputs: NodeSet) -> ProblemInstance:
        return replace(self, outputs=outputs)


def validate_instance(inst: ProblemInstance) -> list[str]:
    """Return every violated disjointness constraint; empty means ok."""
    violations = []
    if not inst.disturbances.isdisjoint(inst.targets):
        violations.append("D and T intersect")
    if inst.inputs is not None and not inst.disturbances.isdisjoint(inst.inputs):
        violations.append("D and B intersect")
    if inst.outputs is not None and not inst.targets.isdisjoint(inst.outputs):
        violations.append("T and C intersect")
    return violations


def require_valid(inst: ProblemInstance, *, need_inputs=False, need_outputs=False) -> None:
    """Solver entry gate: disjointness plus nonempty D and T."""
    violations = validate_instance(inst)
    if violations:
        raise InstanceViolation("; ".join(violations))
    if not inst.disturbances or not inst.targets:
        raise InstanceViolation("D and T must be nonempty")
    if need_inputs and inst.inputs is None:
        raise InstanceViolation("instance has no input set B")
    if need_outputs and inst.outputs is None:
        raise InstanceViolation("instance has no output set C")
