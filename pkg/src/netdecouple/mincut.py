"""Minimum-cardinality input/output node placement via max-flow.

Selecting a node is modelled as cutting its unit-capacity split edge in
a node-split extended network; all other edges get an effectively
infinite integer capacity (n+1, which no unit cut can reach), keeping
the flow arithmetic exact. The three placement solvers differ in which
nodes are forbidden and which side of the minimum cut they read off.
"""

from __future__ import annotations

import heapq
from array import array
from dataclasses import dataclass

from netdecouple import kernels
from netdecouple.errors import (
    ExtremalCutInsufficient,
    FlowUnbounded,
    SizeCapExceeded,
)
from netdecouple.invariance import zstar
from netdecouple.network import (
    Network,
    NodeSet,
    ProblemInstance,
    boundary,
    require_valid,
)
from netdecouple.solvability import ddpdf_solvable, ddpsf_solvable


@dataclass(frozen=True)
class ExtendedNetwork:
    """Node-split flow network over 2n+2 nodes.

    Base node v splits into (v, v+n) joined by its split edge; base edges
    re-attach from tail copies to original heads; a source node 2n+1
    feeds every disturbance and every target's split copy drains into the
    sink 2n+2. Split edges carry capacity 1 unless the node is forbidden.
    """

    base: Network
    forbidden: NodeSet
    tails: tuple[int, ...]
    heads: tuple[int, ...]
    caps: tuple[int, ...]

    @property
    def node_count(self) -> int:
        return 2 * self.base.n + 2

    @property
    def source(self) -> int:
        return 2 * self.base.n + 1

    @property
    def sink(self) -> int:
        return 2 * self.base.n + 2

    @property
    def inf(self) -> int:
        return self.base.n + 1

    def split_edge(self, v: int) -> tuple[int, int]:
        return v, v + self.base.n


@dataclass(frozen=True)
class CutResult:
    """A minimum cut on an extended network.

    ``source_side``/``sink_side`` partition the extended nodes;
    ``cut_nodes`` are the base nodes whose split edges cross, and the
    flow value always equals their count because non-split edges can
    never be saturated.
    """

    flow_value: int
    source_side: NodeSet
    sink_side: NodeSet
    cut_nodes: NodeSet


def build_extended(inst: ProblemInstance, forbidden: NodeSet) -> ExtendedNetwork:
    """Extended network with the given nodes excluded from selection."""
    net = inst.network
    n = net.n
    inf = n + 1
    tails, heads, caps = [], [], []
    for v in range(1, n + 1):
        tails.append(v)
        heads.append(v + n)
        caps.append(inf if v in forbidden else 1)
    for tail, head, _ in net.edges:
        tails.append(tail + n)
        heads.append(head)
        caps.append(inf)
    for d in inst.disturbances:
        tails.append(2 * n + 1)
        heads.append(d)
        caps.append(inf)
    for t in inst.targets:
        tails.append(t + n)
        heads.append(2 * n + 2)
        caps.append(inf)
    return ExtendedNetwork(net, forbidden, tuple(tails), tuple(heads), tuple(caps))


def max_flow_min_cut(ext: ExtendedNetwork, side: str = "source") -> CutResult:
    """Integral max flow plus the extremal minimum cut on one side.

    side="source" reads the cut at the residual-reachable-from-source
    boundary (closest to the disturbances); side="sink" runs the same
    routine on the reversed network, yielding the cut closest to the
    targets.
    """
    if side not in ("source", "sink"):
        raise ValueError(f"side must be 'source' or 'sink', got {side!r}")
    n = ext.base.n
    num = ext.node_count
    caps = array("i", ext.caps)
    if side == "source":
        tails = array("i", (t - 1 for t in ext.tails))
        heads = array("i", (h - 1 for h in ext.heads))
        flow, reach = kernels.max_flow(num, tails, heads, caps, ext.source - 1, ext.sink - 1)
        src_mask = reach
    else:
        tails = array("i", (h - 1 for h in ext.heads))
        heads = array("i", (t - 1 for t in ext.tails))
        flow, reach = kernels.max_flow(num, tails, heads, caps, ext.sink - 1, ext.source - 1)
        src_mask = ~reach & ((1 << num) - 1)
    if flow > n:
        raise FlowUnbounded(
            "minimum cut exceeds n: every remaining cut crosses a forbidden node"
        )

    cut = []
    for t, h, _ in zip(ext.tails, ext.heads, ext.caps):
        crosses = (src_mask >> (t - 1)) & 1 and not (src_mask >> (h - 1)) & 1
        if crosses:
            if h != t + n:
                raise AssertionError(
                    f"non-split edge ({t},{h}) crosses the minimum cut"
                )
            cut.append(t)
    if len(cut) != flow:
        raise AssertionError("cut size does not match the flow value")
    source_side = NodeSet.from_mask(src_mask, num)
    return CutResult(
        flow_value=flow,
        source_side=source_side,
        sink_side=source_side.complement(),
        cut_nodes=NodeSet.of(cut, n),
    )


def solve_min_ddpsf(inst: ProblemInstance) -> NodeSet:
    """Minimum-cardinality input set for state-feedback decoupling.

    The source-side minimum cut of the extended network (disturbances
    forbidden) is optimal; the solution is checked to be feasible, to
    coincide with the out-boundary of its own maximal controlled
    invariant set, and to avoid that set.
    """
    require_valid(inst)
    ext = build_extended(inst, forbidden=inst.disturbances)
    cut = max_flow_min_cut(ext, side="source")
    inputs = cut.cut_nodes

    report = ddpsf_solvable(inst.with_inputs(inputs))
    zs = report.zstar
    if not report.solvable:
        raise AssertionError("minimum cut produced an infeasible input set")
    if inputs != boundary(inst.network, zs, "out"):
        raise AssertionError("optimal input set is not the out-boundary of Z*")
    if not inputs.isdisjoint(zs):
        raise AssertionError("optimal input set intersects Z*")
    return inputs


def solve_min_ddpdf(inst: ProblemInstance) -> tuple[NodeSet, NodeSet]:
    """Minimum-cardinality (inputs, outputs) for dynamical feedback.

    Feasibility requires every disturbance-to-target path to meet an
    output node strictly before its last input node. That staggering is
    solved by one min cut on a two-mode copy of the node-split network:
    a unit of flow travels in mode 0 until an optional switch and in
    mode 1 afterwards; selecting a node as output cuts its mode-0 split,
    selecting it as input cuts its mode-1 split, and the switch edge at
    a node bypasses both of its splits, so a path survives exactly when
    it can be divided into an output-free prefix and an input-free
    suffix overlapping in one node. Cutting all survivors is therefore
    exactly the joint placement problem, and the min-cut value equals
    the brute-force optimum.

    Joint feasibility of the extracted pair is re-checked; a failure
    would be a counterexample to the reduction and raises instead of
    falling back.
    """
    require_valid(inst)
    net = inst.network
    n = net.n
    inf = 2 * n + 1
    # node layout (0-based): mode-0 split v -> n+v, mode-1 split 2n+v -> 3n+v
    tails, heads, caps = [], [], []
    for v in range(n):
        tails.append(v)
        heads.append(n + v)
        caps.append(inf if v + 1 in inst.targets else 1)
    for v in range(n):
        tails.append(2 * n + v)
        heads.append(3 * n + v)
        caps.append(inf if v + 1 in inst.disturbances else 1)
    for v in range(n):  # mode switch, usable at any node
        tails.append(v)
        heads.append(3 * n + v)
        caps.append(inf)
    for tail, head, _ in net.edges:
        tails.append(n + tail - 1)
        heads.append(head - 1)
        caps.append(inf)
        tails.append(3 * n + tail - 1)
        heads.append(2 * n + head - 1)
        caps.append(inf)
    source, sink = 4 * n, 4 * n + 1
    for d in inst.disturbances:
        tails.append(source)
        heads.append(d - 1)
        caps.append(inf)
    for t in inst.targets:
        tails.append(n + t - 1)
        heads.append(sink)
        caps.append(inf)
        tails.append(3 * n + t - 1)
        heads.append(sink)
        caps.append(inf)

    flow, reach = kernels.max_flow(
        4 * n + 2, array("i", tails), array("i", heads), array("i", caps), source, sink
    )
    if flow > 2 * n:
        raise FlowUnbounded("staggered cut exceeded 2n, which should be impossible")
    outputs = []
    inputs = []
    for v in range(n):
        if (reach >> v) & 1 and not (reach >> (n + v)) & 1:
            outputs.append(v + 1)
        if (reach >> (2 * n + v)) & 1 and not (reach >> (3 * n + v)) & 1:
            inputs.append(v + 1)
    if len(inputs) + len(outputs) != flow:
        raise AssertionError("staggered cut does not match the flow value")
    inputs = NodeSet.of(inputs, n)
    outputs = NodeSet.of(outputs, n)

    report = ddpdf_solvable(
        inst.with_inputs(inputs).with_outputs(outputs), cross_check="off"
    )
    if not report.solvable:
        raise ExtremalCutInsufficient(
            "staggered min cut is not jointly feasible; "
            f"S*={report.sstar} is not inside Z*={report.zstar}",
            witness=(inputs, outputs),
        )
    return inputs, outputs


def _path_nodes(inst: ProblemInstance) -> NodeSet:
    """Nodes lying on some disturbance-to-target walk."""
    net = inst.network
    starts, heads = net.csr
    fwd = kernels.reachable_mask(net.n, starts, heads, inst.disturbances.mask, 0, 0)
    tstarts, theads = _reverse_csr(net)
    back = kernels.reachable_mask(net.n, tstarts, theads, inst.targets.mask, 0, 0)
    return NodeSet.from_mask(fwd & back, net.n)


def _reverse_csr(net: Network):
    starts = array("i", [0] * (net.n + 1))
    heads = array("i", [0] * net.q)
    for _, head, _ in net.edges:
        starts[head] += 1
    for v in range(net.n):
        starts[v + 1] += starts[v]
    pos = array("i", starts[:-1])
    for tail, head, _ in net.edges:
        heads[pos[head - 1]] = tail - 1
        pos[head - 1] += 1
    return starts, heads


def solve_min_ddpof(
    inst: ProblemInstance, mode: str = "exact"
) -> tuple[NodeSet, NodeSet, NodeSet]:
    """Minimum-cardinality (inputs, outputs, witness set) for static
    output feedback.

    The problem reduces to choosing a set W with D inside W and W
    avoiding T that minimizes the total boundary size: the inputs are
    then W's out-boundary and the outputs its in-boundary, and every
    exit edge crossing from outputs to inputs makes W simultaneously
    controlled and conditioned invariant.

    Off-path nodes never affect the optimum: nodes reachable from the
    disturbances but not co-reachable to the targets have all their
    edges inside that region, so absorbing them into W is free, and the
    remaining off-path nodes have no in-edges from W at all, so leaving
    them out is free. The search therefore runs only over nodes lying on
    disturbance-to-target walks.

    mode="exact" is best-first branch-and-bound (cap: 24 free nodes);
    mode="heuristic" takes a minimum edge cut on the path subgraph and
    returns its tails as outputs and heads as inputs.
    """
    require_valid(inst)
    net = inst.network
    n = net.n
    pset = _path_nodes(inst)
    starts, heads = net.csr
    d_reach = kernels.reachable_mask(n, starts, heads, inst.disturbances.mask, 0, 0)
    absorbed = d_reach & ~pset.mask  # reachable, never co-reachable: free to keep

    if not pset:
        wset = NodeSet.from_mask(d_reach, n)
        return NodeSet.empty(n), NodeSet.empty(n), wset

    if mode == "heuristic":
        w_mask = _heuristic_w(inst, pset)
    elif mode == "exact":
        free = [v for v in pset if v not in inst.disturbances and v not in inst.targets]
        if len(free) > 24:
            raise SizeCapExceeded("exact mode is capped at 24 undecided path nodes")
        w_mask = _exact_w(inst, pset, free)
    else:
        raise ValueError(f"mode must be 'exact' or 'heuristic', got {mode!r}")

    wset = NodeSet.from_mask(w_mask | absorbed, n)
    inputs = boundary(net, wset, "out")
    outputs = boundary(net, wset, "in")
    _check_w(inst, wset, inputs, outputs)
    return inputs, outputs, wset


def _check_w(inst, wset, inputs, outputs):
    from netdecouple.invariance import is_conditioned_invariant, is_controlled_invariant

    net = inst.network
    if not inst.disturbances.issubset(wset):
        raise AssertionError("witness set does not contain the disturbances")
    if not wset.isdisjoint(inst.targets):
        raise AssertionError("witness set touches a target")
    if not is_controlled_invariant(net, wset, inputs):
        raise AssertionError("witness set is not controlled invariant")
    if not is_conditioned_invariant(net, wset, outputs):
        raise AssertionError("witness set is not conditioned invariant")


def _exact_w(inst: ProblemInstance, pset: NodeSet, free: list[int]) -> int:
    """Best-first search over path-node memberships.

    Priority is max(settled boundary cost, flow lower bound); the first
    fully decided state popped is optimal. Ties break on insertion order,
    which is deterministic.
    """
    net = inst.network
    in0 = inst.disturbances.mask
    out0 = inst.targets.mask & pset.mask
    lam = _flow_bound(inst)

    pmask = pset.mask
    out_masks = net.out_masks
    in_masks = net.in_masks
    free_bits = [1 << (v - 1) for v in free]

    def settled_cost(inside: int, outside: int) -> int:
        cost = 0
        rest = inside
        while rest:
            low = rest & -rest
            rest ^= low
            if out_masks[low.bit_length() - 1] & outside:
                cost += 1
        rest = outside
        while rest:
            low = rest & -rest
            rest ^= low
            if in_masks[low.bit_length() - 1] & inside:
                cost += 1
        return cost

    counter = 0
    heap = [(max(settled_cost(in0, out0), lam), 0, 0, in0, out0)]
    while heap:
        bound, _, depth, inside, outside = heapq.heappop(heap)
        if depth == len(free):
            return inside
        bit = free_bits[depth]
        for nin, nout in ((inside | bit, outside), (inside, outside | bit)):
            counter += 1
            pri = max(settled_cost(nin & pmask, nout), lam)
            heapq.heappush(heap, (pri, counter, depth + 1, nin, nout))
    raise AssertionError("unreachable: search space exhausted without a leaf")


def _flow_bound(inst: ProblemInstance) -> int:
    """Admissible lower bound on |B|+|C|: each is at least its own
    minimum node cut (inputs avoid D, outputs avoid T)."""
    lam_b = max_flow_min_cut(
        build_extended(inst, forbidden=inst.disturbances), "source"
    ).flow_value
    lam_c = max_flow_min_cut(
        build_extended(inst, forbidden=inst.targets), "source"
    ).flow_value
    return lam_b + lam_c


def _heuristic_w(inst: ProblemInstance, pset: NodeSet) -> int:
    """Minimum edge cut on the path subgraph; W is its source side."""
    net = inst.network
    n = net.n
    inf = net.q + 1
    tails, heads, caps = [], [], []
    for tail, head, _ in net.edges:
        if tail in pset and head in pset:
            tails.append(tail - 1)
            heads.append(head - 1)
            caps.append(1)
    source, sink = n, n + 1
    for d in inst.disturbances:
        if d in pset:
            tails.append(source)
            heads.append(d - 1)
            caps.append(inf)
    for t in inst.targets:
        if t in pset:
            tails.append(t - 1)
            heads.append(sink)
            caps.append(inf)
    _, reach = kernels.max_flow(
        n + 2, array("i", tails), array("i", heads), array("i", caps), source, sink
    )
    return reach & pset.mask
