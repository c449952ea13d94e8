"""Feasibility tests for decoupling by state, output, and dynamical feedback.

Each test is computed two ways where the theory provides two equivalent
conditions (a set containment and a graphical condition); the report
records whether they agreed, since a disagreement means a bug, not an
ambiguous instance.
"""

from __future__ import annotations

from dataclasses import dataclass

from netdecouple import kernels
from netdecouple.errors import InfeasibleProblem
from netdecouple.invariance import (
    InvarianceResult,
    is_controlled_invariant,
    min_conditioned_invariant,
    sstar,
    zstar,
)
from netdecouple.network import (
    Network,
    NodeSet,
    ProblemInstance,
    boundary,
    require_valid,
)

PATH_CAP = 10_000


@dataclass(frozen=True)
class SolvabilityReport:
    solvable: bool
    method_agreement: bool | None
    zstar: NodeSet | None = None
    sstar: NodeSet | None = None
    wset: NodeSet | None = None
    violating_path: tuple[int, ...] | None = None
    violating_indexes: tuple[int | None, int | None] | None = None

    @property
    def witness(self):
        """Invariant set(s) when solvable, else the violating path."""
        if self.solvable:
            if self.wset is not None:
                return self.wset
            if self.sstar is not None and self.zstar is not None:
                return (self.sstar, self.zstar)
            return self.zstar
        return self.violating_path


def _find_dt_path(
    net: Network,
    sources: NodeSet,
    targets: NodeSet,
    removed_nodes: NodeSet | None = None,
    removed_edge_mask: int = 0,
) -> tuple[int, ...] | None:
    """One surviving disturbance-to-target path (BFS, ascending ids)."""
    removed = removed_nodes.mask if removed_nodes is not None else 0
    starts, heads = net.csr
    parent = {}
    queue = []
    for v in sources:
        if not (removed >> (v - 1)) & 1:
            parent[v - 1] = None
            queue.append(v - 1)
    tmask = targets.mask
    i = 0
    while i < len(queue):
        v = queue[i]
        i += 1
        if (tmask >> v) & 1:
            path = []
            node = v
            while node is not None:
                path.append(node + 1)
                node = parent[node]
            return tuple(reversed(path))
        for k in range(starts[v], starts[v + 1]):
            if (removed_edge_mask >> k) & 1:
                continue
            h = heads[k]
            if h in parent or (removed >> h) & 1:
                continue
            parent[h] = v
            queue.append(h)
    return None


def path_indexes(
    path: tuple[int, ...], inputs: NodeSet, outputs: NodeSet
) -> tuple[int | None, int | None]:
    """First output position (among 1..len-1) and last input position
    (among 2..len) on a disturbance-to-target path, 1-based; None when
    the corresponding role does not appear in its admissible range."""
    if len(path) < 2:
        raise ValueError("path must have at least 2 nodes")
    o = next((s for s in range(1, len(path)) if path[s - 1] in outputs), None)
    i = next((s for s in range(len(path), 1, -1) if path[s - 1] in inputs), None)
    return o, i


def ddpsf_solvable(inst: ProblemInstance) -> SolvabilityReport:
    """State-feedback decoupling feasibility.

    Containment check: D inside the maximal controlled invariant subset
    of V minus T. Graphical check: removing the input nodes severs every
    disturbance-to-target path. Both run; agreement is recorded.
    """
    require_valid(inst, need_inputs=True)
    net = inst.network
    zres = zstar(inst, inst.inputs, want_trace=False)
    by_sets = inst.disturbances.issubset(zres.fixpoint)

    starts, heads = net.csr
    reach = kernels.reachable_mask(
        net.n, starts, heads, inst.disturbances.mask, inst.inputs.mask, 0
    )
    by_graph = reach & inst.targets.mask == 0

    path = None
    if not by_sets:
        path = _find_dt_path(net, inst.disturbances, inst.targets, inst.inputs)
    return SolvabilityReport(
        solvable=by_sets,
        method_agreement=by_sets == by_graph,
        zstar=zres.fixpoint,
        violating_path=path,
    )


def _crossing_edge_mask(net: Network, outputs: NodeSet, inputs: NodeSet) -> int:
    """Bitmask of canonical edge indexes with tail in C and head in B."""
    mask = 0
    for k, (tail, head, _) in enumerate(net.edges):
        if tail in outputs and head in inputs:
            mask |= 1 << k
    return mask


def construct_w(inst: ProblemInstance) -> NodeSet:
    """Grow a set that is both controlled and conditioned invariant and
    sandwiched between D and V minus T.

    Starts from the minimal conditioned invariant superset of D. While
    some output member has an uncovered child outside the inputs, absorb
    those children and re-close under conditioned invariance. Growth is
    monotone, so touching a target is final: infeasible.
    """
    return _grow_w(inst)[0]


def _grow_w(inst: ProblemInstance) -> tuple[NodeSet, int]:
    require_valid(inst, need_inputs=True, need_outputs=True)
    net = inst.network
    cur = sstar(inst, inst.outputs, want_trace=False).fixpoint
    rounds = 0
    while True:
        if not cur.isdisjoint(inst.targets):
            raise InfeasibleProblem(
                "grown invariant set reached a target node", witness=cur
            )
        uncovered = 0
        cmask = inst.outputs.mask & cur.mask
        for v in _iter_mask(cmask):
            uncovered |= net.out_masks[v]
        uncovered &= ~cur.mask & ~inst.inputs.mask
        if not uncovered:
            break
        rounds += 1
        seed = NodeSet.from_mask(cur.mask | uncovered, net.n)
        cur = min_conditioned_invariant(
            net, inst.outputs, seed, want_trace=False
        ).fixpoint
    if not is_controlled_invariant(net, cur, inst.inputs):
        raise AssertionError("closure ended without controlled invariance")
    return cur, rounds


def _iter_mask(mask):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def ddpof_solvable(inst: ProblemInstance) -> SolvabilityReport:
    """Static output-feedback decoupling feasibility.

    Graphical check: deleting every edge from an output node to an input
    node severs all disturbance-to-target paths. The witness set from
    ``construct_w`` is computed as the cross-check: it must succeed
    exactly when the graphical check passes.
    """
    require_valid(inst, need_inputs=True, need_outputs=True)
    net = inst.network
    edge_mask = _crossing_edge_mask(net, inst.outputs, inst.inputs)
    starts, heads = net.csr
    reach = kernels.reachable_mask(
        net.n, starts, heads, inst.disturbances.mask, 0, edge_mask
    )
    by_graph = reach & inst.targets.mask == 0

    wset = None
    try:
        wset = construct_w(inst)
        built = True
    except InfeasibleProblem:
        built = False

    path = None
    if not by_graph:
        path = _find_dt_path(
            net, inst.disturbances, inst.targets, removed_edge_mask=edge_mask
        )
    return SolvabilityReport(
        solvable=by_graph,
        method_agreement=by_graph == built,
        wset=wset,
        violating_path=path,
    )


def ddpdf_solvable(inst: ProblemInstance, cross_check: str = "auto") -> SolvabilityReport:
    """Dynamical-feedback decoupling feasibility.

    The verdict is the containment of the minimal conditioned invariant
    superset of D in the maximal controlled invariant subset of V minus
    T. At desk scale (n <= 12 and enumerable paths) the per-path index
    condition (first output strictly before last input) is cross-checked.
    ``cross_check``: "auto", "on", or "off".
    """
    require_valid(inst, need_inputs=True, need_outputs=True)
    net = inst.network
    sres = sstar(inst, inst.outputs, want_trace=False)
    zres = zstar(inst, inst.inputs, want_trace=False)
    verdict = sres.fixpoint.issubset(zres.fixpoint)

    agreement = None
    path = None
    indexes = None
    run_paths = cross_check == "on" or (cross_check == "auto" and net.n <= 12)
    if run_paths:
        from netdecouple.oracle import enumerate_dt_paths

        try:
            paths = enumerate_dt_paths(inst, cap=PATH_CAP)
        except Exception:
            paths = None
        if paths is not None:
            by_paths = True
            for p in paths:
                o, i = path_indexes(p, inst.inputs, inst.outputs)
                if o is None or i is None or not o < i:
                    by_paths = False
                    if path is None:
                        path, indexes = p, (o, i)
            agreement = verdict == by_paths
    return SolvabilityReport(
        solvable=verdict,
        method_agreement=agreement,
        zstar=zres.fixpoint,
        sstar=sres.fixpoint,
        violating_path=path,
        violating_indexes=indexes,
    )


def boundary_certificates(inst: ProblemInstance, wset: NodeSet) -> tuple[NodeSet, NodeSet]:
    """(out-boundary, in-boundary) of a candidate invariant set."""
    return boundary(inst.network, wset, "out"), boundary(inst.network, wset, "in")
