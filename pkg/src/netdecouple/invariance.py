"""Invariance predicates and the extremal invariant-set recursions.

A set Z is controlled invariant when every edge leaving it lands on an
input node, and S is conditioned invariant when every edge leaving it
starts at an output node. The recursions shrink toward the maximal
controlled invariant subset and grow toward the minimal conditioned
invariant superset; both fix in at most n steps.
"""

from __future__ import annotations

from dataclasses import dataclass

from netdecouple import kernels
from netdecouple.network import Network, NodeSet, ProblemInstance


def is_invariant_set(net: Network, zset: NodeSet) -> bool:
    """True iff no edge leaves zset (self-loops never leave)."""
    zmask = zset.mask
    return all(not net.out_masks[v - 1] & ~zmask for v in zset)


def is_controlled_invariant(net: Network, zset: NodeSet, inputs: NodeSet) -> bool:
    """True iff every edge leaving zset lands on an input node."""
    allowed = zset.mask | inputs.mask
    return all(not net.out_masks[v - 1] & ~allowed for v in zset)


def is_conditioned_invariant(net: Network, sset: NodeSet, outputs: NodeSet) -> bool:
    """True iff every edge leaving sset starts at an output node."""
    smask = sset.mask
    cmask = outputs.mask
    for v in sset:
        if (cmask >> (v - 1)) & 1:
            continue
        if net.out_masks[v - 1] & ~smask:
            return False
    return True


def is_cab_pair(
    net: Network, sset: NodeSet, zset: NodeSet, inputs: NodeSet, outputs: NodeSet
) -> bool:
    """Nested pair: S inside Z, S conditioned invariant, Z controlled invariant."""
    return (
        sset.issubset(zset)
        and is_conditioned_invariant(net, sset, outputs)
        and is_controlled_invariant(net, zset, inputs)
    )


@dataclass(frozen=True)
class InvarianceResult:
    """Fixpoint of a set recursion plus its per-iteration trace.

    ``iterations`` counts strict updates, so it is at most n and equals
    len(trace) - 1 when the trace is retained. ``at(m)`` reads the m-th
    iterate, clamping past the fixpoint.
    """

    fixpoint: NodeSet
    iterations: int
    trace: tuple[NodeSet, ...] | None

    def at(self, m: int) -> NodeSet:
        if self.trace is None:
            raise ValueError("trace was not retained")
        return self.trace[min(m, len(self.trace) - 1)]


def max_controlled_invariant(
    net: Network, inputs: NodeSet, start: NodeSet, *, want_trace: bool = True
) -> InvarianceResult:
    """Maximal controlled invariant subset of ``start``.

    Each step simultaneously removes every member with an edge leading
    outside the current set union the inputs. An empty start
    short-circuits to an empty fixpoint with 0 iterations.
    """
    starts, heads = net.csr
    fix, iters, trace = kernels.zstar_fixpoint(
        net.n, starts, heads, inputs.mask, start.mask, want_trace
    )
    return InvarianceResult(
        NodeSet.from_mask(fix, net.n),
        iters,
        tuple(NodeSet.from_mask(m, net.n) for m in trace) if trace is not None else None,
    )


def min_conditioned_invariant(
    net: Network, outputs: NodeSet, start: NodeSet, *, want_trace: bool = True
) -> InvarianceResult:
    """Minimal conditioned invariant superset of ``start``.

    Each step simultaneously adds every head of an edge whose tail is a
    current member outside the outputs.
    """
    starts, heads = net.csr
    fix, iters, trace = kernels.sstar_fixpoint(
        net.n, starts, heads, outputs.mask, start.mask, want_trace
    )
    return InvarianceResult(
        NodeSet.from_mask(fix, net.n),
        iters,
        tuple(NodeSet.from_mask(m, net.n) for m in trace) if trace is not None else None,
    )


def zstar(inst: ProblemInstance, inputs: NodeSet, **kw) -> InvarianceResult:
    """Maximal controlled invariant subset of V minus targets."""
    return max_controlled_invariant(
        inst.network, inputs, inst.targets.complement(), **kw
    )


def sstar(inst: ProblemInstance, outputs: NodeSet, **kw) -> InvarianceResult:
    """Minimal conditioned invariant superset of the disturbances."""
    return min_conditioned_invariant(inst.network, outputs, inst.disturbances, **kw)
