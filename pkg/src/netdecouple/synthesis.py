"""Numerical construction of the decoupling laws.

All input/output/disturbance/target matrices are elementary selections,
so their pseudo-inverses are plain transposes and every formula here is
pure matrix arithmetic: the state-feedback friend cancels the rows of
the input nodes, the output-injection friend cancels the columns of the
output nodes, and the static gain removes exactly the edges crossing
from outputs to inputs. Cancellations subtract identical floats, so the
synthesized laws are exact, not approximate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from netdecouple.errors import PremiseViolation
from netdecouple.invariance import sstar, zstar
from netdecouple.mincut import solve_min_ddpdf, solve_min_ddpof, solve_min_ddpsf
from netdecouple.network import (
    Network,
    NodeSet,
    ProblemInstance,
    boundary,
    require_valid,
)
from netdecouple.solvability import construct_w


def selection_columns(nodes: NodeSet, n: int) -> np.ndarray:
    """n x |nodes| matrix of elementary columns, ascending node order."""
    mat = np.zeros((n, len(nodes)))
    for j, v in enumerate(nodes):
        mat[v - 1, j] = 1.0
    return mat


def selection_rows(nodes: NodeSet, n: int) -> np.ndarray:
    """|nodes| x n matrix of elementary rows, ascending node order."""
    return selection_columns(nodes, n).T


def assign_random_weights(net: Network, seed: int) -> np.ndarray:
    """Weighted adjacency with support exactly on the edge set.

    Each weight is drawn uniformly from [-2, -0.1] u [0.1, 2]; the
    magnitude floor keeps genericity numerically robust. Deterministic
    per seed, edges visited in canonical order.
    """
    rng = np.random.default_rng(seed)
    a = np.zeros((net.n, net.n))
    for tail, head, _ in net.edges:
        magnitude = rng.uniform(0.1, 2.0)
        sign = 1.0 if rng.random() < 0.5 else -1.0
        a[head - 1, tail - 1] = sign * magnitude
    return a


@dataclass(frozen=True, eq=False)
class WeightedSystem:
    """A problem instance together with a concrete weight matrix."""

    instance: ProblemInstance
    a: np.ndarray

    def __post_init__(self):
        net = self.instance.network
        a = np.asarray(self.a, dtype=float)
        if a.shape != (net.n, net.n):
            raise ValueError(f"weight matrix must be {net.n}x{net.n}")
        support = {(t, h) for t, h, _ in net.edges}
        nz = {(int(t) + 1, int(h) + 1) for t, h in zip(*np.nonzero(a.T))}
        if nz != support:
            raise ValueError("weight matrix support does not match the edge set")
        object.__setattr__(self, "a", a)

    @property
    def n(self) -> int:
        return self.instance.network.n

    @property
    def b_matrix(self) -> np.ndarray:
        return selection_columns(self.instance.inputs, self.n)

    @property
    def c_matrix(self) -> np.ndarray:
        return selection_rows(self.instance.outputs, self.n)

    @property
    def d_matrix(self) -> np.ndarray:
        return selection_columns(self.instance.disturbances, self.n)

    @property
    def t_matrix(self) -> np.ndarray:
        return selection_rows(self.instance.targets, self.n)


def weighted_system(inst: ProblemInstance, seed: int) -> WeightedSystem:
    return WeightedSystem(inst, assign_random_weights(inst.network, seed))


def _check_support_in(mat: np.ndarray, cols: NodeSet, rows: NodeSet, what: str) -> None:
    outside = [v - 1 for v in rows.complement()]
    inside = [v - 1 for v in cols]
    if inside and outside and np.any(mat[np.ix_(outside, inside)] != 0.0):
        raise AssertionError(f"{what}: columns of the invariant set leak outside it")


def friend_state_feedback(
    sys: WeightedSystem, zset: NodeSet, fp: np.ndarray | None = None
) -> np.ndarray:
    """Unique state-feedback friend of zset, up to the structured term fp.

    Requires the inputs to be exactly the out-boundary of zset; outside
    that premise the friend is not unique and this reports rather than
    guessing one. The returned F equals B'A + fp, and A - BF cancels the
    rows of A at the input nodes.
    """
    inst = sys.instance
    require_valid(inst, need_inputs=True)
    inputs = inst.inputs
    if inputs != boundary(inst.network, zset, "out"):
        raise PremiseViolation(
            "general friend unsupported: inputs are not the out-boundary "
            f"of {zset} (expected {boundary(inst.network, zset, 'out')})"
        )
    bmat = sys.b_matrix
    f = bmat.T @ sys.a
    if fp is not None:
        fp = np.asarray(fp, dtype=float)
        if fp.shape != f.shape:
            raise PremiseViolation(f"fp must be {f.shape}")
        zcols = [v - 1 for v in zset]
        if zcols and np.any(fp[:, zcols] != 0.0):
            raise PremiseViolation("fp must vanish on the columns of the invariant set")
        f = f + fp
    _check_support_in(sys.a - bmat @ f, zset, zset, "state-feedback friend")
    return f


def friend_output_injection(
    sys: WeightedSystem, sset: NodeSet, hp: np.ndarray | None = None
) -> np.ndarray:
    """Unique output-injection friend of sset, up to the structured hp.

    Requires the outputs to be exactly the in-boundary of sset. The
    returned H equals AC' + hp, and A - HC cancels the columns of A at
    the output nodes.
    """
    inst = sys.instance
    require_valid(inst, need_outputs=True)
    outputs = inst.outputs
    if outputs != boundary(inst.network, sset, "in"):
        raise PremiseViolation(
            "general friend unsupported: outputs are not the in-boundary "
            f"of {sset} (expected {boundary(inst.network, sset, 'in')})"
        )
    cmat = sys.c_matrix
    h = sys.a @ cmat.T
    if hp is not None:
        hp = np.asarray(hp, dtype=float)
        if hp.shape != h.shape:
            raise PremiseViolation(f"hp must be {h.shape}")
        srows = [v - 1 for v in sset.complement()]
        if srows and np.any(hp[srows, :] != 0.0):
            raise PremiseViolation("hp must vanish on the rows outside the invariant set")
        h = h + hp
    _check_support_in(sys.a - h @ cmat, sset, sset, "output-injection friend")
    return h


def output_feedback_gain(sys: WeightedSystem, wset: NodeSet) -> np.ndarray:
    """Static gain G = B'AC' for a set with inputs/outputs on its boundary.

    A - BGC removes exactly the edges with tail on an output node and
    head on an input node.
    """
    inst = sys.instance
    require_valid(inst, need_inputs=True, need_outputs=True)
    net = inst.network
    if inst.inputs != boundary(net, wset, "out") or inst.outputs != boundary(
        net, wset, "in"
    ):
        raise PremiseViolation(
            "gain formula requires inputs/outputs to be exactly the "
            f"out-/in-boundary of {wset}"
        )
    g = sys.b_matrix.T @ sys.a @ sys.c_matrix.T
    corrected = sys.a - sys.b_matrix @ g @ sys.c_matrix
    _check_support_in(corrected, wset, wset, "output-feedback gain")
    return g


@dataclass(frozen=True, eq=False)
class Compensator:
    """Dynamic output-feedback law: xhat' = Kr xhat + Lr y, u = -Mr xhat - G y.

    K, L, M are stored at full order together with the projection P onto
    the observer coordinates; the realized blocks are Kr = P K P',
    Lr = P L, Mr = M P'. The order is the number of rows of P.
    """

    k: np.ndarray
    l: np.ndarray
    m: np.ndarray
    g: np.ndarray
    p: np.ndarray

    @property
    def order(self) -> int:
        return self.p.shape[0]

    @property
    def k_realized(self) -> np.ndarray:
        return self.p @ self.k @ self.p.T

    @property
    def l_realized(self) -> np.ndarray:
        return self.p @ self.l

    @property
    def m_realized(self) -> np.ndarray:
        return self.m @ self.p.T


@dataclass(frozen=True, eq=False)
class ClosedLoop:
    """Closed-loop realization: x_c' = A_c x_c + D_c w, z = T_c x_c."""

    a_c: np.ndarray
    d_c: np.ndarray
    t_c: np.ndarray
    state_dim: int

    @property
    def dim(self) -> int:
        return self.a_c.shape[0]

    @property
    def order(self) -> int:
        return self.dim - self.state_dim


def full_order_compensator(
    sys: WeightedSystem, f: np.ndarray, h: np.ndarray, g: np.ndarray
) -> Compensator:
    """Compensator blocks from friends F, H and a gain G mapping the
    conditioned-invariant set into the controlled-invariant one."""
    a, b, c = sys.a, sys.b_matrix, sys.c_matrix
    k = a - b @ f - h @ c + b @ g @ c
    l = h - b @ g
    m = f - g @ c
    return Compensator(k=k, l=l, m=m, g=g, p=np.eye(sys.n))


def projection_map(zset: NodeSet, sset: NodeSet) -> np.ndarray:
    """Rows are the elementary vectors of zset minus sset, ascending.

    The map restricted to zset has kernel sset and PP' is the identity.
    """
    if not sset.issubset(zset):
        raise PremiseViolation("projection requires the small set inside the large one")
    diff = zset.difference(sset)
    return selection_rows(diff, zset.n)


def reduced_order_compensator(
    sys: WeightedSystem, zset: NodeSet, sset: NodeSet
) -> Compensator:
    """Observer-based compensator of order |zset| - |sset|.

    Builds the two friends and the static gain (zero structured terms,
    so the correction terms K_p vanish), then projects onto the
    coordinates of zset minus sset.
    """
    inst = sys.instance
    f = friend_state_feedback(sys, zset)
    h = friend_output_injection(sys, sset)
    g = sys.b_matrix.T @ sys.a @ sys.c_matrix.T
    corrected = sys.a - sys.b_matrix @ g @ sys.c_matrix
    _check_support_in(corrected, sset, zset, "compensator gain certificate")
    full = full_order_compensator(sys, f, h, g)
    p = projection_map(zset, sset)
    return Compensator(k=full.k, l=full.l, m=full.m, g=g, p=p)


def assemble_closed_loop(sys: WeightedSystem, comp: Compensator) -> ClosedLoop:
    """Block realization of the loop closed by a compensator."""
    n = sys.n
    k = comp.order
    a, b, c = sys.a, sys.b_matrix, sys.c_matrix
    a_c = np.zeros((n + k, n + k))
    a_c[:n, :n] = a - b @ comp.g @ c
    a_c[:n, n:] = -b @ comp.m_realized
    a_c[n:, :n] = comp.l_realized @ c
    a_c[n:, n:] = comp.k_realized
    d = sys.d_matrix
    d_c = np.zeros((n + k, d.shape[1]))
    d_c[:n, :] = d
    t = sys.t_matrix
    t_c = np.zeros((t.shape[0], n + k))
    t_c[:, :n] = t
    return ClosedLoop(a_c=a_c, d_c=d_c, t_c=t_c, state_dim=n)


@dataclass(frozen=True, eq=False)
class StateFeedbackDesign:
    system: WeightedSystem
    zstar: NodeSet
    f: np.ndarray


@dataclass(frozen=True, eq=False)
class OutputFeedbackDesign:
    system: WeightedSystem
    wset: NodeSet
    g: np.ndarray


@dataclass(frozen=True, eq=False)
class DynamicFeedbackDesign:
    system: WeightedSystem
    zstar: NodeSet
    sstar: NodeSet
    compensator: Compensator
    closed_loop: ClosedLoop


def design_state_feedback(inst: ProblemInstance, seed: int) -> StateFeedbackDesign:
    """Solve for the minimum input set if absent, weight, and synthesize F."""
    if inst.inputs is None:
        inst = inst.with_inputs(solve_min_ddpsf(inst))
    sys = weighted_system(inst, seed)
    zset = zstar(inst, inst.inputs, want_trace=False).fixpoint
    f = friend_state_feedback(sys, zset)
    return StateFeedbackDesign(system=sys, zstar=zset, f=f)


def design_output_feedback(
    inst: ProblemInstance, seed: int, mode: str = "exact"
) -> OutputFeedbackDesign:
    """Solve for minimum input/output sets if absent, then synthesize G."""
    if inst.inputs is None or inst.outputs is None:
        b, c, wset = solve_min_ddpof(inst, mode)
        inst = inst.with_inputs(b).with_outputs(c)
    else:
        wset = construct_w(inst)
    sys = weighted_system(inst, seed)
    g = output_feedback_gain(sys, wset)
    return OutputFeedbackDesign(system=sys, wset=wset, g=g)


def design_dynamic_feedback(inst: ProblemInstance, seed: int) -> DynamicFeedbackDesign:
    """Solve for minimum input/output sets if absent, then build the
    reduced-order compensator and its closed loop."""
    if inst.inputs is None or inst.outputs is None:
        b, c = solve_min_ddpdf(inst)
        inst = inst.with_inputs(b).with_outputs(c)
    sys = weighted_system(inst, seed)
    zset = zstar(inst, inst.inputs, want_trace=False).fixpoint
    sset = sstar(inst, inst.outputs, want_trace=False).fixpoint
    comp = reduced_order_compensator(sys, zset, sset)
    loop = assemble_closed_loop(sys, comp)
    return DynamicFeedbackDesign(
        system=sys, zstar=zset, sstar=sset, compensator=comp, closed_loop=loop
    )
