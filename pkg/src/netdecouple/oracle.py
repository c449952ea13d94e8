"""Exponential-time ground truth: path enumeration and subset-enumeration
optima. Correctness anchors only; every routine carries a hard size cap
and errors out instead of degrading to a heuristic. Enumeration order is
deterministic so failures reproduce bit-identically.
"""

from __future__ import annotations

from itertools import combinations

from netdecouple import kernels
from netdecouple.errors import SizeCapExceeded
from netdecouple.network import Network, NodeSet, ProblemInstance, require_valid


def enumerate_dt_paths(inst: ProblemInstance, cap: int = 10_000) -> tuple[tuple[int, ...], ...]:
    """All simple disturbance-to-target paths, lexicographically ordered.

    A path stops at the first target it reaches; extensions past a target
    are prefixes plus detours and add nothing to the covering conditions.
    """
    net = inst.network
    starts, heads = net.csr
    tmask = inst.targets.mask
    paths = []

    def walk(v: int, visited: int, path: list[int]) -> None:
        for k in range(starts[v], starts[v + 1]):
            h = heads[k]
            if (visited >> h) & 1:
                continue
            path.append(h + 1)
            if (tmask >> h) & 1:
                if len(paths) >= cap:
                    raise SizeCapExceeded(f"more than {cap} paths")
                paths.append(tuple(path))
            else:
                walk(h, visited | (1 << h), path)
            path.pop()

    for d in inst.disturbances:
        if d in inst.targets:
            continue
        walk(d - 1, 1 << (d - 1), [d])
    return tuple(paths)


def _zstar_mask(net: Network, b_mask: int, z0_mask: int) -> int:
    starts, heads = net.csr
    return kernels.zstar_fixpoint(net.n, starts, heads, b_mask, z0_mask, False)[0]


def _sstar_mask(net: Network, c_mask: int, s0_mask: int) -> int:
    starts, heads = net.csr
    return kernels.sstar_fixpoint(net.n, starts, heads, c_mask, s0_mask, False)[0]


def brute_min_inputs(inst: ProblemInstance) -> tuple[int, frozenset[NodeSet]]:
    """Minimum input cardinality for state-feedback decoupling, with every
    minimizer, by enumerating candidate input sets in increasing size."""
    require_valid(inst)
    net = inst.network
    if net.n > 14:
        raise SizeCapExceeded("brute_min_inputs is capped at n <= 14")
    d_mask = inst.disturbances.mask
    z0_mask = ~inst.targets.mask & ((1 << net.n) - 1)
    candidates = [v for v in range(1, net.n + 1) if v not in inst.disturbances]
    for size in range(len(candidates) + 1):
        minima = []
        for combo in combinations(candidates, size):
            b_mask = 0
            for v in combo:
                b_mask |= 1 << (v - 1)
            if d_mask & ~_zstar_mask(net, b_mask, z0_mask) == 0:
                minima.append(NodeSet.of(combo, net.n))
        if minima:
            return size, frozenset(minima)
    raise AssertionError("unreachable: full candidate set is always feasible")


def brute_min_io(
    inst: ProblemInstance, mode: str
) -> tuple[int, frozenset[tuple[NodeSet, NodeSet]]]:
    """Minimum combined input+output cardinality for output feedback
    ("of") or dynamical feedback ("df"), with every minimizing pair."""
    require_valid(inst)
    if mode not in ("of", "df"):
        raise ValueError(f"mode must be 'of' or 'df', got {mode!r}")
    net = inst.network
    if net.n > 10:
        raise SizeCapExceeded("brute_min_io is capped at n <= 10")
    n = net.n
    starts, heads = net.csr
    d_mask = inst.disturbances.mask
    t_mask = inst.targets.mask
    z0_mask = ~t_mask & ((1 << n) - 1)
    b_candidates = [v for v in range(1, n + 1) if v not in inst.disturbances]
    c_candidates = [v for v in range(1, n + 1) if v not in inst.targets]

    zcache: dict[int, int] = {}
    scache: dict[int, int] = {}

    def df_ok(b_mask: int, c_mask: int) -> bool:
        if b_mask not in zcache:
            zcache[b_mask] = _zstar_mask(net, b_mask, z0_mask)
        if c_mask not in scache:
            scache[c_mask] = _sstar_mask(net, c_mask, d_mask)
        return scache[c_mask] & ~zcache[b_mask] == 0

    edge_tails = [t - 1 for t, _, _ in net.edges]

    def of_ok(b_mask: int, c_mask: int) -> bool:
        edge_mask = 0
        for k in range(len(edge_tails)):
            if (c_mask >> edge_tails[k]) & 1 and (b_mask >> heads[k]) & 1:
                edge_mask |= 1 << k
        reach = kernels.reachable_mask(n, starts, heads, d_mask, 0, edge_mask)
        return reach & t_mask == 0

    ok = df_ok if mode == "df" else of_ok
    for total in range(len(b_candidates) + len(c_candidates) + 1):
        minima = []
        for b_size in range(min(total, len(b_candidates)) + 1):
            c_size = total - b_size
            if c_size > len(c_candidates):
                continue
            for bs in combinations(b_candidates, b_size):
                b_mask = 0
                for v in bs:
                    b_mask |= 1 << (v - 1)
                for cs in combinations(c_candidates, c_size):
                    c_mask = 0
                    for v in cs:
                        c_mask |= 1 << (v - 1)
                    if ok(b_mask, c_mask):
                        minima.append((NodeSet.of(bs, n), NodeSet.of(cs, n)))
        if minima:
            return total, frozenset(minima)
    raise AssertionError("unreachable: the full candidate pair is always feasible")


def brute_invariant_extremes(
    net: Network,
    inputs: NodeSet,
    outputs: NodeSet,
    z0: NodeSet,
    s0: NodeSet,
) -> tuple[NodeSet, NodeSet]:
    """Exhaustively search the maximum controlled invariant subset of z0
    and the minimum conditioned invariant superset of s0.

    Controlled invariance is closed under union and conditioned
    invariance under intersection, so both extremes are unique; that
    uniqueness is asserted, not assumed.
    """
    if net.n > 10:
        raise SizeCapExceeded("brute_invariant_extremes is capped at n <= 10")
    out_masks = net.out_masks

    def ctrl_ok(mask: int) -> bool:
        allowed = mask | inputs.mask
        for v in _iter_mask(mask):
            if out_masks[v] & ~allowed:
                return False
        return True

    def cond_ok(mask: int) -> bool:
        free = mask & ~outputs.mask
        for v in _iter_mask(free):
            if out_masks[v] & ~mask:
                return False
        return True

    best_z = 0
    best_z_count = 1
    for sub in _submasks(z0.mask):
        if ctrl_ok(sub):
            size = bin(sub).count("1")
            if size > bin(best_z).count("1"):
                best_z, best_z_count = sub, 1
            elif size == bin(best_z).count("1") and sub != best_z:
                best_z_count += 1
    if best_z_count != 1 and z0.mask:
        raise AssertionError("maximum controlled invariant subset is not unique")

    full = (1 << net.n) - 1
    extra = full & ~s0.mask
    best_s = full
    best_s_count = 1
    for sub in _submasks(extra):
        cand = s0.mask | sub
        if cond_ok(cand):
            size = bin(cand).count("1")
            if size < bin(best_s).count("1"):
                best_s, best_s_count = cand, 1
            elif size == bin(best_s).count("1") and cand != best_s:
                best_s_count += 1
    if best_s_count != 1:
        raise AssertionError("minimum conditioned invariant superset is not unique")
    return NodeSet.from_mask(best_z, net.n), NodeSet.from_mask(best_s, net.n)


def _iter_mask(mask):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _submasks(mask):
    """All submasks of ``mask``, including 0 and itself, ascending-ish."""
    sub = 0
    while True:
        yield sub
        if sub == mask:
            return
        sub = (sub - mask) & mask
