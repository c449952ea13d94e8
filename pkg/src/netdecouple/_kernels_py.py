"""Pure-Python implementations of the hot kernels.

Node sets are arbitrary-precision integer bitmasks over 0-based node
indexes; adjacency comes in CSR form (starts, heads). The compiled
backend in ``_speedups`` implements the exact same contracts with the
same deterministic traversal order, so the two are interchangeable and
bit-identical in their results.
"""

from collections import deque


def zstar_fixpoint(n, starts, heads, b_mask, z0_mask, want_trace=True):
    """Largest subset of z0 whose edges all stay inside it or land on b.

    One iteration removes, simultaneously, every member with an edge
    leading outside the current set union b. Returns (fixpoint mask,
    number of strict shrink steps, trace of per-iteration masks or None).
    """
    cur = z0_mask
    trace = [cur] if want_trace else None
    iterations = 0
    while True:
        allowed = cur | b_mask
        removed = 0
        rest = cur
        while rest:
            low = rest & -rest
            v = low.bit_length() - 1
            rest ^= low
            for k in range(starts[v], starts[v + 1]):
                if not (allowed >> heads[k]) & 1:
                    removed |= low
                    break
        if not removed:
            break
        cur &= ~removed
        iterations += 1
        if want_trace:
            trace.append(cur)
    return cur, iterations, trace


def sstar_fixpoint(n, starts, heads, c_mask, s0_mask, want_trace=True):
    """Smallest superset of s0 whose edges leave only from c nodes.

    One iteration adds, simultaneously, every head of an edge whose tail
    is a current member outside c. Same return convention as
    ``zstar_fixpoint``.
    """
    cur = s0_mask
    trace = [cur] if want_trace else None
    iterations = 0
    frontier = cur & ~c_mask
    while True:
        added = 0
        rest = frontier
        while rest:
            low = rest & -rest
            v = low.bit_length() - 1
            rest ^= low
            for k in range(starts[v], starts[v + 1]):
                h = heads[k]
                if not (cur >> h) & 1:
                    added |= 1 << h
        added &= ~cur
        if not added:
            break
        cur |= added
        frontier = added & ~c_mask
        iterations += 1
        if want_trace:
            trace.append(cur)
    return cur, iterations, trace


def reachable_mask(n, starts, heads, source_mask, removed_nodes=0, removed_edges=0):
    """Forward reachability skipping removed nodes and CSR edge indexes."""
    seen = source_mask & ~removed_nodes
    stack = [low.bit_length() - 1 for low in _lows(seen)]
    while stack:
        v = stack.pop()
        for k in range(starts[v], starts[v + 1]):
            if (removed_edges >> k) & 1:
                continue
            h = heads[k]
            bit = 1 << h
            if seen & bit or (removed_nodes >> h) & 1:
                continue
            seen |= bit
            stack.append(h)
    return seen


def _lows(mask):
    while mask:
        low = mask & -mask
        yield low
        mask ^= low


def max_flow(num_nodes, tails, heads, caps, source, sink):
    """Integral max flow by level-graph blocking flow.

    Adjacency is scanned in input edge order, so results (including the
    residual graph) are deterministic. Returns (flow value, bitmask of
    nodes residual-reachable from the source).
    """
    m = len(tails)
    eto = [0] * (2 * m)
    ecap = [0] * (2 * m)
    adj = [[] for _ in range(num_nodes)]
    for k in range(m):
        eto[2 * k] = heads[k]
        ecap[2 * k] = caps[k]
        eto[2 * k + 1] = tails[k]
        adj[tails[k]].append(2 * k)
        adj[heads[k]].append(2 * k + 1)

    flow = 0
    while True:
        level = [-1] * num_nodes
        level[source] = 0
        queue = deque([source])
        while queue:
            v = queue.popleft()
            for e in adj[v]:
                w = eto[e]
                if ecap[e] > 0 and level[w] < 0:
                    level[w] = level[v] + 1
                    queue.append(w)
        if level[sink] < 0:
            break
        # blocking flow: iterative DFS with current-arc pointers
        arc = [0] * num_nodes
        path = []
        v = source
        while True:
            if v == sink:
                aug = min(ecap[e] for e in path)
                cut_at = 0
                for i, e in enumerate(path):
                    ecap[e] -= aug
                    ecap[e ^ 1] += aug
                    if ecap[e] == 0 and not cut_at:
                        cut_at = i + 1
                flow += aug
                path = path[: cut_at - 1]
                v = eto[path[-1]] if path else source
                continue
            advanced = False
            while arc[v] < len(adj[v]):
                e = adj[v][arc[v]]
                w = eto[e]
                if ecap[e] > 0 and level[w] == level[v] + 1:
                    path.append(e)
                    v = w
                    advanced = True
                    break
                arc[v] += 1
            if advanced:
                continue
            if v == source:
                break
            level[v] = -1
            e = path.pop()
            v = eto[e ^ 1]
            arc[v] += 1

    seen = 1 << source
    stack = [source]
    while stack:
        v = stack.pop()
        for e in adj[v]:
            w = eto[e]
            bit = 1 << w
            if ecap[e] > 0 and not seen & bit:
                seen |= bit
                stack.append(w)
    return flow, seen
