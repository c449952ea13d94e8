"""Compare the compiled kernels against the pure-Python fallback.

Micro benchmarks time the four kernels directly on a large random
digraph; the macro benchmark re-runs an oracle-style enumeration (the
hot path of the acceptance suite) with each backend patched in.

Run:  python3 benchmarks/bench_backends.py
"""

import random
import time
from array import array

from netdecouple import kernels
from netdecouple.kernels import available_backends
from netdecouple.mincut import build_extended
from netdecouple.network import Network, NodeSet, ProblemInstance
from netdecouple.oracle import brute_min_io

N_BIG = 2000
DEG = 8
FLOW_N = 800
MACRO_INSTANCES = 8
KERNEL_NAMES = ("zstar_fixpoint", "sstar_fixpoint", "reachable_mask", "max_flow")


def big_csr(rnd):
    edges = set()
    while len(edges) < N_BIG * DEG:
        edges.add((rnd.randrange(N_BIG), rnd.randrange(N_BIG)))
    edges = sorted(edges)
    starts = array("i", [0] * (N_BIG + 1))
    heads = array("i", [0] * len(edges))
    for t, _ in edges:
        starts[t + 1] += 1
    for v in range(N_BIG):
        starts[v + 1] += starts[v]
    pos = list(starts[:-1])
    for t, h in edges:
        heads[pos[t]] = h
        pos[t] += 1
    return starts, heads


def flow_network(rnd):
    n = FLOW_N
    edges = set()
    while len(edges) < n * 6:
        u, v = rnd.randrange(n), rnd.randrange(n)
        if u != v:
            edges.add((u + 1, v + 1))
    net = Network.from_edges(n, sorted(edges))
    inst = ProblemInstance(
        net, NodeSet.of([1, 2], n), NodeSet.of([n - 1, n], n)
    )
    ext = build_extended(inst, inst.disturbances)
    tails = array("i", (t - 1 for t in ext.tails))
    heads = array("i", (h - 1 for h in ext.heads))
    caps = array("i", ext.caps)
    return ext.node_count, tails, heads, caps, ext.source - 1, ext.sink - 1


def timed(fn, repeats=5):
    best = float("inf")
    result = None
    for _ in range(repeats):
        start = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - start)
    return best, result


def micro(backends):
    rnd = random.Random(20260809)
    starts, heads = big_csr(rnd)
    b_mask = sum(1 << rnd.randrange(N_BIG) for _ in range(40))
    t_mask = sum(1 << rnd.randrange(N_BIG) for _ in range(40))
    full = (1 << N_BIG) - 1
    flow_args = flow_network(rnd)

    jobs = {
        "zstar_fixpoint": lambda impl: impl.zstar_fixpoint(
            N_BIG, starts, heads, b_mask, full & ~t_mask, False
        ),
        "sstar_fixpoint": lambda impl: impl.sstar_fixpoint(
            N_BIG, starts, heads, t_mask, b_mask, False
        ),
        "reachable_mask": lambda impl: impl.reachable_mask(
            N_BIG, starts, heads, b_mask, t_mask, 0
        ),
        "max_flow": lambda impl: impl.max_flow(*flow_args),
    }
    rows = []
    for name in KERNEL_NAMES:
        timings = {}
        results = {}
        for backend, impl in backends.items():
            timings[backend], results[backend] = timed(lambda: jobs[name](impl))
        if len(results) == 2 and results["python"] != results["compiled"]:
            raise SystemExit(f"backend mismatch in {name}")
        rows.append((name, timings))
    return rows


def macro(backends):
    rnd = random.Random(7)
    instances = []
    while len(instances) < MACRO_INSTANCES:
        n = 10
        edges = sorted(
            {
                (rnd.randrange(1, n + 1), rnd.randrange(1, n + 1))
                for _ in range(28)
            }
        )
        edges = [(u, v) for u, v in edges if u != v]
        if not edges:
            continue
        net = Network.from_edges(n, edges)
        instances.append(
            ProblemInstance(net, NodeSet.of([1], n), NodeSet.of([n], n))
        )

    def run():
        for inst in instances:
            brute_min_io(inst, "df")

    timings = {}
    saved = {name: getattr(kernels, name) for name in KERNEL_NAMES}
    try:
        for backend, impl in backends.items():
            for name in KERNEL_NAMES:
                setattr(kernels, name, getattr(impl, name))
            timings[backend], _ = timed(run, repeats=3)
    finally:
        for name, fn in saved.items():
            setattr(kernels, name, fn)
    return timings


def show(label, timings):
    py = timings.get("python")
    cy = timings.get("compiled")
    if cy is None:
        print(f"{label:<28} python {py * 1e3:8.2f} ms   (compiled backend not built)")
    else:
        print(
            f"{label:<28} python {py * 1e3:8.2f} ms   compiled {cy * 1e3:8.2f} ms"
            f"   speedup {py / cy:5.1f}x"
        )


def main():
    backends = available_backends()
    print(f"backends available: {', '.join(backends)}")
    print(f"-- micro: n={N_BIG} digraph, avg degree {DEG}; flow on {FLOW_N}-node split network")
    for name, timings in micro(backends):
        show(name, timings)
    print(f"-- macro: joint-placement brute enumeration on {MACRO_INSTANCES} ten-node instances")
    show("brute_min_io(df)", macro(backends))


if __name__ == "__main__":
    main()
