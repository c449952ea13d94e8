# cython: boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled versions of the hot kernels.

Same contracts and the same deterministic traversal order as
``_kernels_py``; the two backends must produce bit-identical results.
Node-set masks cross the boundary as Python ints and are unpacked into
flag arrays internally.
"""

from libc.stdlib cimport calloc, free, malloc
from libc.string cimport memset


cdef inline object _flags_to_mask(unsigned char* flags, int n):
    cdef int nbytes = (n + 7) >> 3
    out = bytearray(nbytes)
    cdef int v
    for v in range(n):
        if flags[v]:
            out[v >> 3] |= 1 << (v & 7)
    return int.from_bytes(bytes(out), "little")


cdef inline int _mask_to_flags(object mask, unsigned char* flags, int n) except -1:
    cdef int nbytes = (n + 7) >> 3
    cdef bytes raw = int(mask).to_bytes(nbytes, "little")
    cdef const unsigned char* b = raw
    cdef int v
    for v in range(n):
        flags[v] = (b[v >> 3] >> (v & 7)) & 1
    return 0


def zstar_fixpoint(int n, int[:] starts, int[:] heads, object b_mask,
                   object z0_mask, bint want_trace=True):
    cdef unsigned char* cur = <unsigned char*> calloc(n + 1, 1)
    cdef unsigned char* inb = <unsigned char*> calloc(n + 1, 1)
    cdef unsigned char* drop = <unsigned char*> calloc(n + 1, 1)
    if cur == NULL or inb == NULL or drop == NULL:
        raise MemoryError()
    cdef int v, k, h
    cdef bint removed
    cdef int iterations = 0
    trace = None
    try:
        _mask_to_flags(z0_mask, cur, n)
        _mask_to_flags(b_mask, inb, n)
        if want_trace:
            trace = [_flags_to_mask(cur, n)]
        while True:
            removed = False
            for v in range(n):
                drop[v] = 0
                if not cur[v]:
                    continue
                for k in range(starts[v], starts[v + 1]):
                    h = heads[k]
                    if not cur[h] and not inb[h]:
                        drop[v] = 1
                        removed = True
                        break
            if not removed:
                break
            for v in range(n):
                if drop[v]:
                    cur[v] = 0
            iterations += 1
            if want_trace:
                trace.append(_flags_to_mask(cur, n))
        return _flags_to_mask(cur, n), iterations, trace
    finally:
        free(cur)
        free(inb)
        free(drop)


def sstar_fixpoint(int n, int[:] starts, int[:] heads, object c_mask,
                   object s0_mask, bint want_trace=True):
    cdef unsigned char* cur = <unsigned char*> calloc(n + 1, 1)
    cdef unsigned char* inc = <unsigned char*> calloc(n + 1, 1)
    cdef unsigned char* frontier = <unsigned char*> calloc(n + 1, 1)
    cdef unsigned char* added = <unsigned char*> calloc(n + 1, 1)
    if cur == NULL or inc == NULL or frontier == NULL or added == NULL:
        raise MemoryError()
    cdef int v, k, h
    cdef bint grew
    cdef int iterations = 0
    trace = None
    try:
        _mask_to_flags(s0_mask, cur, n)
        _mask_to_flags(c_mask, inc, n)
        for v in range(n):
            frontier[v] = cur[v] and not inc[v]
        if want_trace:
            trace = [_flags_to_mask(cur, n)]
        while True:
            grew = False
            memset(added, 0, n + 1)
            for v in range(n):
                if not frontier[v]:
                    continue
                for k in range(starts[v], starts[v + 1]):
                    h = heads[k]
                    if not cur[h]:
                        added[h] = 1
                        grew = True
            if not grew:
                break
            for v in range(n):
                if added[v]:
                    cur[v] = 1
                frontier[v] = added[v] and not inc[v]
            iterations += 1
            if want_trace:
                trace.append(_flags_to_mask(cur, n))
        return _flags_to_mask(cur, n), iterations, trace
    finally:
        free(cur)
        free(inc)
        free(frontier)
        free(added)


def reachable_mask(int n, int[:] starts, int[:] heads, object source_mask,
                   object removed_nodes=0, object removed_edges=0):
    cdef int q = heads.shape[0]
    cdef unsigned char* seen = <unsigned char*> calloc(n + 1, 1)
    cdef unsigned char* dead = <unsigned char*> calloc(n + 1, 1)
    cdef unsigned char* ecut = <unsigned char*> calloc(q + 1, 1)
    cdef int* stack = <int*> malloc((n + 1) * sizeof(int))
    if seen == NULL or dead == NULL or ecut == NULL or stack == NULL:
        raise MemoryError()
    cdef int top = 0, v, k, h
    try:
        _mask_to_flags(source_mask, seen, n)
        _mask_to_flags(removed_nodes, dead, n)
        cdef_fill_edges(removed_edges, ecut, q)
        for v in range(n):
            if dead[v]:
                seen[v] = 0
            if seen[v]:
                stack[top] = v
                top += 1
        while top:
            top -= 1
            v = stack[top]
            for k in range(starts[v], starts[v + 1]):
                if ecut[k]:
                    continue
                h = heads[k]
                if seen[h] or dead[h]:
                    continue
                seen[h] = 1
                stack[top] = h
                top += 1
        return _flags_to_mask(seen, n)
    finally:
        free(seen)
        free(dead)
        free(ecut)
        free(stack)


cdef int cdef_fill_edges(object mask, unsigned char* flags, int q) except -1:
    cdef int nbytes = (q + 7) >> 3
    if q == 0:
        return 0
    cdef bytes raw = int(mask).to_bytes(nbytes, "little")
    cdef const unsigned char* b = raw
    cdef int k
    for k in range(q):
        flags[k] = (b[k >> 3] >> (k & 7)) & 1
    return 0


def max_flow(int num_nodes, int[:] tails, int[:] heads, int[:] caps,
             int source, int sink):
    """Level-graph blocking flow, identical traversal order to the pure
    backend: adjacency in input edge order, current-arc DFS."""
    cdef int m = tails.shape[0]
    cdef int* eto = <int*> malloc((2 * m + 1) * sizeof(int))
    cdef long long* ecap = <long long*> malloc((2 * m + 1) * sizeof(long long))
    cdef int* deg = <int*> calloc(num_nodes + 1, sizeof(int))
    cdef int* astart = <int*> malloc((num_nodes + 2) * sizeof(int))
    cdef int* aedge = <int*> malloc((2 * m + 1) * sizeof(int))
    cdef int* fill = <int*> malloc((num_nodes + 1) * sizeof(int))
    cdef int* level = <int*> malloc((num_nodes + 1) * sizeof(int))
    cdef int* queue = <int*> malloc((num_nodes + 1) * sizeof(int))
    cdef int* arc = <int*> malloc((num_nodes + 1) * sizeof(int))
    cdef int* path = <int*> malloc((num_nodes + 2) * sizeof(int))
    cdef unsigned char* seen = <unsigned char*> calloc(num_nodes + 1, 1)
    cdef int* stack = <int*> malloc((num_nodes + 1) * sizeof(int))
    if (eto == NULL or ecap == NULL or deg == NULL or astart == NULL or
            aedge == NULL or fill == NULL or level == NULL or queue == NULL or
            arc == NULL or path == NULL or seen == NULL or stack == NULL):
        raise MemoryError()
    cdef int k, v, w, e, qhead, qtail, path_len, cut_at, i, top
    cdef long long flow = 0, aug
    cdef bint advanced
    try:
        for k in range(m):
            eto[2 * k] = heads[k]
            ecap[2 * k] = caps[k]
            eto[2 * k + 1] = tails[k]
            ecap[2 * k + 1] = 0
            deg[tails[k]] += 1
            deg[heads[k]] += 1
        astart[0] = 0
        for v in range(num_nodes):
            astart[v + 1] = astart[v] + deg[v]
            fill[v] = astart[v]
        for k in range(m):
            aedge[fill[tails[k]]] = 2 * k
            fill[tails[k]] += 1
            aedge[fill[heads[k]]] = 2 * k + 1
            fill[heads[k]] += 1

        while True:
            for v in range(num_nodes):
                level[v] = -1
            level[source] = 0
            queue[0] = source
            qhead, qtail = 0, 1
            while qhead < qtail:
                v = queue[qhead]
                qhead += 1
                for i in range(astart[v], astart[v + 1]):
                    e = aedge[i]
                    w = eto[e]
                    if ecap[e] > 0 and level[w] < 0:
                        level[w] = level[v] + 1
                        queue[qtail] = w
                        qtail += 1
            if level[sink] < 0:
                break
            for v in range(num_nodes):
                arc[v] = astart[v]
            path_len = 0
            v = source
            while True:
                if v == sink:
                    aug = ecap[path[0]]
                    for i in range(1, path_len):
                        if ecap[path[i]] < aug:
                            aug = ecap[path[i]]
                    cut_at = 0
                    for i in range(path_len):
                        e = path[i]
                        ecap[e] -= aug
                        ecap[e ^ 1] += aug
                        if ecap[e] == 0 and cut_at == 0:
                            cut_at = i + 1
                    flow += aug
                    path_len = cut_at - 1
                    if path_len > 0:
                        v = eto[path[path_len - 1]]
                    else:
                        v = source
                    continue
                advanced = False
                while arc[v] < astart[v + 1]:
                    e = aedge[arc[v]]
                    w = eto[e]
                    if ecap[e] > 0 and level[w] == level[v] + 1:
                        path[path_len] = e
                        path_len += 1
                        v = w
                        advanced = True
                        break
                    arc[v] += 1
                if advanced:
                    continue
                if v == source:
                    break
                level[v] = -1
                path_len -= 1
                e = path[path_len]
                v = eto[e ^ 1]
                arc[v] += 1

        seen[source] = 1
        stack[0] = source
        top = 1
        while top:
            top -= 1
            v = stack[top]
            for i in range(astart[v], astart[v + 1]):
                e = aedge[i]
                w = eto[e]
                if ecap[e] > 0 and not seen[w]:
                    seen[w] = 1
                    stack[top] = w
                    top += 1
        return int(flow), _flags_to_mask(seen, num_nodes)
    finally:
        free(eto)
        free(ecap)
        free(deg)
        free(astart)
        free(aedge)
        free(fill)
        free(level)
        free(queue)
        free(arc)
        free(path)
        free(seen)
        free(stack)
