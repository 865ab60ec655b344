"""JIT-compiled shortest-path kernels over the min-collapsed CSR view.

The scaling experiments need every vertex's eccentricity (n full Dijkstra
sweeps per graph); at n ~ 3e4 a per-source cost in single-digit milliseconds
is the difference between minutes and hours, hence the compiled kernel with
a 4-ary implicit heap and int32 indices.  Results are plain float64 Dijkstra
distances and agree exactly with the pure-Python reference implementation in
`fpp` (both take the same minimum over the same left-to-right float sums).
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def _sssp_max(indptr, indices, weights, src, dist, heap_v, heap_d, pos):
    """One Dijkstra sweep; returns (max finite distance, settled count).

    ``pos[v]`` is the heap slot of v, -1 if unseen, -2 if settled.  The heap
    is 4-ary with decrease-key via sift-up.
    """
    n = dist.size
    for i in range(n):
        dist[i] = np.inf
        pos[i] = -1
    dist[src] = 0.0
    heap_v[0] = src
    heap_d[0] = 0.0
    pos[src] = 0
    size = 1
    maxd = 0.0
    settled = 0
    while size > 0:
        v = heap_v[0]
        dv = heap_d[0]
        size -= 1
        if size > 0:
            mv = heap_v[size]
            md = heap_d[size]
            i = 0
            while True:
                c0 = 4 * i + 1
                if c0 >= size:
                    break
                cend = c0 + 4
                if cend > size:
                    cend = size
                c = c0
                cd = heap_d[c0]
                for cc in range(c0 + 1, cend):
                    if heap_d[cc] < cd:
                        c = cc
                        cd = heap_d[cc]
                if cd < md:
                    heap_v[i] = heap_v[c]
                    heap_d[i] = cd
                    pos[heap_v[i]] = i
                    i = c
                else:
                    break
            heap_v[i] = mv
            heap_d[i] = md
            pos[mv] = i
        pos[v] = -2
        settled += 1
        if dv > maxd:
            maxd = dv
        for e in range(indptr[v], indptr[v + 1]):
            u = indices[e]
            if pos[u] == -2:
                continue
            nd = dv + weights[e]
            if nd < dist[u]:
                dist[u] = nd
                if pos[u] == -1:
                    i = size
                    size += 1
                else:
                    i = np.int64(pos[u])
                while i > 0:
                    p = (i - 1) // 4
                    if heap_d[p] > nd:
                        heap_v[i] = heap_v[p]
                        heap_d[i] = heap_d[p]
                        pos[heap_v[i]] = i
                        i = p
                    else:
                        break
                heap_v[i] = u
                heap_d[i] = nd
                pos[u] = i
    return maxd, settled


@njit(cache=True)
def flood_from(indptr, indices, weights, src):
    """Max distance from ``src``; +inf when some vertex is unreachable."""
    n = indptr.size - 1
    dist = np.empty(n)
    heap_v = np.empty(n, np.int32)
    heap_d = np.empty(n)
    pos = np.empty(n, np.int32)
    maxd, settled = _sssp_max(indptr, indices, weights, src, dist, heap_v, heap_d, pos)
    if settled < n:
        return np.inf
    return maxd


@njit(cache=True)
def all_flooding_times(indptr, indices, weights):
    """Eccentricity of every vertex (one Dijkstra sweep per source)."""
    n = indptr.size - 1
    dist = np.empty(n)
    heap_v = np.empty(n, np.int32)
    heap_d = np.empty(n)
    pos = np.empty(n, np.int32)
    out = np.empty(n)
    for s in range(n):
        maxd, settled = _sssp_max(indptr, indices, weights, s, dist, heap_v, heap_d, pos)
        out[s] = maxd if settled == n else np.inf
    return out


@njit(cache=True)
def sssp_dist(indptr, indices, weights, src):
    """Full distance array from ``src`` (inf where unreachable)."""
    n = indptr.size - 1
    dist = np.empty(n)
    heap_v = np.empty(n, np.int32)
    heap_d = np.empty(n)
    pos = np.empty(n, np.int32)
    _sssp_max(indptr, indices, weights, src, dist, heap_v, heap_d, pos)
    return dist
