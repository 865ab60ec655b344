"""First-passage machinery on weighted multigraphs.

Everything here is exact: Dijkstra sweeps (a pure-Python reference for
single sources, compiled kernels for the all-sources scans), a bidirectional
two-ball search that returns float-identical distances, the half-edge
exploration process that mirrors how a cluster grows around a vertex in
elapsed-weight order, and the counter for "slow" minimum-degree vertices
whose incident weights all exceed a threshold.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np

from . import _dijkstra
from .degrees import DegreeSequence
from .graph import WeightedMultiGraph

INF = math.inf


@dataclass(frozen=True)
class DistanceMap:
    """Single-source shortest-path result: distances and predecessor tree."""

    source: int
    dist: np.ndarray = field(repr=False)
    pred: np.ndarray = field(repr=False)

    def distance_to(self, v: int) -> float:
        return float(self.dist[v])

    def path_to(self, v: int) -> list[int]:
        """Vertex path source -> v; empty if v is unreachable."""
        if not math.isfinite(self.dist[v]):
            return []
        out = [v]
        while out[-1] != self.source:
            out.append(int(self.pred[out[-1]]))
        out.reverse()
        return out

    @property
    def reachable(self) -> np.ndarray:
        return np.isfinite(self.dist)


def _check_vertex(g: WeightedMultiGraph, v: int, name: str = "vertex") -> int:
    v = int(v)
    if not (0 <= v < g.n):
        raise ValueError(f"{name} {v} out of range for n={g.n}")
    return v


def _require_weights(g: WeightedMultiGraph) -> None:
    if g.edge_count and not g.has_weights:
        raise ValueError("graph weights are unset; assign weights first")


def single_source_distances(g: WeightedMultiGraph, source: int) -> DistanceMap:
    """Dijkstra from ``source`` with predecessors.

    Ties are broken by (distance, vertex id); unreachable vertices keep
    distance +inf and predecessor -1.
    """
    source = _check_vertex(g, source, "source")
    _require_weights(g)
    n = g.n
    dist = np.full(n, INF)
    pred = np.full(n, -1, dtype=np.int64)
    settled = np.zeros(n, dtype=bool)
    adj = g.adjacency()
    dist[source] = 0.0
    heap: list[tuple[float, int]] = [(0.0, source)]
    while heap:
        d, v = heapq.heappop(heap)
        if settled[v] or d > dist[v]:
            continue
        settled[v] = True
        for u, w, _eid in adj[v]:
            nd = d + w
            if nd < dist[u]:
                dist[u] = nd
                pred[u] = v
                heapq.heappush(heap, (nd, u))
    return DistanceMap(source=source, dist=dist, pred=pred)


def weighted_distance(g: WeightedMultiGraph, s: int, t: int) -> float:
    """Shortest-path weight between two vertices (+inf if disconnected)."""
    s = _check_vertex(g, s, "source")
    t = _check_vertex(g, t, "target")
    if s == t:
        return 0.0
    _require_weights(g)
    dist = {s: 0.0}
    settled = set()
    adj = g.adjacency()
    heap: list[tuple[float, int]] = [(0.0, s)]
    while heap:
        d, v = heapq.heappop(heap)
        if v in settled or d > dist.get(v, INF):
            continue
        if v == t:
            return d
        settled.add(v)
        for u, w, _eid in adj[v]:
            nd = d + w
            if nd < dist.get(u, INF):
                dist[u] = nd
                heapq.heappush(heap, (nd, u))
    return INF


def all_flooding_times(g: WeightedMultiGraph) -> np.ndarray:
    """Eccentricity of every vertex: one full Dijkstra sweep per source,
    run in the compiled kernel.  +inf rows mark a disconnected graph."""
    _require_weights(g)
    if g.n == 0:
        return np.empty(0)
    indptr, indices, data = g.csr_arrays()
    return _dijkstra.all_flooding_times(indptr, indices, data)


def flooding_time(g: WeightedMultiGraph, source: int) -> float:
    """Time until every vertex is reached from ``source``: the max
    single-source distance (+inf when the graph is disconnected)."""
    source = _check_vertex(g, source, "source")
    _require_weights(g)
    indptr, indices, data = g.csr_arrays()
    return float(_dijkstra.flood_from(indptr, indices, data, source))


def weighted_diameter(g: WeightedMultiGraph) -> float:
    """Max shortest-path weight over all ordered pairs, computed exactly as
    the max over sources of the flooding time (n full sweeps)."""
    if g.n == 0:
        raise ValueError("diameter of an empty graph is undefined")
    if g.n == 1:
        return 0.0
    return float(all_flooding_times(g).max())


# ---------------------------------------------------------------------------
# exploration process


@dataclass(frozen=True)
class ExplorationTrace:
    """Growth record of the weighted exploration around one vertex.

    events: (time, active_half_edges, vertices_discovered) after each event;
        the first entry is the time-0 state (source degree, 1 vertex).
    threshold_times: for each requested half-edge count C, the first time the
        active count reached C (+inf if the component was exhausted first).
    """

    source: int
    events: tuple[tuple[float, int, int], ...]
    threshold_times: dict[int, float]


def exploration_trace(
    g: WeightedMultiGraph,
    source: int,
    thresholds: tuple[int, ...] | list[int] = (),
    *,
    early_stop: bool = False,
) -> ExplorationTrace:
    """Run the exploration process from ``source`` on the realized graph.

    The cluster starts as the source with its half-edges active.  Edges
    incident to the cluster fire in elapsed-weight order (time = discovery
    time of the inner endpoint + edge weight).  An edge to a fresh vertex of
    degree d adds that vertex and changes the active count by d - 2; an edge
    whose far endpoint is already in the cluster (a cycle or a self-loop)
    removes both involved half-edges, changing the count by -2.

    With ``early_stop`` the walk stops as soon as every requested threshold
    has been crossed, leaving a partial event list (used by the max-over-
    vertices scan, where only the crossing times matter).
    """
    source = _check_vertex(g, source, "source")
    _require_weights(g)
    adj = g.adjacency()
    deg = g.degrees()
    active = int(deg[source])
    discovered_at: dict[int, float] = {source: 0.0}
    events: list[tuple[float, int, int]] = [(0.0, active, 1)]
    pending = sorted(set(int(c) for c in thresholds))
    threshold_times: dict[int, float] = {}
    for c in pending:
        if c <= active:
            threshold_times[c] = 0.0
    pending = [c for c in pending if c not in threshold_times]
    if early_stop and not pending:
        return ExplorationTrace(source, tuple(events), threshold_times)

    done: set[int] = set()
    heap: list[tuple[float, int, int]] = []
    pushed: set[int] = set()

    def push_edges(v: int, t0: float) -> None:
        for u, w, eid in adj[v]:
            if eid in done or eid in pushed:
                continue
            pushed.add(eid)
            heapq.heappush(heap, (t0 + w, eid, v))

    push_edges(source, 0.0)
    while heap:
        t, eid, frm = heapq.heappop(heap)
        pushed.discard(eid)
        if eid in done:
            continue
        done.add(eid)
        u = int(g.edge_u[eid])
        v = int(g.edge_v[eid])
        other = v if frm == u else u
        if other in discovered_at:
            active -= 2
        else:
            discovered_at[other] = t
            active += int(deg[other]) - 2
            push_edges(other, t)
        events.append((t, active, len(discovered_at)))
        if pending:
            crossed = [c for c in pending if c <= active]
            for c in crossed:
                threshold_times[c] = t
            pending = [c for c in pending if c not in threshold_times]
            if early_stop and not pending:
                break
    for c in pending:
        threshold_times[c] = INF
    return ExplorationTrace(source, tuple(events), threshold_times)


def max_exploration_time(g: WeightedMultiGraph, k_factor: float = 2.0) -> tuple[float, int]:
    """Max over all start vertices of the time to reach ceil(k_factor*log n)
    active half-edges, plus the argmax vertex.

    The threshold 0 (tiny n) makes every start time 0.  A start vertex whose
    component dies out before reaching the threshold contributes +inf.
    """
    if g.n == 0:
        raise ValueError("empty graph")
    if k_factor <= 0:
        raise ValueError(f"k_factor must be positive, got {k_factor}")
    threshold = math.ceil(k_factor * math.log(g.n)) if g.n >= 2 else 0
    if threshold <= 0:
        return 0.0, 0
    worst_t = -1.0
    worst_v = 0
    for v in range(g.n):
        tr = exploration_trace(g, v, thresholds=(threshold,), early_stop=True)
        t = tr.threshold_times[threshold]
        if t > worst_t:
            worst_t = t
            worst_v = v
            if math.isinf(worst_t):
                break
    return worst_t, worst_v


# ---------------------------------------------------------------------------
# bidirectional two-ball search


@dataclass(frozen=True)
class TwoBallResult:
    """Outcome of the bidirectional search between two vertices.

    distance matches the single-source value float-for-float (the collision
    path is re-summed left to right).  The half-edge counts are the active
    (boundary) half-edges of each ball when the search stopped: the total
    degree of the settled vertices minus twice the edges internal to them.
    """

    distance: float
    source_half_edges: int
    target_half_edges: int
    settled_source: int
    settled_target: int


def _ball_half_edges(g: WeightedMultiGraph, settled: set[int]) -> int:
    deg = g.degrees()
    total = sum(int(deg[v]) for v in settled)
    adj = g.adjacency()
    inner = 0
    for v in settled:
        for u, _w, _eid in adj[v]:
            if u in settled:
                inner += 1
    return total - inner  # each internal edge contributes 2 adjacency hits


def two_ball_distance(g: WeightedMultiGraph, s: int, t: int) -> TwoBallResult:
    """Grow shortest-path balls from both endpoints until they must have
    met, alternating to the side with the smaller tentative radius."""
    s = _check_vertex(g, s, "source")
    t = _check_vertex(g, t, "target")
    _require_weights(g)
    deg = g.degrees()
    if s == t:
        loops_at = int(np.sum((g.edge_u == s) & (g.edge_v == s)))
        he = int(deg[s]) - 2 * loops_at
        return TwoBallResult(0.0, he, he, 1, 1)
    adj = g.adjacency()
    dist = ({s: 0.0}, {t: 0.0})
    pred: tuple[dict[int, int], dict[int, int]] = ({}, {})
    settled: tuple[set[int], set[int]] = (set(), set())
    heaps: tuple[list, list] = ([(0.0, s)], [(0.0, t)])
    best = INF
    meet: tuple[int, int] | None = None  # (inner vertex on side 0, inner vertex on side 1)

    def top(side: int) -> float:
        h = heaps[side]
        while h and (h[0][1] in settled[side] or h[0][0] > dist[side].get(h[0][1], INF)):
            heapq.heappop(h)
        return h[0][0] if h else INF

    while True:
        t0, t1 = top(0), top(1)
        if t0 + t1 >= best:
            break
        if min(t0, t1) == INF:
            break
        side = 0 if t0 <= t1 else 1
        d, v = heapq.heappop(heaps[side])
        if v in settled[side] or d > dist[side].get(v, INF):
            continue
        settled[side].add(v)
        other = 1 - side
        for u, w, _eid in adj[v]:
            nd = d + w
            if nd < dist[side].get(u, INF):
                dist[side][u] = nd
                pred[side][u] = v
                heapq.heappush(heaps[side], (nd, u))
            du = dist[other].get(u)
            if du is not None:
                cand = d + w + du
                if cand < best:
                    best = cand
                    meet = (v, u) if side == 0 else (u, v)

    if meet is None:
        return TwoBallResult(
            INF,
            _ball_half_edges(g, settled[0]),
            _ball_half_edges(g, settled[1]),
            len(settled[0]),
            len(settled[1]),
        )

    # reconstruct s -> ... -> meet[0] -> meet[1] -> ... -> t and re-sum left
    # to right so the result is bit-identical to a forward Dijkstra value
    fwd = [meet[0]]
    while fwd[-1] != s:
        fwd.append(pred[0][fwd[-1]])
    fwd.reverse()
    bwd = [meet[1]]
    while bwd[-1] != t:
        bwd.append(pred[1][bwd[-1]])
    path = fwd + bwd
    total = 0.0
    for a, b in zip(path[:-1], path[1:]):
        wmin = INF
        for u, w, _eid in adj[a]:
            if u == b and w < wmin:
                wmin = w
        total = total + wmin
    return TwoBallResult(
        float(total),
        _ball_half_edges(g, settled[0]),
        _ball_half_edges(g, settled[1]),
        len(settled[0]),
        len(settled[1]),
    )


# ---------------------------------------------------------------------------
# slow-vertex counting


def slow_vertex_threshold(n: int, epsilon: float, tail_c: float, d_min: int) -> float:
    """(1 - epsilon) * log(n) / (tail_c * d_min): the per-edge weight level
    that makes a minimum-degree vertex 'slow' when all its edges exceed it."""
    if not (0.0 < epsilon < 1.0):
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    if not (tail_c > 0 and math.isfinite(tail_c)):
        raise ValueError(f"tail exponent must be positive and finite, got {tail_c}")
    if d_min < 1:
        raise ValueError(f"minimum degree must be at least 1, got {d_min}")
    if n < 2:
        raise ValueError(f"need at least two vertices, got n={n}")
    return (1.0 - epsilon) * math.log(n) / (tail_c * d_min)


def bad_vertex_count(
    g: WeightedMultiGraph, seq: DegreeSequence, epsilon: float, tail_c: float
) -> int:
    """Count minimum-degree vertices all of whose incident edge weights
    exceed the slow-vertex threshold.  A self-loop contributes its weight to
    both incidences of its vertex."""
    if seq.n != g.n:
        raise ValueError(f"degree sequence length {seq.n} != graph size {g.n}")
    if not np.array_equal(g.degrees(), seq.degrees):
        raise ValueError("degree sequence does not match the realized graph")
    _require_weights(g)
    s = slow_vertex_threshold(g.n, epsilon, tail_c, seq.min_degree)
    min_incident = np.full(g.n, INF)
    np.minimum.at(min_incident, g.edge_u, g.edge_w)
    np.minimum.at(min_incident, g.edge_v, g.edge_w)
    is_min_degree = seq.degrees == seq.min_degree
    return int(np.count_nonzero(is_min_degree & (min_incident > s)))
