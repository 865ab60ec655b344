"""Random multigraphs from half-edge matching, with edge weights.

Each vertex i carries d_i half-edges; a uniformly random perfect matching of
the half-edges yields the edge list.  Self-loops and parallel edges are kept:
they are part of the model, vanish in probability from any local
neighbourhood as n grows, and the distance routines are exact in their
presence.  Vertices are 0-based; edges keep their insertion (matching) order.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .degrees import DegreeSequence
from .weights import WeightLaw


class WeightedMultiGraph:
    """Edge-list multigraph on n vertices with optional float64 weights.

    Weights start unset (NaN) after pairing and are assigned in one shot by
    :func:`assign_weights`.  Derived structures (adjacency lists, a
    min-collapsed CSR view for the shortest-path kernels) are built lazily
    and cached.
    """

    __slots__ = ("n", "edge_u", "edge_v", "edge_w", "_adj", "_csr", "_degrees")

    def __init__(self, n: int, edge_u: np.ndarray, edge_v: np.ndarray, edge_w: np.ndarray):
        edge_u = np.asarray(edge_u, dtype=np.int64)
        edge_v = np.asarray(edge_v, dtype=np.int64)
        edge_w = np.asarray(edge_w, dtype=np.float64)
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        if not (edge_u.shape == edge_v.shape == edge_w.shape) or edge_u.ndim != 1:
            raise ValueError("edge arrays must be 1-d and of equal length")
        if edge_u.size and (edge_u.min() < 0 or edge_u.max() >= n or edge_v.min() < 0 or edge_v.max() >= n):
            raise ValueError("edge endpoint out of range")
        with np.errstate(invalid="ignore"):
            if edge_w.size and np.any(edge_w[~np.isnan(edge_w)] <= 0):
                raise ValueError("edge weights must be positive (or NaN while unset)")
        self.n = int(n)
        self.edge_u = edge_u
        self.edge_v = edge_v
        self.edge_w = edge_w
        self._adj = None
        self._csr = None
        self._degrees = None

    # -- basic counts -------------------------------------------------------

    @property
    def edge_count(self) -> int:
        return self.edge_u.size

    @property
    def half_edge_count(self) -> int:
        return 2 * self.edge_u.size

    @property
    def has_weights(self) -> bool:
        return self.edge_w.size > 0 and not np.isnan(self.edge_w).any()

    def degrees(self) -> np.ndarray:
        """Per-vertex degree; a self-loop contributes 2 to its vertex."""
        if self._degrees is None:
            d = np.bincount(self.edge_u, minlength=self.n) + np.bincount(
                self.edge_v, minlength=self.n
            )
            self._degrees = d.astype(np.int64)
        return self._degrees

    # -- cached views -------------------------------------------------------

    def adjacency(self) -> list[list[tuple[int, float, int]]]:
        """Per-vertex list of (neighbour, weight, edge_id); a self-loop
        appears twice at its vertex, once per half-edge."""
        if self._adj is None:
            adj: list[list[tuple[int, float, int]]] = [[] for _ in range(self.n)]
            for eid in range(self.edge_count):
                u = int(self.edge_u[eid])
                v = int(self.edge_v[eid])
                w = float(self.edge_w[eid])
                adj[u].append((v, w, eid))
                adj[v].append((u, w, eid))
            self._adj = adj
        return self._adj

    def csr_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Loop-free, min-collapsed CSR view (indptr, indices, data).

        Distances never use self-loops, and among parallel edges only the
        lightest can lie on a shortest path, so the collapsed simple graph
        is distance-equivalent to the multigraph.
        """
        if self._csr is None:
            if not self.has_weights and self.edge_count:
                raise ValueError("graph weights are unset; assign weights first")
            keep = self.edge_u != self.edge_v
            u = self.edge_u[keep]
            v = self.edge_v[keep]
            w = self.edge_w[keep]
            rows = np.concatenate([u, v])
            cols = np.concatenate([v, u])
            dat = np.concatenate([w, w])
            order = np.lexsort((cols, rows))
            rows, cols, dat = rows[order], cols[order], dat[order]
            if rows.size:
                new_group = np.empty(rows.size, dtype=bool)
                new_group[0] = True
                new_group[1:] = (rows[1:] != rows[:-1]) | (cols[1:] != cols[:-1])
                starts = np.flatnonzero(new_group)
                gmin = np.minimum.reduceat(dat, starts)
                grows = rows[starts]
                gcols = cols[starts]
            else:
                gmin = dat
                grows = rows
                gcols = cols
            counts = np.bincount(grows, minlength=self.n)
            indptr = np.zeros(self.n + 1, dtype=np.int64)
            np.cumsum(counts, out=indptr[1:])
            self._csr = (
                indptr.astype(np.int32),
                gcols.astype(np.int32),
                gmin.astype(np.float64),
            )
        return self._csr

    def __repr__(self) -> str:
        return f"WeightedMultiGraph(n={self.n}, edges={self.edge_count})"


def pair_half_edges(seq: DegreeSequence, rng: np.random.Generator) -> WeightedMultiGraph:
    """Match the half-edges of ``seq`` uniformly at random.

    The half-edge owner array is shuffled with an unbiased permutation and
    consecutive entries are paired, which induces the uniform law on perfect
    matchings.  Weights are left unset (NaN).

    Raises:
        ValueError: if the half-edge total is odd.
    """
    if seq.total_half_edges % 2 != 0:
        raise ValueError(
            f"cannot match an odd number of half-edges ({seq.total_half_edges}); "
            "repair the sequence parity first"
        )
    owners = np.repeat(np.arange(seq.n, dtype=np.int64), seq.degrees)
    shuffled = owners[rng.permutation(owners.size)]
    u = shuffled[0::2].copy()
    v = shuffled[1::2].copy()
    w = np.full(u.size, np.nan)
    return WeightedMultiGraph(seq.n, u, v, w)


def assign_weights(
    g: WeightedMultiGraph, law: WeightLaw, rng: np.random.Generator
) -> WeightedMultiGraph:
    """Return a copy of ``g`` with i.i.d. weights from ``law``, one draw per
    edge in edge order (exactly ``g.edge_count`` draws are consumed)."""
    if g.edge_count and not np.isnan(g.edge_w).all():
        raise ValueError("graph already has weights assigned")
    if g.edge_count == 0:
        return WeightedMultiGraph(g.n, g.edge_u, g.edge_v, g.edge_w.copy())
    w = np.asarray(law.sample(rng, size=g.edge_count), dtype=np.float64)
    return WeightedMultiGraph(g.n, g.edge_u, g.edge_v, w)


@dataclass(frozen=True)
class GraphStats:
    """Structural summary of one realized multigraph.

    ``multi_edge_excess`` counts parallel duplicates: the number of non-loop
    edges minus the number of distinct endpoint pairs, so that
    loop_count + simple_edge_count + multi_edge_excess = edge_count.
    """

    n: int
    edge_count: int
    loop_count: int
    simple_edge_count: int
    multi_edge_excess: int
    max_degree: int
    connected: bool
    component_sizes: tuple[int, ...]


def graph_stats(g: WeightedMultiGraph) -> GraphStats:
    loops = int((g.edge_u == g.edge_v).sum())
    keep = g.edge_u != g.edge_v
    if keep.any():
        a = np.minimum(g.edge_u[keep], g.edge_v[keep])
        b = np.maximum(g.edge_u[keep], g.edge_v[keep])
        pairs = np.unique(np.stack([a, b], axis=1), axis=0)
        simple = int(pairs.shape[0])
    else:
        simple = 0
    excess = int(keep.sum()) - simple
    comp = _component_sizes(g)
    maxdeg = int(g.degrees().max()) if g.n else 0
    return GraphStats(
        n=g.n,
        edge_count=g.edge_count,
        loop_count=loops,
        simple_edge_count=simple,
        multi_edge_excess=excess,
        max_degree=maxdeg,
        connected=(len(comp) <= 1),
        component_sizes=tuple(comp),
    )


def _component_sizes(g: WeightedMultiGraph) -> list[int]:
    """Connected component sizes, largest first (union-find over edges)."""
    parent = np.arange(g.n, dtype=np.int64)

    def find(x: int) -> int:
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    for u, v in zip(g.edge_u, g.edge_v):
        ru, rv = find(int(u)), find(int(v))
        if ru != rv:
            parent[ru] = rv
    sizes: dict[int, int] = {}
    for x in range(g.n):
        r = find(x)
        sizes[r] = sizes.get(r, 0) + 1
    return sorted(sizes.values(), reverse=True)


# ---------------------------------------------------------------------------
# serialization

_TEXT_HEADER = "# weighted-multigraph"


def write_graph_text(g: WeightedMultiGraph, path: str | Path) -> None:
    """Header line ``n half_edge_count`` then one ``u v w`` line per edge in
    insertion order; weights are written with full round-trip precision."""
    lines = [f"{g.n} {g.half_edge_count}"]
    for u, v, w in zip(g.edge_u, g.edge_v, g.edge_w):
        lines.append(f"{int(u)} {int(v)} {float(w)!r}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_graph_text(path: str | Path) -> WeightedMultiGraph:
    raw = [ln.strip() for ln in Path(path).read_text().splitlines()]
    raw = [ln for ln in raw if ln and not ln.startswith("#")]
    if not raw:
        raise ValueError(f"{path}: empty graph file")
    head = raw[0].split()
    if len(head) != 2:
        raise ValueError(f"{path}: header must be 'n half_edge_count', got {raw[0]!r}")
    n, ln_total = int(head[0]), int(head[1])
    if ln_total % 2 != 0:
        raise ValueError(f"{path}: half-edge count {ln_total} is odd")
    m = ln_total // 2
    if len(raw) - 1 != m:
        raise ValueError(f"{path}: expected {m} edge lines, found {len(raw) - 1}")
    u = np.empty(m, dtype=np.int64)
    v = np.empty(m, dtype=np.int64)
    w = np.empty(m, dtype=np.float64)
    for i, ln in enumerate(raw[1:]):
        parts = ln.split()
        if len(parts) != 3:
            raise ValueError(f"{path}: edge line {i + 1} must be 'u v w', got {ln!r}")
        u[i], v[i], w[i] = int(parts[0]), int(parts[1]), float(parts[2])
    return WeightedMultiGraph(n, u, v, w)


_BIN_MAGIC = b"WMG1"
_EDGE_DTYPE = np.dtype([("u", "<u4"), ("v", "<u4"), ("w", "<f8")])


def write_graph_binary(g: WeightedMultiGraph, path: str | Path) -> None:
    """Binary mirror of the text format: magic, u32 n, u32 half-edge count,
    then packed little-endian (u32 u, u32 v, f64 w) records.  Weights round-
    trip bit-exactly."""
    if g.n >= 2**32:
        raise ValueError("vertex count too large for u32 encoding")
    rec = np.empty(g.edge_count, dtype=_EDGE_DTYPE)
    rec["u"] = g.edge_u
    rec["v"] = g.edge_v
    rec["w"] = g.edge_w
    with open(path, "wb") as fh:
        fh.write(_BIN_MAGIC)
        fh.write(struct.pack("<II", g.n, g.half_edge_count))
        fh.write(rec.tobytes())


def read_graph_binary(path: str | Path) -> WeightedMultiGraph:
    raw = Path(path).read_bytes()
    if len(raw) < 12 or raw[:4] != _BIN_MAGIC:
        raise ValueError(f"{path}: not a binary graph file")
    n, ln_total = struct.unpack_from("<II", raw, 4)
    if ln_total % 2 != 0:
        raise ValueError(f"{path}: half-edge count {ln_total} is odd")
    m = ln_total // 2
    expect = 12 + m * _EDGE_DTYPE.itemsize
    if len(raw) != expect:
        raise ValueError(f"{path}: expected {expect} bytes, got {len(raw)}")
    rec = np.frombuffer(raw, dtype=_EDGE_DTYPE, count=m, offset=12)
    return WeightedMultiGraph(
        int(n),
        rec["u"].astype(np.int64),
        rec["v"].astype(np.int64),
        rec["w"].astype(np.float64),
    )
