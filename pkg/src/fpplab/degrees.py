"""Degree-side inputs for the random multigraph model.

A graph instance starts from either a degree *distribution* (a law on
non-negative integers, sampled i.i.d. per vertex) or an explicit degree
*sequence*.  This module holds both containers, the size-biased companion
law that drives the local branching approximation, and the structural
checks (parity, minimum degree, moment growth) that the asymptotic theory
needs before the shortest-path limits mean anything.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

PROB_TOL = 1e-12


def _as_sorted_support(pairs: Iterable[tuple[int, float]], what: str) -> tuple[tuple[int, float], ...]:
    seen: dict[int, float] = {}
    for k, p in pairs:
        ki = int(k)
        if ki != k or ki < 0:
            raise ValueError(f"{what} support must be non-negative integers, got {k!r}")
        if ki in seen:
            raise ValueError(f"duplicate support point {ki} in {what}")
        pf = float(p)
        if not math.isfinite(pf) or pf <= 0.0:
            raise ValueError(f"{what} probability at {ki} must be positive and finite, got {p!r}")
        seen[ki] = pf
    if not seen:
        raise ValueError(f"{what} support is empty")
    total = math.fsum(seen.values())
    if abs(total - 1.0) > PROB_TOL:
        raise ValueError(f"{what} probabilities must sum to 1 within {PROB_TOL}; got sum {total!r}")
    return tuple(sorted(seen.items()))


@dataclass(frozen=True)
class DegreeDistribution:
    """Probability law on vertex degrees.

    Args:
        support: iterable of (degree, probability) pairs; degrees are
            distinct non-negative integers, probabilities are positive and
            sum to 1 within ``PROB_TOL``.
    """

    support: tuple[tuple[int, float], ...]
    mean: float = field(init=False, repr=False)

    def __init__(self, support: Iterable[tuple[int, float]] | Mapping[int, float]):
        if isinstance(support, Mapping):
            support = support.items()
        pairs = _as_sorted_support(support, "degree distribution")
        object.__setattr__(self, "support", pairs)
        object.__setattr__(self, "mean", math.fsum(k * p for k, p in pairs))

    @classmethod
    def regular(cls, d: int) -> "DegreeDistribution":
        """Point mass at degree ``d``."""
        return cls([(d, 1.0)])

    @property
    def min_degree(self) -> int:
        return self.support[0][0]

    @property
    def max_degree(self) -> int:
        return self.support[-1][0]

    def prob(self, k: int) -> float:
        for kk, p in self.support:
            if kk == k:
                return p
        return 0.0

    def moment(self, order: float) -> float:
        return math.fsum((k**order) * p for k, p in self.support)

    def tv_distance(self, other: "DegreeDistribution") -> float:
        """Total-variation distance to another degree law."""
        ks = {k for k, _ in self.support} | {k for k, _ in other.support}
        return 0.5 * math.fsum(abs(self.prob(k) - other.prob(k)) for k in ks)

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        ks = np.array([k for k, _ in self.support], dtype=np.int64)
        ps = np.array([p for _, p in self.support], dtype=np.float64)
        return rng.choice(ks, size=n, p=ps / ps.sum())


@dataclass(frozen=True)
class SizeBiasedLaw:
    """Law of the forward half-edge count seen when following a uniformly
    chosen half-edge: support on non-negative integers, mean ``nu``.

    ``nu`` is the branching mean of the local tree approximation; the
    supercritical regime the long-range results live in has ``nu > 1``.
    """

    support: tuple[tuple[int, float], ...]
    nu: float = field(init=False, repr=False)

    def __init__(self, support: Iterable[tuple[int, float]] | Mapping[int, float]):
        if isinstance(support, Mapping):
            support = support.items()
        pairs = _as_sorted_support(support, "size-biased law")
        object.__setattr__(self, "support", pairs)
        object.__setattr__(self, "nu", math.fsum(k * p for k, p in pairs))

    def prob(self, k: int) -> float:
        for kk, p in self.support:
            if kk == k:
                return p
        return 0.0

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        ks = np.array([k for k, _ in self.support], dtype=np.int64)
        ps = np.array([p for _, p in self.support], dtype=np.float64)
        return rng.choice(ks, size=n, p=ps / ps.sum())


class DegreeSequence:
    """Explicit per-vertex degrees, with the derived counts the model cares
    about (half-edge total, extremes) computed once up front."""

    __slots__ = ("degrees", "n", "total_half_edges", "min_degree", "max_degree")

    def __init__(self, degrees: Iterable[int] | np.ndarray):
        arr = np.asarray(list(degrees) if not isinstance(degrees, np.ndarray) else degrees)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("degree sequence must be a non-empty 1-d array")
        if not np.issubdtype(arr.dtype, np.integer):
            if not np.all(arr == np.floor(arr)):
                raise ValueError("degrees must be integers")
            arr = arr.astype(np.int64)
        else:
            arr = arr.astype(np.int64)
        if (arr < 0).any():
            raise ValueError("degrees must be non-negative")
        self.degrees = arr
        self.degrees.setflags(write=False)
        self.n = int(arr.size)
        self.total_half_edges = int(arr.sum())
        self.min_degree = int(arr.min())
        self.max_degree = int(arr.max())

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other: object) -> bool:
        return isinstance(other, DegreeSequence) and np.array_equal(self.degrees, other.degrees)

    def __repr__(self) -> str:
        return f"DegreeSequence(n={self.n}, total_half_edges={self.total_half_edges})"

    @property
    def parity_ok(self) -> bool:
        return self.total_half_edges % 2 == 0


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of the structural checks on a degree sequence.

    The parity and minimum-degree clauses are pass/fail.  The moment
    statistic ((1/n) sum d_i^(2+delta)), the max-degree ratio
    (max degree / sqrt(n / log n)) and the optional TV distance to a target
    law are single-instance diagnostics of asymptotic conditions and are
    reported without a threshold.
    """

    n: int
    parity_ok: bool
    min_degree: int
    min_degree_ok: bool
    moment_delta: float
    moment_statistic: float
    max_degree: int
    max_degree_ratio: float
    tv_distance: float | None = None

    @property
    def ok(self) -> bool:
        return self.parity_ok and self.min_degree_ok


def validate_degree_conditions(
    seq: DegreeSequence,
    target: DegreeDistribution | None = None,
    delta: float = 1.0,
) -> ValidationReport:
    """Check a degree sequence against the structural assumptions.

    Args:
        seq: the degree sequence under test.
        target: optional degree law the empirical degrees should approximate;
            when given, the report carries the TV distance between the
            empirical degree fractions and the target.
        delta: moment margin; the reported moment statistic is
            (1/n) * sum(d_i ** (2 + delta)).  Must be positive.

    Returns:
        ValidationReport (see class docstring).
    """
    if delta <= 0:
        raise ValueError(f"delta must be positive, got {delta}")
    d = seq.degrees
    n = seq.n
    moment_stat = float(np.mean(d.astype(np.float64) ** (2.0 + delta)))
    if n > 1:
        ratio = seq.max_degree / math.sqrt(n / math.log(n))
    else:
        ratio = math.inf
    tv = None
    if target is not None:
        counts = np.bincount(d)
        emp = DegreeDistribution(
            [(k, counts[k] / n) for k in range(counts.size) if counts[k] > 0]
        )
        tv = emp.tv_distance(target)
    return ValidationReport(
        n=n,
        parity_ok=seq.parity_ok,
        min_degree=seq.min_degree,
        min_degree_ok=seq.min_degree >= 3,
        moment_delta=delta,
        moment_statistic=moment_stat,
        max_degree=seq.max_degree,
        max_degree_ratio=ratio,
        tv_distance=tv,
    )


def size_biased(p: DegreeDistribution) -> SizeBiasedLaw:
    """Size-biased forward-degree law of a degree distribution.

    Following a uniformly chosen half-edge, the vertex found on the other
    side has degree k+1 with probability proportional to (k+1) * p_{k+1};
    the k remaining half-edges point onward.  Hence the law
    q_k = (k+1) p_{k+1} / mean for every k+1 in the support.
    """
    if p.mean <= 0:
        raise ValueError("size-biasing needs a positive mean degree")
    pairs = [(k - 1, k * pk / p.mean) for k, pk in p.support if k >= 1]
    return SizeBiasedLaw(pairs)


def empirical_size_biased(seq: DegreeSequence) -> SizeBiasedLaw:
    """Size-biased forward-degree law of an explicit degree sequence.

    q_k = (k+1) * #{i : d_i = k+1} / total_half_edges.  Vertices of degree 0
    carry no half-edge and cannot be reached this way, so they drop out.
    """
    if seq.total_half_edges == 0:
        raise ValueError("size-biasing needs at least one half-edge")
    counts = np.bincount(seq.degrees)
    ln = seq.total_half_edges
    pairs = [
        (k - 1, k * counts[k] / ln) for k in range(1, counts.size) if counts[k] > 0
    ]
    return SizeBiasedLaw(pairs)


def sample_degree_sequence(
    p: DegreeDistribution, n: int, rng: np.random.Generator
) -> DegreeSequence:
    """Draw n i.i.d. degrees from ``p``; if the total is odd, the last entry
    is bumped by one so the half-edges can be matched."""
    if n < 1:
        raise ValueError(f"need at least one vertex, got n={n}")
    d = p.sample(n, rng)
    if int(d.sum()) % 2 == 1:
        d = d.copy()
        d[-1] += 1
    return DegreeSequence(d)


# ---------------------------------------------------------------------------
# serialization


def write_degrees_text(seq: DegreeSequence, path: str | Path) -> None:
    """One degree per line."""
    Path(path).write_text("".join(f"{d}\n" for d in seq.degrees))


def read_degrees_text(path: str | Path) -> DegreeSequence:
    out = []
    for i, line in enumerate(Path(path).read_text().splitlines(), start=1):
        s = line.strip()
        if not s:
            continue
        try:
            out.append(int(s))
        except ValueError:
            raise ValueError(f"{path}: line {i} is not an integer: {line!r}") from None
    return DegreeSequence(out)


def write_degrees_binary(seq: DegreeSequence, path: str | Path) -> None:
    """Little-endian u32 count followed by that many u32 degrees."""
    if seq.max_degree >= 2**32:
        raise ValueError("degree too large for u32 encoding")
    with open(path, "wb") as fh:
        fh.write(struct.pack("<I", seq.n))
        fh.write(seq.degrees.astype("<u4").tobytes())


def read_degrees_binary(path: str | Path) -> DegreeSequence:
    raw = Path(path).read_bytes()
    if len(raw) < 4:
        raise ValueError(f"{path}: truncated header")
    (n,) = struct.unpack_from("<I", raw, 0)
    expect = 4 + 4 * n
    if len(raw) != expect:
        raise ValueError(f"{path}: expected {expect} bytes for {n} degrees, got {len(raw)}")
    return DegreeSequence(np.frombuffer(raw, dtype="<u4", count=n, offset=4).astype(np.int64))


def write_distribution(p: DegreeDistribution, path: str | Path) -> None:
    """Tab-separated ``degree<TAB>probability`` lines; floats keep full
    round-trip precision."""
    Path(path).write_text("".join(f"{k}\t{pk!r}\n" for k, pk in p.support))


def read_distribution(path: str | Path) -> DegreeDistribution:
    pairs = []
    for i, line in enumerate(Path(path).read_text().splitlines(), start=1):
        s = line.strip()
        if not s:
            continue
        parts = s.split("\t")
        if len(parts) != 2:
            raise ValueError(f"{path}: line {i} is not 'degree<TAB>probability': {line!r}")
        pairs.append((int(parts[0]), float(parts[1])))
    return DegreeDistribution(pairs)
