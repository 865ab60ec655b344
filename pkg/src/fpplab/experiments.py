"""Replica sweeps over graph sizes, their theoretical anchors, and summaries.

A sweep walks a grid of sizes n, builds ``replicas`` independent weighted
graphs per size, and records per replica: the exact weighted diameter (all-
sources sweep), the flooding time from a uniformly drawn source, the worst
exploration threshold time, a two-ball probe between a uniform pair, the
slow-vertex count, and the structural stats.  Every replica derives its own
generator from (base seed, n, replica), so records are reproducible
independently of execution order; reruns emit byte-identical CSV.  Wall
clock lives only in the JSON-lines stream, which is therefore the one output
that differs between reruns.
"""

from __future__ import annotations

import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Sequence, TextIO

import numpy as np

from .branching import malthusian_parameter
from .degrees import (
    DegreeDistribution,
    read_distribution,
    sample_degree_sequence,
)
from .fpp import (
    all_flooding_times,
    bad_vertex_count,
    max_exploration_time,
    two_ball_distance,
)
from .graph import assign_weights, graph_stats, pair_half_edges
from .weights import WeightLaw, parse_weight_law, tail_exponent

log = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# theoretical anchors


@dataclass(frozen=True)
class TheoreticalLimits:
    """Large-n limits of diameter/log n and flood time/log n, with the
    ingredients they are built from."""

    nu: float
    alpha: float
    tail_c: float
    min_degree: int
    diameter_over_log_n: float
    flood_over_log_n: float


def theoretical_limits(p: DegreeDistribution, law: WeightLaw) -> TheoreticalLimits:
    """Limits 1/alpha + 2/(c*d_min) and 1/alpha + 1/(c*d_min).

    Rejects inputs outside the regime where those formulas hold: mean
    forward degree nu <= 1 (no growth), minimum degree below 3, or a weight
    law whose tail exponent is 0 or infinite.
    """
    from .degrees import size_biased

    sb = size_biased(p)
    if sb.nu <= 1.0:
        raise ValueError(
            f"mean forward degree nu={sb.nu:.6g} <= 1: no supercritical growth, limits undefined"
        )
    if p.min_degree < 3:
        raise ValueError(
            f"minimum degree {p.min_degree} < 3: the distance limits require min degree >= 3"
        )
    tail = tail_exponent(law)
    if not tail.is_admissible:
        raise ValueError(
            f"weight law {law!r} has tail exponent {tail.value} ({tail.classification}); "
            "the distance limits need a finite positive exponent"
        )
    alpha = malthusian_parameter(sb.nu, law)
    base = 1.0 / (tail.value * p.min_degree)
    return TheoreticalLimits(
        nu=sb.nu,
        alpha=alpha,
        tail_c=tail.value,
        min_degree=p.min_degree,
        diameter_over_log_n=1.0 / alpha + 2.0 * base,
        flood_over_log_n=1.0 / alpha + base,
    )


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class ExperimentConfig:
    degrees: DegreeDistribution
    law: WeightLaw
    n_grid: tuple[int, ...]
    replicas: int
    base_seed: int = 0
    k_factor: float = 2.0
    epsilon: float = 0.5
    label: str = "sweep"

    def __post_init__(self):
        if not self.n_grid or any(n < 2 for n in self.n_grid):
            raise ValueError("n_grid must list sizes of at least 2")
        if self.replicas < 1:
            raise ValueError("replicas must be at least 1")
        if self.k_factor <= 0:
            raise ValueError("k_factor must be positive")
        if not (0.0 < self.epsilon < 1.0):
            raise ValueError("epsilon must lie in (0, 1)")


def parse_degree_spec(text: str) -> DegreeDistribution:
    """``regular:d``, explicit ``k:p,k:p,...`` pairs, or ``@file`` with
    tab-separated degree/probability lines."""
    text = text.strip()
    if text.startswith("@"):
        return read_distribution(text[1:])
    if text.lower().startswith("regular:"):
        return DegreeDistribution.regular(int(text.split(":", 1)[1]))
    pairs = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        k, _, p = tok.partition(":")
        if not _:
            raise ValueError(f"degree term {tok!r} is not of the form k:p")
        pairs.append((int(k), float(p)))
    return DegreeDistribution(pairs)


_CONFIG_KEYS = {
    "degrees",
    "weights",
    "n_grid",
    "replicas",
    "seed",
    "k_factor",
    "epsilon",
    "label",
}


def parse_config(path: str | Path) -> ExperimentConfig:
    """Flat ``key = value`` file; '#' starts a comment; unknown keys are an
    error so typos cannot silently fall back to defaults."""
    raw: dict[str, str] = {}
    for ln_no, line in enumerate(Path(path).read_text().splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        key, sep, value = body.partition("=")
        if not sep:
            raise ValueError(f"{path}: line {ln_no} is not 'key = value': {line!r}")
        key = key.strip()
        if key not in _CONFIG_KEYS:
            raise ValueError(f"{path}: unknown config key {key!r} (line {ln_no})")
        if key in raw:
            raise ValueError(f"{path}: duplicate config key {key!r} (line {ln_no})")
        raw[key] = value.strip()
    for req in ("degrees", "weights", "n_grid", "replicas"):
        if req not in raw:
            raise ValueError(f"{path}: missing required config key {req!r}")
    return ExperimentConfig(
        degrees=parse_degree_spec(raw["degrees"]),
        law=parse_weight_law(raw["weights"]),
        n_grid=tuple(int(tok) for tok in raw["n_grid"].split(",") if tok.strip()),
        replicas=int(raw["replicas"]),
        base_seed=int(raw.get("seed", "0")),
        k_factor=float(raw.get("k_factor", "2.0")),
        epsilon=float(raw.get("epsilon", "0.5")),
        label=raw.get("label", "sweep"),
    )


# ---------------------------------------------------------------------------
# sweep records


@dataclass(frozen=True)
class SweepRecord:
    n: int
    replica: int
    seed: int
    connected: bool
    diameter: float
    flood_time: float
    diameter_over_log_n: float
    flood_over_log_n: float
    exploration_time: float
    exploration_argmax: int
    pair_distance: float
    ball_source_half_edges: int
    ball_target_half_edges: int
    bad_vertex_count: float
    loop_count: int
    multi_edge_excess: int
    max_degree: int
    wall_clock_s: float

    def csv_row(self) -> str:
        return ",".join(_cell(getattr(self, c)) for c in CSV_COLUMNS)

    def json_line(self) -> str:
        d = asdict(self)
        return json.dumps(d, sort_keys=True)


# wall_clock_s is deliberately absent: CSV payloads are byte-identical
# across reruns of the same config + seed, timing is JSONL-only.
CSV_COLUMNS = [
    "n",
    "replica",
    "seed",
    "connected",
    "diameter",
    "flood_time",
    "diameter_over_log_n",
    "flood_over_log_n",
    "exploration_time",
    "exploration_argmax",
    "pair_distance",
    "ball_source_half_edges",
    "ball_target_half_edges",
    "bad_vertex_count",
    "loop_count",
    "multi_edge_excess",
    "max_degree",
]


def _cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def replica_seed(base_seed: int, n: int, replica: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([base_seed, n, replica])


def run_replica(
    p: DegreeDistribution,
    law: WeightLaw,
    n: int,
    replica: int,
    base_seed: int,
    k_factor: float = 2.0,
    epsilon: float = 0.5,
    tail_c: float | None = None,
) -> SweepRecord:
    """One full replica at size n.

    Generator consumption order is fixed (degrees, matching, weights, flood
    source, probe pair) so records are reproducible from (base seed, n,
    replica) alone.
    """
    t0 = time.perf_counter()
    ss = replica_seed(base_seed, n, replica)
    seed_id = int(ss.generate_state(1, np.uint64)[0])
    rng = np.random.default_rng(ss)
    seq = sample_degree_sequence(p, n, rng)
    g = assign_weights(pair_half_edges(seq, rng), law, rng)
    stats = graph_stats(g)
    ecc = all_flooding_times(g)
    diameter = float(ecc.max())
    flood_source = int(rng.integers(n))
    flood = float(ecc[flood_source])
    expl_t, expl_v = max_exploration_time(g, k_factor)
    a, b = (int(x) for x in rng.integers(n, size=2))
    probe = two_ball_distance(g, a, b)
    if tail_c is not None:
        bad = float(bad_vertex_count(g, seq, epsilon, tail_c))
    else:
        bad = math.nan
    logn = math.log(n)
    return SweepRecord(
        n=n,
        replica=replica,
        seed=seed_id,
        connected=stats.connected,
        diameter=diameter,
        flood_time=flood,
        diameter_over_log_n=diameter / logn,
        flood_over_log_n=flood / logn,
        exploration_time=expl_t,
        exploration_argmax=expl_v,
        pair_distance=probe.distance,
        ball_source_half_edges=probe.source_half_edges,
        ball_target_half_edges=probe.target_half_edges,
        bad_vertex_count=bad,
        loop_count=stats.loop_count,
        multi_edge_excess=stats.multi_edge_excess,
        max_degree=stats.max_degree,
        wall_clock_s=time.perf_counter() - t0,
    )


def _replica_job(payload) -> tuple[str, object]:
    p, law, n, replica, base_seed, k_factor, epsilon, tail_c = payload
    try:
        return "ok", run_replica(p, law, n, replica, base_seed, k_factor, epsilon, tail_c)
    except Exception as exc:  # deliberate: one bad replica must not sink a sweep
        return "error", (n, replica, f"{type(exc).__name__}: {exc}")


def run_sweep(
    config: ExperimentConfig,
    *,
    workers: int = 1,
    csv_path: str | Path | None = None,
    jsonl_path: str | Path | None = None,
) -> list[SweepRecord]:
    """Run the full grid, emitting records incrementally when output paths
    are given.  Failed replicas are logged and skipped, never fatal."""
    tail = tail_exponent(config.law)
    tail_c = tail.value if tail.is_admissible else None
    jobs = [
        (config.degrees, config.law, n, r, config.base_seed, config.k_factor, config.epsilon, tail_c)
        for n in config.n_grid
        for r in range(config.replicas)
    ]
    records: list[SweepRecord] = []
    csv_fh: TextIO | None = open(csv_path, "w") if csv_path else None
    jsonl_fh: TextIO | None = open(jsonl_path, "w") if jsonl_path else None
    try:
        if csv_fh:
            csv_fh.write(",".join(CSV_COLUMNS) + "\n")
            csv_fh.flush()
        if workers > 1:
            executor = ProcessPoolExecutor(max_workers=workers)
            outcomes: Iterable[tuple[str, object]] = executor.map(_replica_job, jobs)
        else:
            executor = None
            outcomes = map(_replica_job, jobs)
        try:
            for status, payload in outcomes:
                if status == "error":
                    n, r, msg = payload  # type: ignore[misc]
                    log.warning("replica (n=%d, replica=%d) failed: %s", n, r, msg)
                    continue
                rec: SweepRecord = payload  # type: ignore[assignment]
                records.append(rec)
                if csv_fh:
                    csv_fh.write(rec.csv_row() + "\n")
                    csv_fh.flush()
                if jsonl_fh:
                    jsonl_fh.write(rec.json_line() + "\n")
                    jsonl_fh.flush()
        finally:
            if executor is not None:
                executor.shutdown()
    finally:
        if csv_fh:
            csv_fh.close()
        if jsonl_fh:
            jsonl_fh.close()
    return records


# ---------------------------------------------------------------------------
# summaries


@dataclass(frozen=True)
class SummaryRow:
    n: int
    replicas: int
    discarded: int
    diam_ratio_mean: float
    diam_ratio_sd: float
    diam_ratio_min: float
    diam_ratio_max: float
    flood_ratio_mean: float
    flood_ratio_sd: float
    exploration_time_mean: float
    bad_vertex_mean: float
    diam_vs_limit: float
    flood_vs_limit: float


def summarize(
    records: Sequence[SweepRecord], limits: TheoreticalLimits | None = None
) -> list[SummaryRow]:
    """Per-n aggregates over connected replicas; disconnected or failed
    replicas appear only in the discard count."""
    rows = []
    for n in sorted({r.n for r in records}):
        batch = [r for r in records if r.n == n]
        kept = [r for r in batch if r.connected and math.isfinite(r.diameter)]
        discarded = len(batch) - len(kept)
        if kept:
            dr = np.array([r.diameter_over_log_n for r in kept])
            fr = np.array([r.flood_over_log_n for r in kept])
            et = np.array([r.exploration_time for r in kept])
            bv = np.array([r.bad_vertex_count for r in kept])
            diam_mean = float(dr.mean())
            flood_mean = float(fr.mean())
            row = SummaryRow(
                n=n,
                replicas=len(batch),
                discarded=discarded,
                diam_ratio_mean=diam_mean,
                diam_ratio_sd=float(dr.std(ddof=1)) if dr.size > 1 else 0.0,
                diam_ratio_min=float(dr.min()),
                diam_ratio_max=float(dr.max()),
                flood_ratio_mean=flood_mean,
                flood_ratio_sd=float(fr.std(ddof=1)) if fr.size > 1 else 0.0,
                exploration_time_mean=float(et[np.isfinite(et)].mean()) if np.isfinite(et).any() else math.nan,
                bad_vertex_mean=float(bv[np.isfinite(bv)].mean()) if np.isfinite(bv).any() else math.nan,
                diam_vs_limit=diam_mean / limits.diameter_over_log_n if limits else math.nan,
                flood_vs_limit=flood_mean / limits.flood_over_log_n if limits else math.nan,
            )
        else:
            row = SummaryRow(
                n=n,
                replicas=len(batch),
                discarded=discarded,
                diam_ratio_mean=math.nan,
                diam_ratio_sd=math.nan,
                diam_ratio_min=math.nan,
                diam_ratio_max=math.nan,
                flood_ratio_mean=math.nan,
                flood_ratio_sd=math.nan,
                exploration_time_mean=math.nan,
                bad_vertex_mean=math.nan,
                diam_vs_limit=math.nan,
                flood_vs_limit=math.nan,
            )
        rows.append(row)
    return rows


def format_summary(rows: Sequence[SummaryRow]) -> str:
    header = (
        f"{'n':>8} {'reps':>5} {'drop':>4} "
        f"{'diam/logn':>10} {'sd':>7} {'min':>7} {'max':>7} "
        f"{'flood/logn':>10} {'sd':>7} {'T_expl':>8} {'bad':>8} "
        f"{'d/lim':>6} {'f/lim':>6}"
    )
    lines = [header, "-" * len(header)]
    for r in rows:
        lines.append(
            f"{r.n:>8d} {r.replicas:>5d} {r.discarded:>4d} "
            f"{r.diam_ratio_mean:>10.4f} {r.diam_ratio_sd:>7.4f} "
            f"{r.diam_ratio_min:>7.4f} {r.diam_ratio_max:>7.4f} "
            f"{r.flood_ratio_mean:>10.4f} {r.flood_ratio_sd:>7.4f} "
            f"{r.exploration_time_mean:>8.4f} {r.bad_vertex_mean:>8.2f} "
            f"{r.diam_vs_limit:>6.3f} {r.flood_vs_limit:>6.3f}"
        )
    return "\n".join(lines)
