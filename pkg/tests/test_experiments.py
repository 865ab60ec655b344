import json
import logging
import math

import numpy as np
import pytest

from fpplab import (
    CSV_COLUMNS,
    DegreeDistribution,
    ExperimentConfig,
    Exponential,
    all_flooding_times,
    assign_weights,
    format_summary,
    pair_half_edges,
    parse_config,
    parse_degree_spec,
    parse_weight_law,
    replica_seed,
    run_replica,
    run_sweep,
    sample_degree_sequence,
    summarize,
    theoretical_limits,
    two_ball_distance,
)
from fpplab.experiments import SweepRecord

REGULAR3 = DegreeDistribution.regular(3)
EXP1 = Exponential(1.0)


# ---------------------------------------------------------------------------
# theoretical anchors


def test_limits_three_regular_exponential():
    lim = theoretical_limits(REGULAR3, EXP1)
    assert lim.nu == 2.0
    assert lim.alpha == pytest.approx(1.0, abs=1e-10)
    assert lim.tail_c == pytest.approx(1.0, rel=1e-9)
    assert lim.min_degree == 3
    assert lim.diameter_over_log_n == pytest.approx(5.0 / 3.0, rel=1e-9)
    assert lim.flood_over_log_n == pytest.approx(4.0 / 3.0, rel=1e-9)


def test_limits_three_regular_gamma():
    lim = theoretical_limits(REGULAR3, parse_weight_law("gamma:2,1"))
    assert lim.alpha == pytest.approx(math.sqrt(2.0) - 1.0, abs=1e-12)
    assert lim.tail_c == pytest.approx(1.0, rel=1e-9)
    assert lim.diameter_over_log_n == pytest.approx(3.0808802290397623, rel=1e-9)
    assert lim.flood_over_log_n == pytest.approx(2.7475468957064293, rel=1e-9)


def test_limits_mixed_degrees():
    p = DegreeDistribution({3: 0.2, 5: 0.8})
    lim = theoretical_limits(p, EXP1)
    assert lim.nu == pytest.approx(3.7391304347826093, rel=1e-12)
    assert lim.alpha == pytest.approx(2.739130434782612, rel=1e-10)
    assert lim.min_degree == 3
    assert lim.diameter_over_log_n == pytest.approx(1.0317460317460312, rel=1e-9)
    assert lim.flood_over_log_n == pytest.approx(0.6984126984126979, rel=1e-9)


def test_limits_reject_subcritical():
    with pytest.raises(ValueError, match="supercritical"):
        theoretical_limits(DegreeDistribution.regular(2), EXP1)


def test_limits_reject_low_min_degree():
    with pytest.raises(ValueError, match="min degree >= 3"):
        theoretical_limits(DegreeDistribution({2: 0.5, 3: 0.5}), EXP1)


def test_limits_reject_heavy_and_superexponential_tails():
    with pytest.raises(ValueError, match="heavy"):
        theoretical_limits(REGULAR3, parse_weight_law("weibull:0.5,1"))
    with pytest.raises(ValueError, match="superexponential"):
        theoretical_limits(REGULAR3, parse_weight_law("weibull:2,1"))


# ---------------------------------------------------------------------------
# degree spec / config parsing


def test_parse_degree_spec_regular():
    p = parse_degree_spec("regular:4")
    assert p.support == ((4, 1.0),)


def test_parse_degree_spec_pairs():
    p = parse_degree_spec(" 3:0.2, 5:0.8 ")
    assert p.support == ((3, 0.2), (5, 0.8))
    assert parse_degree_spec("3:1.0,").support == ((3, 1.0),)


def test_parse_degree_spec_file(tmp_path):
    from fpplab import write_distribution

    path = tmp_path / "deg.tsv"
    write_distribution(DegreeDistribution({3: 0.25, 4: 0.75}), path)
    p = parse_degree_spec(f"@{path}")
    assert p.support == ((3, 0.25), (4, 0.75))


def test_parse_degree_spec_rejects_malformed():
    with pytest.raises(ValueError, match="k:p"):
        parse_degree_spec("3-0.5")


def test_parse_config_full(tmp_path):
    path = tmp_path / "sweep.cfg"
    path.write_text(
        """
        # comparison run
        degrees = regular:3
        weights = exp:1      # unit rate
        n_grid  = 100, 200
        replicas = 4
        seed = 9
        k_factor = 1.5
        epsilon = 0.25
        label = demo
        """
    )
    cfg = parse_config(path)
    assert cfg.degrees.support == ((3, 1.0),)
    assert cfg.n_grid == (100, 200)
    assert cfg.replicas == 4
    assert cfg.base_seed == 9
    assert cfg.k_factor == 1.5
    assert cfg.epsilon == 0.25
    assert cfg.label == "demo"


def test_parse_config_defaults(tmp_path):
    path = tmp_path / "sweep.cfg"
    path.write_text("degrees=regular:3\nweights=exp:1\nn_grid=50\nreplicas=1\n")
    cfg = parse_config(path)
    assert cfg.base_seed == 0
    assert cfg.k_factor == 2.0
    assert cfg.epsilon == 0.5
    assert cfg.label == "sweep"


@pytest.mark.parametrize(
    "body,msg",
    [
        ("degrees regular:3\n", "line 1"),
        ("degrees=regular:3\nwidgets=2\n", "unknown config key 'widgets'"),
        ("degrees=regular:3\ndegrees=regular:4\n", "duplicate config key"),
        ("degrees=regular:3\nweights=exp:1\nreplicas=1\n", "missing required config key 'n_grid'"),
    ],
)
def test_parse_config_errors(tmp_path, body, msg):
    path = tmp_path / "bad.cfg"
    path.write_text(body)
    with pytest.raises(ValueError, match=msg):
        parse_config(path)


def test_experiment_config_validation():
    good = dict(degrees=REGULAR3, law=EXP1, n_grid=(10,), replicas=1)
    ExperimentConfig(**good)
    with pytest.raises(ValueError, match="at least 2"):
        ExperimentConfig(**{**good, "n_grid": (1,)})
    with pytest.raises(ValueError, match="at least 2"):
        ExperimentConfig(**{**good, "n_grid": ()})
    with pytest.raises(ValueError, match="replicas"):
        ExperimentConfig(**{**good, "replicas": 0})
    with pytest.raises(ValueError, match="k_factor"):
        ExperimentConfig(**{**good, "k_factor": 0.0})
    with pytest.raises(ValueError, match="epsilon"):
        ExperimentConfig(**{**good, "epsilon": 1.0})


# ---------------------------------------------------------------------------
# replicas


def test_run_replica_is_deterministic():
    a = run_replica(REGULAR3, EXP1, 80, 2, base_seed=5, tail_c=1.0)
    b = run_replica(REGULAR3, EXP1, 80, 2, base_seed=5, tail_c=1.0)
    assert a.csv_row() == b.csv_row()  # wall clock excluded by design
    assert a.wall_clock_s > 0 and b.wall_clock_s > 0


def test_run_replica_documented_draw_order():
    # a record must be reconstructible from (base_seed, n, replica) alone,
    # consuming the generator in the documented order
    rec = run_replica(REGULAR3, EXP1, 80, 3, base_seed=11, tail_c=1.0)
    rng = np.random.default_rng(replica_seed(11, 80, 3))
    seq = sample_degree_sequence(REGULAR3, 80, rng)
    g = assign_weights(pair_half_edges(seq, rng), EXP1, rng)
    ecc = all_flooding_times(g)
    assert rec.diameter == float(ecc.max())
    src = int(rng.integers(80))
    assert rec.flood_time == float(ecc[src])
    a, b = (int(x) for x in rng.integers(80, size=2))
    assert rec.pair_distance == two_ball_distance(g, a, b).distance
    assert rec.seed == int(replica_seed(11, 80, 3).generate_state(1, np.uint64)[0])


def test_run_replica_field_consistency():
    rec = run_replica(REGULAR3, EXP1, 80, 0, base_seed=1, tail_c=1.0)
    logn = math.log(80)
    assert rec.diameter_over_log_n == rec.diameter / logn
    assert rec.flood_over_log_n == rec.flood_time / logn
    assert rec.flood_time <= rec.diameter
    assert rec.max_degree == 3
    assert rec.bad_vertex_count >= 0
    assert isinstance(rec.connected, bool)


def test_run_replica_without_tail_skips_bad_count():
    rec = run_replica(REGULAR3, EXP1, 60, 0, base_seed=1, tail_c=None)
    assert math.isnan(rec.bad_vertex_count)


def test_csv_row_and_json_line_round_trip():
    rec = run_replica(REGULAR3, EXP1, 60, 1, base_seed=2, tail_c=1.0)
    cells = rec.csv_row().split(",")
    assert len(cells) == len(CSV_COLUMNS)
    assert cells[CSV_COLUMNS.index("connected")] in ("true", "false")
    # float cells are repr()s and parse back exactly
    assert float(cells[CSV_COLUMNS.index("diameter")]) == rec.diameter
    payload = json.loads(rec.json_line())
    assert sorted(payload) == sorted(list(CSV_COLUMNS) + ["wall_clock_s"])
    assert payload["n"] == 60 and payload["replica"] == 1


# ---------------------------------------------------------------------------
# sweeps


def _tiny_config(**kw):
    base = dict(
        degrees=REGULAR3,
        law=EXP1,
        n_grid=(60, 120),
        replicas=3,
        base_seed=5,
    )
    base.update(kw)
    return ExperimentConfig(**base)


def test_run_sweep_writes_csv_and_jsonl(tmp_path):
    csv_path = tmp_path / "out.csv"
    jsonl_path = tmp_path / "out.jsonl"
    records = run_sweep(_tiny_config(), csv_path=csv_path, jsonl_path=jsonl_path)
    assert len(records) == 6
    lines = csv_path.read_text().splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert len(lines) == 7
    events = [json.loads(l) for l in jsonl_path.read_text().splitlines()]
    assert len(events) == 6
    assert all("wall_clock_s" in e for e in events)
    assert [(e["n"], e["replica"]) for e in events] == [
        (n, r) for n in (60, 120) for r in range(3)
    ]


def test_run_sweep_rerun_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run_sweep(_tiny_config(), csv_path=a)
    run_sweep(_tiny_config(), csv_path=b)
    assert a.read_bytes() == b.read_bytes()


def test_run_sweep_parallel_matches_serial(tmp_path):
    serial = run_sweep(_tiny_config())
    parallel = run_sweep(_tiny_config(), workers=2)
    assert [r.csv_row() for r in serial] == [r.csv_row() for r in parallel]


def test_run_sweep_contains_replica_failures(monkeypatch, caplog):
    import fpplab.experiments as exp

    real = exp.run_replica

    def flaky(p, law, n, replica, base_seed, k_factor=2.0, epsilon=0.5, tail_c=None):
        if n == 60 and replica == 1:
            raise RuntimeError("synthetic replica failure")
        return real(p, law, n, replica, base_seed, k_factor, epsilon, tail_c)

    monkeypatch.setattr(exp, "run_replica", flaky)
    with caplog.at_level(logging.WARNING, logger="fpplab.experiments"):
        records = run_sweep(_tiny_config())
    assert len(records) == 5
    assert {(r.n, r.replica) for r in records} == {
        (n, r) for n in (60, 120) for r in range(3)
    } - {(60, 1)}
    assert any("synthetic replica failure" in m for m in caplog.messages)


# ---------------------------------------------------------------------------
# summaries


def _record(n, replica, diam, flood, connected=True, expl=1.0, bad=2.0):
    logn = math.log(n)
    return SweepRecord(
        n=n,
        replica=replica,
        seed=0,
        connected=connected,
        diameter=diam,
        flood_time=flood,
        diameter_over_log_n=diam / logn,
        flood_over_log_n=flood / logn,
        exploration_time=expl,
        exploration_argmax=0,
        pair_distance=flood / 2,
        ball_source_half_edges=3,
        ball_target_half_edges=3,
        bad_vertex_count=bad,
        loop_count=0,
        multi_edge_excess=0,
        max_degree=3,
        wall_clock_s=0.1,
    )


def test_summarize_aggregates_and_discards():
    logn = math.log(100)
    records = [
        _record(100, 0, 6.0 * logn, 4.0 * logn),
        _record(100, 1, 8.0 * logn, 5.0 * logn, expl=math.inf),
        _record(100, 2, math.inf, math.inf, connected=False),
        _record(200, 0, 3.0 * math.log(200), 2.0 * math.log(200)),
    ]
    lim = theoretical_limits(REGULAR3, EXP1)
    rows = summarize(records, lim)
    assert [r.n for r in rows] == [100, 200]
    r100 = rows[0]
    assert r100.replicas == 3 and r100.discarded == 1
    assert r100.diam_ratio_mean == pytest.approx(7.0)
    assert r100.diam_ratio_min == pytest.approx(6.0)
    assert r100.diam_ratio_max == pytest.approx(8.0)
    assert r100.diam_ratio_sd == pytest.approx(np.std([6.0, 8.0], ddof=1))
    assert r100.flood_ratio_mean == pytest.approx(4.5)
    # infinite exploration times are excluded from the mean
    assert r100.exploration_time_mean == pytest.approx(1.0)
    assert r100.diam_vs_limit == pytest.approx(7.0 / lim.diameter_over_log_n)
    r200 = rows[1]
    assert r200.replicas == 1 and r200.discarded == 0
    assert r200.diam_ratio_sd == 0.0


def test_summarize_without_limits_and_empty_cells():
    rows = summarize([_record(100, 0, math.inf, math.inf, connected=False)])
    assert rows[0].discarded == 1
    assert math.isnan(rows[0].diam_ratio_mean)
    assert math.isnan(rows[0].diam_vs_limit)


def test_format_summary_layout():
    lim = theoretical_limits(REGULAR3, EXP1)
    logn = math.log(100)
    rows = summarize([_record(100, 0, 6.0 * logn, 4.0 * logn)], lim)
    text = format_summary(rows)
    lines = text.splitlines()
    assert "diam/logn" in lines[0] and "f/lim" in lines[0]
    assert lines[1].startswith("---")
    assert len(lines) == 3
    assert lines[2].split()[0] == "100"
    assert "6.0000" in lines[2]
