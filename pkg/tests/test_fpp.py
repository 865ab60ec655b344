import math

import numpy as np
import pytest
from oracles import brute_force_distances, random_connected_multigraph

from fpplab import (
    DegreeDistribution,
    DegreeSequence,
    Exponential,
    WeightedMultiGraph,
    all_flooding_times,
    assign_weights,
    bad_vertex_count,
    exploration_trace,
    flooding_time,
    max_exploration_time,
    pair_half_edges,
    sample_degree_sequence,
    single_source_distances,
    slow_vertex_threshold,
    two_ball_distance,
    weighted_diameter,
    weighted_distance,
)


def _graph(n, edges, weights):
    u = np.array([e[0] for e in edges], dtype=np.int64)
    v = np.array([e[1] for e in edges], dtype=np.int64)
    return WeightedMultiGraph(n, u, v, np.asarray(weights, dtype=float))


def _random_regular_graph(n, d, seed, rate=1.0):
    rng = np.random.default_rng(seed)
    seq = sample_degree_sequence(DegreeDistribution.regular(d), n, rng)
    return assign_weights(pair_half_edges(seq, rng), Exponential(rate), rng)


PATH = _graph(3, [(0, 1), (1, 2)], [0.5, 0.25])


def test_single_source_on_path():
    dm = single_source_distances(PATH, 0)
    np.testing.assert_array_equal(dm.dist, [0.0, 0.5, 0.75])
    np.testing.assert_array_equal(dm.pred, [-1, 0, 1])
    assert dm.path_to(2) == [0, 1, 2]
    assert dm.path_to(0) == [0]
    assert dm.distance_to(1) == 0.5
    assert dm.reachable.all()


def test_single_source_triangle_routes_around():
    g = _graph(3, [(0, 1), (1, 2), (0, 2)], [1.0, 2.0, 10.0])
    dm = single_source_distances(g, 0)
    assert dm.distance_to(2) == 3.0  # through vertex 1, not the heavy edge
    assert dm.path_to(2) == [0, 1, 2]


def test_parallel_edges_and_loops_do_not_confuse_distances():
    g = _graph(2, [(0, 1), (0, 1), (0, 0)], [5.0, 1.0, 0.1])
    assert weighted_distance(g, 0, 1) == 1.0
    assert weighted_distance(g, 0, 0) == 0.0
    dm = single_source_distances(g, 0)
    assert dm.distance_to(1) == 1.0


def test_unreachable_vertices():
    g = _graph(4, [(0, 1), (2, 3)], [1.0, 1.0])
    dm = single_source_distances(g, 0)
    assert math.isinf(dm.distance_to(2))
    assert dm.path_to(2) == []
    assert dm.pred[2] == -1
    assert weighted_distance(g, 0, 3) == math.inf
    assert math.isinf(flooding_time(g, 0))
    assert math.isinf(weighted_diameter(g))


def test_vertex_range_and_weight_guards():
    with pytest.raises(ValueError, match="out of range"):
        single_source_distances(PATH, 3)
    with pytest.raises(ValueError, match="out of range"):
        weighted_distance(PATH, 0, -1)
    bare = _graph(2, [(0, 1)], [np.nan])
    with pytest.raises(ValueError, match="unset"):
        single_source_distances(bare, 0)
    with pytest.raises(ValueError, match="unset"):
        flooding_time(bare, 0)


def test_flooding_and_diameter_on_path():
    assert flooding_time(PATH, 1) == 0.5
    assert flooding_time(PATH, 0) == 0.75
    assert weighted_diameter(PATH) == 0.75
    np.testing.assert_array_equal(all_flooding_times(PATH), [0.75, 0.5, 0.75])


def test_diameter_degenerate_sizes():
    single = WeightedMultiGraph(1, np.array([], dtype=np.int64), np.array([], dtype=np.int64), np.array([]))
    assert weighted_diameter(single) == 0.0
    assert flooding_time(single, 0) == 0.0
    empty = WeightedMultiGraph(0, np.array([], dtype=np.int64), np.array([], dtype=np.int64), np.array([]))
    with pytest.raises(ValueError):
        weighted_diameter(empty)
    assert all_flooding_times(empty).size == 0


def test_brute_force_oracle_equivalence():
    # every distance entry point against exhaustive path enumeration, on
    # small random multigraphs with loops and parallel edges present
    rng = np.random.default_rng(2024)
    law = Exponential(1.0)
    saw_loop = saw_parallel = 0
    for _ in range(150):
        g = random_connected_multigraph(rng, law)
        saw_loop += int((g.edge_u == g.edge_v).any())
        pairs = {(min(u, v), max(u, v)) for u, v in zip(g.edge_u, g.edge_v) if u != v}
        saw_parallel += int(len(pairs) < int((g.edge_u != g.edge_v).sum()))
        src = int(rng.integers(g.n))
        oracle = brute_force_distances(g, src)
        dm = single_source_distances(g, src)
        np.testing.assert_allclose(dm.dist, oracle, atol=1e-9, rtol=0)
        tgt = int(rng.integers(g.n))
        # pairwise and bidirectional variants agree with the sweep exactly
        assert weighted_distance(g, src, tgt) == dm.distance_to(tgt)
        assert two_ball_distance(g, src, tgt).distance == dm.distance_to(tgt)
        assert flooding_time(g, src) == dm.dist.max()
    assert saw_loop > 10
    assert saw_parallel > 10


def test_compiled_kernel_matches_python_reference_exactly():
    g = _random_regular_graph(150, 3, seed=7)
    ecc = all_flooding_times(g)
    ref = np.array([single_source_distances(g, v).dist.max() for v in range(g.n)])
    np.testing.assert_array_equal(ecc, ref)  # bitwise, not approximate
    assert weighted_diameter(g) == ref.max()
    assert flooding_time(g, 17) == ref[17]


def test_path_to_follows_actual_weights():
    g = _random_regular_graph(60, 3, seed=3)
    dm = single_source_distances(g, 0)
    adj = g.adjacency()
    for v in (5, 23, 59):
        path = dm.path_to(v)
        assert path[0] == 0 and path[-1] == v
        total = 0.0
        for a, b in zip(path[:-1], path[1:]):
            total += min(w for u, w, _ in adj[a] if u == b)
        assert total == dm.distance_to(v)


# ---------------------------------------------------------------------------
# exploration process


def test_exploration_on_single_loop():
    g = _graph(1, [(0, 0)], [0.8])
    tr = exploration_trace(g, 0, thresholds=(1, 2, 3))
    assert tr.events == ((0.0, 2, 1), (0.8, 0, 1))
    assert tr.threshold_times == {1: 0.0, 2: 0.0, 3: math.inf}


def test_exploration_on_single_edge():
    g = _graph(2, [(0, 1)], [0.4])
    tr = exploration_trace(g, 0, thresholds=(2,))
    # discovering a degree-1 vertex consumes the only active half-edge
    assert tr.events == ((0.0, 1, 1), (0.4, 0, 2))
    assert tr.threshold_times == {2: math.inf}


def test_exploration_on_double_edge():
    g = _graph(2, [(0, 1), (0, 1)], [1.0, 2.0])
    tr = exploration_trace(g, 0)
    # second parallel edge closes a cycle at the earlier endpoint's clock
    assert tr.events == ((0.0, 2, 1), (1.0, 2, 2), (2.0, 0, 2))


def test_exploration_on_triangle_never_reaches_four():
    g = _graph(3, [(0, 1), (1, 2), (0, 2)], [1.0, 1.5, 2.0])
    tr = exploration_trace(g, 0, thresholds=(2, 4))
    assert tr.threshold_times[2] == 0.0
    assert tr.threshold_times[4] == math.inf
    assert tr.events[-1][1] == 0  # component exhausted
    assert tr.events[-1][2] == 3


def test_exploration_complete_graph_hand_run():
    g = _graph(
        4,
        [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)],
        [1.0, 2.0, 3.0, 10.0, 10.0, 10.0],
    )
    tr = exploration_trace(g, 0, thresholds=(4, 6, 7))
    assert tr.events == (
        (0.0, 3, 1),
        (1.0, 4, 2),   # vertex 1 joins: +deg-2 = +1
        (2.0, 5, 3),
        (3.0, 6, 4),
        (11.0, 4, 4),  # edge (1,2) closes a cycle: -2
        (11.0, 2, 4),
        (12.0, 0, 4),
    )
    assert tr.threshold_times == {4: 1.0, 6: 3.0, 7: math.inf}


def test_exploration_early_stop_truncates_events():
    g = _graph(
        4,
        [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)],
        [1.0, 2.0, 3.0, 10.0, 10.0, 10.0],
    )
    tr = exploration_trace(g, 0, thresholds=(4,), early_stop=True)
    assert tr.threshold_times == {4: 1.0}
    assert tr.events[-1][0] == 1.0


def test_exploration_requires_valid_inputs():
    with pytest.raises(ValueError, match="out of range"):
        exploration_trace(PATH, 9)


def test_max_exploration_time_tiny_threshold_is_zero():
    # K4: ceil(2 * log 4) = 3 = the degree of every start vertex
    g = _graph(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)], [1, 1, 1, 1, 1, 1])
    assert max_exploration_time(g) == (0.0, 0)


def test_max_exploration_time_unreachable_threshold():
    g = _graph(2, [(0, 1)], [0.4])
    t, v = max_exploration_time(g, k_factor=2.0)
    assert math.isinf(t)


def test_max_exploration_time_matches_per_vertex_scan():
    g = _random_regular_graph(60, 3, seed=11)
    threshold = math.ceil(2.0 * math.log(60))
    times = [
        exploration_trace(g, v, thresholds=(threshold,)).threshold_times[threshold]
        for v in range(g.n)
    ]
    t, v = max_exploration_time(g, 2.0)
    assert t == max(times)
    assert times[v] == t


def test_max_exploration_time_validation():
    g = _graph(2, [(0, 1)], [0.4])
    with pytest.raises(ValueError):
        max_exploration_time(g, k_factor=0.0)
    empty = WeightedMultiGraph(0, np.array([], dtype=np.int64), np.array([], dtype=np.int64), np.array([]))
    with pytest.raises(ValueError):
        max_exploration_time(empty)


# ---------------------------------------------------------------------------
# two-ball search


def test_two_ball_same_vertex_counts_boundary_half_edges():
    g = _graph(2, [(0, 0), (0, 1)], [0.5, 1.0])
    res = two_ball_distance(g, 0, 0)
    assert res.distance == 0.0
    # degree 3 minus both halves of the loop
    assert res.source_half_edges == 1
    assert res.settled_source == res.settled_target == 1


def test_two_ball_disconnected_reports_exhausted_balls():
    g = _graph(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)], [1, 1, 1, 1, 1, 1])
    res = two_ball_distance(g, 0, 3)
    assert math.isinf(res.distance)
    # the search stops once either side exhausts its component; that ball
    # has swallowed the whole triangle and has no boundary half-edges left
    assert res.settled_source == 3
    assert res.source_half_edges == 0
    assert 1 <= res.settled_target <= 3


def test_two_ball_exactness_on_larger_graph():
    g = _random_regular_graph(200, 3, seed=5)
    rng = np.random.default_rng(8)
    dms = {}
    for _ in range(25):
        s, t = int(rng.integers(200)), int(rng.integers(200))
        if s not in dms:
            dms[s] = single_source_distances(g, s)
        res = two_ball_distance(g, s, t)
        assert res.distance == dms[s].distance_to(t)
        # a direct-edge meeting can be certified before the target side
        # pops anything, so only the source ball is guaranteed non-empty
        assert res.settled_source >= 1 and res.settled_target >= 0
        assert 0 <= res.source_half_edges <= g.half_edge_count
        assert 0 <= res.target_half_edges <= g.half_edge_count


# ---------------------------------------------------------------------------
# slow-vertex counting


def test_slow_vertex_threshold_formula():
    s = slow_vertex_threshold(1000, 0.5, 1.0, 3)
    assert s == pytest.approx(0.5 * math.log(1000) / 3.0, rel=1e-15)
    assert slow_vertex_threshold(1000, 0.25, 2.0, 4) == pytest.approx(
        0.75 * math.log(1000) / 8.0
    )


def test_slow_vertex_threshold_validation():
    with pytest.raises(ValueError):
        slow_vertex_threshold(1000, 0.0, 1.0, 3)
    with pytest.raises(ValueError):
        slow_vertex_threshold(1000, 1.0, 1.0, 3)
    with pytest.raises(ValueError):
        slow_vertex_threshold(1000, 0.5, 0.0, 3)
    with pytest.raises(ValueError):
        slow_vertex_threshold(1000, 0.5, 1.0, 0)
    with pytest.raises(ValueError):
        slow_vertex_threshold(1, 0.5, 1.0, 3)


def test_bad_vertex_count_single_edge():
    seq = DegreeSequence([1, 1])
    s = slow_vertex_threshold(2, 0.5, 1.0, 1)  # ~0.3466
    slow = _graph(2, [(0, 1)], [s * 1.2])
    fast = _graph(2, [(0, 1)], [s * 0.8])
    assert bad_vertex_count(slow, seq, 0.5, 1.0) == 2
    assert bad_vertex_count(fast, seq, 0.5, 1.0) == 0


def test_bad_vertex_count_mixed_degrees_and_loops():
    # vertex 2 has degree 3 > d_min and must not be counted however slow;
    # loops feed both incidences of their vertex
    seq = DegreeSequence([2, 2, 3, 1])
    s = slow_vertex_threshold(4, 0.5, 1.0, 1)
    g = _graph(
        4,
        [(0, 0), (1, 2), (1, 2), (2, 3)],
        [s * 3, s * 2, s * 2, s * 0.5],
    )
    # d_min = 1: only vertex 3 qualifies by degree, and its edge is fast
    assert bad_vertex_count(g, seq, 0.5, 1.0) == 0
    g2 = _graph(
        4,
        [(0, 0), (1, 2), (1, 2), (2, 3)],
        [s * 3, s * 2, s * 2, s * 1.5],
    )
    assert bad_vertex_count(g2, seq, 0.5, 1.0) == 1


def test_bad_vertex_count_min_incident_uses_minimum():
    seq = DegreeSequence([2, 2])
    s = slow_vertex_threshold(2, 0.5, 1.0, 2)
    # one slow and one fast edge: the fast edge saves both endpoints
    g = _graph(2, [(0, 1), (0, 1)], [s * 4, s * 0.5])
    assert bad_vertex_count(g, seq, 0.5, 1.0) == 0
    g2 = _graph(2, [(0, 1), (0, 1)], [s * 4, s * 2])
    assert bad_vertex_count(g2, seq, 0.5, 1.0) == 2


def test_bad_vertex_count_rejects_mismatched_sequence():
    seq = DegreeSequence([1, 1, 2])
    g = _graph(3, [(0, 1), (1, 2)], [1.0, 1.0])
    with pytest.raises(ValueError, match="does not match"):
        bad_vertex_count(g, seq, 0.5, 1.0)
    with pytest.raises(ValueError, match="length"):
        bad_vertex_count(g, DegreeSequence([1, 1]), 0.5, 1.0)
