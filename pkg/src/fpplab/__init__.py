"""Shortest-path growth experiments on random multigraphs with i.i.d.
positive edge weights: degree inputs, half-edge matching, exact first-passage
distances, the branching-process approximation, and replica sweep harnesses.
"""

from .branching import (
    BranchingSpec,
    PopulationTrajectory,
    estimate_growth_rate,
    growth_constant,
    malthusian_parameter,
    simulate_branching,
)
from .degrees import (
    DegreeDistribution,
    DegreeSequence,
    SizeBiasedLaw,
    ValidationReport,
    empirical_size_biased,
    read_degrees_binary,
    read_degrees_text,
    read_distribution,
    sample_degree_sequence,
    size_biased,
    validate_degree_conditions,
    write_degrees_binary,
    write_degrees_text,
    write_distribution,
)
from .experiments import (
    CSV_COLUMNS,
    ExperimentConfig,
    SummaryRow,
    SweepRecord,
    TheoreticalLimits,
    format_summary,
    parse_config,
    parse_degree_spec,
    replica_seed,
    run_replica,
    run_sweep,
    summarize,
    theoretical_limits,
)
from .fpp import (
    DistanceMap,
    ExplorationTrace,
    TwoBallResult,
    all_flooding_times,
    bad_vertex_count,
    exploration_trace,
    flooding_time,
    max_exploration_time,
    single_source_distances,
    slow_vertex_threshold,
    two_ball_distance,
    weighted_diameter,
    weighted_distance,
)
from .graph import (
    GraphStats,
    WeightedMultiGraph,
    assign_weights,
    graph_stats,
    pair_half_edges,
    read_graph_binary,
    read_graph_text,
    write_graph_binary,
    write_graph_text,
)
from .weights import (
    Empirical,
    Exponential,
    Gamma,
    QuadratureError,
    ShiftedExponential,
    TailEstimate,
    TailExponent,
    Weibull,
    WeightLaw,
    discounted_mean_lifetime,
    estimate_tail_exponent,
    laplace_transform,
    parse_weight_law,
    sample_weight,
    tail_exponent,
)

__version__ = "0.1.0"
