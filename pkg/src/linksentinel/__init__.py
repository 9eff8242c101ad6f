"""Single-link failure detection and isolation for consensus networks.

Removing an edge from a network running the linear agreement protocol puts a
jump into the derivatives of each node's response: the first affected order
equals the directed distance from the edge tail to the node.  This package
predicts those jumps from the topology, places sensors so every edge is
covered and fingerprinted, simulates failure scenarios exactly, and decides
from sampled traces whether and where a link failed.
"""

from .dynamics import (
    AdmissibilityError,
    Scenario,
    Trace,
    analytic_derivative,
    propagate,
    random_distinct_state,
    read_trace_csv,
    simulate,
    trace_to_csv,
)
from .fdi import (
    AMBIGUOUS,
    FdiReport,
    JumpObservation,
    analyze_trace,
    detect,
    estimate_jumps,
    isolate,
    scan_candidate,
)
from .graph import (
    INFINITY,
    Digraph,
    Edge,
    ParseError,
    Walk,
    adjacency,
    cycle_digraph,
    distance,
    enumerate_walks,
    in_degree,
    laplacian,
    load_digraph,
    parse_edge_list,
    random_digraph,
    remove_edge,
    star_digraph,
    walk_count,
    walk_weight_sum,
    with_self_loops,
)
from .jumps import (
    JumpPrediction,
    PredictionCheck,
    check_all_predictions,
    check_prediction,
    derivative_gap,
    predict_jump,
)
from .placement import (
    PlacementResult,
    coverage_deficit,
    greedy_detection_placement,
    greedy_isolation_placement,
    indicator_set,
    relation_matrix,
    relation_order,
    resolution_deficit,
)

__version__ = "0.1.0"

__all__ = [
    "AMBIGUOUS",
    "AdmissibilityError",
    "Digraph",
    "Edge",
    "FdiReport",
    "INFINITY",
    "JumpObservation",
    "JumpPrediction",
    "ParseError",
    "PlacementResult",
    "PredictionCheck",
    "Scenario",
    "Trace",
    "Walk",
    "adjacency",
    "analytic_derivative",
    "analyze_trace",
    "check_all_predictions",
    "check_prediction",
    "coverage_deficit",
    "cycle_digraph",
    "derivative_gap",
    "detect",
    "distance",
    "enumerate_walks",
    "estimate_jumps",
    "greedy_detection_placement",
    "greedy_isolation_placement",
    "in_degree",
    "indicator_set",
    "isolate",
    "laplacian",
    "load_digraph",
    "parse_edge_list",
    "predict_jump",
    "propagate",
    "random_digraph",
    "random_distinct_state",
    "read_trace_csv",
    "relation_matrix",
    "relation_order",
    "remove_edge",
    "resolution_deficit",
    "scan_candidate",
    "simulate",
    "star_digraph",
    "trace_to_csv",
    "walk_count",
    "walk_weight_sum",
    "with_self_loops",
]
