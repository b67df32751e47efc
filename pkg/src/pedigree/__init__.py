"""Pedigree encodings of tours, their adjacency test, and the insertion game."""

from .adjacency import AdjacencyResult, pedigree_adjacent
from .cycles import (
    HistoryError,
    InsertionHistory,
    Tour,
    decode_tour,
    edge_at_index,
    enumerate_canonical_tours,
    enumerate_histories,
    find_inserter,
    format_history,
    format_tour,
    nu_of,
    parse_history_text,
    parse_tour_text,
    replay_history,
    sample_uniform_history,
    segment_between,
)
from .game import (
    GameState,
    GreedyCommonAlice,
    MoveClass,
    ScriptedAlice,
    StepRecord,
    StrategyError,
    UniformRandomAlice,
    apply_step,
    bob_outcome_distribution,
    classify_move,
    disjoint_counts,
    initial_state,
    run_game,
    trial_streams,
)
from .graph import (
    EdgeType,
    PedigreeGraph,
    build,
    empty_graph,
    extend,
    is_vertex,
    isolated_oracle,
    new_edges,
    segment_edge_oracle,
)

__version__ = "0.1.0"

__all__ = [
    "AdjacencyResult",
    "EdgeType",
    "GameState",
    "GreedyCommonAlice",
    "HistoryError",
    "InsertionHistory",
    "MoveClass",
    "PedigreeGraph",
    "ScriptedAlice",
    "StepRecord",
    "StrategyError",
    "Tour",
    "UniformRandomAlice",
    "apply_step",
    "bob_outcome_distribution",
    "build",
    "classify_move",
    "decode_tour",
    "disjoint_counts",
    "edge_at_index",
    "empty_graph",
    "enumerate_canonical_tours",
    "enumerate_histories",
    "extend",
    "find_inserter",
    "format_history",
    "format_tour",
    "initial_state",
    "is_vertex",
    "isolated_oracle",
    "new_edges",
    "nu_of",
    "parse_history_text",
    "parse_tour_text",
    "pedigree_adjacent",
    "replay_history",
    "run_game",
    "sample_uniform_history",
    "segment_between",
    "trial_streams",
]
