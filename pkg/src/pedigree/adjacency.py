"""Adjacency of two tours, decided by pedigree-graph connectivity.

Two distinct tours on the same node set are adjacent (for n >= 4) exactly
when the pedigree graph of their insertion histories is connected. The graph
itself is returned as the witness either way.
"""

from __future__ import annotations

from typing import NamedTuple

from .cycles import Tour, decode_tour
from .graph import PedigreeGraph, build


class AdjacencyResult(NamedTuple):
    adjacent: bool
    graph: PedigreeGraph


def pedigree_adjacent(tour_a: Tour, tour_b: Tour) -> AdjacencyResult:
    """Decide adjacency of two tours; O(n alpha(n)) after decoding.

    Raises ValueError when the tours have different node sets, are equal
    (adjacency is between distinct vertices), or have fewer than 4 nodes.
    """
    if tour_a.n != tour_b.n:
        raise ValueError(
            f"tours have different node counts ({tour_a.n} vs {tour_b.n})"
        )
    if tour_a.n < 4:
        raise ValueError("adjacency is defined for tours on at least 4 nodes")
    if tour_a == tour_b:
        raise ValueError("the tours are identical; adjacency needs two distinct tours")
    history_a = decode_tour(tour_a)
    history_b = decode_tour(tour_b)
    graph = build(history_a, history_b, tour_a.n)
    return AdjacencyResult(graph.is_connected, graph)
