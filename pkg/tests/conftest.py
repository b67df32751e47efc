"""Shared fixtures: the hand-checked 10-node example pair and a corpus walker."""

import numpy as np
import pytest

from pedigree import game
from pedigree.cycles import InsertionHistory, Tour, sample_uniform_history
from pedigree.graph import (
    EdgeType,
    build,
    is_vertex,
    isolated_oracle,
    new_edges,
    segment_edge_oracle,
)

# A fully worked game to n=10, verified by hand: both histories, the final
# tours, and the complete pedigree graph with per-edge rule types.
ALICE_MOVES = {
    4: (1, 2),
    5: (2, 4),
    6: (2, 3),
    7: (4, 5),
    8: (3, 6),
    9: (1, 3),
    10: (3, 9),
}
BOB_MOVES = {
    4: (1, 3),
    5: (1, 2),
    6: (2, 3),
    7: (3, 4),
    8: (1, 4),
    9: (1, 8),
    10: (2, 6),
}
ALICE_TOUR = (1, 4, 7, 5, 2, 6, 8, 3, 10, 9)
BOB_TOUR = (1, 5, 2, 10, 6, 3, 7, 4, 8, 9)
EXAMPLE_VERTICES = frozenset({4, 5, 7, 8, 9, 10})
EXAMPLE_EDGES = {
    (4, 5): frozenset({EdgeType.T1_BtoA, EdgeType.T2_AtoB}),
    (5, 7): frozenset({EdgeType.T2_AtoB}),
    (4, 7): frozenset({EdgeType.T2_BtoA}),
    (4, 9): frozenset({EdgeType.T1_AtoB}),
    (8, 9): frozenset({EdgeType.T2_BtoA}),
    (9, 10): frozenset({EdgeType.T2_AtoB}),
}
# component counts after rounds 4..10 and the rounds whose vertex is born isolated
EXAMPLE_T_TRAJECTORY = (1, 1, 1, 1, 2, 1, 1)
EXAMPLE_ISOLATIONS = (4, 8)


@pytest.fixture(scope="session")
def alice_history() -> InsertionHistory:
    return InsertionHistory.from_mapping(ALICE_MOVES)


@pytest.fixture(scope="session")
def bob_history() -> InsertionHistory:
    return InsertionHistory.from_mapping(BOB_MOVES)


@pytest.fixture(scope="session")
def alice_tour() -> Tour:
    return Tour(ALICE_TOUR)


@pytest.fixture(scope="session")
def bob_tour() -> Tour:
    return Tour(BOB_TOUR)


_SWAP = {
    EdgeType.T1_AtoB: EdgeType.T1_BtoA,
    EdgeType.T2_AtoB: EdgeType.T2_BtoA,
}
_A_SIDE = {EdgeType.T1_AtoB, EdgeType.T2_AtoB}


def walk_pair(
    history_a: InsertionHistory,
    history_b: InsertionHistory,
    n_max: int,
    *,
    rebuild_every: int = 32,
) -> tuple[int, list[str]]:
    """Step a scripted pair to n_max, cross-checking every round.

    Per round: rule edges against the segment oracle in both directions,
    rule isolation against the surviving-edge oracle, at most one edge per
    direction, rule endpoints present as graph vertices, degrees capped at 6,
    and (every rebuild_every rounds) the incremental graph against a from-
    scratch rebuild. Returns (rounds checked, failure descriptions).
    """
    state = game.initial_state()
    failures: list[str] = []
    checks = 0
    degree: dict[int, int] = {}

    def fail(m: int, msg: str) -> None:
        failures.append(f"n={m}: {msg}")

    while state.n < n_max:
        m = state.n + 1
        prev_a, prev_b = state.tour_a, state.tour_b
        state, _ = game.apply_step(state, history_a.edge_of(m), history_b.edge_of(m))
        checks += 1
        if is_vertex(history_a, history_b, m):
            rule = new_edges(history_a, history_b, m)
            a_side = {kt for kt in rule if kt[1] in _A_SIDE}
            b_side = rule - a_side
            oracle_a = segment_edge_oracle(
                history_a, history_b, m, tour_b_prev=prev_b
            )
            oracle_b = {
                (k, _SWAP[t])
                for k, t in segment_edge_oracle(
                    history_b, history_a, m, tour_b_prev=prev_a
                )
            }
            if a_side != oracle_a:
                fail(m, f"A-side rule edges {a_side} != segment oracle {oracle_a}")
            if b_side != oracle_b:
                fail(m, f"B-side rule edges {b_side} != segment oracle {oracle_b}")
            if len(a_side) > 1 or len(b_side) > 1:
                fail(m, f"more than one edge in a direction: {rule}")
            iso_oracle = isolated_oracle(
                history_a, history_b, m, tour_a=state.tour_a, tour_b=state.tour_b
            )
            if (not rule) != iso_oracle:
                fail(m, f"isolation disagreement: rule edges {rule}, oracle {iso_oracle}")
            neighbors = {k for k, _ in rule}
            for k in neighbors:
                if k not in state.graph.vertices:
                    fail(m, f"edge endpoint {k} is not a graph vertex")
                degree[k] = degree.get(k, 0) + 1
                if degree[k] > 6:
                    fail(m, f"vertex {k} reached degree {degree[k]}")
            degree[m] = len(neighbors)
            if degree[m] > 2:
                fail(m, f"new vertex has {degree[m]} edges to smaller vertices")
        if m % rebuild_every == 0 or m == n_max:
            fresh = build(history_a, history_b, m)
            g = state.graph
            if (
                fresh.vertices != g.vertices
                or fresh.edges != g.edges
                or fresh.component_count != g.component_count
            ):
                fail(m, "incremental graph differs from a from-scratch rebuild")
            for v in g.vertices:
                if g.degree(v) != degree.get(v, 0):
                    fail(m, f"tracked degree of {v} drifted")
    return checks, failures


def random_pair_corpus(seed: int, pairs: int, n_max: int):
    """Yield (history_a, history_b) pairs drawn uniformly at n_max."""
    rng = np.random.default_rng(np.random.SeedSequence((seed, 0xC0)))
    for _ in range(pairs):
        yield (
            sample_uniform_history(rng, n_max),
            sample_uniform_history(rng, n_max),
        )
