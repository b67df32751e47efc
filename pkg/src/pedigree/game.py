"""The insertion game: Alice steers one growing tour, Bob randomizes the other.

Each round inserts the next node m into both cycles. Alice picks any edge of
her current cycle; Bob picks one of his uniformly at random. The engine
tracks the common edge set, the pedigree graph of the two histories, and the
per-round telemetry used by the validation suites.

This module is the reference implementation: plain objects, one step at a
time, no shortcuts. The Monte Carlo kernels in kernels.py replay exactly the
same process on flat arrays and are tested to match it trajectory for
trajectory.
"""

from __future__ import annotations

import dataclasses
import enum

import numpy as np

from .cycles import CycleEdge, InsertionHistory, Tour, edge
from .graph import PedigreeGraph, _rule_edges, empty_graph, extend


class MoveClass(enum.Enum):
    C_MOVE = "c"  # Alice played a common edge
    D_MOVE = "d"


class StrategyError(ValueError):
    """An Alice strategy returned something that is not a current cycle-edge."""


@dataclasses.dataclass(frozen=True)
class StepRecord:
    """Telemetry for one round; counts prefixed disjoint_ are measured before the step."""

    n: int  # the node inserted this round
    move_class: MoveClass
    alice_edge: CycleEdge
    bob_edge: CycleEdge
    delta_common: int  # change in S, the number of shared cycle-edges
    delta_components: int  # change in T, the pedigree-graph component count
    isolated_created: bool
    disjoint_common: int  # S*: common edges avoiding Alice's edge
    disjoint_bob_only: int  # R: Bob-only edges avoiding Alice's edge


@dataclasses.dataclass(frozen=True)
class GameState:
    """Both cycles, their histories, the common edges, and the pedigree graph at time n.

    The slot tuples are the stable edge orderings used for uniform draws:
    inserting m into slot j replaces it with (min(e), m) and appends
    (max(e), m). They are a deterministic function of the history.
    """

    n: int
    history_a: InsertionHistory
    history_b: InsertionHistory
    tour_a: Tour
    tour_b: Tour
    common_edges: frozenset[CycleEdge]
    graph: PedigreeGraph
    alice_edge_slots: tuple[CycleEdge, ...] = dataclasses.field(compare=False, repr=False)
    bob_edge_slots: tuple[CycleEdge, ...] = dataclasses.field(compare=False, repr=False)

    @property
    def num_common(self) -> int:
        """S: how many cycle-edges the two tours share."""
        return len(self.common_edges)

    @property
    def num_components(self) -> int:
        """T: component count of the pedigree graph."""
        return self.graph.component_count


_BASE_SLOTS = ((1, 2), (2, 3), (1, 3))


def initial_state() -> GameState:
    base = Tour((1, 2, 3))
    return GameState(
        n=3,
        history_a=InsertionHistory(()),
        history_b=InsertionHistory(()),
        tour_a=base,
        tour_b=base,
        common_edges=frozenset(_BASE_SLOTS),
        graph=empty_graph(),
        alice_edge_slots=_BASE_SLOTS,
        bob_edge_slots=_BASE_SLOTS,
    )


def classify_move(state: GameState, alice_edge: CycleEdge) -> MoveClass:
    """c-move iff Alice's edge is currently shared by both tours."""
    alice_edge = edge(*alice_edge)
    if alice_edge not in state.tour_a.edges:
        raise StrategyError(
            f"{alice_edge} is not an edge of Alice's tour at time {state.n}"
        )
    return MoveClass.C_MOVE if alice_edge in state.common_edges else MoveClass.D_MOVE


def disjoint_counts(state: GameState, alice_edge: CycleEdge) -> tuple[int, int]:
    """(S*, R): common and Bob-only edge counts avoiding Alice's edge."""
    alice_edge = edge(*alice_edge)
    u, v = alice_edge
    s_star = sum(
        1 for e in state.common_edges if u not in e and v not in e
    )
    r = sum(
        1
        for e in state.tour_b.edges
        if e not in state.common_edges and u not in e and v not in e
    )
    return s_star, r


def _insert_node(tour: Tour, e: CycleEdge, m: int) -> Tour:
    order = tour.order
    n = len(order)
    u, v = e
    for i in range(n):
        a, b = order[i], order[(i + 1) % n]
        if (a == u and b == v) or (a == v and b == u):
            return Tour(order[: i + 1] + (m,) + order[i + 1 :])
    raise ValueError(f"{e} is not an edge of the tour")


def _update_slots(
    slots: tuple[CycleEdge, ...], e: CycleEdge, m: int
) -> tuple[CycleEdge, ...]:
    j = slots.index(e)
    return slots[:j] + ((e[0], m),) + slots[j + 1 :] + ((e[1], m),)


def apply_step(
    state: GameState, alice_edge: CycleEdge, bob_edge: CycleEdge
) -> tuple[GameState, StepRecord]:
    """Insert node n+1 into both cycles and report the round's telemetry."""
    alice_edge = edge(*alice_edge)
    bob_edge = edge(*bob_edge)
    if alice_edge not in state.tour_a.edges:
        raise StrategyError(
            f"{alice_edge} is not an edge of Alice's tour at time {state.n}"
        )
    if bob_edge not in state.tour_b.edges:
        raise ValueError(f"{bob_edge} is not an edge of Bob's tour at time {state.n}")

    m = state.n + 1
    move_class = (
        MoveClass.C_MOVE if alice_edge in state.common_edges else MoveClass.D_MOVE
    )
    s_star, r = disjoint_counts(state, alice_edge)

    history_a = state.history_a.extended(alice_edge)
    history_b = state.history_b.extended(bob_edge)
    common = set(state.common_edges)
    common.discard(alice_edge)
    common.discard(bob_edge)
    for x in set(alice_edge) & set(bob_edge):
        common.add(edge(x, m))
    graph = extend(state.graph, history_a, history_b)
    isolated = m in graph.vertices and graph.degree(m) == 0

    record = StepRecord(
        n=m,
        move_class=move_class,
        alice_edge=alice_edge,
        bob_edge=bob_edge,
        delta_common=len(common) - len(state.common_edges),
        delta_components=graph.component_count - state.graph.component_count,
        isolated_created=isolated,
        disjoint_common=s_star,
        disjoint_bob_only=r,
    )
    new_state = GameState(
        n=m,
        history_a=history_a,
        history_b=history_b,
        tour_a=_insert_node(state.tour_a, alice_edge, m),
        tour_b=_insert_node(state.tour_b, bob_edge, m),
        common_edges=frozenset(common),
        graph=graph,
        alice_edge_slots=_update_slots(state.alice_edge_slots, alice_edge, m),
        bob_edge_slots=_update_slots(state.bob_edge_slots, bob_edge, m),
    )
    return new_state, record


def bob_outcome_distribution(
    state: GameState, alice_edge: CycleEdge
) -> list[tuple[CycleEdge, int, int]]:
    """Exact (bob_edge, dS, dT) for each of Bob's n equally likely edges.

    Computed directly from edge-set arithmetic and component-root probes;
    equal, outcome for outcome, to hypothetically applying apply_step to
    every Bob edge (a property the tests enforce).
    """
    alice_edge = edge(*alice_edge)
    if alice_edge not in state.tour_a.edges:
        raise StrategyError(
            f"{alice_edge} is not an edge of Alice's tour at time {state.n}"
        )
    alice_common = alice_edge in state.common_edges
    m = state.n + 1
    history_a, history_b = state.history_a, state.history_b
    out = []
    for bob_edge in state.tour_b.positive_edges():
        if bob_edge == alice_edge:
            # Same pair on both sides: no vertex; the one shared edge is
            # destroyed once and both fresh edges are common.
            out.append((bob_edge, 1, 0))
            continue
        shared = set(alice_edge) & set(bob_edge)
        ds = (
            len(shared)
            - int(alice_common)
            - int(bob_edge in state.common_edges)
        )
        endpoints = {
            k
            for k, _t in _rule_edges(alice_edge, bob_edge, history_a, history_b, m)
        }
        if not endpoints:
            dt = 1
        else:
            dt = 1 - len({state.graph.component_root(k) for k in endpoints})
        out.append((bob_edge, ds, dt))
    return out


def run_game(
    strategy,
    rng: np.random.Generator,
    n_max: int,
    n_start: int = 3,
    initial: GameState | None = None,
) -> tuple[list[StepRecord], GameState]:
    """Play rounds n_start+1 .. n_max; Bob draws uniformly from rng.

    Deterministic given (strategy, rng state): Bob turns one rng.random()
    per round into a slot index. Returns the per-round records and the
    final state.
    """
    if n_max < 4:
        raise ValueError(f"need n_max >= 4, got {n_max}")
    state = initial if initial is not None else initial_state()
    if state.n != n_start:
        raise ValueError(f"n_start={n_start} does not match the initial state (n={state.n})")
    records = []
    while state.n < n_max:
        alice_edge = strategy(state)
        idx = int(rng.random() * state.n)
        bob_edge = state.bob_edge_slots[idx]
        state, record = apply_step(state, alice_edge, bob_edge)
        records.append(record)
    return records, state


def trial_streams(seed: int, trial: int) -> tuple[np.random.Generator, np.random.Generator]:
    """The (alice, bob) substreams for one trial; shared with the kernels."""
    alice = np.random.default_rng(np.random.SeedSequence((seed, trial, 0)))
    bob = np.random.default_rng(np.random.SeedSequence((seed, trial, 1)))
    return alice, bob


class UniformRandomAlice:
    """Plays a uniformly random edge of her current cycle each round."""

    def __init__(self, rng: np.random.Generator):
        self._rng = rng

    def __call__(self, state: GameState) -> CycleEdge:
        idx = int(self._rng.random() * state.n)
        return state.alice_edge_slots[idx]


class GreedyCommonAlice:
    """Plays the smallest common edge while one exists, else the smallest edge."""

    def __call__(self, state: GameState) -> CycleEdge:
        if state.common_edges:
            return min(state.common_edges)
        # Lexicographic minimum of all edges: node 1's smaller neighbor.
        prev, nxt = state.tour_a.neighbors(1)
        return (1, min(prev, nxt))


class ScriptedAlice:
    """Replays a fixed insertion history."""

    def __init__(self, history: InsertionHistory):
        self._history = history

    def __call__(self, state: GameState) -> CycleEdge:
        m = state.n + 1
        if m > self._history.last_node:
            raise StrategyError(f"scripted history ends at {self._history.last_node}, round {m} requested")
        return self._history.edge_of(m)


def _scripted_run(
    history_a: InsertionHistory, history_b: InsertionHistory, n_max: int | None = None
) -> tuple[list[StepRecord], GameState]:
    """Test hook: both sides scripted. Production play only randomizes Bob."""
    if n_max is None:
        n_max = min(history_a.last_node, history_b.last_node)
    state = initial_state()
    records = []
    while state.n < n_max:
        m = state.n + 1
        state, record = apply_step(state, history_a.edge_of(m), history_b.edge_of(m))
        records.append(record)
    return records, state
