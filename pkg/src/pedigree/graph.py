"""Pedigree graphs: which insertion steps of two histories interlock.

Given two insertion histories hA and hB over the same node range, node k >= 4
is a vertex iff the two histories inserted k into different edges. Edges only
ever connect the newest vertex n to earlier vertices:

  type-1, A to B side: n - k when nu_A(n) = nu_B(k);
  type-2, A to B side: n - l, l = max nu_A(n), unless nu_B(l) meets nu_A(n);
  and the two mirror rules with A and B swapped.

Component count T counts the vertices' connected components (typed parallel
edges collapse to one undirected edge). A graph with no vertices has T = 0
and, like T = 1, counts as connected.
"""

from __future__ import annotations

import dataclasses
import enum

from .cycles import CycleEdge, InsertionHistory, Tour, edge, replay_history, segment_between


class EdgeType(enum.Enum):
    T1_AtoB = "T1_AtoB"
    T1_BtoA = "T1_BtoA"
    T2_AtoB = "T2_AtoB"
    T2_BtoA = "T2_BtoA"


class DisjointSet:
    """Union-find over explicitly added vertices."""

    def __init__(self):
        self.parent: dict[int, int] = {}
        self.size: dict[int, int] = {}

    def copy(self) -> "DisjointSet":
        out = DisjointSet()
        out.parent = dict(self.parent)
        out.size = dict(self.size)
        return out

    def add(self, x: int):
        self.parent[x] = x
        self.size[x] = 1

    def find(self, x: int) -> int:
        # No path compression: lookups on a shared, conceptually frozen
        # structure must not mutate it. Union by size keeps chains short.
        p = self.parent
        while p[x] != x:
            x = p[x]
        return x

    def union(self, x: int, y: int) -> bool:
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        if self.size[rx] < self.size[ry]:
            rx, ry = ry, rx
        self.parent[ry] = rx
        self.size[rx] += self.size[ry]
        return True


@dataclasses.dataclass(frozen=True)
class PedigreeGraph:
    """Value snapshot of the pedigree graph at time n.

    edges maps (smaller, larger) vertex pairs to the set of rule types that
    produced them. Treat instances as immutable; extend() returns a new one.
    """

    n: int
    vertices: frozenset[int]
    edges: dict[CycleEdge, frozenset[EdgeType]]
    component_count: int
    _dsu: DisjointSet = dataclasses.field(compare=False, repr=False)

    @property
    def is_connected(self) -> bool:
        return self.component_count <= 1

    def degree(self, v: int) -> int:
        if v not in self.vertices:
            raise ValueError(f"{v} is not a vertex")
        return sum(1 for e in self.edges if v in e)

    def component_root(self, v: int) -> int:
        """Canonical representative of v's component."""
        if v not in self.vertices:
            raise ValueError(f"{v} is not a vertex")
        return self._dsu.find(v)

    def components(self) -> list[list[int]]:
        groups: dict[int, list[int]] = {}
        for v in sorted(self.vertices):
            groups.setdefault(self._dsu.find(v), []).append(v)
        return sorted(groups.values())

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "vertices": sorted(self.vertices),
            "edges": [
                {"u": u, "v": v, "types": sorted(t.value for t in types)}
                for (u, v), types in sorted(self.edges.items())
            ],
            "components": self.components(),
        }


def empty_graph(n: int = 3) -> PedigreeGraph:
    if n < 3:
        raise ValueError(f"pedigree graphs start at n = 3, got {n}")
    return PedigreeGraph(n, frozenset(), {}, 0, DisjointSet())


def is_vertex(history_a: InsertionHistory, history_b: InsertionHistory, k: int) -> bool:
    """True iff the two histories inserted k into different edges; k < 4 never is."""
    if k < 4:
        return False
    return history_a.edge_of(k) != history_b.edge_of(k)


def _rule_edges(
    nu_a: CycleEdge,
    nu_b: CycleEdge,
    history_a: InsertionHistory,
    history_b: InsertionHistory,
    n: int,
) -> set[tuple[int, EdgeType]]:
    """Edges of the new vertex n, given its two insertion edges.

    Only consults history entries below n, so the histories may extend past n.
    """
    out: set[tuple[int, EdgeType]] = set()

    k = history_b.inserter.get(nu_a)
    if k is not None and k < n:
        out.add((k, EdgeType.T1_AtoB))
    k = history_a.inserter.get(nu_b)
    if k is not None and k < n:
        out.add((k, EdgeType.T1_BtoA))

    anchor = nu_a[1]  # max endpoint; the smaller one is what can block
    if not history_b.nu_set(anchor) & set(nu_a):
        out.add((anchor, EdgeType.T2_AtoB))
    anchor = nu_b[1]
    if not history_a.nu_set(anchor) & set(nu_b):
        out.add((anchor, EdgeType.T2_BtoA))

    return out


def new_edges(
    history_a: InsertionHistory, history_b: InsertionHistory, n: int
) -> set[tuple[int, EdgeType]]:
    """The rule edges joining vertex n to earlier vertices."""
    if not is_vertex(history_a, history_b, n):
        raise ValueError(f"node {n} is not a vertex of the pedigree graph")
    return _rule_edges(
        history_a.edge_of(n), history_b.edge_of(n), history_a, history_b, n
    )


def extend(
    graph: PedigreeGraph, history_a: InsertionHistory, history_b: InsertionHistory
) -> PedigreeGraph:
    """The graph one step later, for node n = graph.n + 1."""
    n = graph.n + 1
    if history_a.last_node < n or history_b.last_node < n:
        raise ValueError(f"histories end before node {n}")
    if not is_vertex(history_a, history_b, n):
        return dataclasses.replace(graph, n=n)

    vertices = graph.vertices | {n}
    edges = dict(graph.edges)
    dsu = graph._dsu.copy()
    dsu.add(n)
    count = graph.component_count + 1
    for k, etype in _rule_edges(
        history_a.edge_of(n), history_b.edge_of(n), history_a, history_b, n
    ):
        pair = edge(k, n)
        edges[pair] = edges.get(pair, frozenset()) | {etype}
        if dsu.union(k, n):
            count -= 1
    return PedigreeGraph(n, vertices, edges, count, dsu)


def build(
    history_a: InsertionHistory, history_b: InsertionHistory, n: int | None = None
) -> PedigreeGraph:
    """Fold extend() from the empty graph up to time n."""
    if n is None:
        n = min(history_a.last_node, history_b.last_node)
    if n > history_a.last_node or n > history_b.last_node:
        raise ValueError(f"histories end before node {n}")
    if n < 3:
        raise ValueError(f"pedigree graphs start at n = 3, got {n}")
    graph = empty_graph()
    for _ in range(4, n + 1):
        graph = extend(graph, history_a, history_b)
    return graph


def isolated_oracle(
    history_a: InsertionHistory,
    history_b: InsertionHistory,
    n: int,
    *,
    tour_a: Tour | None = None,
    tour_b: Tour | None = None,
) -> bool:
    """Independent isolation test: n is a vertex whose insertion edges both survive.

    Vertex n has no edges iff nu_A(n) is still a cycle-edge of the B tour at
    time n and nu_B(n) is still a cycle-edge of the A tour at time n. The
    tours may be passed in to skip the replay.
    """
    if not is_vertex(history_a, history_b, n):
        return False
    if tour_a is None:
        tour_a = replay_history(history_a, n)
    if tour_b is None:
        tour_b = replay_history(history_b, n)
    return (
        history_a.edge_of(n) in tour_b.edges
        and history_b.edge_of(n) in tour_a.edges
    )


def segment_edge_oracle(
    history_a: InsertionHistory,
    history_b: InsertionHistory,
    n: int,
    *,
    tour_b_prev: Tour | None = None,
) -> set[tuple[int, EdgeType]]:
    """Independent route to vertex n's A-to-B edge, via the B tour's segments.

    If nu_A(n) is a cycle-edge of the B tour at time n-1 there is no A-to-B
    edge. Otherwise there is exactly one: type-1 to the segment minimum when
    every node of the segment between nu_A(n)'s endpoints exceeds both, else
    type-2 to max nu_A(n). Swap the history arguments for the B-to-A side
    (the returned types then read swapped as well).
    """
    if not is_vertex(history_a, history_b, n):
        raise ValueError(f"node {n} is not a vertex of the pedigree graph")
    if tour_b_prev is None:
        tour_b_prev = replay_history(history_b, n - 1)
    u, v = history_a.edge_of(n)
    if (u, v) in tour_b_prev.edges:
        return set()
    seg = segment_between(tour_b_prev, u, v)
    if min(seg) > v:
        return {(min(seg), EdgeType.T1_AtoB)}
    return {(v, EdgeType.T2_AtoB)}
