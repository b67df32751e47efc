"""Tours grown by edge insertion, and the history encoding of that growth.

A tour on {1..n} is stored in canonical form: the listing starts at node 1 and
runs in the positive direction, the one in which node 2 appears before node 3.
The insertion history records, for each node k = 4..N, the cycle-edge nu(k)
that k subdivided; history and tour determine each other exactly.
"""

from __future__ import annotations

import dataclasses
from functools import cached_property

import numpy as np

# Construction guard. Everything here is O(n) or O(n^2); past this size a
# caller almost certainly passed garbage.
MAX_NODES = 10**6

# A cycle-edge is a sorted pair of distinct node labels.
CycleEdge = tuple[int, int]

BASE_ORDER = (1, 2, 3)


def edge(u: int, v: int) -> CycleEdge:
    """Canonical (sorted) form of the cycle-edge {u, v}."""
    if u == v:
        raise ValueError(f"degenerate edge ({u}, {v})")
    return (u, v) if u < v else (v, u)


class HistoryError(ValueError):
    """An insertion history that cannot be replayed; carries the offending node."""

    def __init__(self, node: int, message: str):
        self.node = node
        super().__init__(f"node {node}: {message}")


@dataclasses.dataclass(frozen=True)
class Tour:
    """A cycle on {1..n}, n >= 3, in canonical presentation.

    order[0] is node 1 and the listing runs positive (2 before 3). Use
    Tour.from_cycle to canonicalize an arbitrary rotation/reflection.
    """

    order: tuple[int, ...]

    def __post_init__(self):
        order = tuple(int(x) for x in self.order)
        object.__setattr__(self, "order", order)
        n = len(order)
        if n < 3:
            raise ValueError(f"a tour needs at least 3 nodes, got {n}")
        if n > MAX_NODES:
            raise ValueError(f"node count {n} exceeds the {MAX_NODES} ceiling")
        if sorted(order) != list(range(1, n + 1)):
            raise ValueError("tour is not a permutation of 1..n")
        if order[0] != 1:
            raise ValueError("canonical tour must start at node 1")
        if order.index(2) > order.index(3):
            raise ValueError("canonical tour must run positive (2 before 3)")

    @classmethod
    def from_cycle(cls, seq) -> "Tour":
        """Canonicalize any rotation/reflection of a cycle listing."""
        seq = [int(x) for x in seq]
        if len(seq) < 3:
            raise ValueError(f"a tour needs at least 3 nodes, got {len(seq)}")
        if sorted(seq) != list(range(1, len(seq) + 1)):
            raise ValueError("tour is not a permutation of 1..n")
        i = seq.index(1)
        rotated = seq[i:] + seq[:i]
        if rotated.index(2) > rotated.index(3):
            rotated = [1] + rotated[:0:-1]
        return cls(tuple(rotated))

    @property
    def n(self) -> int:
        return len(self.order)

    @cached_property
    def edges(self) -> frozenset[CycleEdge]:
        return frozenset(self.positive_edges())

    def positive_edges(self) -> list[CycleEdge]:
        """The n cycle-edges in positive direction from node 1."""
        order = self.order
        n = len(order)
        return [edge(order[i], order[(i + 1) % n]) for i in range(n)]

    def neighbors(self, v: int) -> tuple[int, int]:
        """The two cycle-neighbors of v, as (previous, next) in positive direction."""
        i = self.order.index(v)
        n = len(self.order)
        return self.order[i - 1], self.order[(i + 1) % n]

    def __str__(self) -> str:
        return " ".join(str(x) for x in self.order)


@dataclasses.dataclass(frozen=True)
class InsertionHistory:
    """The edge each node subdivided: nu[k - 4] is the cycle-edge node k split.

    Entries cover k = 4..N contiguously. Construction checks only the cheap
    per-entry conditions (endpoints distinct, below k); whether each edge is
    actually present at insertion time is checked by replay_history.
    """

    nu: tuple[CycleEdge, ...]

    def __post_init__(self):
        entries = []
        for i, e in enumerate(self.nu):
            k = i + 4
            u, v = e
            e = edge(int(u), int(v))
            if e[0] < 1 or e[1] >= k:
                raise HistoryError(k, f"edge {e} endpoints must lie in 1..{k - 1}")
            entries.append(e)
        if len(entries) + 3 > MAX_NODES:
            raise ValueError(f"node count {len(entries) + 3} exceeds the {MAX_NODES} ceiling")
        object.__setattr__(self, "nu", tuple(entries))

    @classmethod
    def from_mapping(cls, mapping) -> "InsertionHistory":
        """Build from {k: (i, j)}; keys must be exactly 4..N."""
        if not mapping:
            return cls(())
        keys = sorted(int(k) for k in mapping)
        if keys != list(range(4, keys[-1] + 1)):
            raise ValueError(f"history keys must cover 4..N contiguously, got {keys}")
        return cls(tuple(tuple(mapping[k]) for k in keys))

    @property
    def last_node(self) -> int:
        """N, the label of the newest inserted node (3 for the empty history)."""
        return len(self.nu) + 3

    def edge_of(self, k: int) -> CycleEdge:
        """nu(k) for an actually inserted node, k >= 4."""
        if not 4 <= k <= self.last_node:
            raise ValueError(f"node {k} not in this history (4..{self.last_node})")
        return self.nu[k - 4]

    def nu_set(self, k: int) -> frozenset[int]:
        """nu(k) as a node set, with the fixed values for k <= 3.

        nu(3) = {1, 2}, nu(2) = {1}, nu(1) = {}. These make the edge rules
        total; they are what blocks type-2 edges whose anchor is 2 or 3.
        """
        if k >= 4:
            return frozenset(self.edge_of(k))
        if k == 3:
            return frozenset((1, 2))
        if k == 2:
            return frozenset((1,))
        if k == 1:
            return frozenset()
        raise ValueError(f"node {k} out of range")

    @cached_property
    def inserter(self) -> dict[CycleEdge, int]:
        """Map each subdivided edge to its inserter; a pair is split at most once."""
        out: dict[CycleEdge, int] = {}
        for i, e in enumerate(self.nu):
            if e in out:
                raise HistoryError(i + 4, f"edge {e} was already subdivided by node {out[e]}")
            out[e] = i + 4
        return out

    def prefix(self, n: int) -> "InsertionHistory":
        """The history truncated to nodes <= n."""
        if not 3 <= n <= self.last_node:
            raise ValueError(f"prefix length {n} not in 3..{self.last_node}")
        return InsertionHistory(self.nu[: n - 3])

    def extended(self, e: CycleEdge) -> "InsertionHistory":
        return InsertionHistory(self.nu + (edge(*e),))


def _replay_links(history: InsertionHistory, n: int):
    """Replay to time n; returns (nxt, prv) arrays oriented 1 -> 2 -> 3."""
    if not 3 <= n <= history.last_node:
        raise ValueError(f"replay horizon {n} not in 3..{history.last_node}")
    nxt = [0] * (n + 1)
    prv = [0] * (n + 1)
    nxt[1], nxt[2], nxt[3] = 2, 3, 1
    prv[1], prv[2], prv[3] = 3, 1, 2
    for k in range(4, n + 1):
        u, v = history.edge_of(k)
        if nxt[u] == v:
            a, b = u, v
        elif nxt[v] == u:
            a, b = v, u
        else:
            raise HistoryError(k, f"edge ({u}, {v}) is not in the cycle at time {k - 1}")
        nxt[a], nxt[k], prv[k], prv[b] = k, b, a, k
    return nxt, prv


def replay_history(history: InsertionHistory, n: int | None = None) -> Tour:
    """Grow the cycle (1,2,3) by the recorded insertions, up to node n."""
    if n is None:
        n = history.last_node
    nxt, _ = _replay_links(history, n)
    order = [1]
    v = nxt[1]
    while v != 1:
        order.append(v)
        v = nxt[v]
    # The base orientation 1 -> 2 -> 3 is positive and insertion keeps it.
    return Tour(tuple(order))


def decode_tour(tour: Tour) -> InsertionHistory:
    """Read the insertion history off a tour by peeling n, n-1, ..., 4."""
    n = tour.n
    nxt = [0] * (n + 1)
    prv = [0] * (n + 1)
    order = tour.order
    for i, v in enumerate(order):
        w = order[(i + 1) % n]
        nxt[v] = w
        prv[w] = v
    nu = []
    for k in range(n, 3, -1):
        u, v = prv[k], nxt[k]
        nu.append(edge(u, v))
        nxt[u] = v
        prv[v] = u
    nu.reverse()
    return InsertionHistory(tuple(nu))


def nu_of(history: InsertionHistory, k: int) -> tuple[int | None, int | None]:
    """(negative neighbor, positive neighbor) of k at its insertion time.

    The positive neighbor is the node that follows k, walking positive, in the
    cycle at time k. Fixed values: k=3 -> (2, 1), k=2 -> (1, 1), k=1 -> (None, None).
    """
    if k == 1:
        return (None, None)
    if k == 2:
        return (1, 1)
    if k == 3:
        return (2, 1)
    if not 4 <= k <= history.last_node:
        raise ValueError(f"node {k} not in this history (1..{history.last_node})")
    nxt, prv = _replay_links(history, k)
    return (prv[k], nxt[k])


def segment_between(tour: Tour, i: int, j: int) -> tuple[int, ...]:
    """The open arc between i and j that avoids min({1,2,3} - {i,j}).

    Returned in positive traversal order. Empty iff i and j are adjacent.
    """
    if i == j:
        raise ValueError(f"segment endpoints must differ, got {i} and {j}")
    n = tour.n
    if not (1 <= i <= n and 1 <= j <= n):
        raise ValueError(f"nodes {i}, {j} must lie in 1..{n}")
    ref = min({1, 2, 3} - {i, j})
    pos = {v: idx for idx, v in enumerate(tour.order)}
    order = tour.order

    def arc(frm: int, to: int) -> tuple[int, ...]:
        out = []
        idx = (pos[frm] + 1) % n
        while order[idx] != to:
            out.append(order[idx])
            idx = (idx + 1) % n
        return tuple(out)

    first = arc(i, j)
    if ref in first:
        return arc(j, i)
    return first


def find_inserter(tour: Tour, e: CycleEdge) -> int | None:
    """The node n with nu(n) = e, read off the tour itself.

    Exists iff the segment between e's endpoints is nonempty and all of it
    exceeds both endpoints; the inserter is then the segment minimum.
    """
    u, v = edge(*e)
    seg = segment_between(tour, u, v)
    if seg and min(seg) > v:
        return min(seg)
    return None


def edge_at_index(tour: Tour, k: int) -> CycleEdge:
    """The k-th cycle-edge, 1-based, counting positive from node 1."""
    n = tour.n
    if not 1 <= k <= n:
        raise ValueError(f"edge index {k} not in 1..{n}")
    return edge(tour.order[k - 1], tour.order[k % n])


def sample_uniform_history(rng: np.random.Generator, n: int) -> InsertionHistory:
    """Insert each of 4..n into a uniformly random current cycle-edge.

    The replayed tour is then uniform over all (n-1)!/2 cycles on {1..n}.
    """
    if n < 3:
        raise ValueError(f"need n >= 3, got {n}")
    if n > MAX_NODES:
        raise ValueError(f"node count {n} exceeds the {MAX_NODES} ceiling")
    slots = [(1, 2), (2, 3), (1, 3)]
    nu = []
    for m in range(4, n + 1):
        j = int(rng.integers(0, m - 1))
        u, v = slots[j]
        nu.append((u, v))
        slots[j] = (u, m)
        slots.append((v, m))
    return InsertionHistory(tuple(nu))


def enumerate_histories(n: int):
    """Yield every insertion history through n, in slot-lexicographic order."""
    if n < 3:
        raise ValueError(f"need n >= 3, got {n}")

    slots = [(1, 2), (2, 3), (1, 3)]
    nu: list[CycleEdge] = []

    def rec(m: int):
        if m > n:
            yield InsertionHistory(tuple(nu))
            return
        for j in range(m - 1):
            u, v = slots[j]
            nu.append((u, v))
            slots[j] = (u, m)
            slots.append((v, m))
            yield from rec(m + 1)
            slots.pop()
            slots[j] = (u, v)
            nu.pop()

    yield from rec(4)


def enumerate_canonical_tours(n: int):
    """Yield all (n-1)!/2 canonical tours on {1..n}."""
    import itertools

    if n < 3:
        raise ValueError(f"need n >= 3, got {n}")
    rest = list(range(2, n + 1))
    for perm in itertools.permutations(rest):
        if perm.index(2) < perm.index(3):
            yield Tour((1,) + perm)


# ---------------------------------------------------------------------------
# Text formats. Tours: whitespace-separated labels, one tour per line.
# Histories: lines "n: i j" for n = 4..N.

def parse_tour_text(text: str) -> Tour:
    tokens = text.split()
    if not tokens:
        raise ValueError("empty tour text")
    seq = []
    for pos, tok in enumerate(tokens, start=1):
        try:
            seq.append(int(tok))
        except ValueError:
            raise ValueError(f"token {pos}: {tok!r} is not a node label") from None
    return Tour.from_cycle(seq)


def format_tour(tour: Tour) -> str:
    return str(tour)


def parse_history_text(text: str) -> InsertionHistory:
    mapping = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        head, sep, tail = line.partition(":")
        if not sep:
            raise ValueError(f"line {lineno}: expected 'n: i j', got {raw!r}")
        try:
            k = int(head)
            u, v = tail.split()
            entry = (int(u), int(v))
        except ValueError:
            raise ValueError(f"line {lineno}: expected 'n: i j', got {raw!r}") from None
        if k in mapping:
            raise ValueError(f"line {lineno}: node {k} listed twice")
        mapping[k] = entry
    if not mapping:
        raise ValueError("empty history text")
    return InsertionHistory.from_mapping(mapping)


def format_history(history: InsertionHistory) -> str:
    return "\n".join(
        f"{k}: {u} {v}" for k, (u, v) in enumerate(history.nu, start=4)
    )
