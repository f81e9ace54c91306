"""Undirected graphs, queries, exact solvers, and the text wire format.

Everything downstream (decomposition, agents, benchmark generation) works in
terms of the immutable :class:`Graph` defined here. Node indices are always
0-based and dense; edges are unordered pairs with optional positive integer
weights.
"""

from __future__ import annotations

import math
import random
import re
from collections import deque
from dataclasses import dataclass
from enum import Enum
from heapq import heappop, heappush
from typing import Iterable, Mapping, Optional, Sequence

Edge = tuple[int, int]

#: Hard ceiling on graph size; the engine is not designed for larger inputs.
MAX_NODES = 10_000

#: Integer weight range for weighted graph generation, inclusive.
WEIGHT_RANGE = (1, 10)

#: Number of seeded candidate pairs examined by :func:`pick_far_pair`.
FAR_PAIR_CANDIDATES = 64


class Task(str, Enum):
    """The four reasoning tasks the engine answers."""

    CONNECTIVITY = "connectivity"
    CYCLE = "cycle"
    SHORTEST_PATH = "shortest_path"
    TRIANGLE_COUNT = "triangle_count"

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return self.value


class _Unreachable(Enum):
    TOKEN = "unreachable"

    def __repr__(self) -> str:
        return "unreachable"


#: Distinguished "no path exists" value for shortest-path answers. Never an
#: integer sentinel, so it can't be confused with a real distance.
UNREACHABLE = _Unreachable.TOKEN



class AnswerKind(str, Enum):
    YES_NO = "yes_no"
    DISTANCE = "distance"
    COUNT = "count"


ANSWER_KIND_FOR_TASK = {
    Task.CONNECTIVITY: AnswerKind.YES_NO,
    Task.CYCLE: AnswerKind.YES_NO,
    Task.SHORTEST_PATH: AnswerKind.DISTANCE,
    Task.TRIANGLE_COUNT: AnswerKind.COUNT,
}


class GenerationError(RuntimeError):
    """Raised when a sampling budget is exhausted during instance generation."""


def canonical_edge(u: int, v: int) -> Edge:
    """Return the unordered pair (u, v) in (min, max) form."""
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    """Immutable undirected graph over nodes ``0 .. node_count-1``.

    ``weights`` is present exactly when the graph is weighted; it then maps
    every edge to an integer weight >= 1.
    """

    node_count: int
    edges: frozenset[Edge]
    weights: Optional[dict[Edge, int]] = None

    def __post_init__(self) -> None:
        if not isinstance(self.node_count, int) or self.node_count < 0:
            raise ValueError(f"node_count must be a non-negative int, got {self.node_count!r}")
        if self.node_count > MAX_NODES:
            raise ValueError(f"graphs beyond {MAX_NODES} nodes are unsupported")
        normalized = set()
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"self-loop ({u},{v}) is not allowed")
            if not (0 <= u < self.node_count and 0 <= v < self.node_count):
                raise ValueError(f"edge ({u},{v}) out of range for {self.node_count} nodes")
            normalized.add(canonical_edge(u, v))
        object.__setattr__(self, "edges", frozenset(normalized))
        if self.weights is not None:
            weights = {canonical_edge(u, v): w for (u, v), w in self.weights.items()}
            if set(weights) != normalized:
                raise ValueError("weights must cover every edge exactly once")
            for e, w in weights.items():
                if not isinstance(w, int) or w < 1:
                    raise ValueError(f"weight of edge {e} must be an integer >= 1, got {w!r}")
            object.__setattr__(self, "weights", weights)

    @property
    def weighted(self) -> bool:
        return self.weights is not None

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)

    def edge_weight(self, u: int, v: int) -> int:
        """Weight of edge (u, v); 1 for unweighted graphs."""
        e = canonical_edge(u, v)
        if e not in self.edges:
            raise KeyError(f"no edge {e}")
        return 1 if self.weights is None else self.weights[e]


@dataclass(frozen=True)
class Query:
    """A reasoning question over a graph.

    Connectivity and shortest-path questions name a (source, target) pair;
    cycle and triangle questions carry no endpoints.
    """

    task: Task
    source: Optional[int] = None
    target: Optional[int] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "task", Task(self.task))
        if self.task in (Task.CONNECTIVITY, Task.SHORTEST_PATH):
            if self.source is None or self.target is None:
                raise ValueError(f"{self.task.value} queries require source and target")
            if self.source == self.target:
                raise ValueError("source and target must differ")
        else:
            if self.source is not None or self.target is not None:
                raise ValueError(f"{self.task.value} queries carry no endpoints")

    @property
    def answer_kind(self) -> AnswerKind:
        return ANSWER_KIND_FOR_TASK[self.task]


@dataclass(frozen=True)
class Answer:
    """A task answer: yes/no, an exact distance (or UNREACHABLE), or a count."""

    kind: AnswerKind
    value: "bool | int | _Unreachable"

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", AnswerKind(self.kind))
        v = self.value
        if self.kind is AnswerKind.YES_NO and not isinstance(v, bool):
            raise ValueError(f"yes/no answer needs a bool, got {v!r}")
        if self.kind is AnswerKind.DISTANCE:
            if v is not UNREACHABLE and (isinstance(v, bool) or not isinstance(v, int) or v < 0):
                raise ValueError(f"distance must be a non-negative int or UNREACHABLE, got {v!r}")
        if self.kind is AnswerKind.COUNT:
            if isinstance(v, bool) or not isinstance(v, int) or v < 0:
                raise ValueError(f"count must be a non-negative int, got {v!r}")

    @classmethod
    def yes_no(cls, value: bool) -> "Answer":
        return cls(AnswerKind.YES_NO, value)

    @classmethod
    def distance(cls, value: "int | _Unreachable") -> "Answer":
        return cls(AnswerKind.DISTANCE, value)

    @classmethod
    def count(cls, value: int) -> "Answer":
        return cls(AnswerKind.COUNT, value)

    def render(self) -> str:
        """Canonical single-token form: yes, no, an integer, or unreachable."""
        if self.kind is AnswerKind.YES_NO:
            return "yes" if self.value else "no"
        if self.value is UNREACHABLE:
            return "unreachable"
        return str(self.value)

    @classmethod
    def parse(cls, token: str, task: Task) -> "Answer":
        """Inverse of :meth:`render` for a given task."""
        kind = ANSWER_KIND_FOR_TASK[Task(task)]
        token = token.strip()
        if kind is AnswerKind.YES_NO:
            if token == "yes":
                return cls.yes_no(True)
            if token == "no":
                return cls.yes_no(False)
        elif kind is AnswerKind.DISTANCE:
            if token == "unreachable":
                return cls.distance(UNREACHABLE)
            if re.fullmatch(r"\d+", token):
                return cls.distance(int(token))
        else:
            if re.fullmatch(r"\d+", token):
                return cls.count(int(token))
        raise ValueError(f"cannot parse {token!r} as a {kind.value} answer")


class DisjointSet:
    """Union-find with path compression and union by size."""

    def __init__(self, elements: Iterable = ()) -> None:
        self._parent: dict = {}
        self._size: dict = {}
        for e in elements:
            self.add(e)

    def add(self, e) -> None:
        if e not in self._parent:
            self._parent[e] = e
            self._size[e] = 1

    def find(self, e):
        self.add(e)
        root = e
        while self._parent[root] != root:
            root = self._parent[root]
        while self._parent[e] != root:
            self._parent[e], e = root, self._parent[e]
        return root

    def union(self, a, b) -> bool:
        """Merge the sets of a and b; return False if already joined."""
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self._size[ra] < self._size[rb]:
            ra, rb = rb, ra
        self._parent[rb] = ra
        self._size[ra] += self._size[rb]
        return True

    def same(self, a, b) -> bool:
        return self.find(a) == self.find(b)


# ----------------------------------------------------------------------------
# Generic traversal helpers, shared by the oracle, the local agents, and the
# synthesis stage. All of them accept arbitrary integer node ids so they work
# on subgraphs that keep their original labels.
# ----------------------------------------------------------------------------


def adjacency_map(
    nodes: Iterable[int],
    edges: Iterable[Edge],
    weights: Optional[Mapping[Edge, int]] = None,
) -> dict[int, list[tuple[int, int]]]:
    """Weighted adjacency (weight 1 when no weight map is given)."""
    adj: dict[int, list[tuple[int, int]]] = {v: [] for v in nodes}
    for u, v in edges:
        w = 1 if weights is None else weights[canonical_edge(u, v)]
        adj[u].append((v, w))
        adj[v].append((u, w))
    return adj


def neighbor_map(nodes: Iterable[int], edges: Iterable[Edge]) -> dict[int, list[int]]:
    adj: dict[int, list[int]] = {v: [] for v in nodes}
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    return adj


def bfs_hops(adj: Mapping[int, Sequence[int]], source: int) -> dict[int, int]:
    """Hop distance from source to every reachable node."""
    dist = {source: 0}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def dijkstra(adj: Mapping[int, Sequence[tuple[int, int]]], source: int) -> dict[int, int]:
    """Weighted distance from source to every reachable node (weights >= 0)."""
    dist: dict[int, int] = {}
    heap: list[tuple[int, int]] = [(0, source)]
    while heap:
        d, u = heappop(heap)
        if u in dist:
            continue
        dist[u] = d
        for v, w in adj.get(u, ()):
            if v not in dist:
                heappush(heap, (d + w, v))
    return dist


def connected_components(nodes: Iterable[int], edges: Iterable[Edge]) -> list[tuple[int, ...]]:
    """Components as sorted tuples, ordered by their smallest node."""
    adj = neighbor_map(nodes, edges)
    seen: set[int] = set()
    comps = []
    for start in sorted(adj):
        if start in seen:
            continue
        comp = []
        queue = deque([start])
        seen.add(start)
        while queue:
            u = queue.popleft()
            comp.append(u)
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
        comps.append(tuple(sorted(comp)))
    return comps


def count_triangles(nodes: Iterable[int], edges: Iterable[Edge]) -> int:
    """Exact number of 3-cliques among the given edges."""
    nbrs: dict[int, set[int]] = {v: set() for v in nodes}
    for u, v in edges:
        nbrs[u].add(v)
        nbrs[v].add(u)
    total = 0
    for u, v in edges:
        a, b = canonical_edge(u, v)
        for w in nbrs[a] & nbrs[b]:
            if w > b:
                total += 1
    return total


def has_cycle(nodes: Iterable[int], edges: Iterable[Edge]) -> bool:
    """True iff some connected component has at least as many edges as nodes."""
    comp_of: dict[int, int] = {}
    comps = connected_components(nodes, edges)
    for i, comp in enumerate(comps):
        for v in comp:
            comp_of[v] = i
    edge_count = [0] * len(comps)
    for u, _v in edges:
        edge_count[comp_of[u]] += 1
    return any(edge_count[i] >= len(comps[i]) for i in range(len(comps)))


# ----------------------------------------------------------------------------
# Random instance generation
# ----------------------------------------------------------------------------


def gen_random_graph(
    size_band: tuple[int, int],
    edge_density: float,
    weighted: bool,
    seed: int,
) -> Graph:
    """Sample a simple graph with ``round(edge_density * n)`` edges.

    The node count is uniform over the inclusive ``size_band``; edges are
    repeated uniform draws with duplicates and self-loops resampled, clamped
    to the number of available pairs. Weighted graphs draw integer weights
    uniformly from ``WEIGHT_RANGE``. Identical arguments reproduce an
    identical graph.
    """
    lo, hi = size_band
    if lo < 2:
        raise ValueError(f"size band lower bound must be >= 2, got {lo}")
    if hi < lo:
        raise ValueError(f"empty size band {size_band}")
    if hi > MAX_NODES:
        raise ValueError(f"size band exceeds the {MAX_NODES}-node ceiling")
    if edge_density <= 0:
        raise ValueError(f"edge_density must be positive, got {edge_density}")

    rng = random.Random(seed)
    n = rng.randint(lo, hi)
    target = min(round(edge_density * n), n * (n - 1) // 2)
    edges: set[Edge] = set()
    while len(edges) < target:
        u = rng.randrange(n)
        v = rng.randrange(n)
        if u == v:
            continue
        edges.add(canonical_edge(u, v))
    weights = None
    if weighted:
        weights = {e: rng.randint(*WEIGHT_RANGE) for e in sorted(edges)}
    return Graph(n, frozenset(edges), weights)


def gen_random_forest(size_band: tuple[int, int], edge_fraction: float, seed: int) -> Graph:
    """Sample an acyclic graph with ``round(edge_fraction * (n - 1))`` edges.

    Used for cycle-detection instances that must be labeled "no"; a plain
    density-based draw at benchmark densities is essentially never acyclic.
    """
    lo, hi = size_band
    if lo < 2:
        raise ValueError(f"size band lower bound must be >= 2, got {lo}")
    if not (0 <= edge_fraction <= 1):
        raise ValueError(f"edge_fraction must lie in [0, 1], got {edge_fraction}")

    rng = random.Random(seed)
    n = rng.randint(lo, hi)
    target = round(edge_fraction * (n - 1))
    ds = DisjointSet(range(n))
    edges: set[Edge] = set()
    budget = 500 * n + 1000
    while len(edges) < target:
        if budget <= 0:
            raise GenerationError(f"forest sampling budget exhausted at {len(edges)}/{target} edges")
        budget -= 1
        u = rng.randrange(n)
        v = rng.randrange(n)
        if u == v or canonical_edge(u, v) in edges:
            continue
        if ds.union(u, v):
            edges.add(canonical_edge(u, v))
    return Graph(n, frozenset(edges), None)


def pick_far_pair(g: Graph, rng_seed: int, *, connected_only: bool = False) -> Optional[Edge]:
    """Pick a node pair maximizing hop distance over a seeded candidate sample.

    Unreachable pairs count as infinitely far, so on a disconnected graph the
    result usually spans two components (which is exactly what a "no"
    connectivity instance needs). With ``connected_only=True`` unreachable
    candidates are skipped and None is returned when no sampled pair is
    connected; shortest-path generation uses that to re-draw.
    """
    n = g.node_count
    if n < 2:
        raise ValueError("need at least 2 nodes to pick a pair")
    rng = random.Random(rng_seed)
    adj = neighbor_map(range(n), g.edges)
    candidates: list[Edge] = []
    while len(candidates) < FAR_PAIR_CANDIDATES:
        u = rng.randrange(n)
        v = rng.randrange(n)
        if u != v:
            candidates.append(canonical_edge(u, v))

    hops_from: dict[int, dict[int, int]] = {}
    best: Optional[Edge] = None
    best_dist = -1.0
    for u, v in candidates:
        if u not in hops_from:
            hops_from[u] = bfs_hops(adj, u)
        d = hops_from[u].get(v)
        dist = math.inf if d is None else float(d)
        if connected_only and d is None:
            continue
        if dist > best_dist or (dist == best_dist and (u, v) < best):
            best, best_dist = (u, v), dist
    return best


# ----------------------------------------------------------------------------
# Exact whole-graph solver (ground truth for every task)
# ----------------------------------------------------------------------------


def check_query(g: Graph, q: Query) -> None:
    """Raise ValueError unless q's endpoints are valid node indices of g."""
    for label, node in (("source", q.source), ("target", q.target)):
        if node is not None and not (0 <= node < g.node_count):
            raise ValueError(f"{label} {node} out of range for {g.node_count} nodes")


def oracle_solve(g: Graph, q: Query) -> Answer:
    """Answer q on g with classical exact algorithms.

    Connectivity uses breadth-first reachability; shortest path runs Dijkstra
    with the stored weights (unit weights when unweighted); a cycle exists iff
    some component has at least as many edges as nodes; triangles are counted
    exactly. Deterministic.
    """
    check_query(g, q)
    if q.task is Task.CONNECTIVITY:
        adj = neighbor_map(range(g.node_count), g.edges)
        return Answer.yes_no(q.target in bfs_hops(adj, q.source))
    if q.task is Task.SHORTEST_PATH:
        adj = adjacency_map(range(g.node_count), g.edges, g.weights)
        dist = dijkstra(adj, q.source).get(q.target)
        return Answer.distance(UNREACHABLE if dist is None else dist)
    if q.task is Task.CYCLE:
        return Answer.yes_no(has_cycle(range(g.node_count), g.edges))
    return Answer.count(count_triangles(range(g.node_count), g.edges))


# ----------------------------------------------------------------------------
# Text wire format
# ----------------------------------------------------------------------------

_HEADER_TEMPLATE = "In an undirected {kind}, the nodes are numbered from 0 to {last}, and the edges are:"
_HEADER_RE = re.compile(
    r"^In an undirected (weighted )?graph, the nodes are numbered from 0 to (-?\d+), "
    r"and the edges are:$"
)
_EDGE_RE = re.compile(r"^\((\d+),(\d+)\)$")
_WEDGE_RE = re.compile(r"^\((\d+),(\d+),(\d+)\)$")


def render_graph_text(g: Graph) -> str:
    """Serialize g to the line-oriented ASCII format.

    One header sentence, then one line per edge in ascending order, ``(i,j)``
    or ``(i,j,w)`` for weighted graphs. :func:`parse_graph_text` inverts this
    exactly.
    """
    kind = "weighted graph" if g.weighted else "graph"
    lines = [_HEADER_TEMPLATE.format(kind=kind, last=g.node_count - 1)]
    for u, v in g.sorted_edges():
        if g.weighted:
            lines.append(f"({u},{v},{g.weights[(u, v)]})")
        else:
            lines.append(f"({u},{v})")
    return "\n".join(lines) + "\n"


def parse_graph_text(text: str) -> Graph:
    """Parse the output of :func:`render_graph_text` back into a Graph."""
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise ValueError("empty graph text")
    m = _HEADER_RE.match(lines[0])
    if not m:
        raise ValueError(f"unrecognized graph header: {lines[0]!r}")
    weighted = m.group(1) is not None
    node_count = int(m.group(2)) + 1
    edges: set[Edge] = set()
    weights: dict[Edge, int] = {}
    pattern = _WEDGE_RE if weighted else _EDGE_RE
    for line in lines[1:]:
        em = pattern.match(line)
        if not em:
            raise ValueError(f"unrecognized edge line: {line!r}")
        u, v = int(em.group(1)), int(em.group(2))
        e = canonical_edge(u, v)
        if e in edges:
            raise ValueError(f"duplicate edge line: {line!r}")
        edges.add(e)
        if weighted:
            weights[e] = int(em.group(3))
    return Graph(node_count, frozenset(edges), weights if weighted else None)
