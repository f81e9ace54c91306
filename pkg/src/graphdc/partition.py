"""Modularity-driven decomposition of a graph into bounded-size subgraphs.

The splitter grows communities by greedy agglomerative modularity merging
(always taking the largest positive gain, ties to the lowest community pair),
recursively subdivides any community that exceeds the size cap, and folds
leftover singleton nodes into their best neighboring community. Everything is
a pure function of its input: no randomness, ties broken by lowest id.
"""

from __future__ import annotations

from dataclasses import dataclass
from heapq import heappop, heappush
from typing import Iterable, Mapping, Optional

from .graphs import Edge, Graph, bfs_hops, canonical_edge, neighbor_map

DEFAULT_MAX_SUBGRAPH_SIZE = 25


@dataclass(frozen=True)
class Subgraph:
    """One block of a decomposition, keeping the original node labels.

    ``exit_nodes`` are exactly the nodes with at least one edge into another
    subgraph; ``weights`` restricts the parent graph's weight map to the
    internal edges (None when the parent is unweighted).
    """

    id: int
    nodes: frozenset[int]
    internal_edges: frozenset[Edge]
    exit_nodes: frozenset[int]
    weights: Optional[dict[Edge, int]] = None

    def induced_graph(self) -> Graph:
        """The internal structure as a standalone :class:`Graph`.

        Labels are preserved, so the node count is one past the largest
        member; indices below it that are not members are simply isolated.
        """
        node_count = max(self.nodes) + 1 if self.nodes else 0
        return Graph(node_count, self.internal_edges, self.weights)


@dataclass(frozen=True)
class Decomposition:
    """A partition of a graph plus the edges that cross between its blocks."""

    partition: dict[int, int]
    subgraphs: tuple[Subgraph, ...]
    inter_edges: frozenset[Edge]
    inter_weights: Optional[dict[Edge, int]] = None

    @property
    def weighted(self) -> bool:
        return self.inter_weights is not None


# ----------------------------------------------------------------------------
# Modularity
# ----------------------------------------------------------------------------


def modularity(g: Graph, partition: Mapping[int, int]) -> float:
    """Newman modularity of a node-to-community map, unweighted adjacency.

    Q = (1/2m) * sum_ij [A_ij - k_i k_j / 2m] * delta(c_i, c_j), computed via
    the equivalent per-community form. Rejects edgeless graphs (the
    denominator vanishes).
    """
    if not g.edges:
        raise ValueError("modularity is undefined for an edgeless graph")
    if set(partition) != set(range(g.node_count)):
        raise ValueError("partition must assign every node exactly once")
    m = len(g.edges)
    degree = [0] * g.node_count
    intra: dict[int, int] = {}
    for u, v in g.edges:
        degree[u] += 1
        degree[v] += 1
        if partition[u] == partition[v]:
            intra[partition[u]] = intra.get(partition[u], 0) + 1
    degree_sum: dict[int, int] = {}
    for v in range(g.node_count):
        c = partition[v]
        degree_sum[c] = degree_sum.get(c, 0) + degree[v]
    two_m = 2.0 * m
    return sum(intra.get(c, 0) / m - (d / two_m) ** 2 for c, d in degree_sum.items())


# ----------------------------------------------------------------------------
# Greedy agglomerative merging
# ----------------------------------------------------------------------------


def _greedy_merge(
    nodes: Iterable[int],
    edges: Iterable[Edge],
    stop_count: Optional[int] = None,
) -> list[set[int]]:
    """Merge singleton communities bottom-up by modularity gain.

    With ``stop_count=None`` merging stops when no pair has a strictly
    positive gain (the profitability test ``2*m*l > d_a*d_b`` is evaluated in
    exact integer arithmetic). With ``stop_count=k`` merging continues, best
    gain first regardless of sign, until exactly k communities remain; this
    is the forced-bisection mode used to cut an unsplittable community.

    Returns the communities as sets, ordered by their smallest member. Each
    community is identified throughout by its smallest member, which is what
    the tie-break "lowest pair wins" refers to.
    """
    members: dict[int, set[int]] = {v: {v} for v in nodes}
    edges = list(edges)
    m = len(edges)
    degree: dict[int, int] = {v: 0 for v in members}
    links: dict[int, dict[int, int]] = {v: {} for v in members}
    for u, v in edges:
        degree[u] += 1
        degree[v] += 1
        links[u][v] = links[u].get(v, 0) + 1
        links[v][u] = links[v].get(u, 0) + 1

    version: dict[int, int] = {v: 0 for v in members}
    heap: list[tuple[float, int, int, int, int]] = []

    def push(a: int, b: int) -> None:
        gain = links[a][b] / m - degree[a] * degree[b] / (2.0 * m * m)
        heappush(heap, (-gain, a, b, version[a], version[b]))

    def merge(a: int, b: int) -> None:
        # a < b, so a remains the smallest member of the union
        members[a] |= members.pop(b)
        degree[a] += degree.pop(b)
        version[a] += 1
        version[b] += 1
        la = links[a]
        lb = links.pop(b)
        la.pop(b, None)
        for x, cnt in lb.items():
            if x == a:
                continue
            la[x] = la.get(x, 0) + cnt
            lx = links[x]
            lx.pop(b, None)
            lx[a] = la[x]
        for x in la:
            push(*(a, x) if a < x else (x, a))

    if m > 0:
        for a in sorted(members):
            for b in links[a]:
                if a < b:
                    push(a, b)

    target = stop_count if stop_count is not None else 1
    while len(members) > target:
        pair = None
        while heap:
            _negg, a, b, va, vb = heappop(heap)
            if version.get(a) != va or version.get(b) != vb or b not in links.get(a, {}):
                continue
            if stop_count is None and 2 * m * links[a][b] <= degree[a] * degree[b]:
                # True gain <= 0. Safe to discard: the pair's gain only
                # changes when one side merges, which pushes a fresh entry.
                continue
            pair = (a, b)
            break
        if pair is None:
            if stop_count is None:
                break
            reps = sorted(members)
            if len(reps) < 2:
                break
            pair = (reps[0], reps[1])  # disconnected leftovers, lowest ids first
        merge(*pair)

    return sorted((members[rep] for rep in members), key=min)


def _edges_within(edges: Iterable[Edge], block: set[int]) -> list[Edge]:
    return [e for e in edges if e[0] in block and e[1] in block]


def _subdivide(block: set[int], edges: list[Edge], cap: int) -> list[set[int]]:
    """Re-run the splitter on an oversized community until every piece fits."""
    if len(block) <= cap:
        return [set(block)]
    if not edges:
        ordered = sorted(block)
        return [set(ordered[i : i + cap]) for i in range(0, len(ordered), cap)]
    parts = _greedy_merge(block, edges)
    if len(parts) == 1:
        # The community is its own modularity optimum; force a two-way cut by
        # continuing the merge sequence on its dendrogram.
        parts = _greedy_merge(block, edges, stop_count=2)
    out: list[set[int]] = []
    for part in parts:
        out.extend(_subdivide(part, _edges_within(edges, part), cap))
    return out


def _merge_singletons(blocks: list[set[int]], adj: Mapping[int, list[int]], cap: int) -> list[set[int]]:
    """Fold single-node blocks into the neighboring block with most adjacent
    edges (ties to the block holding the lowest node id), unless every
    candidate is already at the size cap. Isolated nodes stay singletons."""
    block_of = {v: i for i, b in enumerate(blocks) for v in b}
    for v in sorted(block_of):
        i = block_of[v]
        if len(blocks[i]) != 1:
            continue
        counts: dict[int, int] = {}
        for w in adj[v]:
            j = block_of[w]
            if j != i:
                counts[j] = counts.get(j, 0) + 1
        eligible = [(j, c) for j, c in counts.items() if len(blocks[j]) < cap]
        if not eligible:
            continue
        j = min(eligible, key=lambda jc: (-jc[1], min(blocks[jc[0]])))[0]
        blocks[j].add(v)
        blocks[i].clear()
        block_of[v] = j
    return [b for b in blocks if b]


# ----------------------------------------------------------------------------
# The splitter and its inverse
# ----------------------------------------------------------------------------


def split(g: Graph, max_subgraph_size: int = DEFAULT_MAX_SUBGRAPH_SIZE) -> Decomposition:
    """Partition g into subgraphs of at most ``max_subgraph_size`` nodes.

    Greedy modularity merging finds the communities; oversized ones are
    subdivided recursively; leftover singletons join their busiest neighbor
    block. Deterministic for a given graph. Two degenerate inputs shortcut
    the machinery: an edgeless graph chunks into consecutive node ranges, and
    a connected graph that already fits the cap stays one subgraph (there is
    nothing to gain by decomposing it).
    """
    if not isinstance(max_subgraph_size, int) or max_subgraph_size < 2:
        raise ValueError(f"max_subgraph_size must be an integer >= 2, got {max_subgraph_size!r}")
    n = g.node_count
    if n == 0:
        return decompose_with_partition(g, {})
    if not g.edges:
        return decompose_with_partition(g, {v: v // max_subgraph_size for v in range(n)})
    adj = neighbor_map(range(n), g.edges)
    if n <= max_subgraph_size and len(bfs_hops(adj, 0)) == n:
        return decompose_with_partition(g, {v: 0 for v in range(n)})

    blocks: list[set[int]] = []
    for community in _greedy_merge(range(n), g.edges):
        blocks.extend(_subdivide(community, _edges_within(g.edges, community), max_subgraph_size))
    blocks = _merge_singletons(blocks, adj, max_subgraph_size)

    mapping: dict[int, int] = {}
    for label, block in enumerate(sorted(blocks, key=min)):
        for v in block:
            mapping[v] = label
    return decompose_with_partition(g, mapping)


def decompose_with_partition(g: Graph, partition: Mapping[int, int]) -> Decomposition:
    """Build a full :class:`Decomposition` from an explicit block assignment.

    This is the assembly step behind :func:`split`; alternative splitters can
    plug in here with any node-to-label map. Blocks are renumbered 0..K-1 in
    order of their smallest node.
    """
    if set(partition) != set(range(g.node_count)):
        raise ValueError("partition must assign every node of the graph exactly once")
    groups: dict[int, list[int]] = {}
    for v in range(g.node_count):
        groups.setdefault(partition[v], []).append(v)
    ordered = sorted(groups.values(), key=min)

    sid_of: dict[int, int] = {}
    for sid, nodes in enumerate(ordered):
        for v in nodes:
            sid_of[v] = sid

    internal: list[set[Edge]] = [set() for _ in ordered]
    inter: set[Edge] = set()
    for e in g.edges:
        u, v = e
        if sid_of[u] == sid_of[v]:
            internal[sid_of[u]].add(e)
        else:
            inter.add(e)

    exits: list[set[int]] = [set() for _ in ordered]
    for u, v in inter:
        exits[sid_of[u]].add(u)
        exits[sid_of[v]].add(v)

    subgraphs = []
    for sid, nodes in enumerate(ordered):
        weights = None
        if g.weighted:
            weights = {e: g.weights[e] for e in internal[sid]}
        subgraphs.append(
            Subgraph(sid, frozenset(nodes), frozenset(internal[sid]), frozenset(exits[sid]), weights)
        )
    inter_weights = {e: g.weights[e] for e in inter} if g.weighted else None
    return Decomposition(dict(sid_of), tuple(subgraphs), frozenset(inter), inter_weights)


def reconstruct(d: Decomposition) -> Graph:
    """Reassemble the original graph from a decomposition.

    Validates the decomposition invariants in a fixed order and reports the
    first violation; on consistent input the union of all internal edges and
    the inter-subgraph edges over the union of node sets equals the original
    graph exactly.
    """
    for i, sub in enumerate(d.subgraphs):
        if sub.id != i:
            raise ValueError(f"subgraph ids must be 0..{len(d.subgraphs) - 1} in order, found {sub.id} at {i}")

    seen_edges: set[Edge] = set()
    for sub in d.subgraphs:
        for e in sub.internal_edges:
            if e in seen_edges:
                raise ValueError(f"edge multiply assigned: {e}")
            seen_edges.add(e)
    for e in d.inter_edges:
        e = canonical_edge(*e)
        if e in seen_edges:
            raise ValueError(f"edge multiply assigned: {e}")
        seen_edges.add(e)

    node_union: set[int] = set()
    for sub in d.subgraphs:
        overlap = node_union & sub.nodes
        if overlap:
            raise ValueError(f"subgraph node sets overlap at {sorted(overlap)[0]}")
        node_union |= sub.nodes
    if node_union != set(range(len(node_union))):
        raise ValueError("subgraph node sets do not cover a contiguous 0-based range")
    if d.partition != {v: sid for sid, sub in enumerate(d.subgraphs) for v in sub.nodes}:
        raise ValueError("partition map disagrees with subgraph membership")

    for sub in d.subgraphs:
        for u, v in sub.internal_edges:
            if u not in sub.nodes or v not in sub.nodes:
                raise ValueError(f"internal edge ({u},{v}) leaves subgraph {sub.id}")

    incident: dict[int, set[int]] = {}
    for u, v in d.inter_edges:
        if u not in d.partition or v not in d.partition:
            raise ValueError(f"inter edge ({u},{v}) names an unknown node")
        if d.partition[u] == d.partition[v]:
            raise ValueError(f"inter edge ({u},{v}) stays inside subgraph {d.partition[u]}")
        incident.setdefault(d.partition[u], set()).add(u)
        incident.setdefault(d.partition[v], set()).add(v)
    for sub in d.subgraphs:
        if sub.exit_nodes != frozenset(incident.get(sub.id, set())):
            raise ValueError(f"exit nodes of subgraph {sub.id} do not match its inter edges")

    has_weights = [sub.weights is not None for sub in d.subgraphs] + [d.inter_weights is not None]
    weights: Optional[dict[Edge, int]] = None
    if any(has_weights):
        if not all(has_weights):
            raise ValueError("weights must be carried by every subgraph and the inter edges, or none")
        weights = dict(d.inter_weights)
        for sub in d.subgraphs:
            weights.update(sub.weights)
    return Graph(len(node_union), frozenset(seen_edges), weights)


def render_decomposition_text(d: Decomposition) -> str:
    """Serialize a decomposition as the audit-log text record (ASCII, LF)."""
    weighted = d.weighted

    def edge_line(e: Edge, w: Optional[dict[Edge, int]]) -> str:
        return f"({e[0]},{e[1]},{w[e]})" if weighted else f"({e[0]},{e[1]})"

    lines = [f"decomposition: {len(d.subgraphs)} subgraphs, {len(d.inter_edges)} inter edges"]
    for sub in d.subgraphs:
        nodes = ",".join(str(v) for v in sorted(sub.nodes))
        exits = ",".join(str(v) for v in sorted(sub.exit_nodes))
        lines.append(f"subgraph {sub.id}: nodes=[{nodes}]; exits=[{exits}]")
        for e in sorted(sub.internal_edges):
            lines.append(edge_line(e, sub.weights))
    lines.append("inter edges:")
    for e in sorted(d.inter_edges):
        lines.append(edge_line(e, d.inter_weights))
    return "\n".join(lines) + "\n"
