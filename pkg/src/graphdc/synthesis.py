"""Global synthesis: combine per-subgraph answers with the cross edges.

Two routes produce the final answer from the same inputs. The exact route
runs a small composition algebra (union-find over terminal groupings, Dijkstra
over the boundary graph, contraction of cycle-free subgraphs, spanning
triangle enumeration) and is provably equivalent to solving the whole graph.
The LLM route renders the same inputs into a master prompt, asks a chat
backend, and parses the final line; the prompt deliberately contains only the
sub-answers and the inter-subgraph edges, never the full graph.
"""

from __future__ import annotations

from collections import defaultdict
from typing import Iterable, Mapping, Optional, Sequence

from .graphs import (
    UNREACHABLE,
    Answer,
    DisjointSet,
    Edge,
    Query,
    Task,
    canonical_edge,
    dijkstra,
)
from .subanswers import (
    PAYLOAD_KIND_FOR_TASK,
    SubAnswer,
    extract_final,
    final_answer_format_instruction,
    render_payload,
)
from .subqueries import load_master_template, question_sentence


class SynthesisError(RuntimeError):
    pass


class MissingSubAnswer(SynthesisError):
    """A node the synthesis needs is covered by no sub-answer."""


class PayloadKindMismatch(SynthesisError):
    """A sub-answer's payload type does not fit the task being synthesized."""


def _checked(q: Query, subanswers: Sequence[SubAnswer]) -> list[SubAnswer]:
    expected = PAYLOAD_KIND_FOR_TASK[q.task]
    seen_ids = set()
    for sa in subanswers:
        if sa.subgraph_id in seen_ids:
            raise SynthesisError(f"two sub-answers claim subgraph {sa.subgraph_id}")
        seen_ids.add(sa.subgraph_id)
        if not isinstance(sa.payload, expected):
            raise PayloadKindMismatch(
                f"subgraph {sa.subgraph_id} carries {type(sa.payload).__name__}, "
                f"task {q.task.value} needs {expected.__name__}"
            )
    return sorted(subanswers, key=lambda sa: sa.subgraph_id)


def _require_covered(node: int, covered: set[int], role: str) -> None:
    if node not in covered:
        raise MissingSubAnswer(f"{role} node {node} appears in no sub-answer")


def synthesize_exact(
    q: Query,
    subanswers: Sequence[SubAnswer],
    inter_edges: Iterable[Edge],
    inter_weights: Optional[Mapping[Edge, int]] = None,
) -> Answer:
    """Compose the sub-answers and inter-subgraph edges into the final answer.

    Connectivity: union terminals within each reported group, union the
    endpoints of every inter edge, then compare the roots of source and
    target. Shortest path: build the boundary graph whose nodes are the
    terminals, whose local edges carry the reported within-subgraph distances
    and whose remaining edges are the inter edges at original weight, and run
    Dijkstra over it. Cycle: yes if any subgraph has an internal cycle;
    otherwise contract every (subgraph, group) block to a supernode and
    detect an inter edge joining two already-connected supernodes. Triangles:
    the internal counts, plus one triangle per outside node adjacent (via
    inter edges) to both endpoints of a reported exit edge, plus the
    triangles of the inter-edge graph itself.
    """
    subanswers = _checked(q, subanswers)
    inter = sorted(canonical_edge(*e) for e in inter_edges)

    if q.task is Task.CONNECTIVITY:
        ds = DisjointSet()
        covered: set[int] = set()
        for sa in subanswers:
            for block in sa.payload.blocks:
                covered.update(block)
                for v in block[1:]:
                    ds.union(block[0], v)
        for u, v in inter:
            _require_covered(u, covered, "exit")
            _require_covered(v, covered, "exit")
            ds.union(u, v)
        _require_covered(q.source, covered, "source")
        _require_covered(q.target, covered, "target")
        return Answer.yes_no(ds.same(q.source, q.target))

    if q.task is Task.SHORTEST_PATH:
        adj: dict[int, list[tuple[int, int]]] = defaultdict(list)
        for sa in subanswers:
            for (a, b), d in sa.payload.entries.items():
                if d is UNREACHABLE:
                    continue
                adj[a].append((b, d))
                adj[b].append((a, d))
        for u, v in inter:
            w = 1 if inter_weights is None else inter_weights[(u, v)]
            adj[u].append((v, w))
            adj[v].append((u, w))
        dist = dijkstra(adj, q.source).get(q.target) if q.source in adj else None
        return Answer.distance(UNREACHABLE if dist is None else dist)

    if q.task is Task.CYCLE:
        if any(sa.payload.has_intra_cycle for sa in subanswers):
            return Answer.yes_no(True)
        supernode: dict[int, tuple[int, int]] = {}
        for sa in subanswers:
            for i, block in enumerate(sa.payload.exit_components.blocks):
                for v in block:
                    supernode[v] = (sa.subgraph_id, i)
        ds = DisjointSet()
        for u, v in inter:
            if u not in supernode:
                raise MissingSubAnswer(f"exit node {u} appears in no sub-answer")
            if v not in supernode:
                raise MissingSubAnswer(f"exit node {v} appears in no sub-answer")
            if not ds.union(supernode[u], supernode[v]):
                return Answer.yes_no(True)
        return Answer.yes_no(False)

    # Triangle count. A triangle has 3, 1, or 0 edges inside a single
    # subgraph: 3 means it was counted locally; 1 means an exit edge plus an
    # outside common neighbor; 0 means all three sides are inter edges.
    inter_nbrs: dict[int, set[int]] = defaultdict(set)
    for u, v in inter:
        inter_nbrs[u].add(v)
        inter_nbrs[v].add(u)
    total = 0
    for sa in subanswers:
        total += sa.payload.intra_count
        for a, b in sorted(sa.payload.exit_induced_edges):
            total += len(inter_nbrs[a] & inter_nbrs[b])
    for u, v in inter:
        for w in inter_nbrs[u] & inter_nbrs[v]:
            if w > v:
                total += 1
    return Answer.count(total)


def render_inter_edges(
    inter_edges: Iterable[Edge], inter_weights: Optional[Mapping[Edge, int]] = None
) -> str:
    edges = sorted(canonical_edge(*e) for e in inter_edges)
    if inter_weights is None:
        return "[" + ",".join(f"({u},{v})" for u, v in edges) + "]"
    return "[" + ",".join(f"({u},{v},{inter_weights[(u, v)]})" for u, v in edges) + "]"


def render_master_prompt(
    q: Query,
    subanswers: Sequence[SubAnswer],
    inter_edges: Iterable[Edge],
    inter_weights: Optional[Mapping[Edge, int]] = None,
) -> str:
    """The master agent's prompt: sub-answers plus inter edges, nothing else."""
    subanswers = _checked(q, subanswers)
    reports = "\n".join(
        f"Subgraph {sa.subgraph_id}: {render_payload(sa.payload)}" for sa in subanswers
    )
    return load_master_template(q.task).render(
        SUB_ANSWERS=reports,
        INTER_EDGES=render_inter_edges(inter_edges, inter_weights),
        QUESTION=question_sentence(q),
        ANSWER_FORMAT=final_answer_format_instruction(q.task),
    )


def synthesize_llm(
    backend,
    q: Query,
    extracted: Sequence[SubAnswer],
    inter_edges: Iterable[Edge],
    inter_weights: Optional[Mapping[Edge, int]] = None,
) -> Answer:
    """Ask a chat backend to integrate the sub-answers; parse its final line."""
    if not hasattr(backend, "chat"):
        raise ValueError(f"{type(backend).__name__} cannot chat; the LLM route needs a chat backend")
    prompt = render_master_prompt(q, extracted, inter_edges, inter_weights)
    reply = backend.chat(prompt)
    return extract_final(reply.text, q.task)
