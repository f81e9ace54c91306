"""Shared fixtures and hypothesis strategies."""

from __future__ import annotations

import random

import pytest
from hypothesis import strategies as st

from graphdc import Graph

TWO_CLUSTER_SEED = 7
TWO_CLUSTER_CROSS_EDGES = ((12, 63), (30, 81), (45, 58))


def build_two_cluster_graph() -> Graph:
    """A 100-node graph with two dense planted clusters (0-49 and 50-99)
    joined by three sparse cross edges that avoid nodes 27 and 97."""
    rng = random.Random(TWO_CLUSTER_SEED)
    edges = set()
    for base in (0, 50):
        for u in range(base, base + 50):
            for v in range(u + 1, base + 50):
                if rng.random() < 0.5:
                    edges.add((u, v))
    edges.update(TWO_CLUSTER_CROSS_EDGES)
    return Graph(100, frozenset(edges), None)


@pytest.fixture(scope="session")
def two_cluster_graph() -> Graph:
    return build_two_cluster_graph()


def make_random_graph(
    rng: random.Random,
    max_nodes: int = 30,
    min_nodes: int = 2,
    weighted: bool = False,
    density_range: tuple[float, float] = (0.2, 2.8),
) -> Graph:
    """Plain rng-driven graph for bulk fuzz loops (cheaper than hypothesis)."""
    n = rng.randint(min_nodes, max_nodes)
    lo, hi = density_range
    target = min(round(rng.uniform(lo, hi) * n), n * (n - 1) // 2)
    edges = set()
    while len(edges) < target:
        u, v = rng.randrange(n), rng.randrange(n)
        if u != v:
            edges.add((min(u, v), max(u, v)))
    weights = {e: rng.randint(1, 10) for e in edges} if weighted else None
    return Graph(n, frozenset(edges), weights)


@st.composite
def graphs(draw, min_nodes: int = 0, max_nodes: int = 16, force_weighted=None):
    n = draw(st.integers(min_nodes, max_nodes))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    if pairs:
        edges = draw(st.sets(st.sampled_from(pairs)))
    else:
        edges = set()
    if force_weighted is None:
        weighted = draw(st.booleans())
    else:
        weighted = force_weighted
    weights = None
    if weighted:
        weights = {e: draw(st.integers(1, 10)) for e in sorted(edges)}
    return Graph(n, frozenset(edges), weights)
