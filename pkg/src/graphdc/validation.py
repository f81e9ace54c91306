"""Input validation helpers shared by the estimator surface and the CLI."""

from __future__ import annotations

from typing import Iterable

from .graphs import Graph, Query
from .graphs import check_query as _check_query_endpoints


def ensure_graph(obj) -> Graph:
    if not isinstance(obj, Graph):
        raise TypeError(f"expected a Graph, got {type(obj).__name__}")
    return obj


def ensure_query(g: Graph, q) -> Query:
    if not isinstance(q, Query):
        raise TypeError(f"expected a Query, got {type(q).__name__}")
    _check_query_endpoints(g, q)
    return q


def ensure_instances(X: Iterable) -> list[tuple[Graph, Query]]:
    """Validate an iterable of (graph, query) pairs, as fed to predict()."""
    pairs = []
    for i, item in enumerate(X):
        try:
            g, q = item
        except (TypeError, ValueError):
            raise TypeError(f"item {i} is not a (Graph, Query) pair: {item!r}") from None
        pairs.append((ensure_graph(g), ensure_query(g, q)))
    return pairs


def ensure_max_subgraph_size(value) -> int:
    if not isinstance(value, int) or isinstance(value, bool) or value < 2:
        raise ValueError(f"max_subgraph_size must be an integer >= 2, got {value!r}")
    return value
