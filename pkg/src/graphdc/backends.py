"""Reasoner backends: an exact in-process agent and a chat-completions client.

Both backends expose ``answer(sub, sq) -> str``: given a subgraph and its
rendered sub-query, return the raw response text. The exact backend computes
the requested payload with classical algorithms and emits it in the mandated
ANSWER format, so it doubles as a perfectly reliable stand-in for a language
model. The chat backend posts the sub-query to an HTTP endpoint and returns
the assistant message verbatim.
"""

from __future__ import annotations

import json
import os
import threading
import time
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

import requests

from .graphs import (
    UNREACHABLE,
    Task,
    adjacency_map,
    connected_components,
    count_triangles,
    dijkstra,
    has_cycle,
)
from .partition import Subgraph
from .subanswers import (
    ComponentGrouping,
    CycleSummary,
    DistanceTable,
    Payload,
    TriangleSummary,
    format_answer_line,
)
from .subqueries import SubQuery

#: Environment variable holding the bearer token for the chat endpoint.
API_KEY_ENV = "GRAPHDC_API_KEY"

DEFAULT_TIMEOUT_S = 60.0
DEFAULT_MAX_RETRIES = 3
DEFAULT_MAX_INFLIGHT = 4


class TransportError(RuntimeError):
    """The chat endpoint could not be reached, or kept failing after retries."""


class _TransientTransportError(TransportError):
    """Internal marker for failures worth retrying (timeouts, 429, 5xx)."""


class MalformedResponse(RuntimeError):
    """The endpoint replied, but without a usable assistant message."""


def _group_terminals(sub: Subgraph, terminals: Iterable[int]) -> ComponentGrouping:
    terminal_set = set(terminals)
    blocks = []
    for comp in connected_components(sub.nodes, sub.internal_edges):
        block = tuple(v for v in comp if v in terminal_set)
        if block:
            blocks.append(block)
    return ComponentGrouping(tuple(blocks))


def compute_local_payload(sub: Subgraph, task: Task, terminals: Iterable[int]) -> Payload:
    """The exact local result a sub-agent is asked for, computed directly.

    Connectivity: terminals grouped by within-subgraph component. Shortest
    path: one Dijkstra run per terminal over the internal edges. Cycle: the
    component edge-count criterion plus the terminal grouping. Triangles:
    exact internal count plus the internal edges between exit nodes.
    """
    task = Task(task)
    terminals = sorted(set(terminals))
    if task is Task.CONNECTIVITY:
        return _group_terminals(sub, terminals)
    if task is Task.SHORTEST_PATH:
        adj = adjacency_map(sub.nodes, sub.internal_edges, sub.weights)
        entries = {}
        for i, a in enumerate(terminals):
            dist = dijkstra(adj, a) if a in adj else {}
            for b in terminals[i + 1 :]:
                d = dist.get(b)
                entries[(a, b)] = UNREACHABLE if d is None else d
        return DistanceTable(entries)
    if task is Task.CYCLE:
        return CycleSummary(
            has_cycle(sub.nodes, sub.internal_edges),
            _group_terminals(sub, terminals),
        )
    exits = sub.exit_nodes
    exit_edges = frozenset(e for e in sub.internal_edges if e[0] in exits and e[1] in exits)
    return TriangleSummary(count_triangles(sub.nodes, sub.internal_edges), exit_edges)


class ExactLocalBackend:
    """Sub-agent that solves its sub-query exactly, no network involved."""

    kind = "exact_local"

    def answer(self, sub: Subgraph, sq: SubQuery) -> str:
        if sq.subgraph_id != sub.id:
            raise ValueError(f"sub-query is for subgraph {sq.subgraph_id}, got subgraph {sub.id}")
        return format_answer_line(compute_local_payload(sub, sq.task, sq.terminals))


@dataclass
class ChatReply:
    text: str
    prompt_tokens: int = 0
    completion_tokens: int = 0


#: A transport takes (url, json payload, timeout seconds, headers) and returns
#: the decoded response body. Swappable so tests can script the endpoint.
Transport = Callable[[str, dict, float, dict], dict]


def _http_transport(url: str, payload: dict, timeout: float, headers: dict) -> dict:
    try:
        response = requests.post(url, json=payload, timeout=timeout, headers=headers)
    except requests.RequestException as exc:
        raise _TransientTransportError(f"request to {url} failed: {exc}") from exc
    if response.status_code == 429 or response.status_code >= 500:
        raise _TransientTransportError(f"endpoint returned HTTP {response.status_code}")
    if response.status_code != 200:
        raise TransportError(f"endpoint returned HTTP {response.status_code}: {response.text[:200]}")
    try:
        return response.json()
    except ValueError as exc:
        raise MalformedResponse(f"endpoint returned non-JSON body: {response.text[:200]}") from exc


class LlmChatBackend:
    """Chat-completions client with bounded concurrency and retry backoff.

    Decoding temperature is pinned to 0. Transient transport failures retry
    with exponential backoff (base delay doubling per attempt); anything else
    fails fast. At most ``max_inflight`` requests are on the wire at once,
    shared across threads.
    """

    kind = "llm_chat"
    temperature = 0.0

    def __init__(
        self,
        endpoint: str,
        model: str,
        timeout: float = DEFAULT_TIMEOUT_S,
        max_retries: int = DEFAULT_MAX_RETRIES,
        max_inflight: int = DEFAULT_MAX_INFLIGHT,
        transport: Optional[Transport] = None,
        backoff_base: float = 1.0,
    ) -> None:
        if timeout <= 0:
            raise ValueError(f"timeout must be positive, got {timeout}")
        if max_retries < 0:
            raise ValueError(f"max_retries must be >= 0, got {max_retries}")
        if max_inflight < 1:
            raise ValueError(f"max_inflight must be >= 1, got {max_inflight}")
        self.endpoint = endpoint
        self.model = model
        self.timeout = timeout
        self.max_retries = max_retries
        self.max_inflight = max_inflight
        self.backoff_base = backoff_base
        self._transport = transport or _http_transport
        self._gate = threading.BoundedSemaphore(max_inflight)

    def _headers(self) -> dict:
        headers = {"Content-Type": "application/json"}
        key = os.environ.get(API_KEY_ENV, "").strip()
        if key:
            headers["Authorization"] = f"Bearer {key}"
        return headers

    def chat(self, prompt: str) -> ChatReply:
        """Send one user message; return the assistant message and token use."""
        payload = {
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": self.temperature,
        }
        headers = self._headers()
        last_error: Optional[Exception] = None
        for attempt in range(self.max_retries + 1):
            if attempt > 0:
                time.sleep(self.backoff_base * 2 ** (attempt - 1))
            try:
                with self._gate:
                    body = self._transport(self.endpoint, payload, self.timeout, headers)
                return self._parse_reply(body)
            except _TransientTransportError as exc:
                last_error = exc
                continue
        raise TransportError(
            f"gave up after {self.max_retries + 1} attempts: {last_error}"
        ) from last_error

    @staticmethod
    def _parse_reply(body: dict) -> ChatReply:
        try:
            content = body["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError):
            raise MalformedResponse(
                f"no assistant message in response: {json.dumps(body)[:200]}"
            ) from None
        if not isinstance(content, str):
            raise MalformedResponse(f"assistant message is not text: {content!r}")
        usage = body.get("usage") or {}
        return ChatReply(
            text=content,
            prompt_tokens=int(usage.get("prompt_tokens", 0) or 0),
            completion_tokens=int(usage.get("completion_tokens", 0) or 0),
        )

    def answer(self, sub: Subgraph, sq: SubQuery) -> str:
        if sq.subgraph_id != sub.id:
            raise ValueError(f"sub-query is for subgraph {sq.subgraph_id}, got subgraph {sub.id}")
        return self.chat(sq.text).text
