"""Task-aware sub-query rendering from versioned template assets.

Each task has one sub-agent template and one master template, stored as UTF-8
text files with ``{UPPER_CASE}`` placeholders. A template file holds the
preamble, a ``---`` separator line, and the instruction body. Rendering is a
pure string operation; every placeholder must be bound and none may survive
in the output.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Iterable

from .graphs import Query, Task, render_graph_text
from .partition import Subgraph
from .subanswers import answer_format_instruction

_PLACEHOLDER_RE = re.compile(r"\{([A-Z][A-Z_]*)\}")
_SEPARATOR = "---"


@dataclass(frozen=True)
class PromptTemplate:
    """A prompt asset: free-text preamble plus a placeholder-bearing body."""

    task: Task
    preamble: str
    instruction: str

    def placeholders(self) -> frozenset[str]:
        return frozenset(m.group(1) for m in _PLACEHOLDER_RE.finditer(self.instruction))

    def render(self, **bindings: str) -> str:
        """Substitute every placeholder; unknown or unbound names are errors."""
        unknown = set(bindings) - self.placeholders()
        if unknown:
            raise ValueError(f"bindings {sorted(unknown)} match no placeholder")

        def _sub(m: re.Match) -> str:
            name = m.group(1)
            if name not in bindings:
                raise ValueError(f"placeholder {{{name}}} is unbound")
            return bindings[name]

        body = _PLACEHOLDER_RE.sub(_sub, self.instruction)
        text = self.preamble + "\n\n" + body
        leftover = _PLACEHOLDER_RE.search(text)
        if leftover:
            raise ValueError(f"unexpanded placeholder {leftover.group(0)} in rendered text")
        return text


def _parse_template(task: Task, text: str) -> PromptTemplate:
    lines = text.split("\n")
    try:
        cut = lines.index(_SEPARATOR)
    except ValueError:
        raise ValueError("template asset is missing the --- separator") from None
    preamble = "\n".join(lines[:cut]).strip()
    instruction = "\n".join(lines[cut + 1 :]).strip()
    return PromptTemplate(task, preamble, instruction)


@lru_cache(maxsize=None)
def load_template(task: Task) -> PromptTemplate:
    """The sub-agent template for a task, from the packaged assets."""
    task = Task(task)
    text = resources.files(__package__).joinpath(f"templates/{task.value}.txt").read_text("utf-8")
    return _parse_template(task, text)


@lru_cache(maxsize=None)
def load_master_template(task: Task) -> PromptTemplate:
    """The master-agent synthesis template for a task."""
    task = Task(task)
    text = (
        resources.files(__package__)
        .joinpath(f"templates/master_{task.value}.txt")
        .read_text("utf-8")
    )
    return _parse_template(task, text)


@dataclass(frozen=True)
class SubQuery:
    """A fully rendered local reasoning instruction for one subgraph."""

    subgraph_id: int
    task: Task
    terminals: tuple[int, ...]
    text: str


def render_node_list(nodes: Iterable[int]) -> str:
    return "[" + ", ".join(str(v) for v in sorted(nodes)) + "]"


def question_sentence(q: Query) -> str:
    """The original question in prose, for the master prompt."""
    if q.task is Task.CONNECTIVITY:
        return f"Is node {q.source} connected to node {q.target} in the full graph?"
    if q.task is Task.SHORTEST_PATH:
        return (
            f"What is the length of the shortest path between node {q.source} "
            f"and node {q.target} in the full graph?"
        )
    if q.task is Task.CYCLE:
        return "Does the full graph contain a cycle?"
    return "How many triangles are there in the full graph?"


def describe(sub: Subgraph, q: Query, template: PromptTemplate) -> SubQuery:
    """Render one subgraph into its task-aware sub-query.

    The terminals are the subgraph's exit nodes plus whichever query
    endpoints fall inside it, sorted ascending. The rendered text embeds the
    subgraph exactly as :func:`render_graph_text` emits it, restricted to the
    internal edges; the instruction asks for the local information the
    synthesis step needs (component groupings, pairwise terminal distances,
    an intra-cycle verdict, or an intra-triangle count with exit edges), not
    for a smaller copy of the original question.
    """
    if template.task != q.task:
        raise ValueError(f"template is for {template.task.value}, query is {q.task.value}")
    endpoints = {v for v in (q.source, q.target) if v is not None and v in sub.nodes}
    terminals = tuple(sorted(set(sub.exit_nodes) | endpoints))
    text = template.render(
        GRAPH=render_graph_text(sub.induced_graph()).rstrip("\n"),
        EXIT_NODES=render_node_list(sub.exit_nodes),
        TERMINALS=render_node_list(terminals),
        ANSWER_FORMAT=answer_format_instruction(q.task),
    )
    return SubQuery(sub.id, q.task, terminals, text)
