"""Structured sub-answers and the rigid ANSWER-line grammar.

Every agent reply, local or remote, must end with a single line of the form

    ANSWER: key=value; key=value

with JSON-like lists for groups, tuples, and edges. The same grammar is
emitted by the exact local agent and parsed back by the extractor, so the two
sides round-trip by construction. A second, simpler final-answer form
(``ANSWER: yes`` / ``ANSWER: 12`` / ``ANSWER: unreachable``) is used by the
master synthesis step.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Union

from .graphs import (
    UNREACHABLE,
    Answer,
    Edge,
    Task,
    _Unreachable,
    canonical_edge,
)

ANSWER_PREFIX = "ANSWER:"


class ExtractionError(ValueError):
    """Raised when a raw response has no parsable ANSWER line or the parsed
    payload violates its invariants. Evaluation scores such instances as
    incorrect; extraction never crashes a run."""


@dataclass(frozen=True)
class ComponentGrouping:
    """Partition of a terminal set into within-subgraph connected components."""

    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        blocks = tuple(tuple(sorted(b)) for b in self.blocks)
        object.__setattr__(self, "blocks", tuple(sorted(blocks)))

    def members(self) -> frozenset[int]:
        return frozenset(v for b in self.blocks for v in b)


@dataclass(frozen=True)
class DistanceTable:
    """Within-subgraph shortest distances for every unordered terminal pair."""

    entries: dict[Edge, Union[int, _Unreachable]]

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "entries", {canonical_edge(*k): v for k, v in self.entries.items()}
        )


@dataclass(frozen=True)
class CycleSummary:
    has_intra_cycle: bool
    exit_components: ComponentGrouping


@dataclass(frozen=True)
class TriangleSummary:
    intra_count: int
    exit_induced_edges: frozenset[Edge]

    def __post_init__(self) -> None:
        object.__setattr__(
            self,
            "exit_induced_edges",
            frozenset(canonical_edge(*e) for e in self.exit_induced_edges),
        )


Payload = Union[ComponentGrouping, DistanceTable, CycleSummary, TriangleSummary]

PAYLOAD_KIND_FOR_TASK = {
    Task.CONNECTIVITY: ComponentGrouping,
    Task.SHORTEST_PATH: DistanceTable,
    Task.CYCLE: CycleSummary,
    Task.TRIANGLE_COUNT: TriangleSummary,
}


@dataclass(frozen=True)
class SubAnswer:
    """A subgraph's distilled local result."""

    subgraph_id: int
    payload: Payload


# ----------------------------------------------------------------------------
# Rendering
# ----------------------------------------------------------------------------


def _render_groups(blocks: Iterable[tuple[int, ...]]) -> str:
    return "[" + ",".join("[" + ",".join(str(v) for v in b) + "]" for b in blocks) + "]"


def _render_pairs(pairs: Iterable[Edge]) -> str:
    return "[" + ",".join(f"({a},{b})" for a, b in pairs) + "]"


def render_payload(payload: Payload) -> str:
    """The part after ``ANSWER:``, in canonical spacing."""
    if isinstance(payload, ComponentGrouping):
        return f"connected_groups={_render_groups(payload.blocks)}"
    if isinstance(payload, DistanceTable):
        cells = ",".join(
            f"({a},{b},{'inf' if d is UNREACHABLE else d})"
            for (a, b), d in sorted(payload.entries.items())
        )
        return f"distances=[{cells}]"
    if isinstance(payload, CycleSummary):
        flag = "yes" if payload.has_intra_cycle else "no"
        return f"cycle={flag}; components={_render_groups(payload.exit_components.blocks)}"
    if isinstance(payload, TriangleSummary):
        return (
            f"triangles={payload.intra_count}; "
            f"exit_edges={_render_pairs(sorted(payload.exit_induced_edges))}"
        )
    raise TypeError(f"unknown payload type {type(payload).__name__}")


def format_answer_line(payload: Payload) -> str:
    return f"{ANSWER_PREFIX} {render_payload(payload)}"


def format_final_answer_line(answer: Answer) -> str:
    return f"{ANSWER_PREFIX} {answer.render()}"


def answer_format_instruction(task: Task) -> str:
    """The per-task sentence that mandates the machine-parsable final line."""
    task = Task(task)
    if task is Task.CONNECTIVITY:
        return (
            'End your reply with exactly one line of the form '
            '"ANSWER: connected_groups=[[1,4],[7]]", placing every terminal in exactly one group.'
        )
    if task is Task.SHORTEST_PATH:
        return (
            'End your reply with exactly one line of the form '
            '"ANSWER: distances=[(1,4,6),(1,7,inf),(4,7,2)]", with one entry per unordered pair '
            "of terminals; write inf when the pair is not connected inside this subgraph."
        )
    if task is Task.CYCLE:
        return (
            'End your reply with exactly one line of the form '
            '"ANSWER: cycle=yes; components=[[1,4],[7]]", where cycle is yes or no and components '
            "groups every terminal by connectivity inside this subgraph."
        )
    return (
        'End your reply with exactly one line of the form '
        '"ANSWER: triangles=3; exit_edges=[(1,4),(4,7)]", where exit_edges lists the edges of '
        "this subgraph whose two endpoints are both exit nodes."
    )


def final_answer_format_instruction(task: Task) -> str:
    task = Task(task)
    if task in (Task.CONNECTIVITY, Task.CYCLE):
        return 'End your reply with exactly one line: "ANSWER: yes" or "ANSWER: no".'
    if task is Task.SHORTEST_PATH:
        return (
            'End your reply with exactly one line of the form "ANSWER: 12", '
            'or "ANSWER: unreachable" if no path exists.'
        )
    return 'End your reply with exactly one line of the form "ANSWER: 12".'


# ----------------------------------------------------------------------------
# Parsing
# ----------------------------------------------------------------------------

_GROUPS_RE = re.compile(r"^\[(\[[0-9,]*\](,\[[0-9,]*\])*)?\]$")
_GROUP_RE = re.compile(r"\[([0-9,]*)\]")
_PAIRS_RE = re.compile(r"^\[(\(\d+,\d+\)(,\(\d+,\d+\))*)?\]$")
_PAIR_RE = re.compile(r"\((\d+),(\d+)\)")
_TRIPLES_RE = re.compile(r"^\[(\(\d+,\d+,(\d+|inf)\)(,\(\d+,\d+,(\d+|inf)\))*)?\]$")
_TRIPLE_RE = re.compile(r"\((\d+),(\d+),(\d+|inf)\)")


def _last_answer_line(raw: str) -> str:
    found = None
    for line in raw.splitlines():
        stripped = line.strip()
        if stripped.startswith(ANSWER_PREFIX):
            found = stripped[len(ANSWER_PREFIX):]
    if found is None:
        raise ExtractionError("no ANSWER line found in response")
    # Whitespace inside the payload carries no meaning; normalize it away so
    # the structural grammar below stays strict but spacing-tolerant.
    return re.sub(r"\s+", "", found)


def _split_fields(body: str, expected_keys: tuple[str, ...]) -> dict[str, str]:
    fields: dict[str, str] = {}
    for part in body.split(";"):
        if "=" not in part:
            raise ExtractionError(f"malformed field {part!r} in answer line")
        key, value = part.split("=", 1)
        if key in fields:
            raise ExtractionError(f"duplicate field {key!r} in answer line")
        fields[key] = value
    if tuple(sorted(fields)) != tuple(sorted(expected_keys)):
        raise ExtractionError(
            f"answer line has fields {sorted(fields)}, expected {sorted(expected_keys)}"
        )
    return fields


def _parse_groups(text: str) -> tuple[tuple[int, ...], ...]:
    if not _GROUPS_RE.match(text):
        raise ExtractionError(f"malformed group list {text!r}")
    if text == "[]":
        return ()
    blocks = []
    for m in _GROUP_RE.finditer(text):
        inner = m.group(1)
        if inner == "":
            raise ExtractionError("empty group in group list")
        try:
            blocks.append(tuple(int(t) for t in inner.split(",")))
        except ValueError as exc:
            raise ExtractionError(f"malformed group {inner!r}") from exc
    return tuple(blocks)


def _parse_yes_no(text: str) -> bool:
    if text == "yes":
        return True
    if text == "no":
        return False
    raise ExtractionError(f"expected yes or no, got {text!r}")


def _validate_grouping(blocks: tuple[tuple[int, ...], ...], terminals: frozenset[int]) -> ComponentGrouping:
    seen: set[int] = set()
    for block in blocks:
        for v in block:
            if v in seen:
                raise ExtractionError(f"terminal {v} appears in two groups")
            seen.add(v)
    if seen != terminals:
        missing = sorted(terminals - seen)
        extra = sorted(seen - terminals)
        raise ExtractionError(
            f"grouping does not match terminals (missing {missing}, unexpected {extra})"
        )
    return ComponentGrouping(blocks)


def extract(raw: str, task: Task, terminals: Iterable[int], subgraph_id: int) -> SubAnswer:
    """Distill a raw agent response into a validated :class:`SubAnswer`.

    Scans for the last ANSWER line (arbitrary prose before it is ignored,
    and of two ANSWER lines the last one wins), parses it with the task's
    grammar, and checks the payload invariants against the terminal set.
    """
    task = Task(task)
    terminal_set = frozenset(terminals)
    body = _last_answer_line(raw)

    if task is Task.CONNECTIVITY:
        fields = _split_fields(body, ("connected_groups",))
        grouping = _validate_grouping(_parse_groups(fields["connected_groups"]), terminal_set)
        return SubAnswer(subgraph_id, grouping)

    if task is Task.SHORTEST_PATH:
        fields = _split_fields(body, ("distances",))
        text = fields["distances"]
        if not _TRIPLES_RE.match(text):
            raise ExtractionError(f"malformed distance list {text!r}")
        entries: dict[Edge, Union[int, _Unreachable]] = {}
        for m in _TRIPLE_RE.finditer(text):
            a, b = int(m.group(1)), int(m.group(2))
            if a == b:
                raise ExtractionError(f"distance entry ({a},{b}) repeats a terminal")
            if a not in terminal_set or b not in terminal_set:
                raise ExtractionError(f"distance entry ({a},{b}) names a non-terminal")
            key = canonical_edge(a, b)
            if key in entries:
                raise ExtractionError(f"duplicate distance entry for pair {key}")
            d = m.group(3)
            if d == "inf":
                entries[key] = UNREACHABLE
            else:
                value = int(d)
                if value < 1:
                    raise ExtractionError(f"distance {value} for pair {key} must be >= 1")
                entries[key] = value
        ts = sorted(terminal_set)
        expected = {(ts[i], ts[j]) for i in range(len(ts)) for j in range(i + 1, len(ts))}
        if set(entries) != expected:
            raise ExtractionError(
                f"distance table covers {len(entries)} pairs, expected {len(expected)}"
            )
        return SubAnswer(subgraph_id, DistanceTable(entries))

    if task is Task.CYCLE:
        fields = _split_fields(body, ("cycle", "components"))
        flag = _parse_yes_no(fields["cycle"])
        grouping = _validate_grouping(_parse_groups(fields["components"]), terminal_set)
        return SubAnswer(subgraph_id, CycleSummary(flag, grouping))

    fields = _split_fields(body, ("triangles", "exit_edges"))
    if not re.fullmatch(r"\d+", fields["triangles"]):
        raise ExtractionError(f"malformed triangle count {fields['triangles']!r}")
    text = fields["exit_edges"]
    if not _PAIRS_RE.match(text):
        raise ExtractionError(f"malformed edge list {text!r}")
    edges: set[Edge] = set()
    for m in _PAIR_RE.finditer(text):
        a, b = int(m.group(1)), int(m.group(2))
        if a == b:
            raise ExtractionError(f"edge ({a},{b}) is a self-loop")
        if a not in terminal_set or b not in terminal_set:
            raise ExtractionError(f"edge ({a},{b}) names a non-terminal")
        e = canonical_edge(a, b)
        if e in edges:
            raise ExtractionError(f"duplicate exit edge {e}")
        edges.add(e)
    return SubAnswer(subgraph_id, TriangleSummary(int(fields["triangles"]), frozenset(edges)))


def extract_final(raw: str, task: Task) -> Answer:
    """Parse the master agent's final line into an :class:`Answer`."""
    body = _last_answer_line(raw)
    try:
        return Answer.parse(body, Task(task))
    except ValueError as exc:
        raise ExtractionError(str(exc)) from exc
