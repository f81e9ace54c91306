"""ANSWER-line grammar: rendering, extraction, and validation."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphdc import (
    UNREACHABLE,
    Answer,
    ComponentGrouping,
    CycleSummary,
    DistanceTable,
    ExtractionError,
    Task,
    TriangleSummary,
    extract,
    extract_final,
    format_answer_line,
)
from graphdc.subanswers import render_payload


def test_grouping_normalizes_block_order():
    g = ComponentGrouping(((7,), (3, 0)))
    assert g.blocks == ((0, 3), (7,))
    assert render_payload(g) == "connected_groups=[[0,3],[7]]"


def test_extract_connectivity_grouping():
    raw = "thinking...\nmore thoughts\nANSWER: connected_groups=[[0,3],[7]]"
    sa = extract(raw, Task.CONNECTIVITY, [0, 3, 7], subgraph_id=2)
    assert sa.subgraph_id == 2
    assert sa.payload == ComponentGrouping(((0, 3), (7,)))


def test_extract_last_answer_line_wins():
    raw = "ANSWER: connected_groups=[[0],[3]]\nwait, no:\nANSWER: connected_groups=[[0,3]]"
    sa = extract(raw, Task.CONNECTIVITY, [0, 3], subgraph_id=0)
    assert sa.payload == ComponentGrouping(((0, 3),))


def test_extract_tolerates_spacing():
    raw = "ANSWER:  connected_groups = [ [0, 3], [7] ]"
    sa = extract(raw, Task.CONNECTIVITY, [0, 3, 7], subgraph_id=0)
    assert sa.payload == ComponentGrouping(((0, 3), (7,)))


def test_extract_rejects_missing_or_extra_terminals():
    with pytest.raises(ExtractionError):
        extract("ANSWER: connected_groups=[[0]]", Task.CONNECTIVITY, [0, 3], 0)
    with pytest.raises(ExtractionError):
        extract("ANSWER: connected_groups=[[0,3,9]]", Task.CONNECTIVITY, [0, 3], 0)
    with pytest.raises(ExtractionError):
        extract("ANSWER: connected_groups=[[0,3],[3]]", Task.CONNECTIVITY, [0, 3], 0)


def test_extract_rejects_prose_without_answer_line():
    with pytest.raises(ExtractionError):
        extract("I believe the subgraph is connected.", Task.CONNECTIVITY, [0], 0)


def test_extract_distances_full_table_required():
    raw = "ANSWER: distances=[(1,4,6),(1,7,inf),(4,7,2)]"
    sa = extract(raw, Task.SHORTEST_PATH, [1, 4, 7], 1)
    assert sa.payload == DistanceTable({(1, 4): 6, (1, 7): UNREACHABLE, (4, 7): 2})
    with pytest.raises(ExtractionError):
        extract("ANSWER: distances=[(1,4,6)]", Task.SHORTEST_PATH, [1, 4, 7], 1)
    with pytest.raises(ExtractionError):
        extract("ANSWER: distances=[(1,4,0)]", Task.SHORTEST_PATH, [1, 4], 1)
    with pytest.raises(ExtractionError):
        extract("ANSWER: distances=[(1,9,2)]", Task.SHORTEST_PATH, [1, 4], 1)


def test_extract_empty_payloads():
    assert extract("ANSWER: connected_groups=[]", Task.CONNECTIVITY, [], 0).payload == ComponentGrouping(())
    assert extract("ANSWER: distances=[]", Task.SHORTEST_PATH, [5], 0).payload == DistanceTable({})
    sa = extract("ANSWER: cycle=no; components=[]", Task.CYCLE, [], 0)
    assert sa.payload == CycleSummary(False, ComponentGrouping(()))
    sa = extract("ANSWER: triangles=0; exit_edges=[]", Task.TRIANGLE_COUNT, [], 0)
    assert sa.payload == TriangleSummary(0, frozenset())


def test_extract_cycle_summary():
    sa = extract("ANSWER: cycle=yes; components=[[2,8],[5]]", Task.CYCLE, [2, 5, 8], 3)
    assert sa.payload == CycleSummary(True, ComponentGrouping(((2, 8), (5,))))
    with pytest.raises(ExtractionError):
        extract("ANSWER: cycle=maybe; components=[[2]]", Task.CYCLE, [2], 3)
    with pytest.raises(ExtractionError):
        extract("ANSWER: cycle=yes", Task.CYCLE, [2], 3)


def test_extract_triangles():
    sa = extract("ANSWER: triangles=4; exit_edges=[(1,2),(2,9)]", Task.TRIANGLE_COUNT, [1, 2, 9], 0)
    assert sa.payload == TriangleSummary(4, frozenset({(1, 2), (2, 9)}))
    with pytest.raises(ExtractionError):
        extract("ANSWER: triangles=-1; exit_edges=[]", Task.TRIANGLE_COUNT, [], 0)
    with pytest.raises(ExtractionError):
        extract("ANSWER: triangles=1; exit_edges=[(1,5)]", Task.TRIANGLE_COUNT, [1, 2], 0)


@settings(max_examples=150, deadline=None)
@given(st.text(alphabet=st.characters(blacklist_categories=("Cs",)), max_size=200))
def test_extract_ignores_arbitrary_prefix_prose(prefix):
    raw = prefix + "\nANSWER: cycle=yes; components=[[1],[2]]"
    sa = extract(raw, Task.CYCLE, [1, 2], 0)
    assert sa.payload.has_intra_cycle is True


def test_payload_render_extract_round_trip():
    rng = random.Random(42)
    for _ in range(200):
        terminals = sorted(rng.sample(range(30), rng.randint(0, 8)))
        kind = rng.randrange(4)
        if kind == 0:
            pool = list(terminals)
            rng.shuffle(pool)
            blocks, i = [], 0
            while i < len(pool):
                j = rng.randint(i + 1, len(pool))
                blocks.append(tuple(pool[i:j]))
                i = j
            payload = ComponentGrouping(tuple(blocks))
            task = Task.CONNECTIVITY
        elif kind == 1:
            entries = {}
            for i in range(len(terminals)):
                for j in range(i + 1, len(terminals)):
                    entries[(terminals[i], terminals[j])] = (
                        UNREACHABLE if rng.random() < 0.2 else rng.randint(1, 60)
                    )
            payload = DistanceTable(entries)
            task = Task.SHORTEST_PATH
        elif kind == 2:
            pool = list(terminals)
            rng.shuffle(pool)
            blocks, i = [], 0
            while i < len(pool):
                j = rng.randint(i + 1, len(pool))
                blocks.append(tuple(pool[i:j]))
                i = j
            payload = CycleSummary(rng.random() < 0.5, ComponentGrouping(tuple(blocks)))
            task = Task.CYCLE
        else:
            pairs = [
                (terminals[i], terminals[j])
                for i in range(len(terminals))
                for j in range(i + 1, len(terminals))
                if rng.random() < 0.3
            ]
            payload = TriangleSummary(rng.randint(0, 50), frozenset(pairs))
            task = Task.TRIANGLE_COUNT
        line = format_answer_line(payload)
        assert extract(line, task, terminals, 9).payload == payload


def test_extract_final_forms():
    assert extract_final("blah\nANSWER: yes", Task.CONNECTIVITY) == Answer.yes_no(True)
    assert extract_final("ANSWER: no", Task.CYCLE) == Answer.yes_no(False)
    assert extract_final("ANSWER: 17", Task.SHORTEST_PATH) == Answer.distance(17)
    assert extract_final("ANSWER: unreachable", Task.SHORTEST_PATH) == Answer.distance(UNREACHABLE)
    assert extract_final("ANSWER: 4", Task.TRIANGLE_COUNT) == Answer.count(4)
    with pytest.raises(ExtractionError):
        extract_final("ANSWER: maybe", Task.CYCLE)
    with pytest.raises(ExtractionError):
        extract_final("the answer is yes", Task.CYCLE)
