"""Template loading, rendering, and the describer."""

import re

import pytest

from graphdc import (
    Graph,
    PromptTemplate,
    Query,
    Subgraph,
    Task,
    describe,
    load_master_template,
    load_template,
    render_graph_text,
    split,
)
from graphdc.subqueries import question_sentence

PLACEHOLDER = re.compile(r"\{[A-Z][A-Z_]*\}")


@pytest.mark.parametrize("task", list(Task))
def test_templates_load_and_carry_the_expected_placeholders(task):
    t = load_template(task)
    assert t.task == task
    assert t.placeholders() == {"GRAPH", "EXIT_NODES", "TERMINALS", "ANSWER_FORMAT"}
    m = load_master_template(task)
    assert m.placeholders() == {"SUB_ANSWERS", "INTER_EDGES", "QUESTION", "ANSWER_FORMAT"}


def test_render_rejects_unbound_and_unknown_placeholders():
    t = PromptTemplate(Task.CYCLE, "preamble", "a {FOO} b")
    with pytest.raises(ValueError):
        t.render()
    with pytest.raises(ValueError):
        t.render(FOO="x", BAR="y")
    assert t.render(FOO="x") == "preamble\n\na x b"


def _sub(nodes, edges, exits, weights=None):
    return Subgraph(0, frozenset(nodes), frozenset(edges), frozenset(exits), weights)


def test_describe_terminals_are_exits_plus_local_endpoints():
    sub = _sub({3, 7, 9}, {(3, 7)}, {7})
    q = Query(Task.CONNECTIVITY, 9, 42)  # 42 lives elsewhere
    sq = describe(sub, q, load_template(Task.CONNECTIVITY))
    assert sq.terminals == (7, 9)
    assert sq.subgraph_id == 0
    assert "Terminals: [7, 9]" in sq.text
    assert "Exit nodes: [7]" in sq.text


def test_describe_isolated_component_cycle_has_no_terminals():
    sub = _sub({1, 2, 4}, {(1, 2), (2, 4)}, set())
    sq = describe(sub, Query(Task.CYCLE), load_template(Task.CYCLE))
    assert sq.terminals == ()
    assert "Terminals: []" in sq.text


def test_describe_embeds_the_rendered_subgraph_verbatim():
    sub = _sub({0, 2, 5}, {(0, 2), (2, 5)}, {5})
    sq = describe(sub, Query(Task.CYCLE), load_template(Task.CYCLE))
    expected = render_graph_text(sub.induced_graph()).rstrip("\n")
    assert expected in sq.text


def test_describe_leaves_no_unexpanded_placeholders():
    g = Graph(12, frozenset({(i, i + 1) for i in range(11)}))
    d = split(g, 4)
    for task, q in [
        (Task.CONNECTIVITY, Query(Task.CONNECTIVITY, 0, 11)),
        (Task.SHORTEST_PATH, Query(Task.SHORTEST_PATH, 0, 11)),
        (Task.CYCLE, Query(Task.CYCLE)),
        (Task.TRIANGLE_COUNT, Query(Task.TRIANGLE_COUNT)),
    ]:
        for sub in d.subgraphs:
            sq = describe(sub, q, load_template(task))
            assert not PLACEHOLDER.search(sq.text), sq.text


def test_describe_rejects_template_task_mismatch():
    sub = _sub({0, 1}, {(0, 1)}, set())
    with pytest.raises(ValueError):
        describe(sub, Query(Task.CYCLE), load_template(Task.CONNECTIVITY))


def test_each_endpoint_lands_in_exactly_one_subgraph():
    g = Graph(20, frozenset({(i, (i + 3) % 20) for i in range(20)} | {(i, i + 1) for i in range(19)}))
    q = Query(Task.CONNECTIVITY, 0, 19)
    d = split(g, 6)
    template = load_template(Task.CONNECTIVITY)
    holders = [
        sq for sq in (describe(sub, q, template) for sub in d.subgraphs)
        if q.source in sq.terminals or q.target in sq.terminals
    ]
    source_count = sum(q.source in sq.terminals for sq in holders)
    target_count = sum(q.target in sq.terminals for sq in holders)
    assert source_count == 1 and target_count == 1


def test_shortest_path_instruction_mentions_every_pair_requirement():
    # a 4-node path subgraph with exits 0 and 3 asks about the single pair
    sub = _sub({0, 1, 2, 3}, {(0, 1), (1, 2), (2, 3)}, {0, 3})
    sq = describe(sub, Query(Task.SHORTEST_PATH, 0, 3), load_template(Task.SHORTEST_PATH))
    assert sq.terminals == (0, 3)
    n_pairs = len(sq.terminals) * (len(sq.terminals) - 1) // 2
    assert n_pairs == 1
    assert "every unordered pair" in sq.text


def test_connectivity_instruction_asks_about_reach(two_cluster_graph):
    d = split(two_cluster_graph, 60)
    q = Query(Task.CONNECTIVITY, 27, 97)
    cluster1 = d.subgraphs[0]
    sq = describe(cluster1, q, load_template(Task.CONNECTIVITY))
    assert set(sq.terminals) == set(cluster1.exit_nodes) | {27}
    assert "can reach" in sq.text


def test_question_sentences():
    assert question_sentence(Query(Task.CONNECTIVITY, 3, 9)) == (
        "Is node 3 connected to node 9 in the full graph?"
    )
    assert "shortest path" in question_sentence(Query(Task.SHORTEST_PATH, 1, 2))
    assert question_sentence(Query(Task.CYCLE)).startswith("Does the full graph")
    assert "triangles" in question_sentence(Query(Task.TRIANGLE_COUNT))
