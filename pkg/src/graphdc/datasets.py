"""Benchmark generation and JSON-lines dataset persistence.

Datasets hold an equal number of instances in each of five node-count bands.
Connectivity and shortest-path instances use endpoint pairs that are as far
apart as a seeded candidate sample can find (shortest-path instances re-draw
until the pair is reachable); cycle datasets balance yes/no labels within
every band. Per-task edge budgets are calibrated so the mean edge count per
graph lands on the benchmark targets (about 73.7 edges for connectivity,
90.3 for cycle, 131.3 for shortest path, at a mean of about 50 nodes).

A dataset file is one JSON object per line with sorted keys, the graph
embedded in the text wire format, so identical (task, count, seed) inputs
produce byte-identical files.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Union

from .graphs import (
    Answer,
    GenerationError,
    Graph,
    Query,
    Task,
    gen_random_forest,
    gen_random_graph,
    oracle_solve,
    parse_graph_text,
    pick_far_pair,
    render_graph_text,
)

#: Band label -> inclusive node-count range. The nominal 0-20 band starts at 2
#: (smaller graphs admit no query) and each band ends just below the next.
SIZE_BANDS: dict[str, tuple[int, int]] = {
    "0-20": (2, 19),
    "20-40": (20, 39),
    "40-60": (40, 59),
    "60-80": (60, 79),
    "80-100": (80, 100),
}

#: Expected edges per node, per task, from the benchmark's per-graph averages
#: (edges per graph / nodes per graph).
EDGE_DENSITY: dict[Task, float] = {
    Task.CONNECTIVITY: 73.67 / 50.33,
    Task.SHORTEST_PATH: 131.33 / 50.66,
    Task.TRIANGLE_COUNT: 2.0,
}

#: Cycle instances split by label: acyclic graphs are random forests with
#: this fraction of a spanning tree's edges, and cyclic graphs are dense
#: enough that the per-band label mix still averages to the target density.
CYCLE_TARGET_DENSITY = 90.33 / 50
CYCLE_FOREST_FRACTION = 0.9
CYCLE_DENSE_DENSITY = 2 * CYCLE_TARGET_DENSITY - CYCLE_FOREST_FRACTION

_INSTANCE_ATTEMPTS = 64


@dataclass(frozen=True)
class EvalRecord:
    """One benchmark instance with its exact ground truth."""

    instance_id: str
    graph: Graph
    query: Query
    ground_truth: Answer
    size_band: str
    seed: int

    def __post_init__(self) -> None:
        lo, hi = SIZE_BANDS[self.size_band]
        if not (lo <= self.graph.node_count <= hi):
            raise ValueError(
                f"{self.graph.node_count} nodes falls outside band {self.size_band}"
            )


def band_of(node_count: int) -> str:
    for label, (lo, hi) in SIZE_BANDS.items():
        if lo <= node_count <= hi:
            return label
    raise ValueError(f"{node_count} nodes fits no size band")


def _far_query(g: Graph, task: Task, pair_seed: int) -> Optional[Query]:
    connected_only = task is Task.SHORTEST_PATH
    pair = pick_far_pair(g, pair_seed, connected_only=connected_only)
    if pair is None:
        return None
    return Query(task, pair[0], pair[1])


def _gen_instance(task: Task, band: tuple[int, int], seed: int, want_cycle: Optional[bool]) -> tuple[Graph, Query]:
    rng = random.Random(seed)
    for _ in range(_INSTANCE_ATTEMPTS):
        graph_seed = rng.getrandbits(63)
        pair_seed = rng.getrandbits(63)
        if task is Task.CYCLE:
            if want_cycle:
                # At least 3 nodes: no simple 2-node graph contains a cycle.
                lo, hi = band
                g = gen_random_graph((max(lo, 3), hi), CYCLE_DENSE_DENSITY, False, graph_seed)
                if not oracle_solve(g, Query(task)).value:
                    continue
            else:
                g = gen_random_forest(band, CYCLE_FOREST_FRACTION, graph_seed)
            return g, Query(task)
        if task is Task.TRIANGLE_COUNT:
            g = gen_random_graph(band, EDGE_DENSITY[task], False, graph_seed)
            return g, Query(task)
        weighted = task is Task.SHORTEST_PATH
        g = gen_random_graph(band, EDGE_DENSITY[task], weighted, graph_seed)
        q = _far_query(g, task, pair_seed)
        if q is not None:
            return g, q
    label = f" (label {'yes' if want_cycle else 'no'})" if task is Task.CYCLE else ""
    raise GenerationError(f"could not generate a {task.value} instance in band {band}{label}")


def generate_dataset(task: Task, per_band_count: int, seed: int) -> list[EvalRecord]:
    """Generate ``per_band_count`` instances in each size band.

    Deterministic for a given (task, count, seed); every record's ground
    truth is produced by the exact whole-graph solver. Cycle labels alternate
    so each band is balanced to within one instance.
    """
    task = Task(task)
    if per_band_count < 1:
        raise ValueError(f"per_band_count must be >= 1, got {per_band_count}")
    master = random.Random(seed)
    records: list[EvalRecord] = []
    for label, band in SIZE_BANDS.items():
        for i in range(per_band_count):
            instance_seed = master.getrandbits(63)
            want_cycle = (i % 2 == 0) if task is Task.CYCLE else None
            g, q = _gen_instance(task, band, instance_seed, want_cycle)
            truth = oracle_solve(g, q)
            if want_cycle is not None and truth.value is not want_cycle:
                raise GenerationError(
                    f"cycle generator produced a {truth.render()} graph where "
                    f"{'yes' if want_cycle else 'no'} was required (band {label}, index {i})"
                )
            records.append(
                EvalRecord(
                    instance_id=f"{task.value}-{label}-{i:05d}",
                    graph=g,
                    query=q,
                    ground_truth=truth,
                    size_band=label,
                    seed=instance_seed,
                )
            )
    return records


# ----------------------------------------------------------------------------
# JSON-lines persistence
# ----------------------------------------------------------------------------


def record_to_json(record: EvalRecord) -> str:
    payload = {
        "instance_id": record.instance_id,
        "task": record.query.task.value,
        "size_band": record.size_band,
        "seed": record.seed,
        "graph": render_graph_text(record.graph),
        "ground_truth": record.ground_truth.render(),
    }
    if record.query.source is not None:
        payload["source"] = record.query.source
        payload["target"] = record.query.target
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def record_from_json(line: str) -> EvalRecord:
    payload = json.loads(line)
    task = Task(payload["task"])
    query = Query(task, payload.get("source"), payload.get("target"))
    return EvalRecord(
        instance_id=payload["instance_id"],
        graph=parse_graph_text(payload["graph"]),
        query=query,
        ground_truth=Answer.parse(payload["ground_truth"], task),
        size_band=payload["size_band"],
        seed=payload["seed"],
    )


def save_dataset(records: Iterable[EvalRecord], path: Union[str, Path]) -> None:
    text = "".join(record_to_json(r) + "\n" for r in records)
    Path(path).write_bytes(text.encode("ascii"))


def load_dataset(path: Union[str, Path]) -> list[EvalRecord]:
    records = []
    with open(path, "r", encoding="ascii") as handle:
        for line in handle:
            line = line.strip()
            if line:
                records.append(record_from_json(line))
    return records
