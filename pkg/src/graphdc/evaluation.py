"""Batch evaluation over a dataset with per-band accuracy reporting.

Scoring is exact match against the stored ground truth (shortest-path answers
must report the exact distance). Per-record failures (transport, extraction,
synthesis) are scored as incorrect and tallied by kind; they never abort a
run. Aggregation is a commutative reduction, so record order cannot change
the report.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Union

from .datasets import SIZE_BANDS, EvalRecord, load_dataset
from .pipeline import GraphDC, PipelineResult

REPORT_FILENAME = "report.json"
TABLE_FILENAME = "report.txt"
TRACE_DIRNAME = "traces"


@dataclass
class BandStats:
    total: int = 0
    correct: int = 0
    transport_failures: int = 0
    extraction_failures: int = 0
    other_failures: int = 0

    @property
    def accuracy(self) -> Optional[float]:
        return self.correct / self.total if self.total else None


@dataclass
class RunReport:
    task: str
    backend: str
    synthesis: str
    bands: dict[str, BandStats] = field(default_factory=dict)
    wall_clock_s: float = 0.0
    prompt_tokens: int = 0
    completion_tokens: int = 0

    def band(self, label: str) -> BandStats:
        return self.bands.setdefault(label, BandStats())

    @property
    def total(self) -> int:
        return sum(b.total for b in self.bands.values())

    @property
    def correct(self) -> int:
        return sum(b.correct for b in self.bands.values())

    @property
    def accuracy(self) -> Optional[float]:
        return self.correct / self.total if self.total else None

    def to_json(self) -> str:
        payload = {
            "task": self.task,
            "backend": self.backend,
            "synthesis": self.synthesis,
            "wall_clock_s": round(self.wall_clock_s, 3),
            "prompt_tokens": self.prompt_tokens,
            "completion_tokens": self.completion_tokens,
            "bands": {
                label: {
                    "total": b.total,
                    "correct": b.correct,
                    "transport_failures": b.transport_failures,
                    "extraction_failures": b.extraction_failures,
                    "other_failures": b.other_failures,
                }
                for label, b in self.bands.items()
            },
        }
        return json.dumps(payload, sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        payload = json.loads(text)
        report = cls(
            task=payload["task"],
            backend=payload["backend"],
            synthesis=payload["synthesis"],
            wall_clock_s=payload["wall_clock_s"],
            prompt_tokens=payload["prompt_tokens"],
            completion_tokens=payload["completion_tokens"],
        )
        for label, b in payload["bands"].items():
            report.bands[label] = BandStats(**b)
        return report

    def format_table(self) -> str:
        """Accuracy per size band, bands as columns."""
        labels = [l for l in SIZE_BANDS if l in self.bands] or list(self.bands)
        width = 9

        def row(name: str, cells: list[str]) -> str:
            return name.ljust(22) + "".join(c.rjust(width) for c in cells)

        def pct(b: BandStats) -> str:
            return "-" if b.accuracy is None else f"{100 * b.accuracy:.1f}%"

        lines = [
            f"task: {self.task}   backend: {self.backend}   synthesis: {self.synthesis}",
            row("band", labels + ["overall"]),
            row(
                "accuracy",
                [pct(self.bands[l]) for l in labels]
                + ["-" if self.accuracy is None else f"{100 * self.accuracy:.1f}%"],
            ),
            row(
                "correct/total",
                [f"{self.bands[l].correct}/{self.bands[l].total}" for l in labels]
                + [f"{self.correct}/{self.total}"],
            ),
            row(
                "transport fail",
                [str(self.bands[l].transport_failures) for l in labels]
                + [str(sum(b.transport_failures for b in self.bands.values()))],
            ),
            row(
                "extraction fail",
                [str(self.bands[l].extraction_failures) for l in labels]
                + [str(sum(b.extraction_failures for b in self.bands.values()))],
            ),
            row(
                "other fail",
                [str(self.bands[l].other_failures) for l in labels]
                + [str(sum(b.other_failures for b in self.bands.values()))],
            ),
            f"wall clock: {self.wall_clock_s:.1f}s   "
            f"tokens: prompt={self.prompt_tokens} completion={self.completion_tokens}",
        ]
        return "\n".join(lines) + "\n"


def score_record(result: PipelineResult, record: EvalRecord) -> bool:
    return result.answer is not None and result.answer == record.ground_truth


def run_eval(
    dataset: Union[str, Path, Iterable[EvalRecord]],
    pipeline: GraphDC,
    workers: int = 1,
    out_dir: Optional[Union[str, Path]] = None,
) -> RunReport:
    """Run the pipeline over every record and aggregate per-band accuracy.

    ``dataset`` is a JSONL path or an iterable of records. With ``out_dir``
    set, the report (JSON and table) and one trace file per instance are
    written under it. Worker threads bound the number of in-flight instances.
    """
    if isinstance(dataset, (str, Path)):
        records = load_dataset(dataset)
    else:
        records = list(dataset)
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")

    pipeline.fit()
    backend_name = pipeline.backend if isinstance(pipeline.backend, str) else getattr(
        pipeline.backend, "kind", type(pipeline.backend).__name__
    )
    task = records[0].query.task.value if records else "-"
    report = RunReport(task=task, backend=backend_name, synthesis=pipeline.synthesis)

    trace_dir = None
    if out_dir is not None:
        out_dir = Path(out_dir)
        trace_dir = out_dir / TRACE_DIRNAME
        trace_dir.mkdir(parents=True, exist_ok=True)

    def solve_one(record: EvalRecord) -> PipelineResult:
        try:
            return pipeline.solve(
                record.graph, record.query, instance_id=record.instance_id, seed=record.seed
            )
        except Exception as exc:  # defensive: a batch must never die mid-run
            from .pipeline import Trace

            trace = Trace(
                task=record.query.task.value,
                question="-",
                backend=str(backend_name),
                synthesis=pipeline.synthesis,
                instance_id=record.instance_id,
                seed=record.seed,
                error=f"{type(exc).__name__}: {exc}",
            )
            return PipelineResult(answer=None, trace=trace, error=trace.error, error_kind="other")

    started = time.perf_counter()
    if workers > 1 and len(records) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(solve_one, records))
    else:
        results = [solve_one(r) for r in records]
    report.wall_clock_s = round(time.perf_counter() - started, 3)

    for record, result in zip(records, results):
        stats = report.band(record.size_band)
        stats.total += 1
        if score_record(result, record):
            stats.correct += 1
        if result.error_kind == "transport":
            stats.transport_failures += 1
        elif result.error_kind == "extraction":
            stats.extraction_failures += 1
        elif result.error_kind is not None:
            stats.other_failures += 1
        report.prompt_tokens += result.trace.prompt_tokens
        report.completion_tokens += result.trace.completion_tokens
        if trace_dir is not None:
            path = trace_dir / f"{record.instance_id}.txt"
            path.write_bytes(result.trace.to_text().encode("utf-8"))

    if out_dir is not None:
        (out_dir / REPORT_FILENAME).write_text(report.to_json() + "\n", encoding="ascii")
        (out_dir / TABLE_FILENAME).write_text(report.format_table(), encoding="ascii")
    return report


def load_report(run_dir: Union[str, Path]) -> RunReport:
    return RunReport.from_json((Path(run_dir) / REPORT_FILENAME).read_text(encoding="ascii"))
