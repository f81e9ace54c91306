"""Command-line interface: generate datasets, run evaluations, print reports.

Exit code 0 means the command itself completed; wrong answers are data in the
report, not errors. Chat-endpoint settings come from a JSON config file and
the GRAPHDC_API_KEY environment variable.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from .backends import DEFAULT_MAX_INFLIGHT, DEFAULT_MAX_RETRIES, DEFAULT_TIMEOUT_S
from .datasets import generate_dataset, save_dataset
from .evaluation import load_report, run_eval
from .graphs import GenerationError, Task
from .partition import DEFAULT_MAX_SUBGRAPH_SIZE
from .pipeline import GraphDC


def _load_config(path: Optional[str]) -> dict:
    if path is None:
        return {}
    with open(path, "r", encoding="utf-8") as handle:
        config = json.load(handle)
    if not isinstance(config, dict):
        raise ValueError(f"config file {path} must hold a JSON object")
    return config


def _cmd_gen(args: argparse.Namespace) -> int:
    records = generate_dataset(Task(args.task), args.per_band, args.seed)
    save_dataset(records, args.out)
    print(f"wrote {len(records)} instances ({args.per_band} per band) to {args.out}")
    return 0


def _cmd_run(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    if (args.backend == "llm" or args.synthesis == "llm") and "endpoint" not in config:
        print("error: --backend/--synthesis llm requires --config with endpoint and model", file=sys.stderr)
        return 2
    pipeline = GraphDC(
        max_subgraph_size=args.max_subgraph_size,
        backend=args.backend,
        synthesis=args.synthesis,
        endpoint=config.get("endpoint"),
        model=config.get("model"),
        timeout=config.get("timeout", DEFAULT_TIMEOUT_S),
        max_retries=config.get("max_retries", DEFAULT_MAX_RETRIES),
        max_inflight=config.get("max_inflight", DEFAULT_MAX_INFLIGHT),
    )
    report = run_eval(args.dataset, pipeline, workers=args.workers, out_dir=args.out_dir)
    print(report.format_table(), end="")
    print(f"report written to {Path(args.out_dir) / 'report.json'}")
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    report = load_report(args.run_dir)
    print(report.format_table(), end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graphdc",
        description="Divide-and-conquer graph reasoning benchmark tool",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a benchmark dataset")
    gen.add_argument("--task", required=True, choices=[t.value for t in Task])
    gen.add_argument("--per-band", dest="per_band", type=int, required=True,
                     help="instances per size band (5 bands total)")
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--out", required=True, help="output dataset file (JSONL)")
    gen.set_defaults(func=_cmd_gen)

    run = sub.add_parser("run", help="evaluate a pipeline over a dataset")
    run.add_argument("--dataset", required=True)
    run.add_argument("--backend", choices=["exact", "llm"], default="exact")
    run.add_argument("--synthesis", choices=["exact", "llm"], default="exact")
    run.add_argument("--max-subgraph-size", dest="max_subgraph_size", type=int,
                     default=DEFAULT_MAX_SUBGRAPH_SIZE)
    run.add_argument("--workers", type=int, default=4)
    run.add_argument("--out-dir", dest="out_dir", required=True)
    run.add_argument("--config", help="JSON file with endpoint/model/timeout settings")
    run.set_defaults(func=_cmd_run)

    rep = sub.add_parser("report", help="print the table for a finished run")
    rep.add_argument("--run-dir", dest="run_dir", required=True)
    rep.set_defaults(func=_cmd_report)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (GenerationError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
