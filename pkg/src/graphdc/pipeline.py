"""End-to-end orchestration and the scikit-learn estimator surface.

:class:`GraphDC` runs the whole flow for one instance: split the graph,
render one sub-query per subgraph, collect and distill the agents' raw
responses, then synthesize the global answer either exactly or through a
master chat call. Every run yields a :class:`Trace` that records the
decomposition, the prompts, the raw and extracted answers, and timings.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

from sklearn.base import BaseEstimator, TransformerMixin

from .backends import (
    DEFAULT_MAX_INFLIGHT,
    DEFAULT_MAX_RETRIES,
    DEFAULT_TIMEOUT_S,
    ExactLocalBackend,
    LlmChatBackend,
    MalformedResponse,
    TransportError,
)
from .graphs import Answer, Graph, Query
from .partition import (
    DEFAULT_MAX_SUBGRAPH_SIZE,
    Decomposition,
    render_decomposition_text,
    split,
)
from .subanswers import ExtractionError, extract, extract_final, render_payload
from .subqueries import SubQuery, describe, load_template, question_sentence
from .synthesis import (
    SynthesisError,
    render_master_prompt,
    synthesize_exact,
)
from .validation import ensure_graph, ensure_instances, ensure_max_subgraph_size, ensure_query

BACKEND_KINDS = ("exact", "llm")
SYNTHESIS_MODES = ("exact", "llm")


@dataclass
class Trace:
    """Everything one pipeline run saw and produced, for audit and replay."""

    task: str
    question: str
    backend: str
    synthesis: str
    instance_id: Optional[str] = None
    seed: Optional[int] = None
    decomposition_text: str = ""
    subquery_texts: list[str] = field(default_factory=list)
    raw_responses: list[str] = field(default_factory=list)
    extracted_lines: list[str] = field(default_factory=list)
    master_prompt: Optional[str] = None
    final: Optional[str] = None
    error: Optional[str] = None
    timings_s: dict[str, float] = field(default_factory=dict)
    prompt_tokens: int = 0
    completion_tokens: int = 0

    def to_text(self) -> str:
        """Render the trace as one structured ASCII document (LF endings)."""
        lines = [
            "# graphdc trace",
            f"instance_id: {self.instance_id or '-'}",
            f"task: {self.task}",
            f"question: {self.question}",
            f"backend: {self.backend}",
            f"synthesis: {self.synthesis}",
            f"seed: {self.seed if self.seed is not None else '-'}",
            "",
            "## decomposition",
            self.decomposition_text.rstrip("\n"),
        ]
        for i, text in enumerate(self.subquery_texts):
            lines += ["", f"## subquery {i}", text]
        for i, raw in enumerate(self.raw_responses):
            lines += ["", f"## response {i}", raw]
        lines += ["", "## extracted"]
        lines += self.extracted_lines or ["-"]
        if self.master_prompt is not None:
            lines += ["", "## master prompt", self.master_prompt]
        timing = " ".join(f"{k}={v * 1000:.2f}ms" for k, v in self.timings_s.items())
        lines += [
            "",
            "## result",
            f"answer: {self.final if self.final is not None else '-'}",
            f"error: {self.error if self.error is not None else '-'}",
            f"timings: {timing}",
            f"tokens: prompt={self.prompt_tokens} completion={self.completion_tokens}",
        ]
        return "\n".join(lines) + "\n"


@dataclass
class PipelineResult:
    answer: Optional[Answer]
    trace: Trace
    error: Optional[str] = None
    error_kind: Optional[str] = None

    @property
    def failed(self) -> bool:
        return self.error is not None


_ERROR_KINDS = (
    ((TransportError, MalformedResponse), "transport"),
    (ExtractionError, "extraction"),
    (SynthesisError, "synthesis"),
)


def _classify_error(exc: Exception) -> str:
    for types, kind in _ERROR_KINDS:
        if isinstance(exc, types):
            return kind
    return "other"


class GraphSplitter(BaseEstimator, TransformerMixin):
    """Transformer wrapping the modularity splitter.

    ``transform`` maps a sequence of graphs to their decompositions, so the
    splitter slots into sklearn pipelines and grid searches over the size cap.
    """

    def __init__(self, max_subgraph_size: int = DEFAULT_MAX_SUBGRAPH_SIZE):
        self.max_subgraph_size = max_subgraph_size

    def fit(self, X=None, y=None) -> "GraphSplitter":
        ensure_max_subgraph_size(self.max_subgraph_size)
        return self

    def transform(self, X: Sequence[Graph]) -> list[Decomposition]:
        ensure_max_subgraph_size(self.max_subgraph_size)
        return [split(ensure_graph(g), self.max_subgraph_size) for g in X]


class GraphDC(BaseEstimator):
    """Divide-and-conquer graph reasoning engine with an estimator interface.

    Parameters mirror the run configuration: the subgraph size cap, which
    sub-agent backend answers the sub-queries ("exact", "llm", or a backend
    object), how the final answer is synthesized ("exact" or "llm"), and the
    chat-endpoint settings used whenever a chat backend is involved.

    The estimator is stateless; ``fit`` only validates parameters. ``predict``
    takes (graph, query) pairs and returns one :class:`Answer` (or None on a
    per-instance failure) each; :meth:`solve` runs a single instance and
    returns the full result with its trace.
    """

    def __init__(
        self,
        max_subgraph_size: int = DEFAULT_MAX_SUBGRAPH_SIZE,
        backend: object = "exact",
        synthesis: str = "exact",
        endpoint: Optional[str] = None,
        model: Optional[str] = None,
        timeout: float = DEFAULT_TIMEOUT_S,
        max_retries: int = DEFAULT_MAX_RETRIES,
        max_inflight: int = DEFAULT_MAX_INFLIGHT,
        master_backend: Optional[object] = None,
    ):
        self.max_subgraph_size = max_subgraph_size
        self.backend = backend
        self.synthesis = synthesis
        self.endpoint = endpoint
        self.model = model
        self.timeout = timeout
        self.max_retries = max_retries
        self.max_inflight = max_inflight
        self.master_backend = master_backend

    # -- configuration ------------------------------------------------------

    def _build_chat_backend(self) -> LlmChatBackend:
        if not self.endpoint or not self.model:
            raise ValueError("the llm backend needs both endpoint and model")
        return LlmChatBackend(
            endpoint=self.endpoint,
            model=self.model,
            timeout=self.timeout,
            max_retries=self.max_retries,
            max_inflight=self.max_inflight,
        )

    def _resolve(self) -> tuple[object, Optional[object]]:
        """The (sub-agent backend, master chat backend or None) pair."""
        ensure_max_subgraph_size(self.max_subgraph_size)
        if self.synthesis not in SYNTHESIS_MODES:
            raise ValueError(f"synthesis must be one of {SYNTHESIS_MODES}, got {self.synthesis!r}")

        if isinstance(self.backend, str):
            if self.backend not in BACKEND_KINDS:
                raise ValueError(f"backend must be one of {BACKEND_KINDS}, got {self.backend!r}")
            sub_backend = ExactLocalBackend() if self.backend == "exact" else self._build_chat_backend()
        else:
            if not hasattr(self.backend, "answer"):
                raise TypeError(f"{type(self.backend).__name__} has no answer() method")
            sub_backend = self.backend

        master = None
        if self.synthesis == "llm":
            if self.master_backend is not None:
                master = self.master_backend
            elif hasattr(sub_backend, "chat"):
                master = sub_backend
            else:
                master = self._build_chat_backend()
            if not hasattr(master, "chat"):
                raise TypeError(f"{type(master).__name__} cannot chat; llm synthesis needs one")
        return sub_backend, master

    def fit(self, X=None, y=None) -> "GraphDC":
        """Validate the configuration; there is nothing to learn."""
        self._resolve()
        return self

    # -- single instance ----------------------------------------------------

    def solve(
        self,
        g: Graph,
        q: Query,
        instance_id: Optional[str] = None,
        seed: Optional[int] = None,
    ) -> PipelineResult:
        """Run split -> describe -> answer -> extract -> synthesize on one
        instance, capturing a full trace. Module errors become a per-instance
        failure record instead of an exception."""
        ensure_graph(g)
        ensure_query(g, q)
        sub_backend, master = self._resolve()
        backend_name = getattr(sub_backend, "kind", type(sub_backend).__name__)
        trace = Trace(
            task=q.task.value,
            question=question_sentence(q),
            backend=backend_name,
            synthesis=self.synthesis,
            instance_id=instance_id,
            seed=seed,
        )
        started = time.perf_counter()
        try:
            t0 = time.perf_counter()
            d = split(g, self.max_subgraph_size)
            trace.timings_s["split"] = time.perf_counter() - t0
            trace.decomposition_text = render_decomposition_text(d)

            t0 = time.perf_counter()
            template = load_template(q.task)
            subqueries = [describe(sub, q, template) for sub in d.subgraphs]
            trace.subquery_texts = [sq.text for sq in subqueries]
            trace.timings_s["describe"] = time.perf_counter() - t0

            t0 = time.perf_counter()
            raws = self._answer_all(sub_backend, d, subqueries, trace)
            trace.raw_responses = list(raws)
            trace.timings_s["answer"] = time.perf_counter() - t0

            t0 = time.perf_counter()
            extracted = [
                extract(raw, q.task, sq.terminals, sq.subgraph_id)
                for raw, sq in zip(raws, subqueries)
            ]
            trace.extracted_lines = [
                f"subgraph {sa.subgraph_id}: {render_payload(sa.payload)}" for sa in extracted
            ]
            trace.timings_s["extract"] = time.perf_counter() - t0

            t0 = time.perf_counter()
            if self.synthesis == "llm":
                prompt = render_master_prompt(q, extracted, d.inter_edges, d.inter_weights)
                trace.master_prompt = prompt
                reply = master.chat(prompt)
                trace.prompt_tokens += reply.prompt_tokens
                trace.completion_tokens += reply.completion_tokens
                answer = extract_final(reply.text, q.task)
            else:
                answer = synthesize_exact(q, extracted, d.inter_edges, d.inter_weights)
            trace.timings_s["synthesize"] = time.perf_counter() - t0

            trace.final = answer.render()
            trace.timings_s["total"] = time.perf_counter() - started
            return PipelineResult(answer=answer, trace=trace)
        except (TransportError, MalformedResponse, ExtractionError, SynthesisError) as exc:
            trace.error = f"{type(exc).__name__}: {exc}"
            trace.timings_s["total"] = time.perf_counter() - started
            return PipelineResult(
                answer=None, trace=trace, error=trace.error, error_kind=_classify_error(exc)
            )

    def _answer_all(
        self,
        backend,
        d: Decomposition,
        subqueries: list[SubQuery],
        trace: Trace,
    ) -> list[str]:
        """Collect one raw response per subgraph, concurrently for chat
        backends (the sub-agent calls are independent)."""
        chatty = hasattr(backend, "chat")

        def one(idx: int) -> tuple[str, int, int]:
            sub, sq = d.subgraphs[idx], subqueries[idx]
            if chatty:
                reply = backend.chat(sq.text)
                return reply.text, reply.prompt_tokens, reply.completion_tokens
            return backend.answer(sub, sq), 0, 0

        indices = range(len(subqueries))
        if chatty and len(subqueries) > 1:
            workers = min(len(subqueries), getattr(backend, "max_inflight", DEFAULT_MAX_INFLIGHT))
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(one, indices))
        else:
            results = [one(i) for i in indices]
        for _text, prompt_tokens, completion_tokens in results:
            trace.prompt_tokens += prompt_tokens
            trace.completion_tokens += completion_tokens
        return [text for text, _pt, _ct in results]

    # -- batch interface ----------------------------------------------------

    def predict(self, X) -> list[Optional[Answer]]:
        """Answers for (graph, query) pairs; None where an instance failed."""
        pairs = ensure_instances(X)
        return [self.solve(g, q).answer for g, q in pairs]

    def score(self, X, y) -> float:
        """Exact-match accuracy of predict(X) against reference answers."""
        y = list(y)
        predictions = self.predict(X)
        if len(predictions) != len(y):
            raise ValueError(f"got {len(y)} references for {len(predictions)} instances")
        if not y:
            return 0.0
        return sum(p == t for p, t in zip(predictions, y)) / len(y)
