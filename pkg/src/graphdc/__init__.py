"""graphdc: divide-and-conquer graph reasoning.

Splits a graph into bounded-size subgraphs by greedy modularity, dispatches a
task-aware sub-query per subgraph to an agent (an exact local solver or a
chat-completions endpoint), and synthesizes the local answers together with
the inter-subgraph edges into the global answer. Ships with a benchmark
generator and an evaluation harness.
"""

from .backends import (
    API_KEY_ENV,
    ChatReply,
    ExactLocalBackend,
    LlmChatBackend,
    MalformedResponse,
    TransportError,
    compute_local_payload,
)
from .datasets import (
    EDGE_DENSITY,
    SIZE_BANDS,
    EvalRecord,
    generate_dataset,
    load_dataset,
    save_dataset,
)
from .evaluation import BandStats, RunReport, load_report, run_eval
from .graphs import (
    UNREACHABLE,
    Answer,
    AnswerKind,
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
from .partition import (
    Decomposition,
    Subgraph,
    decompose_with_partition,
    modularity,
    reconstruct,
    render_decomposition_text,
    split,
)
from .pipeline import GraphDC, GraphSplitter, PipelineResult, Trace
from .subanswers import (
    ComponentGrouping,
    CycleSummary,
    DistanceTable,
    ExtractionError,
    SubAnswer,
    TriangleSummary,
    extract,
    extract_final,
    format_answer_line,
)
from .subqueries import PromptTemplate, SubQuery, describe, load_master_template, load_template
from .synthesis import (
    MissingSubAnswer,
    PayloadKindMismatch,
    SynthesisError,
    render_master_prompt,
    synthesize_exact,
    synthesize_llm,
)

__version__ = "0.1.0"

__all__ = [
    "API_KEY_ENV",
    "Answer",
    "AnswerKind",
    "BandStats",
    "ChatReply",
    "ComponentGrouping",
    "CycleSummary",
    "Decomposition",
    "DistanceTable",
    "EDGE_DENSITY",
    "EvalRecord",
    "ExactLocalBackend",
    "ExtractionError",
    "GenerationError",
    "Graph",
    "GraphDC",
    "GraphSplitter",
    "LlmChatBackend",
    "MalformedResponse",
    "MissingSubAnswer",
    "PayloadKindMismatch",
    "PipelineResult",
    "PromptTemplate",
    "Query",
    "RunReport",
    "SIZE_BANDS",
    "SubAnswer",
    "SubQuery",
    "Subgraph",
    "SynthesisError",
    "Task",
    "Trace",
    "TransportError",
    "TriangleSummary",
    "UNREACHABLE",
    "compute_local_payload",
    "decompose_with_partition",
    "describe",
    "extract",
    "extract_final",
    "format_answer_line",
    "gen_random_forest",
    "gen_random_graph",
    "generate_dataset",
    "load_dataset",
    "load_master_template",
    "load_report",
    "load_template",
    "modularity",
    "oracle_solve",
    "parse_graph_text",
    "pick_far_pair",
    "reconstruct",
    "render_decomposition_text",
    "render_graph_text",
    "render_master_prompt",
    "run_eval",
    "save_dataset",
    "split",
    "synthesize_exact",
    "synthesize_llm",
]
