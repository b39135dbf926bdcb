"""Conversational question answering with structured representations.

Instead of rewriting an incomplete follow-up question, the pipeline selects
the relevant history turns by soft-cosine similarity, generates a structured
representation — (context entities | question entities) — from them, and
feeds the augmented question to an extractive reader.  The package also
ships the rewrite-then-answer pipeline, the positional prepend baselines, a
QuAC-style evaluation suite, a live-session HTTP service, and a CLI.
"""

from .core import (
    AnswerSpan,
    Dialogue,
    NO_ANSWER_MARKER,
    Passage,
    Question,
    SelectionConfig,
    StructuredRepresentation,
    Turn,
    sr_parse,
    sr_serialize,
)
from .similarity import (
    TermSimilarityModel,
    TurnScore,
    load_embeddings,
    score_history,
    select_history,
    soft_cosine,
    term_vector,
    tokenize,
)

__version__ = "0.1.0"

__all__ = [
    "AnswerSpan",
    "Dialogue",
    "NO_ANSWER_MARKER",
    "Passage",
    "Question",
    "SelectionConfig",
    "StructuredRepresentation",
    "TermSimilarityModel",
    "Turn",
    "TurnScore",
    "load_embeddings",
    "score_history",
    "select_history",
    "soft_cosine",
    "sr_parse",
    "sr_serialize",
    "term_vector",
    "tokenize",
    "__version__",
]
