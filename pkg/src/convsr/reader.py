"""Extractive answer prediction over a passage.

The lexical backend exists so the whole pipeline is runnable and testable
without trained models: it scores every passage token window (up to a length
cap) by idf-weighted overlap between the query bag — question tokens at full
weight, history tokens at half weight — and the window plus its surrounding
context tokens.  idf is computed over the passage's own sentences, keeping
prediction passage-local and deterministic.  The remote backend forwards the
same structured input to a model server over HTTP.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache

import requests

from .core import AnswerSpan, Dialogue, Passage, Question, SelectionConfig
from .errors import InvalidRemoteSpanError, ReaderUnavailableError
from .similarity import TermSimilarityModel, score_history, select_history, tokenize

_SENTENCE_SPLIT = re.compile(r"(?<=[.!?])\s+")
_TOKEN_WITH_POS = re.compile(r"[A-Za-z0-9]+")


@dataclass(frozen=True)
class HistoryPolicy:
    """How prior turns are composed into the reader input.

    Kinds: ``none``, ``prepend_init``, ``prepend_prev``, ``prepend_init_prev``,
    ``prepend_all``, and ``dynamic`` (soft-cosine scoring + hard selection,
    which carries a :class:`SelectionConfig`).
    """

    kind: str
    selection: SelectionConfig | None = None

    _KINDS = ("none", "prepend_init", "prepend_prev", "prepend_init_prev",
              "prepend_all", "dynamic")

    def __post_init__(self):
        if self.kind not in self._KINDS:
            raise ValueError(f"unknown history policy {self.kind!r}")
        if self.kind == "dynamic" and self.selection is None:
            raise ValueError("dynamic policy requires a SelectionConfig")

    @classmethod
    def dynamic(cls, selection: SelectionConfig) -> "HistoryPolicy":
        return cls("dynamic", selection)


POLICY_NONE = HistoryPolicy("none")
POLICY_PREPEND_INIT = HistoryPolicy("prepend_init")
POLICY_PREPEND_PREV = HistoryPolicy("prepend_prev")
POLICY_PREPEND_INIT_PREV = HistoryPolicy("prepend_init_prev")
POLICY_PREPEND_ALL = HistoryPolicy("prepend_all")


@dataclass(frozen=True)
class LexicalParams:
    max_span_tokens: int = 30
    no_answer_threshold: float = 0.1
    context_window: int = 10
    history_weight: float = 0.5

    def __post_init__(self):
        if self.max_span_tokens <= 0:
            raise ValueError("max_span_tokens must be positive")
        if self.no_answer_threshold < 0:
            raise ValueError("no_answer_threshold must be non-negative")
        if self.context_window < 0:
            raise ValueError("context_window must be non-negative")


@dataclass(frozen=True)
class ReaderBackend:
    kind: str = "lexical"  # "lexical" | "remote"
    params: LexicalParams = field(default_factory=LexicalParams)
    endpoint: str = ""
    timeout: float = 30.0

    def __post_init__(self):
        if self.kind not in ("lexical", "remote"):
            raise ValueError(f"unknown reader kind {self.kind!r}")
        if self.kind == "remote" and not re.match(r"^https?://", self.endpoint):
            raise ValueError(f"remote reader needs an http(s) endpoint, got {self.endpoint!r}")


@dataclass(frozen=True)
class ReaderInput:
    """Composed reader query: passage, (possibly augmented) question, history."""

    passage: Passage
    question_text: str
    history: tuple = ()  # chronological (question_text, answer_text) pairs
    policy_tag: str = ""

    def to_payload(self) -> dict:
        """Wire form of the input; the policy tag is reporting metadata only."""
        return {
            "context": self.passage.text,
            "question": self.question_text,
            "history": [{"q": q, "a": a} for q, a in self.history],
        }


def policy_turns(question: Question, dialogue: Dialogue, policy: HistoryPolicy,
                 model: TermSimilarityModel | None = None):
    """Prior turns a history policy selects for a question, in order.

    The first turn yields an empty selection under every policy; the
    ``prepend_init_prev`` pair deduplicates when the previous turn is the
    initial one.
    """
    prior = dialogue.history_before(question.turn_index)
    if policy.kind == "none" or not prior:
        return []
    if policy.kind == "prepend_init":
        return prior[:1]
    if policy.kind == "prepend_prev":
        return prior[-1:]
    if policy.kind == "prepend_init_prev":
        return prior[:1] if len(prior) == 1 else [prior[0], prior[-1]]
    if policy.kind == "prepend_all":
        return prior
    # dynamic
    if model is None:
        raise ValueError("dynamic policy requires a term-similarity model")
    scores = score_history(question, prior, model)
    keep = set(select_history(scores, policy.selection))
    return [t for t in prior if t.question.turn_index in keep]


def compose_input(question: Question, dialogue: Dialogue, policy: HistoryPolicy,
                  augmented_text: str | None = None,
                  model: TermSimilarityModel | None = None) -> ReaderInput:
    """Build the reader input for a question under a history policy."""
    selected = policy_turns(question, dialogue, policy, model)
    history = tuple((t.question.text, t.answer_text()) for t in selected)
    return ReaderInput(
        passage=dialogue.passage,
        question_text=augmented_text if augmented_text is not None else question.text,
        history=history,
        policy_tag=policy.kind,
    )


# ---------------------------------------------------------------------------
# Lexical reader
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _PassageIndex:
    tokens: tuple[str, ...]
    starts: tuple[int, ...]
    ends: tuple[int, ...]
    idf: dict
    num_sentences: int

    def idf_of(self, token: str) -> float:
        # Tokens the passage never saw get the maximum-rarity idf.
        return self.idf.get(token, 1.0 + math.log(self.num_sentences))


@lru_cache(maxsize=256)
def _index_passage(passage: Passage) -> _PassageIndex:
    """Token offsets and sentence-level idf for the answerable passage text.

    The trailing no-answer sentinel is excluded from candidate tokens and
    from the idf sentence base; it is a marker, not passage content.
    """
    answerable = passage.answerable_text
    tokens, starts, ends = [], [], []
    for m in _TOKEN_WITH_POS.finditer(answerable):
        tokens.append(m.group().lower())
        starts.append(m.start())
        ends.append(m.end())
    sentences = [s for s in _SENTENCE_SPLIT.split(answerable) if s.strip()]
    n_sent = max(1, len(sentences))
    df = Counter()
    for sentence in sentences or [answerable]:
        df.update(set(tokenize(sentence)))
    idf = {tok: 1.0 + math.log(n_sent / df_count) for tok, df_count in df.items()}
    return _PassageIndex(tuple(tokens), tuple(starts), tuple(ends), idf, n_sent)


def query_bag(question_text: str, history, history_weight: float = 0.5) -> dict:
    """Token weights: question occurrences at 1.0, history occurrences at
    ``history_weight`` each."""
    bag = Counter()
    for tok in tokenize(question_text):
        bag[tok] += 1.0
    for q, a in history:
        for tok in tokenize(f"{q} {a}"):
            bag[tok] += history_weight
    return dict(bag)


def score_window(passage: Passage, bag: dict, start: int, end: int,
                 params: LexicalParams = LexicalParams()) -> float:
    """Normalized score of one token window [start, end); exposed for
    property checks against the stated formula."""
    index = _index_passage(passage)
    mass = sum(index.idf_of(t) * w for t, w in bag.items())
    if mass == 0.0:
        return 0.0
    lo = max(0, start - params.context_window)
    hi = min(len(index.tokens), end + params.context_window)
    region = Counter(index.tokens[lo:hi])
    raw = sum(min(bag[t], c) * index.idf_of(t) for t, c in region.items() if t in bag)
    return raw / mass


def _best_window(index: _PassageIndex, bag: dict, params: LexicalParams):
    """(start, end, normalized score) of the best window, or None.

    Ties resolve to the earliest start, then the shortest span — guaranteed
    by the ascending iteration order with strict improvement.
    """
    n = len(index.tokens)
    if n == 0:
        return None
    mass = sum(index.idf_of(t) * w for t, w in bag.items())
    if mass == 0.0:
        return 0, 1, 0.0
    w, L = params.context_window, params.max_span_tokens
    best = None  # (raw, start, end)
    for i in range(n):
        counts = Counter()
        raw = 0.0
        lo = max(0, i - w)
        for t in index.tokens[lo:min(n, i + 1 + w)]:
            c = counts[t]
            counts[t] += 1
            b = bag.get(t)
            if b is not None:
                raw += (min(b, c + 1) - min(b, c)) * index.idf_of(t)
        if best is None or raw > best[0]:
            best = (raw, i, i + 1)
        for j in range(i + 2, min(n, i + L) + 1):
            add_at = j - 1 + w
            if add_at < n:
                t = index.tokens[add_at]
                c = counts[t]
                counts[t] += 1
                b = bag.get(t)
                if b is not None:
                    raw += (min(b, c + 1) - min(b, c)) * index.idf_of(t)
            if raw > best[0]:
                best = (raw, i, j)
    raw, start, end = best
    return start, end, raw / mass


def _lexical_predict(inp: ReaderInput, params: LexicalParams) -> AnswerSpan:
    passage = inp.passage
    index = _index_passage(passage)
    bag = query_bag(inp.question_text, inp.history, params.history_weight)
    found = _best_window(index, bag, params)
    if found is None:
        return AnswerSpan(text=passage.cannot_answer_marker, start_char=-1, score=0.0)
    start, end, score = found
    if score < params.no_answer_threshold:
        return AnswerSpan(text=passage.cannot_answer_marker, start_char=-1, score=score)
    char_start = index.starts[start]
    char_end = index.ends[end - 1]
    return AnswerSpan(text=passage.text[char_start:char_end], start_char=char_start, score=score)


def _remote_predict(inp: ReaderInput, backend: ReaderBackend) -> AnswerSpan:
    try:
        response = requests.post(
            backend.endpoint.rstrip("/") + "/predict",
            json=inp.to_payload(), timeout=backend.timeout)
        response.raise_for_status()
        data = response.json()
        text, start, score = data["text"], int(data["start_char"]), float(data["score"])
    except (requests.RequestException, KeyError, TypeError, ValueError) as exc:
        raise ReaderUnavailableError(f"remote reader failed: {exc}") from exc
    passage = inp.passage
    if start < 0 or text == passage.cannot_answer_marker:
        return AnswerSpan(text=passage.cannot_answer_marker, start_char=-1, score=score)
    if passage.text[start:start + len(text)] != text:
        raise InvalidRemoteSpanError(
            f"remote span {text!r}@{start} does not match the passage")
    return AnswerSpan(text=text, start_char=start, score=score)


def predict(inp: ReaderInput, backend: ReaderBackend) -> AnswerSpan:
    """Answer a composed reader input with the configured backend."""
    if backend.kind == "lexical":
        return _lexical_predict(inp, backend.params)
    return _remote_predict(inp, backend)
