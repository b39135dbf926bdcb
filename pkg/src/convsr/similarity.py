"""Term vectors, embedding-derived term similarity, soft cosine, and hard
history selection.

Soft cosine generalizes cosine similarity with a term-term similarity matrix
so that related-but-different words still contribute overlap:

    score(q, h) = sum_ij s_ij q_i h_j /
                  (sqrt(sum_ij s_ij q_i q_j) * sqrt(sum_ij s_ij h_i h_j))

``s_ij`` is 1 on the diagonal and, off-diagonal, the embedding cosine of the
two terms floored at zero and raised to an exponent (default 2).  Terms
without an embedding are similar only to themselves, so with no embeddings at
all the measure reduces to classical cosine over exact token matches.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .core import Question, SelectionConfig, Turn
from .errors import DataFormatError

_TOKEN_RE = re.compile(r"[a-z0-9]+")

TermVector = dict  # term -> frequency (positive real; raw counts by default)


def tokenize(text: str) -> list[str]:
    """Lowercase and split on non-alphanumeric boundaries; no stopword removal."""
    return _TOKEN_RE.findall(text.lower())


def term_vector(text: str) -> TermVector:
    """Raw term-frequency vector of a text."""
    return dict(Counter(tokenize(text)))


class TermSimilarityModel:
    """Vocabulary embeddings inducing the term-term similarity matrix.

    An empty model (no embeddings) is valid and makes every term similar only
    to itself.
    """

    def __init__(self, embeddings: dict[str, np.ndarray] | None = None,
                 exponent: float = 2.0, floor_at_zero: bool = True):
        self.embeddings = {}
        self.exponent = exponent
        self.floor_at_zero = floor_at_zero
        self.dimension = 0
        self._norms = {}
        if embeddings:
            dims = {len(v) for v in embeddings.values()}
            if len(dims) != 1:
                raise ValueError(f"inconsistent embedding dimensions: {sorted(dims)}")
            self.dimension = dims.pop()
            if self.dimension <= 0:
                raise ValueError("embedding dimension must be positive")
            for term, vec in embeddings.items():
                arr = np.asarray(vec, dtype=np.float64)
                self.embeddings[term] = arr
                self._norms[term] = float(np.linalg.norm(arr))

    def __contains__(self, term: str) -> bool:
        return term in self.embeddings

    def term_similarity(self, a: str, b: str) -> float:
        """Similarity s(a, b): 1 for identical terms, floored/powered embedding
        cosine for in-vocabulary pairs, 0 otherwise.  Symmetric."""
        if a == b:
            return 1.0
        va = self.embeddings.get(a)
        vb = self.embeddings.get(b)
        if va is None or vb is None:
            return 0.0
        na, nb = self._norms[a], self._norms[b]
        if na == 0.0 or nb == 0.0:
            return 0.0
        cos = float(np.dot(va, vb)) / (na * nb)
        if self.floor_at_zero:
            cos = max(0.0, cos)
        return cos ** self.exponent


def term_similarity(model: TermSimilarityModel, a: str, b: str) -> float:
    return model.term_similarity(a, b)


def load_embeddings(path, exponent: float = 2.0, floor_at_zero: bool = True) -> TermSimilarityModel:
    """Load a text embedding file: one ``token v1 v2 ... vd`` entry per line.

    The dimension is inferred from the first line and enforced thereafter;
    on duplicate tokens the first entry wins.
    """
    embeddings = {}
    dimension = None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts:
                continue
            token, values = parts[0], parts[1:]
            if dimension is None:
                dimension = len(values)
                if dimension == 0:
                    raise DataFormatError(f"{path}:{lineno}: no vector components")
            elif len(values) != dimension:
                raise DataFormatError(
                    f"{path}:{lineno}: expected {dimension} components, got {len(values)}")
            if token in embeddings:
                continue
            try:
                embeddings[token] = np.array([float(v) for v in values])
            except ValueError as exc:
                raise DataFormatError(f"{path}:{lineno}: {exc}") from exc
    return TermSimilarityModel(embeddings, exponent=exponent, floor_at_zero=floor_at_zero)


def _soft_inner(a: TermVector, b: TermVector, model: TermSimilarityModel) -> float:
    total = 0.0
    for ta, fa in a.items():
        for tb, fb in b.items():
            s = model.term_similarity(ta, tb)
            if s != 0.0:
                total += s * fa * fb
    return total


def soft_cosine(q: TermVector, h: TermVector, model: TermSimilarityModel) -> float:
    """Soft cosine similarity of two sparse term vectors, clamped to [0, 1].

    Returns 0 if either vector is empty.  Flooring negative term cosines can
    break positive semi-definiteness of the similarity matrix, so the final
    clamp enforces the documented range.
    """
    if not q or not h:
        return 0.0
    num = _soft_inner(q, h, model)
    den = math.sqrt(_soft_inner(q, q, model)) * math.sqrt(_soft_inner(h, h, model))
    if den == 0.0:
        return 0.0
    return min(1.0, max(0.0, num / den))


@dataclass(frozen=True)
class TurnScore:
    turn_index: int
    score: float


def turn_text(turn: Turn) -> str:
    """Text a history turn contributes to similarity scoring: its question
    concatenated with the best available answer."""
    answer = turn.answer_text()
    return f"{turn.question.text} {answer}".strip()


def _idf_weights(texts: list[str]) -> dict:
    """Smoothed idf over a small set of texts treated as documents."""
    df = Counter()
    for text in texts:
        df.update(set(tokenize(text)))
    n = max(1, len(texts))
    return {tok: 1.0 + math.log(n / count) for tok, count in df.items()}


def score_history(question: Question, dialogue_history: list[Turn],
                  model: TermSimilarityModel, use_idf: bool = False) -> list[TurnScore]:
    """Soft-cosine score of the current question against each history turn.

    History order is preserved; every turn gets exactly one score.  Raw term
    frequencies feed the measure by default; ``use_idf`` reweights them by
    idf computed over the texts being compared, downweighting terms common
    to every turn.
    """
    for turn in dialogue_history:
        if turn.question.turn_index >= question.turn_index:
            raise ValueError(
                f"history turn {turn.question.turn_index} does not precede "
                f"question turn {question.turn_index}")
    texts = [question.text] + [turn_text(t) for t in dialogue_history]
    vectors = [term_vector(text) for text in texts]
    if use_idf:
        idf = _idf_weights(texts)
        vectors = [{t: f * idf[t] for t, f in vec.items()} for vec in vectors]
    q_vec = vectors[0]
    return [
        TurnScore(turn.question.turn_index, soft_cosine(q_vec, h_vec, model))
        for turn, h_vec in zip(dialogue_history, vectors[1:])
    ]


def select_history(scores: list[TurnScore], config: SelectionConfig) -> list[int]:
    """Hard selection: keep turns whose score equals or surpasses the
    threshold; under a max-turns cap, the most recent qualifiers win.

    The result is a chronologically ordered subsequence of the input indices.
    """
    qualifying = [s.turn_index for s in scores if s.score >= config.threshold]
    if config.max_turns is not None and len(qualifying) > config.max_turns:
        qualifying = qualifying[-config.max_turns:]
    return qualifying
