"""QuAC-style answer metrics and question statistics.

Token F1 follows the standard SQuAD/QuAC recipe: lowercase, strip punctuation
and articles, then bag-of-tokens precision/recall.  Human equivalence (HEQ)
compares per-question model F1 against human F1; with a single reference the
human F1 convention is 1.0, which makes HEQ strict on single-reference data.
"""

from __future__ import annotations

import re
import string
from collections import Counter
from dataclasses import dataclass

from .core import NO_ANSWER_MARKER
from .similarity import tokenize

_ARTICLES = {"a", "an", "the"}
_PUNCT_TABLE = str.maketrans("", "", string.punctuation)

# Closed third-person pronoun lexicon used by the question statistics.
PRONOUNS = frozenset([
    "he", "she", "it", "they", "him", "her", "them",
    "his", "hers", "its", "their", "theirs",
])

# Function words whose mid-sentence capitalization does not signal a proper noun.
PROPER_NOUN_STOPWORDS = frozenset([
    "the", "a", "an", "and", "or", "but", "nor", "so", "yet", "if", "then",
    "of", "in", "on", "at", "to", "for", "with", "by", "from", "as", "into",
    "about", "over", "under", "after", "before", "between", "during",
    "is", "are", "was", "were", "be", "been", "being", "am",
    "do", "does", "did", "have", "has", "had", "will", "would", "can",
    "could", "should", "shall", "may", "might", "must",
    "what", "who", "whom", "whose", "which", "when", "where", "why", "how",
    "this", "that", "these", "those", "there", "here", "not", "no", "yes",
    "i", "you", "we", "me", "us", "my", "your", "our", "mine", "yours", "ours",
]) | PRONOUNS

_WORD_RE = re.compile(r"[A-Za-z0-9]+(?:[.'’-][A-Za-z0-9]+)*")
_SENTENCE_END = frozenset(".!?")


def normalize(text: str) -> list[str]:
    """Lowercase, drop punctuation and articles, split on whitespace."""
    lowered = text.lower().translate(_PUNCT_TABLE)
    return [tok for tok in lowered.split() if tok not in _ARTICLES]


def token_f1(prediction: str, reference: str,
             no_answer_marker: str = NO_ANSWER_MARKER) -> float:
    """Bag-of-tokens F1 between a prediction and one reference.

    No-answer handling: if exactly one side is the no-answer marker the score
    is 0; if both are, it is 1.
    """
    pred_is_na = prediction.strip() == no_answer_marker
    ref_is_na = reference.strip() == no_answer_marker
    if pred_is_na or ref_is_na:
        return 1.0 if pred_is_na and ref_is_na else 0.0
    pred_tokens = normalize(prediction)
    ref_tokens = normalize(reference)
    if not pred_tokens or not ref_tokens:
        return 1.0 if pred_tokens == ref_tokens else 0.0
    common = Counter(pred_tokens) & Counter(ref_tokens)
    overlap = sum(common.values())
    if overlap == 0:
        return 0.0
    precision = overlap / len(pred_tokens)
    recall = overlap / len(ref_tokens)
    return 2 * precision * recall / (precision + recall)


def question_f1(prediction: str, references: list[str],
                no_answer_marker: str = NO_ANSWER_MARKER) -> float:
    """Max token F1 over the reference answers."""
    if not references:
        raise ValueError("question_f1 requires at least one reference")
    return max(token_f1(prediction, ref, no_answer_marker) for ref in references)


def human_f1(references: list[str], no_answer_marker: str = NO_ANSWER_MARKER) -> float:
    """Leave-one-out human performance estimate.

    A single reference scores 1.0 by convention; otherwise each reference is
    scored against the others and the best one wins.
    """
    if not references:
        raise ValueError("human_f1 requires at least one reference")
    if len(references) == 1:
        return 1.0
    best = 0.0
    for i, ref in enumerate(references):
        others = references[:i] + references[i + 1:]
        best = max(best, question_f1(ref, others, no_answer_marker))
    return best


@dataclass(frozen=True)
class QuestionResult:
    """Per-question evaluation row."""

    dialogue_id: str
    turn_index: int
    model_f1: float
    human_f1: float
    mode: str = ""
    policy: str = ""

    @property
    def heq(self) -> bool:
        return self.model_f1 >= self.human_f1


def heq_aggregate(results: list[QuestionResult]) -> tuple[float, float]:
    """(HEQ-Q, HEQ-D) as percentages.

    HEQ-Q is the fraction of questions whose model F1 meets or exceeds human
    F1; HEQ-D the fraction of dialogues where every question does.
    """
    if not results:
        raise ValueError("heq_aggregate requires at least one result")
    heq_q = sum(1 for r in results if r.heq) / len(results)
    by_dialogue: dict[str, bool] = {}
    for r in results:
        by_dialogue[r.dialogue_id] = by_dialogue.get(r.dialogue_id, True) and r.heq
    heq_d = sum(by_dialogue.values()) / len(by_dialogue)
    return heq_q * 100.0, heq_d * 100.0


@dataclass(frozen=True)
class QuestionStats:
    """Average question length / pronoun / proper-noun counts."""

    avg_length: float = 0.0
    avg_pronouns: float = 0.0
    avg_proper_nouns: float = 0.0

    def to_dict(self) -> dict:
        return {
            "avg_length": self.avg_length,
            "avg_pronouns": self.avg_pronouns,
            "avg_proper_nouns": self.avg_proper_nouns,
        }


def _words_with_sentence_flags(text: str) -> list[tuple[str, bool]]:
    """Word tokens of ``text`` paired with a sentence-initial flag."""
    out = []
    sentence_start = True
    cursor = 0
    for match in _WORD_RE.finditer(text):
        between = text[cursor:match.start()]
        if out and any(ch in _SENTENCE_END for ch in between):
            sentence_start = True
        out.append((match.group(), sentence_start))
        sentence_start = False
        cursor = match.end()
    return out


def count_pronouns(text: str) -> int:
    return sum(1 for tok in tokenize(text) if tok in PRONOUNS)


def count_proper_nouns(text: str) -> int:
    """Capitalized, non-sentence-initial tokens outside the stopword list."""
    count = 0
    for word, sentence_initial in _words_with_sentence_flags(text):
        if sentence_initial:
            continue
        if not word[0].isupper():
            continue
        if word.lower() in PROPER_NOUN_STOPWORDS:
            continue
        count += 1
    return count


def question_stats(questions: list[str]) -> QuestionStats:
    """Average length (tokens), pronoun count, and proper-noun count."""
    if not questions:
        return QuestionStats()
    n = len(questions)
    lengths = sum(len(tokenize(q)) for q in questions)
    pronouns = sum(count_pronouns(q) for q in questions)
    propers = sum(count_proper_nouns(q) for q in questions)
    return QuestionStats(lengths / n, pronouns / n, propers / n)
