"""Structured-representation generation and labeling.

An SR is the pair (context entities | question entities) attached to an
incomplete follow-up question.  This module provides:

* a deterministic capitalization-based mention extractor (a stand-in for
  NER at desk scale; neural extraction hides behind the remote backend),
* the classification rule that routes a mention into the context or
  question slot,
* a distant-supervision labeler that derives SR training labels from
  (original question, human rewrite, gold answer) triples by keeping
  exactly the entities whose addition improves the reader's answer,
* heuristic and remote SR generators, and question augmentation.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass

import requests

from .core import (
    Passage,
    StructuredRepresentation,
    Turn,
    sr_parse,
    sr_serialize,
)
from .errors import GeneratorUnavailableError, MalformedSRError, UnclassifiableMentionError
from .metrics import PROPER_NOUN_STOPWORDS, question_f1
from .reader import ReaderBackend, ReaderInput, predict

_WORD_RE = re.compile(r"[A-Za-z0-9]+(?:[.'’-][A-Za-z0-9]+)*")
_SENTENCE_END = frozenset(".!?")

# Lowercase linkers that may appear inside a capitalized run ("University of
# Sydney") but never start or end a mention.
_INTERNAL_LINKERS = frozenset(["of", "the", "and"])

ACCEPT_F1 = 0.8  # token-F1 bar for an answer span to count as retrieved


class MentionSource(str, enum.Enum):
    PRIOR_QUESTION = "prior_question"
    PRIOR_ANSWER = "prior_answer"
    PASSAGE = "passage"
    BACKGROUND = "background"
    REWRITE = "rewrite"


class EntitySlot(str, enum.Enum):
    CONTEXT = "context_entity"
    QUESTION = "question_entity"


@dataclass(frozen=True)
class EntityMention:
    surface: str
    source: MentionSource


def _mention_word(word: str) -> bool:
    return word[0].isupper() and word.lower() not in PROPER_NOUN_STOPWORDS


def extract_mentions(text: str, source: MentionSource = MentionSource.PASSAGE) -> list[EntityMention]:
    """Maximal capitalized runs in ``text``, deduplicated case-insensitively.

    Runs may contain internal linker words (``of``/``the``/``and``) between
    capitalized tokens, break on any punctuation between tokens, and a
    single-token run at a sentence start is dropped — its capitalization is
    positional, not informative.  Pronouns, wh-words, and other function
    words never join a run.
    """
    matches = list(_WORD_RE.finditer(text))
    sentence_initial = []
    cursor = 0
    for i, m in enumerate(matches):
        between = text[cursor:m.start()]
        sentence_initial.append(i == 0 or any(ch in _SENTENCE_END for ch in between))
        cursor = m.end()

    def adjacent(a, b) -> bool:
        return text[a.end():b.start()].strip() == ""

    mentions: list[EntityMention] = []
    seen: set[str] = set()
    i = 0
    while i < len(matches):
        if not _mention_word(matches[i].group()):
            i += 1
            continue
        run = [i]
        j = i + 1
        while j < len(matches) and adjacent(matches[j - 1], matches[j]):
            word = matches[j].group()
            if _mention_word(word):
                run.append(j)
                j += 1
            elif (word.lower() in _INTERNAL_LINKERS and j + 1 < len(matches)
                  and adjacent(matches[j], matches[j + 1])
                  and _mention_word(matches[j + 1].group())):
                run.extend([j, j + 1])
                j += 2
            else:
                break
        i = j
        if len(run) == 1 and sentence_initial[run[0]]:
            continue
        surface = text[matches[run[0]].start():matches[run[-1]].end()]
        key = surface.lower()
        if key not in seen:
            seen.add(key)
            mentions.append(EntityMention(surface=surface, source=source))
    return mentions


def _occurs(surface: str, text: str) -> bool:
    return bool(text) and surface.lower() in text.lower()


def classify_mention(mention: EntityMention, history: list[Turn], passage: Passage) -> EntitySlot:
    """Route a mention into a slot: prior-question occurrence wins (question
    entity); otherwise passage/background/title/prior-answer occurrence makes
    it a context entity."""
    surface = mention.surface
    if any(_occurs(surface, t.question.text) for t in history):
        return EntitySlot.QUESTION
    if _occurs(surface, passage.text) or _occurs(surface, passage.background) \
            or _occurs(surface, passage.title):
        return EntitySlot.CONTEXT
    for turn in history:
        if any(_occurs(surface, g.text) for g in turn.gold_answers):
            return EntitySlot.CONTEXT
        if turn.predicted_answer is not None and _occurs(surface, turn.predicted_answer.text):
            return EntitySlot.CONTEXT
    raise UnclassifiableMentionError(
        f"mention {surface!r} occurs in neither history nor passage")


def augment_question(question: str, sr: StructuredRepresentation) -> str:
    """Append the serialized SR to the question; identity on an empty SR."""
    if sr.is_empty:
        return question
    return f"{question} {sr_serialize(sr)}"


def _with_entity(sr: StructuredRepresentation, surface: str, slot: EntitySlot) -> StructuredRepresentation:
    if slot is EntitySlot.CONTEXT:
        return StructuredRepresentation(sr.context_entities + (surface,), sr.question_entities)
    return StructuredRepresentation(sr.context_entities, sr.question_entities + (surface,))


def accepting_match(answer, golds: list) -> bool:
    """Exact span match against any gold, or token F1 at least ACCEPT_F1."""
    for gold in golds:
        if answer.start_char == gold.start_char and answer.text == gold.text:
            return True
    return question_f1(answer.text, [g.text for g in golds]) >= ACCEPT_F1


def label_sr(turn: Turn, rewrite: str, history: list[Turn], passage: Passage,
             reader: ReaderBackend) -> StructuredRepresentation:
    """Distant-supervision SR labeling for one turn.

    Candidates are the mentions of the human rewrite that are absent from
    the original question.  Each candidate is kept, greedily in rewrite
    order, iff re-asking the augmented question makes the reader's answer
    better match the gold references: the best-reference token F1 strictly
    increases, or the span becomes an accepting match (exact span or token
    F1 >= 0.8).  An empty SR is a valid result.
    """
    if not turn.gold_answers:
        raise ValueError(f"turn {turn.question.id!r} has no gold answers to label against")
    original = turn.question.text
    candidates = [
        m for m in extract_mentions(rewrite, MentionSource.REWRITE)
        if not _occurs(m.surface, original)
    ]
    golds = list(turn.gold_answers)
    gold_texts = [g.text for g in golds]

    def run(sr: StructuredRepresentation):
        reader_input = ReaderInput(
            passage=passage,
            question_text=augment_question(original, sr),
            history=(),
            policy_tag="label_sr",
        )
        answer = predict(reader_input, reader)
        return answer, question_f1(answer.text, gold_texts)

    current = StructuredRepresentation()
    answer, best_f1 = run(current)
    accepted = accepting_match(answer, golds)
    for candidate in candidates:
        try:
            slot = classify_mention(candidate, history, passage)
        except UnclassifiableMentionError:
            continue
        trial = _with_entity(current, candidate.surface, slot)
        answer, f1 = run(trial)
        now_accepting = accepting_match(answer, golds)
        if f1 > best_f1 or (now_accepting and not accepted):
            current, best_f1, accepted = trial, f1, now_accepting
    return current


@dataclass(frozen=True)
class SRGeneratorInput:
    """Generator payload: the current question plus the selected history turns."""

    current_question: str
    selected_turns: tuple = ()  # (question_text, answer_text, serialized_sr | None)
    delimiter: str = "|||"

    def __post_init__(self):
        payloads = [self.current_question]
        for q, a, sr in self.selected_turns:
            payloads += [q, a, sr or ""]
        if any(self.delimiter in p for p in payloads):
            raise ValueError(f"delimiter {self.delimiter!r} occurs in a payload text")

    def to_payload(self) -> dict:
        turns = []
        for q, a, sr in self.selected_turns:
            entry = {"q": q, "a": a}
            if sr:
                entry["sr"] = sr
            turns.append(entry)
        return {"question": self.current_question, "turns": turns,
                "delimiter": self.delimiter}


def generator_input_from_turns(question_text: str, turns: list[Turn],
                               delimiter: str = "|||") -> SRGeneratorInput:
    """Build generator input from selected turns, serializing any stored SRs."""
    selected = tuple(
        (t.question.text, t.answer_text(), sr_serialize(t.sr) if t.sr is not None else None)
        for t in turns
    )
    return SRGeneratorInput(current_question=question_text, selected_turns=selected,
                            delimiter=delimiter)


@dataclass(frozen=True)
class SRGeneratorBackend:
    """Heuristic in-process generator, or a remote seq2seq service."""

    kind: str = "heuristic"  # "heuristic" | "remote"
    endpoint: str = ""
    timeout: float = 10.0
    fallback_to_heuristic: bool = False

    def __post_init__(self):
        if self.kind not in ("heuristic", "remote"):
            raise ValueError(f"unknown generator kind {self.kind!r}")
        if self.kind == "remote" and not re.match(r"^https?://", self.endpoint):
            raise ValueError(f"remote generator needs an http(s) endpoint, got {self.endpoint!r}")


def _heuristic_generate(inp: SRGeneratorInput,
                        history_srs: list[StructuredRepresentation]) -> StructuredRepresentation:
    context: list[str] = []
    question: list[str] = []
    for sr in history_srs:
        context.extend(sr.context_entities)
        question.extend(sr.question_entities)
    selected_questions = [q for q, _, _ in inp.selected_turns]
    for q_text, a_text, _ in inp.selected_turns:
        for m in extract_mentions(q_text, MentionSource.PRIOR_QUESTION):
            question.append(m.surface)
        for m in extract_mentions(a_text, MentionSource.PRIOR_ANSWER):
            if any(_occurs(m.surface, q) for q in selected_questions):
                question.append(m.surface)
            else:
                context.append(m.surface)
    current = inp.current_question
    context = [e for e in context if not _occurs(e, current)]
    question = [e for e in question if not _occurs(e, current)]
    return StructuredRepresentation(tuple(context), tuple(question))


def generate_sr(inp: SRGeneratorInput, backend: SRGeneratorBackend,
                history_srs: list[StructuredRepresentation] | None = None) -> StructuredRepresentation:
    """Produce the SR for the current question from the selected turns.

    The heuristic backend unions the selected turns' stored SR entities with
    freshly extracted mentions from their questions and answers, then drops
    anything already present verbatim in the current question.  The remote
    backend posts the structured payload and parses the returned serialized
    SR; failures raise GeneratorUnavailableError unless the backend is
    configured to fall back to the heuristic.
    """
    history_srs = history_srs if history_srs is not None else [
        sr_parse(sr) for _, _, sr in inp.selected_turns if sr
    ]
    if backend.kind == "heuristic":
        return _heuristic_generate(inp, history_srs)
    try:
        response = requests.post(
            backend.endpoint.rstrip("/") + "/generate_sr",
            json=inp.to_payload(), timeout=backend.timeout)
        response.raise_for_status()
        serialized = response.json()["sr"]
        return sr_parse(serialized)
    except (requests.RequestException, KeyError, ValueError, MalformedSRError) as exc:
        if backend.fallback_to_heuristic:
            return _heuristic_generate(inp, history_srs)
        raise GeneratorUnavailableError(f"remote SR generator failed: {exc}") from exc
