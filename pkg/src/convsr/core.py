"""Core domain types shared by every module.

A conversation is a :class:`Dialogue` over a :class:`Passage`: an ordered
list of :class:`Turn` objects, each pairing a :class:`Question` with its
reference answers.  A :class:`StructuredRepresentation` is the per-turn pair
of entity lists (context entities, question entities) that downstream stages
attach to incomplete follow-up questions instead of rewriting them.

All types here are plain dataclasses, immutable by convention after
construction, and safe to share across threads.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import MalformedSRError

NO_ANSWER_MARKER = "CANNOTANSWER"

# Characters that would make the serialized SR grammar ambiguous.
_SR_FORBIDDEN = "()|,"
_SR_STRIP_RE = re.compile(r"[()|,]")


@dataclass(frozen=True)
class Passage:
    """Evidence text a dialogue is grounded in."""

    id: str
    title: str = ""
    background: str = ""
    text: str = ""
    cannot_answer_marker: str = NO_ANSWER_MARKER

    def __post_init__(self):
        if not self.text:
            raise ValueError(f"passage {self.id!r} has empty text")

    @property
    def answerable_text(self) -> str:
        """Passage text with the trailing no-answer sentinel stripped."""
        text = self.text.rstrip()
        if text.endswith(self.cannot_answer_marker):
            text = text[: -len(self.cannot_answer_marker)].rstrip()
        return text


@dataclass(frozen=True)
class Question:
    id: str
    text: str
    turn_index: int

    def __post_init__(self):
        if not self.text:
            raise ValueError(f"question {self.id!r} has empty text")
        if self.turn_index < 0:
            raise ValueError(f"question {self.id!r} has negative turn_index")


@dataclass(frozen=True)
class AnswerSpan:
    """Extractive answer: character span into a passage, or a no-answer.

    ``start_char`` is -1 for no-answer spans, whose ``text`` equals the
    passage's cannot-answer marker.  ``score`` is the (unitless) reader
    confidence; gold reference spans default to 1.0.
    """

    text: str
    start_char: int = -1
    score: float = 1.0

    @property
    def is_no_answer(self) -> bool:
        return self.start_char < 0 and self.text == NO_ANSWER_MARKER


def _clean_entity(surface: str) -> str:
    """Strip delimiter characters and collapse whitespace."""
    cleaned = _SR_STRIP_RE.sub(" ", surface)
    return " ".join(cleaned.split())


def _normalize_entities(entities) -> tuple[str, ...]:
    """Clean each entity and deduplicate case-insensitively, keeping order."""
    seen = set()
    out = []
    for raw in entities:
        entity = _clean_entity(str(raw))
        if not entity:
            continue
        key = entity.lower()
        if key in seen:
            continue
        seen.add(key)
        out.append(entity)
    return tuple(out)


@dataclass(frozen=True)
class StructuredRepresentation:
    """Pair of entity lists: (context entities | question entities).

    Entity strings never contain the delimiter characters ``( ) | ,`` —
    offending characters are stripped at construction since the serialized
    format has no escaping rules.  Each slot is deduplicated
    case-insensitively, first occurrence wins.
    """

    context_entities: tuple[str, ...] = ()
    question_entities: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "context_entities", _normalize_entities(self.context_entities))
        object.__setattr__(self, "question_entities", _normalize_entities(self.question_entities))

    @property
    def is_empty(self) -> bool:
        return not self.context_entities and not self.question_entities

    def without_slot(self, slot: str) -> "StructuredRepresentation":
        """Return a copy with the named slot ('context' or 'question') emptied."""
        if slot == "context":
            return StructuredRepresentation((), self.question_entities)
        if slot == "question":
            return StructuredRepresentation(self.context_entities, ())
        raise ValueError(f"unknown SR slot {slot!r}")

    def to_dict(self) -> dict:
        return {
            "context_entities": list(self.context_entities),
            "question_entities": list(self.question_entities),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "StructuredRepresentation":
        return cls(
            tuple(data.get("context_entities", ())),
            tuple(data.get("question_entities", ())),
        )


EMPTY_SR = StructuredRepresentation()


def sr_serialize(sr: StructuredRepresentation) -> str:
    """Render an SR as ``(ce1, ce2 | qe1, qe2)``.

    An empty side renders as the empty string on its side of the bar, so the
    fully empty SR is ``( | )``.
    """
    left = ", ".join(sr.context_entities)
    right = ", ".join(sr.question_entities)
    return f"({left} | {right})"


def sr_parse(s: str) -> StructuredRepresentation:
    """Inverse of :func:`sr_serialize`; raises MalformedSRError on bad input."""
    text = s.strip()
    if not (text.startswith("(") and text.endswith(")")):
        raise MalformedSRError(f"missing parentheses in SR string: {s!r}")
    body = text[1:-1]
    if "|" not in body:
        raise MalformedSRError(f"missing '|' separator in SR string: {s!r}")
    left, _, right = body.partition("|")
    split = lambda side: [e.strip() for e in side.split(",") if e.strip()]
    return StructuredRepresentation(tuple(split(left)), tuple(split(right)))


@dataclass
class Turn:
    """One question-answer exchange.

    Dataset-backed turns carry at least one gold answer; live-session turns
    may have none and rely on ``predicted_answer`` instead.
    """

    question: Question
    gold_answers: tuple[AnswerSpan, ...] = ()
    predicted_answer: AnswerSpan | None = None
    sr: StructuredRepresentation | None = None

    def __post_init__(self):
        self.gold_answers = tuple(self.gold_answers)

    def answer_text(self) -> str:
        """Best available answer text: first gold reference, else prediction."""
        if self.gold_answers:
            return self.gold_answers[0].text
        if self.predicted_answer is not None:
            return self.predicted_answer.text
        return ""


@dataclass
class Dialogue:
    id: str
    passage: Passage
    turns: list[Turn] = field(default_factory=list)

    def __post_init__(self):
        indices = [t.question.turn_index for t in self.turns]
        if any(b <= a for a, b in zip(indices, indices[1:])):
            raise ValueError(f"dialogue {self.id!r}: turn indices must be strictly increasing")

    def history_before(self, turn_index: int) -> list[Turn]:
        return [t for t in self.turns if t.question.turn_index < turn_index]


@dataclass(frozen=True)
class SelectionConfig:
    """Hard-selection parameters: score threshold and optional recency cap."""

    threshold: float = 0.75
    max_turns: int | None = None

    def __post_init__(self):
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError("threshold must lie in [0, 1]")
        if self.max_turns is not None and self.max_turns <= 0:
            raise ValueError("max_turns must be positive when set")
