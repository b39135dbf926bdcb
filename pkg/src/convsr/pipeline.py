"""Orchestration of the two answering approaches, plus live session state.

The structured-representation flow answers a question by scoring its history
turns, hard-selecting the relevant ones, generating an SR from them, and
feeding the augmented question to the reader.  The rewrite-then-answer
pipeline instead obtains a self-contained rewrite (oracle gold rewrites or a
remote rewriter) and predicts with the rewrite plus the full history.  The
prepend baselines skip selection entirely and compose history by position.

Every answered turn yields a :class:`TurnTrace` recording all intermediates,
which is what the evaluation harness aggregates and the inspection UI renders.
"""

from __future__ import annotations

import copy
import enum
import itertools
import re
import threading
from dataclasses import dataclass, field

import requests

from .core import (
    AnswerSpan,
    Dialogue,
    Question,
    SelectionConfig,
    StructuredRepresentation,
    Turn,
)
from .errors import ConcurrentTurnError, RewriterUnavailableError
from .ingest import RewriteIndex
from .metrics import PRONOUNS
from .reader import (
    HistoryPolicy,
    POLICY_PREPEND_ALL,
    ReaderBackend,
    ReaderInput,
    compose_input,
    policy_turns,
    predict,
)
from .similarity import TermSimilarityModel, TurnScore, score_history, select_history, tokenize
from .sr import (
    SRGeneratorBackend,
    augment_question,
    extract_mentions,
    generate_sr,
    generator_input_from_turns,
)


class Assessment(str, enum.Enum):
    SELF_CONTAINED = "self_contained"
    NEEDS_RESOLUTION = "needs_resolution"


def assess_question(question: str, turn_index: int) -> Assessment:
    """Cheap question-understanding gate.

    A question needs resolution iff it is a follow-up (turn_index > 0) and
    either contains a third-person pronoun/possessive or is short (at most 6
    tokens) with no extracted entity mention.  Self-contained questions skip
    SR generation entirely.
    """
    if turn_index == 0:
        return Assessment.SELF_CONTAINED
    tokens = tokenize(question)
    if any(tok in PRONOUNS for tok in tokens):
        return Assessment.NEEDS_RESOLUTION
    if len(tokens) <= 6 and not extract_mentions(question):
        return Assessment.NEEDS_RESOLUTION
    return Assessment.SELF_CONTAINED


@dataclass(frozen=True)
class Rewriter:
    """Question rewriter: gold rewrites from an aligned index, or a remote model."""

    kind: str = "oracle"  # "oracle" | "remote"
    index: RewriteIndex | None = None
    endpoint: str = ""
    timeout: float = 10.0

    def __post_init__(self):
        if self.kind not in ("oracle", "remote"):
            raise ValueError(f"unknown rewriter kind {self.kind!r}")
        if self.kind == "oracle" and self.index is None:
            raise ValueError("oracle rewriter requires an aligned RewriteIndex")
        if self.kind == "remote" and not re.match(r"^https?://", self.endpoint):
            raise ValueError(f"remote rewriter needs an http(s) endpoint, got {self.endpoint!r}")

    def rewrite(self, question: Question, dialogue: Dialogue) -> tuple[str, str | None]:
        """Return (rewrite, diagnostic).  An oracle miss falls back to the
        original question with a diagnostic instead of failing."""
        if self.kind == "oracle":
            record = self.index.get(dialogue.id, question.turn_index)
            if record is None:
                return question.text, (
                    f"oracle rewrite miss for ({dialogue.id}, {question.turn_index})")
            return record.rewrite, None
        history = list(itertools.chain.from_iterable(
            (t.question.text, t.answer_text())
            for t in dialogue.history_before(question.turn_index)))
        try:
            response = requests.post(
                self.endpoint.rstrip("/") + "/rewrite",
                json={"question": question.text, "history": history},
                timeout=self.timeout)
            response.raise_for_status()
            return response.json()["rewrite"], None
        except (requests.RequestException, KeyError, ValueError) as exc:
            raise RewriterUnavailableError(f"remote rewriter failed: {exc}") from exc


@dataclass(frozen=True)
class ConvsrMode:
    selection: SelectionConfig = field(default_factory=SelectionConfig)
    generator: SRGeneratorBackend = field(default_factory=SRGeneratorBackend)
    assess_enabled: bool = True
    ablate_slot: str | None = None  # None | "context" | "question"

    name = "convsr"
    policy_label = "dynamic"


@dataclass(frozen=True)
class QrPipelineMode:
    rewriter: Rewriter

    name = "pipeline"
    policy_label = "prepend_all"


@dataclass(frozen=True)
class BaselineMode:
    policy: HistoryPolicy
    with_sr: bool = False
    generator: SRGeneratorBackend = field(default_factory=SRGeneratorBackend)
    ablate_slot: str | None = None

    name = "baseline"

    @property
    def policy_label(self) -> str:
        return self.policy.kind


Mode = ConvsrMode | QrPipelineMode | BaselineMode


@dataclass
class TurnTrace:
    """Every intermediate of one answered turn."""

    scores: tuple[TurnScore, ...]
    selected: tuple[int, ...]
    sr: StructuredRepresentation
    augmented_question: str
    reader_input_tag: str
    answer: AnswerSpan
    diagnostics: tuple[str, ...] = ()
    reader_input: ReaderInput | None = None

    def to_dict(self) -> dict:
        return {
            "answer": {
                "text": self.answer.text,
                "start_char": self.answer.start_char,
                "score": self.answer.score,
            },
            "scores": [{"turn": s.turn_index, "score": s.score} for s in self.scores],
            "selected": list(self.selected),
            "sr": self.sr.to_dict(),
            "augmented_question": self.augmented_question,
            "reader_input_tag": self.reader_input_tag,
            "diagnostics": list(self.diagnostics),
        }


def _apply_ablation(sr: StructuredRepresentation, slot: str | None) -> StructuredRepresentation:
    return sr if slot is None else sr.without_slot(slot)


def _sr_from_turns(question_text: str, turns: list[Turn],
                   generator: SRGeneratorBackend) -> StructuredRepresentation:
    if not turns:
        return StructuredRepresentation()
    gen_input = generator_input_from_turns(question_text, turns)
    history_srs = [t.sr for t in turns if t.sr is not None]
    return generate_sr(gen_input, generator, history_srs)


def answer_convsr(question: Question, dialogue: Dialogue, mode: ConvsrMode,
                  reader: ReaderBackend, sim: TermSimilarityModel) -> TurnTrace:
    """assess -> score -> select -> generate SR -> augment -> predict."""
    prior = dialogue.history_before(question.turn_index)
    assessment = (assess_question(question.text, question.turn_index)
                  if mode.assess_enabled else Assessment.NEEDS_RESOLUTION)
    scores = score_history(question, prior, sim)
    selected_idx = select_history(scores, mode.selection)
    keep = set(selected_idx)
    selected_turns = [t for t in prior if t.question.turn_index in keep]
    if assessment is Assessment.NEEDS_RESOLUTION:
        sr = _sr_from_turns(question.text, selected_turns, mode.generator)
    else:
        sr = StructuredRepresentation()
    sr = _apply_ablation(sr, mode.ablate_slot)
    augmented = augment_question(question.text, sr)
    reader_input = ReaderInput(
        passage=dialogue.passage,
        question_text=augmented,
        history=tuple((t.question.text, t.answer_text()) for t in selected_turns),
        policy_tag="dynamic",
    )
    answer = predict(reader_input, reader)
    return TurnTrace(
        scores=tuple(scores),
        selected=tuple(selected_idx),
        sr=sr,
        augmented_question=augmented,
        reader_input_tag=reader_input.policy_tag,
        answer=answer,
        reader_input=reader_input,
    )


def answer_qr_pipeline(question: Question, dialogue: Dialogue, mode: QrPipelineMode,
                       reader: ReaderBackend) -> TurnTrace:
    """Rewrite, then answer the rewrite with the full history attached."""
    rewrite, diagnostic = mode.rewriter.rewrite(question, dialogue)
    reader_input = compose_input(question, dialogue, POLICY_PREPEND_ALL,
                                 augmented_text=rewrite)
    answer = predict(reader_input, reader)
    return TurnTrace(
        scores=(),
        selected=(),
        sr=StructuredRepresentation(),
        augmented_question=rewrite,
        reader_input_tag=reader_input.policy_tag,
        answer=answer,
        diagnostics=(diagnostic,) if diagnostic else (),
        reader_input=reader_input,
    )


def answer_baseline(question: Question, dialogue: Dialogue, mode: BaselineMode,
                    reader: ReaderBackend,
                    sim: TermSimilarityModel | None = None) -> TurnTrace:
    """Compose history positionally; optionally augment with an SR generated
    from the policy-selected turns."""
    selected_turns = policy_turns(question, dialogue, mode.policy, sim)
    if mode.with_sr:
        sr = _apply_ablation(
            _sr_from_turns(question.text, selected_turns, mode.generator),
            mode.ablate_slot)
    else:
        sr = StructuredRepresentation()
    augmented = augment_question(question.text, sr)
    reader_input = ReaderInput(
        passage=dialogue.passage,
        question_text=augmented,
        history=tuple((t.question.text, t.answer_text()) for t in selected_turns),
        policy_tag=mode.policy.kind,
    )
    answer = predict(reader_input, reader)
    return TurnTrace(
        scores=(),
        selected=tuple(t.question.turn_index for t in selected_turns),
        sr=sr,
        augmented_question=augmented,
        reader_input_tag=reader_input.policy_tag,
        answer=answer,
        reader_input=reader_input,
    )


def answer_turn(question: Question, dialogue: Dialogue, mode: Mode,
                reader: ReaderBackend,
                sim: TermSimilarityModel | None = None) -> TurnTrace:
    """Dispatch a turn to the configured approach."""
    if isinstance(mode, ConvsrMode):
        if sim is None:
            raise ValueError("convsr mode requires a term-similarity model")
        return answer_convsr(question, dialogue, mode, reader, sim)
    if isinstance(mode, QrPipelineMode):
        return answer_qr_pipeline(question, dialogue, mode, reader)
    return answer_baseline(question, dialogue, mode, reader, sim)


@dataclass
class Session:
    """One live conversation: turns append as questions arrive, and the
    predicted answers (not gold) feed subsequent history."""

    id: str
    dialogue: Dialogue
    mode: Mode
    reader: ReaderBackend
    sim: TermSimilarityModel
    traces: list[TurnTrace] = field(default_factory=list)

    def __post_init__(self):
        self._turn_lock = threading.Lock()


def seed_session(session_id: str, dialogue: Dialogue, mode: Mode,
                 reader: ReaderBackend, sim: TermSimilarityModel,
                 fresh_turns: bool = True) -> Session:
    """Create a session over a (deep-copied) dialogue so the source corpus is
    never mutated.  ``fresh_turns`` drops the dataset turns, starting the
    conversation from scratch over the same passage."""
    dialogue_copy = copy.deepcopy(dialogue)
    if fresh_turns:
        dialogue_copy.turns = []
    return Session(id=session_id, dialogue=dialogue_copy, mode=mode,
                   reader=reader, sim=sim)


def run_session_turn(session: Session, question_text: str) -> TurnTrace:
    """Answer one live question and append it to the session history."""
    if not session._turn_lock.acquire(blocking=False):
        raise ConcurrentTurnError(f"session {session.id!r} already has a turn in flight")
    try:
        turn_index = len(session.dialogue.turns)
        question = Question(
            id=f"{session.id}_q{turn_index}", text=question_text, turn_index=turn_index)
        trace = answer_turn(question, session.dialogue, session.mode,
                            session.reader, session.sim)
        turn = Turn(question=question, gold_answers=(),
                    predicted_answer=trace.answer, sr=trace.sr)
        session.dialogue.turns.append(turn)
        session.traces.append(trace)
        return trace
    finally:
        session._turn_lock.release()
