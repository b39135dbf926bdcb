"""Corpus loading, validation, splitting, and rewrite alignment.

Handles two external formats:

* QuAC-style JSON: ``{"data": [{"title", "background", "paragraphs":
  [{"id", "context", "qas": [...]}]}]}`` where each paragraph is one
  dialogue, the context ends with the ``CANNOTANSWER`` sentinel, and a
  no-answer is encoded as answer text equal to that sentinel.
* CANARD-style JSON: an array of ``{"History": [...], "Question",
  "Rewrite", "QuAC_dialog_id", "Question_no"}`` records mapping original
  questions to their human self-contained rewrites.

Normalized corpora persist to a directory as one JSON file per split so the
evaluation commands never re-parse the raw formats.
"""

from __future__ import annotations

import enum
import json
import math
import random
from dataclasses import dataclass, field
from pathlib import Path

from .core import AnswerSpan, Dialogue, Passage, Question, Turn
from .errors import (
    DataFormatError,
    DuplicateKeyError,
    EmptyCorpusError,
    MissingFieldError,
    SpanMismatchError,
)


class Split(str, enum.Enum):
    TRAIN = "train"
    VAL = "val"
    TEST = "test"


@dataclass
class Corpus:
    name: str
    split: Split
    dialogues: list[Dialogue] = field(default_factory=list)

    def __post_init__(self):
        self.split = Split(self.split)
        ids = [d.id for d in self.dialogues]
        if len(ids) != len(set(ids)):
            raise ValueError(f"corpus {self.name!r} has duplicate dialogue ids")

    def num_questions(self) -> int:
        return sum(len(d.turns) for d in self.dialogues)


@dataclass(frozen=True)
class RewriteRecord:
    """One CANARD entry: an in-context question and its standalone rewrite."""

    dialogue_id: str
    turn_index: int
    history_texts: tuple[str, ...]
    original_question: str
    rewrite: str


@dataclass
class RewriteIndex:
    """Lookup from (dialogue_id, turn_index) to its rewrite record."""

    records: dict[tuple[str, int], RewriteRecord] = field(default_factory=dict)

    def get(self, dialogue_id: str, turn_index: int) -> RewriteRecord | None:
        return self.records.get((dialogue_id, turn_index))

    def __len__(self) -> int:
        return len(self.records)

    def __contains__(self, key: tuple[str, int]) -> bool:
        return key in self.records


def _get(obj, key, path):
    """Mapping access that reports the JSON path on failure."""
    try:
        return obj[key]
    except (KeyError, IndexError, TypeError):
        raise DataFormatError(f"malformed input at {path}.{key}") from None


def load_quac(path, name: str = "quac", split: Split = Split.TRAIN) -> Corpus:
    """Load a QuAC-format JSON file into a validated corpus.

    Every qa becomes one Turn carrying all provided reference answers (the
    original answer first).  Span integrity is checked for every answer; all
    offending qa ids are collected before raising.
    """
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"{path}: invalid JSON: {exc}") from exc

    dialogues = []
    bad_spans: list[str] = []
    for ai, article in enumerate(_get(raw, "data", "$")):
        apath = f"$.data[{ai}]"
        title = _get(article, "title", apath)
        background = article.get("background", "")
        for pi, para in enumerate(_get(article, "paragraphs", apath)):
            ppath = f"{apath}.paragraphs[{pi}]"
            context = _get(para, "context", ppath)
            dialogue_id = _get(para, "id", ppath)
            passage = Passage(id=dialogue_id, title=title, background=background, text=context)
            if not context.rstrip().endswith(passage.cannot_answer_marker):
                raise DataFormatError(
                    f"{ppath}.context does not end with {passage.cannot_answer_marker!r}")
            turns = []
            for qi, qa in enumerate(_get(para, "qas", ppath)):
                qpath = f"{ppath}.qas[{qi}]"
                qa_id = _get(qa, "id", qpath)
                question = Question(id=qa_id, text=_get(qa, "question", qpath), turn_index=qi)
                answers = []
                raw_answers = [_get(qa, "orig_answer", qpath)] if "orig_answer" in qa else []
                raw_answers += list(qa.get("answers", ()))
                if not raw_answers:
                    raise DataFormatError(f"{qpath} has no answers")
                seen = set()
                for answer in raw_answers:
                    text = _get(answer, "text", qpath)
                    start = _get(answer, "answer_start", qpath)
                    if text == passage.cannot_answer_marker:
                        start = -1
                    elif context[start:start + len(text)] != text:
                        bad_spans.append(qa_id)
                        continue
                    if (text, start) in seen:
                        continue
                    seen.add((text, start))
                    answers.append(AnswerSpan(text=text, start_char=start))
                turns.append(Turn(question=question, gold_answers=tuple(answers)))
            dialogues.append(Dialogue(id=dialogue_id, passage=passage, turns=turns))
    if bad_spans:
        raise SpanMismatchError(sorted(set(bad_spans)))
    return Corpus(name=name, split=split, dialogues=dialogues)


_CANARD_FIELDS = ("History", "Question", "Rewrite", "QuAC_dialog_id", "Question_no")


def load_canard(path) -> list[RewriteRecord]:
    """Load a CANARD-format JSON array into rewrite records."""
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(raw, list):
        raise DataFormatError(f"{path}: expected a JSON array of records")
    records = []
    for i, entry in enumerate(raw):
        for fieldname in _CANARD_FIELDS:
            if fieldname not in entry:
                raise MissingFieldError(fieldname, where=f"$[{i}]")
        records.append(RewriteRecord(
            dialogue_id=entry["QuAC_dialog_id"],
            turn_index=int(entry["Question_no"]),
            history_texts=tuple(entry["History"]),
            original_question=entry["Question"],
            rewrite=entry["Rewrite"],
        ))
    return records


def split_validation(corpus: Corpus, fraction: float, seed: int) -> tuple[Corpus, Corpus]:
    """Partition a corpus into (train, validation) at dialogue granularity.

    The validation size is round-half-up of fraction * N dialogues; the
    shuffle is deterministic for a fixed seed and never splits a dialogue.
    """
    if not 0.0 < fraction < 1.0:
        raise ValueError("fraction must lie strictly between 0 and 1")
    if not corpus.dialogues:
        raise EmptyCorpusError(f"corpus {corpus.name!r} has no dialogues")
    n_val = int(math.floor(fraction * len(corpus.dialogues) + 0.5))
    order = list(range(len(corpus.dialogues)))
    random.Random(seed).shuffle(order)
    val_positions = set(order[:n_val])
    val = [d for i, d in enumerate(corpus.dialogues) if i in val_positions]
    train = [d for i, d in enumerate(corpus.dialogues) if i not in val_positions]
    return (
        Corpus(name=corpus.name, split=Split.TRAIN, dialogues=train),
        Corpus(name=corpus.name, split=Split.VAL, dialogues=val),
    )


def align_rewrites(corpus: Corpus, records: list[RewriteRecord]) -> tuple[RewriteIndex, list[str]]:
    """Index rewrite records by the corpus turns they describe.

    Returns the index plus diagnostics for records without a matching turn
    (CANARD filters some QuAC questions, so mismatches are expected and are
    not errors).
    """
    turn_keys = {
        (d.id, t.question.turn_index) for d in corpus.dialogues for t in d.turns
    }
    index: dict[tuple[str, int], RewriteRecord] = {}
    diagnostics: list[str] = []
    for record in records:
        key = (record.dialogue_id, record.turn_index)
        if key in index:
            raise DuplicateKeyError(f"duplicate rewrite record for {key}")
        if key in turn_keys:
            index[key] = record
        else:
            diagnostics.append(
                f"no corpus turn for rewrite ({record.dialogue_id}, {record.turn_index})")
    return RewriteIndex(index), diagnostics


# ---------------------------------------------------------------------------
# Normalized corpus persistence
# ---------------------------------------------------------------------------

def corpus_to_dict(corpus: Corpus) -> dict:
    return {
        "name": corpus.name,
        "split": corpus.split.value,
        "dialogues": [
            {
                "id": d.id,
                "passage": {
                    "id": d.passage.id,
                    "title": d.passage.title,
                    "background": d.passage.background,
                    "text": d.passage.text,
                    "cannot_answer_marker": d.passage.cannot_answer_marker,
                },
                "turns": [
                    {
                        "question": {
                            "id": t.question.id,
                            "text": t.question.text,
                            "turn_index": t.question.turn_index,
                        },
                        "gold_answers": [
                            {"text": a.text, "start_char": a.start_char, "score": a.score}
                            for a in t.gold_answers
                        ],
                    }
                    for t in d.turns
                ],
            }
            for d in corpus.dialogues
        ],
    }


def corpus_from_dict(data: dict) -> Corpus:
    dialogues = []
    for d in data["dialogues"]:
        p = d["passage"]
        passage = Passage(id=p["id"], title=p["title"], background=p["background"],
                          text=p["text"], cannot_answer_marker=p["cannot_answer_marker"])
        turns = []
        for t in d["turns"]:
            q = t["question"]
            question = Question(id=q["id"], text=q["text"], turn_index=q["turn_index"])
            answers = tuple(
                AnswerSpan(text=a["text"], start_char=a["start_char"], score=a.get("score", 1.0))
                for a in t["gold_answers"]
            )
            turns.append(Turn(question=question, gold_answers=answers))
        dialogues.append(Dialogue(id=d["id"], passage=passage, turns=turns))
    return Corpus(name=data["name"], split=Split(data["split"]), dialogues=dialogues)


def save_corpus_dir(out_dir, corpora: list[Corpus],
                    rewrites: list[RewriteRecord] | None = None,
                    meta: dict | None = None) -> None:
    """Persist normalized splits (plus optional rewrites) into a directory."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for corpus in corpora:
        with open(out / f"corpus.{corpus.split.value}.json", "w", encoding="utf-8") as fh:
            json.dump(corpus_to_dict(corpus), fh, ensure_ascii=False)
    if rewrites is not None:
        payload = [
            {
                "dialogue_id": r.dialogue_id,
                "turn_index": r.turn_index,
                "history_texts": list(r.history_texts),
                "original_question": r.original_question,
                "rewrite": r.rewrite,
            }
            for r in rewrites
        ]
        with open(out / "rewrites.json", "w", encoding="utf-8") as fh:
            json.dump(payload, fh, ensure_ascii=False)
    with open(out / "meta.json", "w", encoding="utf-8") as fh:
        json.dump(meta or {}, fh, ensure_ascii=False, indent=2)


def load_corpus_dir(corpus_dir, split: Split | str) -> Corpus:
    split = Split(split)
    path = Path(corpus_dir) / f"corpus.{split.value}.json"
    if not path.exists():
        raise DataFormatError(f"no {split.value!r} split in {corpus_dir} (expected {path.name})")
    with open(path, encoding="utf-8") as fh:
        return corpus_from_dict(json.load(fh))


def load_rewrites_dir(corpus_dir) -> list[RewriteRecord]:
    """Load persisted rewrite records; empty list when none were ingested."""
    path = Path(corpus_dir) / "rewrites.json"
    if not path.exists():
        return []
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    return [
        RewriteRecord(
            dialogue_id=r["dialogue_id"],
            turn_index=r["turn_index"],
            history_texts=tuple(r["history_texts"]),
            original_question=r["original_question"],
            rewrite=r["rewrite"],
        )
        for r in raw
    ]
