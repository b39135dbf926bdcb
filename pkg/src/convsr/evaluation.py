"""Batch evaluation harness, slot ablation, and report emission.

Reports are deterministic: rows are ordered by (dialogue id, turn index),
per-question F1 values are rounded once at row construction, aggregates are
recomputed from the rounded rows, and the emitted bodies carry no timestamp —
identical configuration and corpus produce byte-identical JSON and CSV.
"""

from __future__ import annotations

import copy
import csv
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .ingest import Corpus
from .metrics import QuestionResult, QuestionStats, heq_aggregate, human_f1, question_f1, question_stats
from .pipeline import BaselineMode, ConvsrMode, Mode, answer_turn
from .reader import ReaderBackend
from .similarity import TermSimilarityModel

_ROW_PRECISION = 6
_AGG_PRECISION = 4


@dataclass
class EvaluationReport:
    """Per-question rows plus aggregates, statistics, and diagnostics."""

    config: dict
    results: list[QuestionResult]
    aggregates: dict
    stats_effective: QuestionStats
    stats_original: QuestionStats
    diagnostics: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "num_dialogues": len({r.dialogue_id for r in self.results}),
            "num_questions": len(self.results),
            "aggregates": self.aggregates,
            "question_stats": {
                "effective": self.stats_effective.to_dict(),
                "original": self.stats_original.to_dict(),
            },
            "diagnostics": self.diagnostics,
            "results": [
                {
                    "dialogue_id": r.dialogue_id,
                    "turn_index": r.turn_index,
                    "mode": r.mode,
                    "policy": r.policy,
                    "model_f1": r.model_f1,
                    "human_f1": r.human_f1,
                    "heq": r.heq,
                }
                for r in self.results
            ],
        }


def compute_aggregates(results: list[QuestionResult]) -> dict:
    """Percent aggregates recomputable from the rows."""
    if not results:
        return {"f1": 0.0, "heq_q": 0.0, "heq_d": 0.0}
    f1_avg = sum(r.model_f1 for r in results) / len(results) * 100.0
    heq_q, heq_d = heq_aggregate(results)
    return {
        "f1": round(f1_avg, _AGG_PRECISION),
        "heq_q": round(heq_q, _AGG_PRECISION),
        "heq_d": round(heq_d, _AGG_PRECISION),
    }


def _evaluate_dialogue(dialogue, mode: Mode, reader: ReaderBackend,
                       sim: TermSimilarityModel | None):
    """Answer every turn of one dialogue with gold prior answers.

    Works on a copy: generated SRs are stored on the copied turns so later
    turns can union them, without mutating the source corpus.
    """
    dialogue = copy.deepcopy(dialogue)
    rows, effective, original, diagnostics = [], [], [], []
    mode_name = mode.name
    policy = mode.policy_label
    for turn in dialogue.turns:
        trace = answer_turn(turn.question, dialogue, mode, reader, sim)
        turn.sr = trace.sr
        turn.predicted_answer = trace.answer
        gold_texts = [g.text for g in turn.gold_answers]
        rows.append(QuestionResult(
            dialogue_id=dialogue.id,
            turn_index=turn.question.turn_index,
            model_f1=round(question_f1(trace.answer.text, gold_texts), _ROW_PRECISION),
            human_f1=round(human_f1(gold_texts), _ROW_PRECISION),
            mode=mode_name,
            policy=policy,
        ))
        effective.append(trace.augmented_question)
        original.append(turn.question.text)
        diagnostics.extend(trace.diagnostics)
    return rows, effective, original, diagnostics


def run_evaluation(corpus: Corpus, mode: Mode, reader: ReaderBackend,
                   sim: TermSimilarityModel | None = None, jobs: int = 1,
                   config: dict | None = None, progress=None) -> EvaluationReport:
    """Evaluate a corpus split under one mode configuration.

    Dialogues may run concurrently (``jobs`` workers); turns within a
    dialogue stay strictly sequential.  Results reduce deterministically in
    (dialogue_id, turn_index) order regardless of worker count.
    """
    dialogues = corpus.dialogues
    outputs = []
    if jobs <= 1 or len(dialogues) <= 1:
        for i, d in enumerate(dialogues):
            outputs.append(_evaluate_dialogue(d, mode, reader, sim))
            if progress:
                progress(i + 1, len(dialogues))
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_evaluate_dialogue, d, mode, reader, sim)
                       for d in dialogues]
            for i, future in enumerate(futures):
                outputs.append(future.result())
                if progress:
                    progress(i + 1, len(dialogues))
    rows, effective, original, diagnostics = [], [], [], []
    for r, e, o, diag in outputs:
        rows.extend(r)
        effective.extend(e)
        original.extend(o)
        diagnostics.extend(diag)
    rows.sort(key=lambda r: (r.dialogue_id, r.turn_index))
    return EvaluationReport(
        config=dict(config or {}),
        results=rows,
        aggregates=compute_aggregates(rows),
        stats_effective=question_stats(effective),
        stats_original=question_stats(original),
        diagnostics=sorted(diagnostics),
    )


# ---------------------------------------------------------------------------
# Slot ablation
# ---------------------------------------------------------------------------

ABLATION_LABELS = {
    "full": None,
    "no_context_entity": "context",
    "no_question_entity": "question",
}


def ablate_slots(corpus: Corpus, mode: Mode, reader: ReaderBackend,
                 sim: TermSimilarityModel | None, which: str,
                 jobs: int = 1, config: dict | None = None) -> EvaluationReport:
    """Run one evaluation with the named SR slot emptied before augmentation."""
    if which not in ABLATION_LABELS:
        raise ValueError(f"unknown ablation {which!r}; expected one of {sorted(ABLATION_LABELS)}")
    slot = ABLATION_LABELS[which]
    if isinstance(mode, ConvsrMode):
        run_mode = ConvsrMode(selection=mode.selection, generator=mode.generator,
                              assess_enabled=mode.assess_enabled, ablate_slot=slot)
    elif isinstance(mode, BaselineMode):
        run_mode = BaselineMode(policy=mode.policy, with_sr=mode.with_sr,
                                generator=mode.generator, ablate_slot=slot)
    else:
        raise ValueError("slot ablation applies to SR-producing modes only")
    run_config = dict(config or {})
    run_config["ablation"] = which
    return run_evaluation(corpus, run_mode, reader, sim, jobs=jobs, config=run_config)


def slot_ablation_table(corpus: Corpus, mode: Mode, reader: ReaderBackend,
                        sim: TermSimilarityModel | None, jobs: int = 1,
                        config: dict | None = None) -> list[tuple[str, EvaluationReport]]:
    """The three-row comparison: full SR, then each slot removed."""
    return [
        (which, ablate_slots(corpus, mode, reader, sim, which, jobs=jobs, config=config))
        for which in ("full", "no_context_entity", "no_question_entity")
    ]


# ---------------------------------------------------------------------------
# Emission
# ---------------------------------------------------------------------------

def _check_aggregates(report: EvaluationReport) -> None:
    recomputed = compute_aggregates(report.results)
    if recomputed != report.aggregates:
        raise AssertionError(
            f"report aggregates {report.aggregates} do not match recomputation {recomputed}")


def report_to_json(report: EvaluationReport) -> str:
    _check_aggregates(report)
    return json.dumps(report.to_dict(), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def report_to_csv(report: EvaluationReport) -> str:
    _check_aggregates(report)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["dialogue_id", "turn_index", "mode", "policy",
                     "model_f1", "human_f1", "heq"])
    for r in report.results:
        writer.writerow([r.dialogue_id, r.turn_index, r.mode, r.policy,
                         f"{r.model_f1:.6f}", f"{r.human_f1:.6f}",
                         "true" if r.heq else "false"])
    return buf.getvalue()


def format_aggregates(report: EvaluationReport) -> str:
    """One-decimal percentage line, the format the result tables use."""
    a = report.aggregates
    return f"F1 {a['f1']:.1f}  HEQ-Q {a['heq_q']:.1f}  HEQ-D {a['heq_d']:.1f}"


def write_report(report: EvaluationReport, path, fmt: str = "json",
                 figures: bool = True) -> list[Path]:
    """Write the report body and, by default, companion figures next to it.

    Returns every path written; the report body is always first.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    body = report_to_json(report) if fmt == "json" else report_to_csv(report)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(body)
    written = [path]
    if figures and report.results:
        from . import figures as figmod
        stem = path.with_suffix("")
        written.append(figmod.render_f1_histogram(
            [r.model_f1 for r in report.results], Path(f"{stem}.f1_hist.png")))
        written.append(figmod.render_aggregate_bars(
            report.aggregates, Path(f"{stem}.aggregates.png")))
    return written


def write_ablation_report(rows: list[tuple[str, EvaluationReport]], path,
                          fmt: str = "json", figures: bool = True) -> list[Path]:
    """Emit the three-row slot-ablation comparison plus its figure."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    table = [
        {"ablation": which, "f1": rep.aggregates["f1"],
         "heq_q": rep.aggregates["heq_q"], "heq_d": rep.aggregates["heq_d"]}
        for which, rep in rows
    ]
    if fmt == "json":
        body = json.dumps({"rows": table}, indent=2, sort_keys=True) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["ablation", "f1", "heq_q", "heq_d"])
        for row in table:
            writer.writerow([row["ablation"], f"{row['f1']:.4f}",
                             f"{row['heq_q']:.4f}", f"{row['heq_d']:.4f}"])
        body = buf.getvalue()
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(body)
    written = [path]
    if figures:
        from . import figures as figmod
        stem = path.with_suffix("")
        written.append(figmod.render_ablation_bars(
            [(row["ablation"], row["f1"]) for row in table],
            Path(f"{stem}.ablation.png")))
    return written


# ---------------------------------------------------------------------------
# Question statistics table (length / pronoun / proper-noun / F1)
# ---------------------------------------------------------------------------

def format_stats_table(rows: list[dict]) -> str:
    header = f"{'Method':<22}{'Avg Length':>12}{'Pronoun':>10}{'Proper Noun':>13}{'F1':>8}"
    lines = [header, "-" * len(header)]
    for row in rows:
        f1 = "-" if row["f1"] is None else f"{row['f1']:.1f}"
        lines.append(
            f"{row['method']:<22}{row['avg_length']:>12.2f}{row['avg_pronouns']:>10.2f}"
            f"{row['avg_proper_nouns']:>13.2f}{f1:>8}")
    return "\n".join(lines)
