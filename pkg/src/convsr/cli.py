"""Batch command-line entry points.

Subcommands: ``ingest`` (load/validate/split/persist a corpus), ``eval``
(run one mode configuration and emit a report plus figures), ``label-sr``
(distant-supervision SR training records), ``stats`` (question-statistics
table), ``ablate`` (three-row SR slot ablation), ``serve`` (HTTP service),
and ``make-fixtures`` (synthetic demo corpus).

Exit codes: 0 success, 1 usage, 2 data/validation error, 3 backend failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .backends import build_mode, generator_from_spec, reader_from_spec, rewriter_from_spec
from .config import load_service_config
from .core import SelectionConfig
from .errors import (
    ConvsrError,
    GeneratorUnavailableError,
    InvalidRemoteSpanError,
    ReaderUnavailableError,
    RewriterUnavailableError,
)
from .evaluation import (
    format_aggregates,
    format_stats_table,
    run_evaluation,
    slot_ablation_table,
    write_ablation_report,
    write_report,
)
from .ingest import (
    align_rewrites,
    load_canard,
    load_corpus_dir,
    load_quac,
    load_rewrites_dir,
    save_corpus_dir,
    split_validation,
)
from .pipeline import QrPipelineMode
from .reader import ReaderInput, predict
from .similarity import TermSimilarityModel, load_embeddings
from .sr import accepting_match, augment_question, label_sr

_BACKEND_ERRORS = (ReaderUnavailableError, GeneratorUnavailableError,
                   RewriterUnavailableError, InvalidRemoteSpanError)


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that exits 1 (not 2) on usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _load_sim(path: str | None) -> TermSimilarityModel:
    return load_embeddings(path) if path else TermSimilarityModel()


def _selection(args) -> SelectionConfig:
    return SelectionConfig(threshold=args.threshold, max_turns=args.k or None)


def _aligned_index(corpus_dir, corpus):
    records = load_rewrites_dir(corpus_dir)
    index, _ = align_rewrites(corpus, records)
    return index


def cmd_ingest(args) -> int:
    corpus = load_quac(args.quac)
    train, val = split_validation(corpus, args.val_fraction, args.seed)
    rewrites = None
    if args.canard:
        rewrites = load_canard(args.canard)
        _, diagnostics = align_rewrites(corpus, rewrites)
        for line in diagnostics:
            print(f"note: {line}", file=sys.stderr)
    meta = {
        "source": str(args.quac),
        "canard": str(args.canard) if args.canard else None,
        "val_fraction": args.val_fraction,
        "seed": args.seed,
        "dialogues": {"train": len(train.dialogues), "val": len(val.dialogues)},
    }
    save_corpus_dir(args.out, [train, val], rewrites=rewrites, meta=meta)
    print(f"ingested {len(corpus.dialogues)} dialogues "
          f"({len(train.dialogues)} train / {len(val.dialogues)} val) -> {args.out}")
    return 0


def _build_eval_mode(args, corpus):
    selection = _selection(args)
    generator = generator_from_spec(args.generator)
    rewriter = None
    if args.mode == "pipeline":
        if args.rewriter == "oracle":
            rewriter = rewriter_from_spec("oracle", _aligned_index(args.corpus, corpus))
        else:
            rewriter = rewriter_from_spec(args.rewriter)
    return build_mode(args.mode, policy=args.policy, with_sr=args.with_sr,
                      selection=selection, generator=generator, rewriter=rewriter)


def _eval_config_snapshot(args) -> dict:
    return {
        "mode": args.mode,
        "policy": args.policy,
        "with_sr": args.with_sr,
        "threshold": args.threshold,
        "k": args.k,
        "reader": args.reader,
        "rewriter": getattr(args, "rewriter", None),
        "corpus": str(args.corpus),
        "split": args.split,
        "embeddings": str(args.embeddings) if args.embeddings else None,
    }


def cmd_eval(args) -> int:
    corpus = load_corpus_dir(args.corpus, args.split)
    sim = _load_sim(args.embeddings)
    reader = reader_from_spec(args.reader)
    mode = _build_eval_mode(args, corpus)
    report = run_evaluation(corpus, mode, reader, sim, jobs=args.jobs,
                            config=_eval_config_snapshot(args))
    written = write_report(report, args.report, fmt=args.format,
                           figures=not args.no_figures)
    print(format_aggregates(report))
    for path in written:
        print(f"wrote {path}")
    return 0


def cmd_label_sr(args) -> int:
    corpus = load_corpus_dir(args.corpus, args.split)
    records = load_canard(args.canard)
    index, diagnostics = align_rewrites(corpus, records)
    reader = reader_from_spec(args.reader)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    labeled = accepted_count = 0
    with open(out, "w", encoding="utf-8") as fh:
        for dialogue in corpus.dialogues:
            for turn in dialogue.turns:
                record = index.get(dialogue.id, turn.question.turn_index)
                if record is None:
                    continue
                history = dialogue.history_before(turn.question.turn_index)
                sr = label_sr(turn, record.rewrite, history, dialogue.passage, reader)
                answer = predict(ReaderInput(
                    passage=dialogue.passage,
                    question_text=augment_question(turn.question.text, sr),
                    policy_tag="label_sr"), reader)
                accepted = accepting_match(answer, list(turn.gold_answers))
                fh.write(json.dumps({
                    "dialogue_id": dialogue.id,
                    "turn_index": turn.question.turn_index,
                    "question": turn.question.text,
                    "rewrite": record.rewrite,
                    "sr": sr.to_dict(),
                    "accepted": accepted,
                }, ensure_ascii=False) + "\n")
                labeled += 1
                accepted_count += accepted
    print(f"labeled {labeled} turns ({accepted_count} accepted, "
          f"{len(diagnostics)} unmatched rewrites) -> {out}")
    return 0


def _report_stats_row(method: str, report) -> dict:
    """Table VII-shaped row from a finished evaluation report."""
    stats = report.stats_effective
    return {
        "method": method,
        "avg_length": round(stats.avg_length, 4),
        "avg_pronouns": round(stats.avg_pronouns, 4),
        "avg_proper_nouns": round(stats.avg_proper_nouns, 4),
        "f1": report.aggregates["f1"],
    }


def cmd_stats(args) -> int:
    corpus = load_corpus_dir(args.corpus, args.split)
    sim = _load_sim(args.embeddings)
    reader = reader_from_spec("lexical")
    base = run_evaluation(
        corpus, build_mode("baseline", policy="none"), reader, sim,
        jobs=args.jobs, config={"mode": "baseline", "policy": "none"})
    rows = [_report_stats_row("original", base)]
    if args.augmented:
        convsr_report = run_evaluation(
            corpus, build_mode("convsr", selection=_selection(args)), reader, sim,
            jobs=args.jobs, config={"mode": "convsr"})
        rows.append(_report_stats_row("original+sr", convsr_report))
        index = _aligned_index(args.corpus, corpus)
        if len(index):
            qr_report = run_evaluation(
                corpus, QrPipelineMode(rewriter_from_spec("oracle", index)), reader,
                sim, jobs=args.jobs, config={"mode": "pipeline"})
            rows.append(_report_stats_row("question_rewriting", qr_report))
    print(format_stats_table(rows))
    if args.report:
        path = Path(args.report)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as fh:
            json.dump({"rows": rows}, fh, indent=2, sort_keys=True)
            fh.write("\n")
        print(f"wrote {path}")
        if not args.no_figures:
            from .figures import render_stats_bars
            fig_path = render_stats_bars(rows, Path(f"{path.with_suffix('')}.stats.png"))
            print(f"wrote {fig_path}")
    return 0


def cmd_ablate(args) -> int:
    corpus = load_corpus_dir(args.corpus, args.split)
    sim = _load_sim(args.embeddings)
    reader = reader_from_spec(args.reader)
    mode = build_mode("convsr", selection=_selection(args))
    rows = slot_ablation_table(corpus, mode, reader, sim, jobs=args.jobs,
                               config={"mode": "convsr", "split": args.split})
    print(f"{'Ablation':<22}{'F1':>8}{'HEQ-Q':>8}{'HEQ-D':>8}")
    for which, report in rows:
        a = report.aggregates
        print(f"{which:<22}{a['f1']:>8.1f}{a['heq_q']:>8.1f}{a['heq_d']:>8.1f}")
    if args.report:
        for path in write_ablation_report(rows, args.report, fmt=args.format,
                                          figures=not args.no_figures):
            print(f"wrote {path}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    config = load_service_config(args.config)
    if args.port:
        config.port = args.port
    app = create_app(config)
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")
    return 0


def cmd_make_fixtures(args) -> int:
    from .fixtures import write_demo_files

    paths = write_demo_files(args.out, num_dialogues=args.num_dialogues)
    for name, path in paths.items():
        print(f"wrote {name}: {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="convsr", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="load, validate, split, and persist a corpus")
    p.add_argument("--quac", required=True, help="QuAC-format JSON file")
    p.add_argument("--canard", help="CANARD-format rewrites JSON file")
    p.add_argument("--out", required=True, help="output corpus directory")
    p.add_argument("--val-fraction", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=13)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("eval", help="run one evaluation and emit a report")
    p.add_argument("--mode", choices=["convsr", "pipeline", "baseline"], required=True)
    p.add_argument("--policy", default="dynamic",
                   choices=["none", "init", "prev", "init-prev", "all", "dynamic"])
    p.add_argument("--with-sr", action="store_true")
    p.add_argument("--reader", default="lexical", help="lexical or remote:<url>")
    p.add_argument("--rewriter", default="oracle", help="oracle or remote:<url>")
    p.add_argument("--generator", default="heuristic", help="heuristic or remote:<url>")
    p.add_argument("--threshold", type=float, default=0.75)
    p.add_argument("--k", type=int, default=None, help="selection cap (unset = unbounded)")
    p.add_argument("--corpus", required=True, help="ingested corpus directory")
    p.add_argument("--split", default="val")
    p.add_argument("--embeddings", help="term embedding file for soft cosine")
    p.add_argument("--report", required=True, help="report output path")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--no-figures", action="store_true")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("label-sr", help="emit distant-supervision SR records")
    p.add_argument("--corpus", required=True)
    p.add_argument("--canard", required=True)
    p.add_argument("--reader", default="lexical")
    p.add_argument("--split", default="train")
    p.add_argument("--out", required=True, help="JSON Lines output path")
    p.set_defaults(func=cmd_label_sr)

    p = sub.add_parser("stats", help="question-statistics table")
    p.add_argument("--corpus", required=True)
    p.add_argument("--split", default="val")
    p.add_argument("--augmented", action="store_true",
                   help="add rows for SR-augmented and rewritten questions")
    p.add_argument("--embeddings")
    p.add_argument("--threshold", type=float, default=0.75)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--report", help="optional JSON output path")
    p.add_argument("--no-figures", action="store_true")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("ablate", help="three-row SR slot ablation")
    p.add_argument("--corpus", required=True)
    p.add_argument("--split", default="val")
    p.add_argument("--reader", default="lexical")
    p.add_argument("--embeddings")
    p.add_argument("--threshold", type=float, default=0.75)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--report", help="report output path")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--no-figures", action="store_true")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_ablate)

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--config", help="key-value config file")
    p.add_argument("--port", type=int, default=0, help="override the configured port")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("make-fixtures", help="write a synthetic demo corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--num-dialogues", type=int, default=10)
    p.set_defaults(func=cmd_make_fixtures)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _BACKEND_ERRORS as exc:
        print(f"backend error: {exc}", file=sys.stderr)
        return 3
    except (ConvsrError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
