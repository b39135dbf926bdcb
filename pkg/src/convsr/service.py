"""HTTP API: datasets, live sessions with full traces, and evaluation jobs.

Traces are first-class output — the companion UI renders exactly what these
endpoints return and never recomputes scores or SRs client-side.  Sessions
serialize their turns (one in flight each, 409 otherwise); evaluation jobs
run asynchronously on a small worker pool and are polled for progress.
"""

from __future__ import annotations

import enum
import json
import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from contextlib import asynccontextmanager
from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .backends import build_mode, generator_from_spec, reader_from_spec, rewriter_from_spec
from .config import ServiceConfig
from .core import Dialogue, Passage, SelectionConfig
from .errors import (
    ConcurrentTurnError,
    ConvsrError,
    GeneratorUnavailableError,
    InvalidRemoteSpanError,
    ReaderUnavailableError,
    RewriterUnavailableError,
)
from .evaluation import run_evaluation
from .ingest import Corpus, RewriteIndex, align_rewrites, load_corpus_dir, load_rewrites_dir
from .pipeline import Session, run_session_turn, seed_session
from .similarity import TermSimilarityModel, load_embeddings


class JobState(str, enum.Enum):
    QUEUED = "queued"
    RUNNING = "running"
    DONE = "done"
    FAILED = "failed"


@dataclass
class EvalJob:
    id: str
    config: dict
    state: JobState = JobState.QUEUED
    progress: float = 0.0
    report: object = None
    error: str = ""


class SessionCreate(BaseModel):
    dialogue_id: str | None = None
    passage: dict | None = None
    mode: str = "convsr"
    params: dict = {}


class QuestionPost(BaseModel):
    text: str


class ServiceState:
    """Loaded corpora, the similarity model, live sessions, and jobs."""

    def __init__(self, config: ServiceConfig):
        self.config = config
        self.corpora: dict[str, Corpus] = {}
        self.rewrite_index = RewriteIndex()
        if config.corpus_dir:
            for split in config.split_list():
                path = Path(config.corpus_dir) / f"corpus.{split}.json"
                if path.exists():
                    self.corpora[split] = load_corpus_dir(config.corpus_dir, split)
            records = load_rewrites_dir(config.corpus_dir)
            if records:
                merged: dict[tuple[str, int], object] = {}
                for corpus in self.corpora.values():
                    index, _ = align_rewrites(corpus, records)
                    merged.update(index.records)
                self.rewrite_index = RewriteIndex(merged)
        self.sim = (load_embeddings(config.embeddings)
                    if config.embeddings else TermSimilarityModel())
        self.sessions: dict[str, Session] = {}
        self.jobs: dict[str, EvalJob] = {}
        self.executor = ThreadPoolExecutor(max_workers=max(1, config.workers))
        self.lock = threading.Lock()

    def find_dialogue(self, dialogue_id: str) -> Dialogue | None:
        for corpus in self.corpora.values():
            for dialogue in corpus.dialogues:
                if dialogue.id == dialogue_id:
                    return dialogue
        return None

    def build_session_mode(self, mode_name: str, params: dict):
        selection = SelectionConfig(
            threshold=float(params.get("threshold", self.config.threshold)),
            max_turns=params.get("k", self.config.k) or None,
        )
        generator = generator_from_spec(self.config.generator,
                                        self.config.generator_fallback)
        rewriter = rewriter_from_spec(self.config.rewriter, self.rewrite_index)
        return build_mode(
            mode_name,
            policy=params.get("policy", "dynamic"),
            with_sr=bool(params.get("with_sr", False)),
            selection=selection,
            generator=generator,
            rewriter=rewriter,
            assess=bool(params.get("assess", True)),
        )

    def snapshot_sessions(self) -> None:
        if not self.config.snapshot_path:
            return
        payload = {sid: _transcript(session) for sid, session in self.sessions.items()}
        with open(self.config.snapshot_path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, ensure_ascii=False, indent=2)


def _passage_dict(passage: Passage) -> dict:
    return {
        "id": passage.id,
        "title": passage.title,
        "background": passage.background,
        "text": passage.text,
        "cannot_answer_marker": passage.cannot_answer_marker,
    }


def _dialogue_dict(dialogue: Dialogue) -> dict:
    return {
        "id": dialogue.id,
        "passage": _passage_dict(dialogue.passage),
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
            for t in dialogue.turns
        ],
    }


def _transcript(session: Session) -> dict:
    return {
        "id": session.id,
        "mode": session.mode.name,
        "passage": _passage_dict(session.dialogue.passage),
        "turns": [
            {
                "turn_index": t.question.turn_index,
                "question": t.question.text,
                "answer": None if t.predicted_answer is None else {
                    "text": t.predicted_answer.text,
                    "start_char": t.predicted_answer.start_char,
                    "score": t.predicted_answer.score,
                },
            }
            for t in session.dialogue.turns
        ],
        "traces": [trace.to_dict() for trace in session.traces],
    }


_BACKEND_STAGES = (
    (ReaderUnavailableError, "reader"),
    (InvalidRemoteSpanError, "reader"),
    (GeneratorUnavailableError, "generator"),
    (RewriterUnavailableError, "rewriter"),
)


def _backend_error(exc: ConvsrError) -> HTTPException:
    for kind, stage in _BACKEND_STAGES:
        if isinstance(exc, kind):
            return HTTPException(status_code=502,
                                 detail={"stage": stage, "error": str(exc)})
    raise exc


def _run_job(state: ServiceState, job: EvalJob) -> None:
    job.state = JobState.RUNNING
    try:
        cfg = job.config
        split = cfg.get("split", "val")
        corpus = state.corpora[split]
        mode = state.build_session_mode(cfg.get("mode", "convsr"), cfg)
        reader = reader_from_spec(cfg.get("reader", state.config.reader))

        def on_progress(done, total):
            job.progress = done / total

        job.report = run_evaluation(corpus, mode, reader, state.sim,
                                    config=cfg, progress=on_progress)
        job.progress = 1.0
        job.state = JobState.DONE
    except Exception as exc:  # failures land in the job record, not the log
        job.state = JobState.FAILED
        job.error = str(exc)


def create_app(config: ServiceConfig | None = None,
               state: ServiceState | None = None) -> FastAPI:
    state = state or ServiceState(config or ServiceConfig())

    @asynccontextmanager
    async def lifespan(_app: FastAPI):
        yield
        state.snapshot_sessions()
        state.executor.shutdown(wait=False)

    app = FastAPI(title="convsr", version="0.1.0", lifespan=lifespan)
    app.state.convsr = state

    @app.get("/api/health")
    def health():
        return {"status": "ok"}

    @app.get("/api/datasets")
    def datasets():
        return [
            {
                "name": corpus.name,
                "split": split,
                "num_dialogues": len(corpus.dialogues),
                "num_questions": corpus.num_questions(),
            }
            for split, corpus in sorted(state.corpora.items())
        ]

    @app.get("/api/dialogues")
    def dialogues(dataset: str = "", split: str = "", offset: int = 0, limit: int = 20):
        picked = [
            corpus for s, corpus in sorted(state.corpora.items())
            if (not split or s == split) and (not dataset or corpus.name == dataset)
        ]
        entries = [d for corpus in picked for d in corpus.dialogues]
        window = entries[offset:offset + max(0, limit)]
        return {
            "total": len(entries),
            "offset": offset,
            "dialogues": [
                {
                    "id": d.id,
                    "title": d.passage.title,
                    "num_turns": len(d.turns),
                    "first_question": d.turns[0].question.text if d.turns else "",
                }
                for d in window
            ],
        }

    @app.get("/api/dialogues/{dialogue_id}")
    def dialogue_detail(dialogue_id: str):
        dialogue = state.find_dialogue(dialogue_id)
        if dialogue is None:
            raise HTTPException(status_code=404, detail=f"unknown dialogue {dialogue_id!r}")
        return _dialogue_dict(dialogue)

    @app.post("/api/sessions")
    def create_session(body: SessionCreate):
        if body.dialogue_id:
            dialogue = state.find_dialogue(body.dialogue_id)
            if dialogue is None:
                raise HTTPException(status_code=404,
                                    detail=f"unknown dialogue {body.dialogue_id!r}")
        elif body.passage:
            text = body.passage.get("text", "")
            if not text:
                raise HTTPException(status_code=422, detail="passage.text is required")
            passage = Passage(
                id=f"live_{uuid.uuid4().hex[:8]}",
                title=body.passage.get("title", ""),
                background=body.passage.get("background", ""),
                text=text,
            )
            dialogue = Dialogue(id=passage.id, passage=passage, turns=[])
        else:
            raise HTTPException(status_code=422,
                                detail="either dialogue_id or passage is required")
        try:
            mode = state.build_session_mode(body.mode, body.params)
            reader = reader_from_spec(body.params.get("reader", state.config.reader))
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        session_id = uuid.uuid4().hex[:12]
        session = seed_session(session_id, dialogue, mode, reader, state.sim)
        with state.lock:
            state.sessions[session_id] = session
        return {"session_id": session_id}

    @app.post("/api/sessions/{session_id}/questions")
    def post_question(session_id: str, body: QuestionPost):
        session = state.sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}")
        if not body.text.strip():
            raise HTTPException(status_code=422, detail="question text is required")
        try:
            trace = run_session_turn(session, body.text)
        except ConcurrentTurnError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        except ConvsrError as exc:
            raise _backend_error(exc)
        return trace.to_dict()

    @app.get("/api/sessions/{session_id}")
    def get_session(session_id: str):
        session = state.sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}")
        return _transcript(session)

    @app.post("/api/eval/jobs")
    def create_job(config: dict):
        split = config.get("split", "val")
        if split not in state.corpora:
            raise HTTPException(status_code=422, detail=f"split {split!r} is not loaded")
        try:
            state.build_session_mode(config.get("mode", "convsr"), config)
            reader_from_spec(config.get("reader", state.config.reader))
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        job = EvalJob(id=uuid.uuid4().hex[:12], config=config)
        with state.lock:
            state.jobs[job.id] = job
        state.executor.submit(_run_job, state, job)
        return {"job_id": job.id}

    @app.get("/api/eval/jobs/{job_id}")
    def get_job(job_id: str):
        job = state.jobs.get(job_id)
        if job is None:
            raise HTTPException(status_code=404, detail=f"unknown job {job_id!r}")
        return {
            "id": job.id,
            "state": job.state.value,
            "progress": job.progress,
            "config": job.config,
            "error": job.error,
        }

    @app.get("/api/eval/jobs/{job_id}/report")
    def get_job_report(job_id: str):
        job = state.jobs.get(job_id)
        if job is None:
            raise HTTPException(status_code=404, detail=f"unknown job {job_id!r}")
        if job.state is not JobState.DONE:
            raise HTTPException(status_code=404,
                                detail=f"job {job_id!r} has no report (state: {job.state.value})")
        return JSONResponse(job.report.to_dict())

    ui_dir = state.config.ui_dir
    if ui_dir and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
