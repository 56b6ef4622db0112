"""Request/response service over the pipeline.

Endpoints:
    POST /search    {question, top_k?, qid?}        -> SearchResult
    GET  /tables/{table_id}                         -> table + metadata
    POST /annotate  {qid, question, table_id, ...}  -> 204
    GET  /healthz                                   -> 200

The store and index are immutable shared state, so concurrent requests
need no locking; annotation appends are serialized.
"""

import hashlib
import json
import threading
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import Literal

from fastapi import FastAPI, HTTPException, Response
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from .errors import EmptyQueryError, NotFoundError, ScorerUnavailableError
from .pipeline import Pipeline
from .tables import Question, table_to_record


class SearchRequest(BaseModel):
    question: str
    top_k: int | None = Field(default=None, ge=1)
    qid: str | None = None


class AnnotationRequest(BaseModel):
    qid: str
    question: str
    table_id: str
    row: int | None = Field(default=None, ge=0)
    col: int | None = Field(default=None, ge=0)
    verdict: Literal["correct", "incorrect", "partial"]
    note: str = ""


class AnnotationStore:
    """Append-only JSONL log with strictly increasing timestamps."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._last: datetime | None = None
        if self.path.exists():
            for record in self.read_all():
                self._last = datetime.fromisoformat(record["timestamp"])

    def append(self, record: dict) -> dict:
        with self._lock:
            now = datetime.now(timezone.utc)
            if self._last is not None and now <= self._last:
                now = self._last + timedelta(microseconds=1)
            self._last = now
            record = dict(record, timestamp=now.isoformat())
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(record, ensure_ascii=False) + "\n")
        return record

    def read_all(self) -> list[dict]:
        if not self.path.exists():
            return []
        with open(self.path, encoding="utf-8") as fh:
            return [json.loads(line) for line in fh if line.strip()]


def deterministic_qid(question_text: str) -> str:
    return "web-" + hashlib.sha1(question_text.encode("utf-8")).hexdigest()[:12]


def create_app(pipeline: Pipeline) -> FastAPI:
    app = FastAPI(title="tableqa")
    # the browser UI may be served from a different origin
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    annotations = AnnotationStore(pipeline.config.resolved_annotation_path())
    app.state.pipeline = pipeline
    app.state.annotations = annotations

    @app.get("/healthz")
    def healthz():
        return {"status": "ok", "tables": len(pipeline.store)}

    @app.post("/search")
    def search(request: SearchRequest):
        text = request.question.strip()
        if not text:
            raise HTTPException(status_code=400, detail="question is empty")
        question = Question(qid=request.qid or deterministic_qid(text), text=text)
        try:
            result = pipeline.answer(question, top_k=request.top_k)
        except EmptyQueryError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        except ScorerUnavailableError as exc:
            raise HTTPException(status_code=503, detail=str(exc)) from exc
        return result.to_dict()

    @app.get("/tables/{table_id}")
    def get_table(table_id: str):
        try:
            table = pipeline.store.get_table(table_id)
        except NotFoundError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc
        return table_to_record(table)

    @app.post("/annotate", status_code=204)
    def annotate(request: AnnotationRequest):
        try:
            table = pipeline.store.get_table(request.table_id)
        except NotFoundError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc
        cell = None
        if request.row is not None and request.col is not None:
            if request.row >= table.n_rows or request.col >= table.n_cols:
                raise HTTPException(status_code=400, detail="cell out of range")
            cell = {"row": request.row, "col": request.col}
        elif request.row is not None or request.col is not None:
            raise HTTPException(status_code=400, detail="row and col must come together")
        annotations.append(
            {
                "qid": request.qid,
                "question": request.question,
                "table_id": request.table_id,
                "cell": cell,
                "verdict": request.verdict,
                "note": request.note,
            }
        )
        return Response(status_code=204)

    return app


def serve(pipeline: Pipeline) -> None:
    """Run the service until interrupted (uvicorn handles signals)."""
    import uvicorn

    app = create_app(pipeline)
    uvicorn.run(app, host=pipeline.config.bind_host, port=pipeline.config.bind_port)
