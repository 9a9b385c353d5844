"""HTTP service for blind side-by-side rating studies.

Raters receive tasks as opaque tokens (method identity is never exposed);
image bytes are served through hashed tokens for the same reason.  Task order
is a deterministic per-session shuffle of the method x image grid, with
globally least-rated pairs preferred so coverage stays balanced.  Aggregated
results and the raw rating log are operator-token gated.
"""

from __future__ import annotations

import hashlib
import random
import time
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query, Request
from fastapi.responses import FileResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .store import (
    DuplicateRatingError,
    RatingRecord,
    RatingStore,
    StudyConfig,
    aggregate_mos,
    export_ratings,
)


def _digest(*parts: object) -> str:
    joined = "|".join(str(p) for p in parts)
    return hashlib.sha256(joined.encode("utf-8")).hexdigest()[:32]


class StudyServer:
    """Study state: pair grid, token maps, deterministic session orders."""

    def __init__(self, config: StudyConfig, store: RatingStore, base_dir: str | Path = "."):
        self.config = config
        self.store = store
        base = Path(base_dir)

        def resolve(d: str) -> Path:
            p = Path(d)
            return p if p.is_absolute() else base / p

        self.pairs: list[tuple[str, str]] = [
            (method, image_id)
            for method in sorted(config.method_dirs)
            for image_id in config.image_ids
        ]
        self._image_tokens: dict[str, Path] = {}
        self._ref_token: dict[str, str] = {}
        self._cand_token: dict[tuple[str, str], str] = {}
        for image_id in config.image_ids:
            token = _digest(config.shuffle_seed, config.study_id, "reference", image_id)
            self._image_tokens[token] = resolve(config.reference_dir) / f"{image_id}.png"
            self._ref_token[image_id] = token
        for method, image_id in self.pairs:
            token = _digest(config.shuffle_seed, config.study_id, "candidate", method, image_id)
            self._image_tokens[token] = resolve(config.method_dirs[method]) / f"{image_id}.png"
            self._cand_token[(method, image_id)] = token
        self._session_tasks: dict[str, dict[str, tuple[str, str]]] = {}

    # -- deterministic per-session ordering

    def session_order(self, session_id: str) -> list[tuple[str, str]]:
        order = list(self.pairs)
        seed = int(_digest(self.config.shuffle_seed, session_id), 16)
        random.Random(seed).shuffle(order)
        return order

    def _task_id(self, session_id: str, method: str, image_id: str) -> str:
        return _digest(self.config.shuffle_seed, "task", session_id, method, image_id)

    def _tasks_for(self, session_id: str) -> dict[str, tuple[str, str]]:
        if session_id not in self._session_tasks:
            self._session_tasks[session_id] = {
                self._task_id(session_id, m, i): (m, i) for m, i in self.pairs
            }
        return self._session_tasks[session_id]

    # -- operations

    def next_task(self, session_id: str) -> dict:
        if not session_id:
            raise ValueError("session id must be nonempty")
        records = self.store.records()
        rated = {
            (r.method, r.image_id) for r in records if r.session_id == session_id
        }
        total = len(self.pairs)
        if len(rated) >= total:
            return {"complete": True, "progress": {"rated": len(rated), "total": total}}
        counts: dict[tuple[str, str], int] = {}
        for r in records:
            counts[(r.method, r.image_id)] = counts.get((r.method, r.image_id), 0) + 1
        order = self.session_order(session_id)
        position = {pair: i for i, pair in enumerate(order)}
        remaining = [p for p in order if p not in rated]
        # global balance first, session shuffle order second
        method, image_id = min(remaining, key=lambda p: (counts.get(p, 0), position[p]))
        return {
            "task_id": self._task_id(session_id, method, image_id),
            "reference": f"/img/{self._ref_token[image_id]}",
            "candidate": f"/img/{self._cand_token[(method, image_id)]}",
            "progress": {"rated": len(rated), "total": total},
        }

    def submit_rating(self, session_id: str, task_id: str, level: int) -> dict:
        if level not in (1, 2, 3, 4, 5):
            raise ValueError(f"level must be in 1..5, got {level}")
        tasks = self._tasks_for(session_id)
        if task_id not in tasks:
            raise KeyError(f"unknown task {task_id!r} for this session")
        method, image_id = tasks[task_id]
        record = RatingRecord(
            session_id=session_id,
            method=method,
            image_id=image_id,
            level=level,
            timestamp=time.time(),
        )
        self.store.append(record)
        rated = sum(
            1 for r in self.store.records() if r.session_id == session_id
        )
        return {"accepted": True, "progress": {"rated": rated, "total": len(self.pairs)}}

    def results(self) -> list[dict]:
        return [
            {
                "method": r.method,
                "mos": r.mos,
                "per_image": r.per_image,
                "rating_count": r.rating_count,
            }
            for r in aggregate_mos(self.store.records())
        ]

    def image_path(self, token: str) -> Path:
        if token not in self._image_tokens:
            raise KeyError(f"unknown image token {token!r}")
        return self._image_tokens[token]


class RatingBody(BaseModel):
    session_id: str
    task_id: str
    level: int


def create_app(
    server: StudyServer,
    operator_token: str | None = None,
    static_dir: str | Path | None = None,
) -> FastAPI:
    app = FastAPI(title="bokehkit rating study")
    study_id = server.config.study_id

    def check_study(requested: str) -> None:
        if requested != study_id:
            raise HTTPException(status_code=404, detail=f"unknown study {requested!r}")

    def check_operator(request: Request) -> None:
        supplied = request.headers.get("x-operator-token") or request.query_params.get("token")
        if not operator_token or supplied != operator_token:
            raise HTTPException(status_code=403, detail="operator token required")

    @app.get("/api/study/{requested}/task")
    def get_task(requested: str, session: str = Query(...)):
        check_study(requested)
        try:
            return server.next_task(session)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc

    @app.post("/api/study/{requested}/rating")
    def post_rating(requested: str, body: RatingBody):
        check_study(requested)
        try:
            return server.submit_rating(body.session_id, body.task_id, body.level)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        except KeyError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc
        except DuplicateRatingError as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from exc

    @app.get("/api/study/{requested}/results")
    def get_results(requested: str, request: Request):
        check_study(requested)
        check_operator(request)
        return {"study_id": study_id, "results": server.results()}

    @app.get("/api/study/{requested}/export")
    def get_export(requested: str, request: Request):
        check_study(requested)
        check_operator(request)
        return PlainTextResponse(export_ratings(server.store.records()))

    @app.get("/img/{token}")
    def get_image(token: str):
        try:
            path = server.image_path(token)
        except KeyError as exc:
            raise HTTPException(status_code=404, detail="unknown image token") from exc
        if not path.is_file():
            raise HTTPException(status_code=404, detail="image file missing")
        return FileResponse(path, media_type="image/png")

    if static_dir is not None:
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")
    return app
