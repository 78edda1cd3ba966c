"""Manual-review service for code-switching candidates.

State is an immutable candidate snapshot plus an append-only decision
log. Every decision is validated by the same rule code the library
exposes, written to the log, flushed, and fsynced before the reply goes
out, so a restart replays to exactly the pre-crash statuses. A log line
that fails to parse or to replay stops startup with a recovery hint
rather than serving doubtful state.

The HTTP surface lives under /api (candidate queue with cursor
pagination, decisions, WAV streaming with range support, counts); static
review-UI assets are served from a directory when one is supplied.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Literal

from fastapi import FastAPI, HTTPException, Query, Request, Response
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from .corpus import Manifest, Utterance
from .detect import CsCandidate, candidate_from_record, candidate_to_record, decide
from .errors import (
    AlreadyDecidedError,
    ConfigError,
    CsForgeError,
    RuleViolationError,
)

DEFAULT_PORT = 8787
PORT_ENV_VAR = "CS_FORGE_PORT"
DEFAULT_PAGE_SIZE = 50
MAX_PAGE_SIZE = 500


@dataclass(frozen=True)
class DecisionLogEntry:
    """One audited decision; rule_snapshot records max_run_es at that time."""

    candidate_id: str
    decision: str
    annotator: str
    timestamp: str
    rule_snapshot: int

    def __post_init__(self) -> None:
        if self.decision not in ("accept", "reject"):
            raise ConfigError(f"decision must be 'accept' or 'reject', got {self.decision!r}")
        if not self.candidate_id or not self.annotator or not self.timestamp:
            raise ConfigError("log entries need candidate_id, annotator, and timestamp")
        if self.rule_snapshot < 0:
            raise ConfigError("rule_snapshot must be >= 0")

    def to_record(self) -> dict:
        return {
            "candidate_id": self.candidate_id,
            "decision": self.decision,
            "annotator": self.annotator,
            "timestamp": self.timestamp,
            "rule_snapshot": self.rule_snapshot,
        }

    @classmethod
    def from_record(cls, record: dict) -> "DecisionLogEntry":
        try:
            return cls(
                candidate_id=record["candidate_id"],
                decision=record["decision"],
                annotator=record["annotator"],
                timestamp=record["timestamp"],
                rule_snapshot=int(record["rule_snapshot"]),
            )
        except KeyError as exc:
            raise ConfigError(f"log entry missing key {exc.args[0]!r}") from exc


def replay(
    candidates: dict[str, CsCandidate],
    entries: Iterable[DecisionLogEntry],
) -> dict[str, CsCandidate]:
    """Pure state reconstruction: initial candidates + log → statuses.

    Any entry that cannot be applied (unknown id, double decision, rule
    violation, snapshot mismatch) raises; an append-only log written by
    this module always replays cleanly.
    """
    state = dict(candidates)
    for entry in entries:
        candidate = state.get(entry.candidate_id)
        if candidate is None:
            raise ConfigError(f"decision for unknown candidate {entry.candidate_id!r}")
        if entry.rule_snapshot != candidate.max_run_es:
            raise ConfigError(
                f"candidate {entry.candidate_id!r}: rule snapshot {entry.rule_snapshot} "
                f"does not match max_run_es {candidate.max_run_es}"
            )
        state[entry.candidate_id] = decide(
            candidate, entry.decision, entry.annotator, decided_at=entry.timestamp
        )
    return state


class ReviewStore:
    """Candidate snapshot + decision log with serialized writes."""

    def __init__(
        self,
        candidates: dict[str, CsCandidate],
        utterances: dict[str, Utterance],
        log_path: str | Path,
        applied: list[DecisionLogEntry] | None = None,
    ) -> None:
        self._candidates = dict(candidates)
        self._utterances = dict(utterances)
        self._order = list(candidates)
        self._log_path = Path(log_path)
        self._log = list(applied or [])
        self._lock = threading.Lock()

    @classmethod
    def load(cls, candidates_path: str | Path, log_path: str | Path) -> "ReviewStore":
        """Read the snapshot, then replay the decision log over it."""
        candidates: dict[str, CsCandidate] = {}
        utterances: dict[str, Utterance] = {}
        candidates_path = Path(candidates_path)
        with candidates_path.open("r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    candidate, utterance = candidate_from_record(json.loads(line))
                except (ValueError, KeyError, CsForgeError) as exc:
                    raise ConfigError(f"{candidates_path}:{lineno}: bad candidate record: {exc}") from exc
                if candidate.utterance_id in candidates:
                    raise ConfigError(
                        f"{candidates_path}:{lineno}: duplicate candidate {candidate.utterance_id!r}"
                    )
                candidates[candidate.utterance_id] = candidate
                utterances[candidate.utterance_id] = utterance

        log_path = Path(log_path)
        entries: list[DecisionLogEntry] = []
        if log_path.exists():
            with log_path.open("r", encoding="utf-8") as fh:
                for lineno, line in enumerate(fh, start=1):
                    if not line.strip():
                        continue
                    try:
                        entries.append(DecisionLogEntry.from_record(json.loads(line)))
                    except (ValueError, CsForgeError) as exc:
                        raise ConfigError(
                            f"corrupt decision log {log_path}:{lineno}: {exc}. "
                            f"Remove the offending line (often a partial trailing write) "
                            f"or restore the log from backup; the candidate snapshot is untouched."
                        ) from exc
            try:
                candidates = replay(candidates, entries)
            except CsForgeError as exc:
                raise ConfigError(
                    f"decision log {log_path} does not replay over {candidates_path}: {exc}. "
                    f"The log likely belongs to a different candidate file."
                ) from exc
        return cls(candidates, utterances, log_path, applied=entries)

    def __len__(self) -> int:
        return len(self._order)

    @property
    def log(self) -> tuple[DecisionLogEntry, ...]:
        with self._lock:
            return tuple(self._log)

    def get(self, candidate_id: str) -> tuple[CsCandidate, Utterance]:
        try:
            return self._candidates[candidate_id], self._utterances[candidate_id]
        except KeyError:
            raise KeyError(candidate_id) from None

    def record(self, candidate_id: str) -> dict:
        candidate, utterance = self.get(candidate_id)
        return candidate_to_record(candidate, utterance)

    def page(
        self,
        status: str | None = None,
        cursor: str | None = None,
        limit: int = DEFAULT_PAGE_SIZE,
    ) -> tuple[list[dict], str | None, int]:
        """One page of candidate records, with the cursor for the next.

        Cursors anchor to positions in the immutable candidate order, so
        pages stay stable while statuses change under the reader.
        """
        if limit < 1:
            raise ConfigError(f"limit must be >= 1, got {limit}")
        with self._lock:
            snapshot = dict(self._candidates)
        start = 0
        if cursor is not None:
            try:
                start = self._order.index(cursor) + 1
            except ValueError:
                raise ConfigError(f"unknown cursor {cursor!r}") from None
        matching_ids = [
            candidate_id
            for candidate_id in self._order
            if status is None or snapshot[candidate_id].status == status
        ]
        window = [
            candidate_id
            for candidate_id in self._order[start:]
            if status is None or snapshot[candidate_id].status == status
        ][:limit]
        items = [
            candidate_to_record(snapshot[candidate_id], self._utterances[candidate_id])
            for candidate_id in window
        ]
        next_cursor = None
        if window and window[-1] != (matching_ids[-1] if matching_ids else None):
            next_cursor = window[-1]
        return items, next_cursor, len(matching_ids)

    def decide(self, candidate_id: str, decision: str, annotator: str) -> dict:
        """Validate, persist, and apply one decision; returns the new view."""
        with self._lock:
            try:
                candidate = self._candidates[candidate_id]
            except KeyError:
                raise KeyError(candidate_id) from None
            updated = decide(candidate, decision, annotator)
            entry = DecisionLogEntry(
                candidate_id=candidate_id,
                decision=decision,
                annotator=annotator,
                timestamp=updated.decided_at or "",
                rule_snapshot=candidate.max_run_es,
            )
            self._append(entry)
            self._candidates[candidate_id] = updated
            self._log.append(entry)
            return candidate_to_record(updated, self._utterances[candidate_id])

    def _append(self, entry: DecisionLogEntry) -> None:
        line = json.dumps(entry.to_record(), ensure_ascii=False)
        with self._log_path.open("a", encoding="utf-8") as fh:
            fh.write(line + "\n")
            fh.flush()
            os.fsync(fh.fileno())

    def stats(self) -> dict:
        with self._lock:
            snapshot = list(self._candidates.values())
        by_status: dict[str, int] = {"pending": 0, "accepted": 0, "rejected": 0}
        by_method: dict[str, int] = {}
        for candidate in snapshot:
            by_status[candidate.status] = by_status.get(candidate.status, 0) + 1
            by_method[candidate.detection_method] = by_method.get(candidate.detection_method, 0) + 1
        return {"total": len(snapshot), "status": by_status, "method": by_method}

    def accepted_utterances(self) -> list[Utterance]:
        with self._lock:
            return [
                self._utterances[candidate_id]
                for candidate_id in self._order
                if self._candidates[candidate_id].status == "accepted"
            ]


def export_accepted(store: ReviewStore, source_name: str = "accepted") -> Manifest:
    """The accepted candidates as a manifest ready for evaluation."""
    return Manifest(source_name=source_name, entries=tuple(store.accepted_utterances()))


class DecisionRequest(BaseModel):
    decision: Literal["accept", "reject"]
    annotator: str = Field(min_length=1)


def create_app(
    store: ReviewStore,
    audio_root: str | Path | None = None,
    ui_dir: str | Path | None = None,
) -> FastAPI:
    """The review API over one store, with optional static UI assets."""
    app = FastAPI(title="cs-forge review", docs_url=None, redoc_url=None)
    audio_root = Path(audio_root) if audio_root is not None else None

    @app.get("/api/candidates")
    def list_candidates(
        status: str | None = Query(default=None),
        cursor: str | None = Query(default=None),
        limit: int = Query(default=DEFAULT_PAGE_SIZE, ge=1, le=MAX_PAGE_SIZE),
    ) -> dict:
        if status is not None and status not in ("pending", "accepted", "rejected"):
            raise HTTPException(status_code=400, detail=f"unknown status {status!r}")
        try:
            items, next_cursor, total = store.page(status=status, cursor=cursor, limit=limit)
        except ConfigError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return {"items": items, "next_cursor": next_cursor, "total": total}

    @app.get("/api/candidates/{candidate_id}")
    def get_candidate(candidate_id: str) -> dict:
        try:
            return store.record(candidate_id)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"no candidate {candidate_id!r}") from None

    @app.post("/api/candidates/{candidate_id}/decision")
    def post_decision(candidate_id: str, payload: DecisionRequest) -> dict:
        try:
            return store.decide(candidate_id, payload.decision, payload.annotator)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"no candidate {candidate_id!r}") from None
        except AlreadyDecidedError as exc:
            raise HTTPException(
                status_code=409, detail={"error": "already_decided", "message": str(exc)}
            ) from exc
        except RuleViolationError as exc:
            raise HTTPException(
                status_code=422, detail={"error": "rule_violation", "message": str(exc)}
            ) from exc

    @app.get("/api/audio/{candidate_id}")
    def get_audio(candidate_id: str, request: Request) -> Response:
        try:
            _, utterance = store.get(candidate_id)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"no candidate {candidate_id!r}") from None
        if utterance.audio_path is None:
            raise HTTPException(status_code=404, detail=f"candidate {candidate_id!r} has no audio")
        path = Path(utterance.audio_path)
        if audio_root is not None and not path.is_absolute():
            path = audio_root / path
        if not path.is_file():
            raise HTTPException(status_code=404, detail=f"audio file missing for {candidate_id!r}")
        data = path.read_bytes()
        return _range_response(data, request.headers.get("range"))

    @app.get("/api/stats")
    def get_stats() -> dict:
        return store.stats()

    if ui_dir is not None:
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")
    else:

        @app.get("/")
        def index() -> dict:
            return {
                "service": "cs-forge review",
                "endpoints": [
                    "/api/candidates",
                    "/api/candidates/{id}",
                    "/api/candidates/{id}/decision",
                    "/api/audio/{id}",
                    "/api/stats",
                ],
            }

    return app


def _range_response(data: bytes, range_header: str | None) -> Response:
    """Full 200 or single-range 206/416 per the Range header."""
    headers = {"accept-ranges": "bytes"}
    if range_header is None:
        return Response(content=data, media_type="audio/wav", headers=headers)
    size = len(data)
    spec = range_header.strip().lower()
    if not spec.startswith("bytes="):
        raise HTTPException(status_code=400, detail=f"unsupported range unit in {range_header!r}")
    start_s, _, end_s = spec[len("bytes=") :].partition("-")
    try:
        if start_s:
            start = int(start_s)
            end = int(end_s) if end_s else size - 1
        else:
            # suffix form: last N bytes
            start = max(size - int(end_s), 0)
            end = size - 1
    except ValueError:
        raise HTTPException(status_code=400, detail=f"malformed range {range_header!r}") from None
    if start >= size or end < start:
        return Response(
            status_code=416,
            headers={**headers, "content-range": f"bytes */{size}"},
        )
    end = min(end, size - 1)
    return Response(
        content=data[start : end + 1],
        status_code=206,
        media_type="audio/wav",
        headers={**headers, "content-range": f"bytes {start}-{end}/{size}"},
    )


def serve(
    store: ReviewStore,
    *,
    audio_root: str | Path | None = None,
    ui_dir: str | Path | None = None,
    host: str = "127.0.0.1",
    port: int | None = None,
) -> None:
    """Run the review service until interrupted."""
    import uvicorn

    if port is None:
        port = int(os.environ.get(PORT_ENV_VAR, DEFAULT_PORT))
    app = create_app(store, audio_root=audio_root, ui_dir=ui_dir)
    uvicorn.run(app, host=host, port=port, log_level="info")


__all__ = [
    "DecisionLogEntry",
    "ReviewStore",
    "replay",
    "export_accepted",
    "create_app",
    "serve",
    "DEFAULT_PORT",
    "PORT_ENV_VAR",
]
