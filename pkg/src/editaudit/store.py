"""Durable auditor and annotation storage.

Two newline-delimited JSON logs (`auditors.ndjson`, `annotations.ndjson`)
are the only persistent state. Nothing is ever rewritten: a re-label appends
a fresh annotation and the supersede link is derived during replay, so a
crash between any two writes loses at most the torn final line. The
in-memory index is a pure function of the log and is rebuilt by replay at
startup.
"""

from __future__ import annotations

import json
import secrets
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable

from .buckets import FocusBucket

LABELS = ("damaging", "not_damaging", "skip")
MAX_NOTE_LEN = 1000
MAX_NAME_LEN = 64


class StoreError(Exception):
    pass


class UnknownAuditorError(StoreError):
    pass


class UnknownRevisionError(StoreError):
    pass


class CorruptLogError(StoreError):
    """A non-final log line failed to parse; the log needs operator attention."""


@dataclass(frozen=True)
class Auditor:
    auditor_id: str
    display_name: str
    created_at: int


@dataclass
class Annotation:
    annotation_id: int
    auditor_id: str
    rev_id: int
    label: str
    filter_fingerprint: int
    bucket: FocusBucket
    note: str | None
    created_at: int
    superseded_by: int | None = None

    def to_json_dict(self) -> dict:
        return {
            "annotation_id": self.annotation_id,
            "auditor_id": self.auditor_id,
            "rev_id": self.rev_id,
            "label": self.label,
            "filter_fingerprint": self.filter_fingerprint,
            "bucket": self.bucket.value,
            "note": self.note,
            "created_at": self.created_at,
            "superseded_by": self.superseded_by,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "Annotation":
        return cls(
            annotation_id=data["annotation_id"],
            auditor_id=data["auditor_id"],
            rev_id=data["rev_id"],
            label=data["label"],
            filter_fingerprint=data["filter_fingerprint"],
            bucket=FocusBucket(data["bucket"]),
            note=data.get("note"),
            created_at=data["created_at"],
            superseded_by=data.get("superseded_by"),
        )


def _read_log(path: Path) -> Iterable[dict]:
    """Yield parsed lines; a torn final line (crash artifact) is skipped."""
    if not path.exists():
        return
    with open(path, "rb") as fh:
        lines = fh.read().split(b"\n")
    for i, line in enumerate(lines):
        if not line:
            continue
        try:
            yield json.loads(line.decode("utf-8"))
        except (json.JSONDecodeError, UnicodeDecodeError):
            if i == len(lines) - 1:  # no trailing newline: torn write from a crash
                return
            raise CorruptLogError(f"{path}: unparseable line {i + 1}")


class AnnotationStore:
    """Single-writer append-only store with derived live-annotation index.

    ``rev_exists`` lets the owner of the edit dataset veto annotations on
    unknown revisions. ``clock`` is injectable for tests.
    """

    def __init__(
        self,
        annotations_path: str | Path,
        auditors_path: str | Path | None = None,
        rev_exists: Callable[[int], bool] | None = None,
        clock: Callable[[], float] = time.time,
    ):
        self.annotations_path = Path(annotations_path)
        self.auditors_path = (
            Path(auditors_path) if auditors_path is not None else self.annotations_path.parent / "auditors.ndjson"
        )
        self.annotations_path.parent.mkdir(parents=True, exist_ok=True)
        self.auditors_path.parent.mkdir(parents=True, exist_ok=True)
        self._rev_exists = rev_exists
        self._clock = clock
        self._write_lock = threading.Lock()
        self._replay()

    @classmethod
    def in_directory(
        cls,
        directory: str | Path,
        rev_exists: Callable[[int], bool] | None = None,
        clock: Callable[[], float] = time.time,
    ) -> "AnnotationStore":
        return cls(Path(directory) / "annotations.ndjson", rev_exists=rev_exists, clock=clock)

    # -- replay --------------------------------------------------------------

    def _replay(self) -> None:
        self._auditors: dict[str, Auditor] = {}
        self._tokens: dict[str, str] = {}  # token -> auditor_id
        self._annotations: dict[int, Annotation] = {}
        self._live: dict[tuple[str, int], int] = {}  # (auditor, rev) -> annotation_id
        for data in _read_log(self.auditors_path):
            auditor = Auditor(data["auditor_id"], data["display_name"], data["created_at"])
            self._auditors[auditor.auditor_id] = auditor
            self._tokens[data["token"]] = auditor.auditor_id
        for data in _read_log(self.annotations_path):
            ann = Annotation.from_json_dict(data)
            ann.superseded_by = None  # derived below, never trusted from disk
            key = (ann.auditor_id, ann.rev_id)
            prior_id = self._live.get(key)
            if prior_id is not None:
                self._annotations[prior_id].superseded_by = ann.annotation_id
            self._live[key] = ann.annotation_id
            self._annotations[ann.annotation_id] = ann
        self._next_annotation_id = max(self._annotations, default=0) + 1

    def _append(self, path: Path, data: dict) -> None:
        line = json.dumps(data, sort_keys=True, separators=(",", ":")) + "\n"
        with open(path, "a", encoding="utf-8") as fh:
            fh.write(line)
            fh.flush()

    # -- auditors --------------------------------------------------------------

    def create_auditor(self, display_name: str) -> tuple[Auditor, str]:
        """Returns the auditor and their bearer token (128-bit, shown once)."""
        if not display_name or len(display_name) > MAX_NAME_LEN:
            raise ValueError(f"display_name must be 1..{MAX_NAME_LEN} chars")
        with self._write_lock:
            auditor = Auditor(
                auditor_id=f"aud-{secrets.token_hex(8)}",
                display_name=display_name,
                created_at=int(self._clock()),
            )
            token = secrets.token_hex(16)
            self._append(
                self.auditors_path,
                {
                    "auditor_id": auditor.auditor_id,
                    "display_name": auditor.display_name,
                    "created_at": auditor.created_at,
                    "token": token,
                },
            )
            self._auditors[auditor.auditor_id] = auditor
            self._tokens[token] = auditor.auditor_id
        return auditor, token

    def auth(self, token: str) -> Auditor | None:
        auditor_id = self._tokens.get(token)
        return self._auditors.get(auditor_id) if auditor_id else None

    def get_auditor(self, auditor_id: str) -> Auditor:
        auditor = self._auditors.get(auditor_id)
        if auditor is None:
            raise UnknownAuditorError(auditor_id)
        return auditor

    def auditor_ids(self) -> list[str]:
        return sorted(self._auditors)

    # -- annotations -------------------------------------------------------------

    def record_annotation(
        self,
        auditor_id: str,
        rev_id: int,
        label: str,
        bucket: FocusBucket,
        filter_fingerprint: int,
        note: str | None = None,
    ) -> Annotation:
        """Append a judgment; a prior live label by the same auditor on the
        same revision becomes superseded (re-labeling is correction)."""
        if auditor_id not in self._auditors:
            raise UnknownAuditorError(auditor_id)
        if self._rev_exists is not None and not self._rev_exists(rev_id):
            raise UnknownRevisionError(str(rev_id))
        if label not in LABELS:
            raise ValueError(f"label must be one of {LABELS}, got {label!r}")
        if note is not None and len(note) > MAX_NOTE_LEN:
            raise ValueError(f"note exceeds {MAX_NOTE_LEN} chars")
        with self._write_lock:
            ann = Annotation(
                annotation_id=self._next_annotation_id,
                auditor_id=auditor_id,
                rev_id=rev_id,
                label=label,
                filter_fingerprint=filter_fingerprint,
                bucket=bucket,
                note=note,
                created_at=int(self._clock()),
            )
            self._append(self.annotations_path, ann.to_json_dict())
            self._next_annotation_id += 1
            key = (auditor_id, rev_id)
            prior_id = self._live.get(key)
            if prior_id is not None:
                self._annotations[prior_id].superseded_by = ann.annotation_id
            self._live[key] = ann.annotation_id
            self._annotations[ann.annotation_id] = ann
        return ann

    def live_annotations(self, auditor_id: str | None = None) -> list[Annotation]:
        """Live (non-superseded) annotations in created_at order, ties by id."""
        anns = (self._annotations[i] for i in self._live.values())
        out = [a for a in anns if auditor_id is None or a.auditor_id == auditor_id]
        out.sort(key=lambda a: (a.created_at, a.annotation_id))
        return out

    def live_label(self, auditor_id: str, rev_id: int) -> Annotation | None:
        ann_id = self._live.get((auditor_id, rev_id))
        return self._annotations[ann_id] if ann_id is not None else None

    def annotation_history(self, auditor_id: str) -> tuple[list[Annotation], dict]:
        """Live annotations plus counts grouped by (bucket, label)."""
        if auditor_id not in self._auditors:
            raise UnknownAuditorError(auditor_id)
        live = self.live_annotations(auditor_id)
        counts: dict[str, dict[str, int]] = {}
        for ann in live:
            per_bucket = counts.setdefault(ann.bucket.value, {})
            per_bucket[ann.label] = per_bucket.get(ann.label, 0) + 1
        return live, counts
