"""Edit content diffs: local fixture store, upstream fetch, persistent cache.

Diffs are line-based LCS (minimal changed lines), which is how wiki diffs
are usually read and has a trivially checkable oracle: applying the ops to
the before-text must reproduce the after-text. Excerpts are capped at 4 KB
with a truncation marker; the diff is computed over the truncated texts so
the round-trip invariant holds for what is actually shipped.

The HTTP transport is injected, so tests stub the upstream and offline mode
can assert that no network call ever happens.
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Protocol

import httpx

EXCERPT_LIMIT = 4096
TRUNCATION_MARKER = "\n… [truncated]"
RETRY_DELAYS = (0.25, 1.0)


class DiffError(Exception):
    pass


class RevisionNotFoundError(DiffError):
    """The revision does not exist (locally or upstream)."""


class UpstreamUnavailableError(DiffError):
    """Upstream kept failing after retries; distinct from not-found."""


@dataclass(frozen=True)
class DiffOp:
    op: str  # "equal" | "insert" | "delete"
    text: str

    def to_json_dict(self) -> dict:
        return {"op": self.op, "text": self.text}


@dataclass(frozen=True)
class DiffDoc:
    rev_id: int
    before_excerpt: str
    after_excerpt: str
    diff_ops: tuple[DiffOp, ...]
    source: str  # "fixture" | "upstream" | "cache"

    def to_json_dict(self) -> dict:
        return {
            "rev_id": self.rev_id,
            "before_excerpt": self.before_excerpt,
            "after_excerpt": self.after_excerpt,
            "diff_ops": [op.to_json_dict() for op in self.diff_ops],
            "source": self.source,
        }

    @classmethod
    def from_json_dict(cls, data: dict, source: str | None = None) -> "DiffDoc":
        return cls(
            rev_id=data["rev_id"],
            before_excerpt=data["before_excerpt"],
            after_excerpt=data["after_excerpt"],
            diff_ops=tuple(DiffOp(op["op"], op["text"]) for op in data["diff_ops"]),
            source=source if source is not None else data["source"],
        )


def compute_diff(before: str, after: str) -> tuple[DiffOp, ...]:
    """Line-based LCS diff; runs of same-op lines merge into one op."""
    a = before.split("\n")
    b = after.split("\n")
    n, m = len(a), len(b)
    # LCS length table, then walk back to recover the aligned script.
    table = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n - 1, -1, -1):
        row, below = table[i], table[i + 1]
        for j in range(m - 1, -1, -1):
            if a[i] == b[j]:
                row[j] = below[j + 1] + 1
            else:
                row[j] = max(below[j], row[j + 1])
    ops: list[tuple[str, str]] = []
    i = j = 0
    while i < n and j < m:
        if a[i] == b[j]:
            ops.append(("equal", a[i]))
            i += 1
            j += 1
        elif table[i + 1][j] >= table[i][j + 1]:
            ops.append(("delete", a[i]))
            i += 1
        else:
            ops.append(("insert", b[j]))
            j += 1
    ops.extend(("delete", line) for line in a[i:])
    ops.extend(("insert", line) for line in b[j:])

    merged: list[DiffOp] = []
    for op, text in ops:
        if merged and merged[-1].op == op:
            merged[-1] = DiffOp(op, merged[-1].text + "\n" + text)
        else:
            merged.append(DiffOp(op, text))
    return tuple(merged)


def apply_diff(ops: tuple[DiffOp, ...], before: str) -> str:
    """Patch-apply; raises DiffError if the ops do not fit the text."""
    remaining = before.split("\n")
    out: list[str] = []
    pos = 0
    for op in ops:
        lines = op.text.split("\n")
        if op.op in ("equal", "delete"):
            if remaining[pos : pos + len(lines)] != lines:
                raise DiffError(f"{op.op} op does not match source text at line {pos + 1}")
            pos += len(lines)
        if op.op in ("equal", "insert"):
            out.extend(lines)
    if pos != len(remaining):
        raise DiffError("diff ops do not consume the whole source text")
    return "\n".join(out)


def truncate_excerpt(text: str, limit: int = EXCERPT_LIMIT) -> str:
    """Cap at ``limit`` bytes of UTF-8, cutting on a line boundary."""
    if len(text.encode("utf-8")) <= limit:
        return text
    budget = limit - len(TRUNCATION_MARKER.encode("utf-8"))
    kept: list[str] = []
    used = 0
    for line in text.split("\n"):
        cost = len(line.encode("utf-8")) + (1 if kept else 0)
        if used + cost > budget:
            break
        kept.append(line)
        used += cost
    return "\n".join(kept) + TRUNCATION_MARKER


def build_diff_doc(rev_id: int, before: str, after: str, source: str) -> DiffDoc:
    before_x = truncate_excerpt(before)
    after_x = truncate_excerpt(after)
    return DiffDoc(
        rev_id=rev_id,
        before_excerpt=before_x,
        after_excerpt=after_x,
        diff_ops=compute_diff(before_x, after_x),
        source=source,
    )


class Transport(Protocol):
    def get_json(self, url: str, params: dict) -> dict: ...


class HttpxTransport:
    def __init__(self, timeout: float = 10.0):
        self._client = httpx.Client(timeout=timeout, follow_redirects=True)

    def get_json(self, url: str, params: dict) -> dict:
        response = self._client.get(url, params=params)
        if 400 <= response.status_code < 500:
            raise TransportNotFound(f"upstream returned {response.status_code}")
        if response.status_code >= 500:
            raise TransportRetryable(f"upstream returned {response.status_code}")
        return response.json()


class OfflineTransport:
    """Fails loudly on any use; offline mode must never touch the network."""

    def get_json(self, url: str, params: dict) -> dict:
        raise AssertionError(f"network access attempted in offline mode: {url}")


class TransportNotFound(DiffError):
    pass


class TransportRetryable(DiffError):
    pass


class WikiClient:
    """Fetch-and-cache diff documents keyed by rev_id.

    ``fixtures_dir`` (offline mode) holds pre-built DiffDoc JSON files.
    Live mode fetches the revision and its parent from a standard wiki
    action API, caches the built DiffDoc as one JSON file per rev_id, and
    coalesces concurrent misses for the same revision into one fetch.
    """

    def __init__(
        self,
        fixtures_dir: str | Path | None = None,
        cache_dir: str | Path | None = None,
        api_url: str | None = None,
        transport: Transport | None = None,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.fixtures_dir = Path(fixtures_dir) if fixtures_dir else None
        self.cache_dir = Path(cache_dir) if cache_dir else None
        self.api_url = api_url
        self.transport = transport if transport is not None else (HttpxTransport() if api_url else OfflineTransport())
        self._sleep = sleep
        self._flight_lock = threading.Lock()
        self._in_flight: dict[int, threading.Lock] = {}

    # -- public -----------------------------------------------------------

    def get_diff(self, rev_id: int) -> DiffDoc:
        doc = self._load_local(rev_id)
        if doc is not None:
            return doc
        if self.api_url is None:
            raise RevisionNotFoundError(f"no stored diff for revision {rev_id}")
        # Single-flight: concurrent misses for one revision share a fetch.
        with self._flight_lock:
            lock = self._in_flight.setdefault(rev_id, threading.Lock())
        with lock:
            doc = self._load_local(rev_id)
            if doc is None:
                doc = self._fetch_upstream(rev_id)
                self._write_cache(doc)
        with self._flight_lock:
            self._in_flight.pop(rev_id, None)
        return doc

    # -- local stores -------------------------------------------------------

    def _load_local(self, rev_id: int) -> DiffDoc | None:
        if self.fixtures_dir is not None:
            path = self.fixtures_dir / f"{rev_id}.json"
            if path.exists():
                return DiffDoc.from_json_dict(json.loads(path.read_text("utf-8")), source="fixture")
        if self.cache_dir is not None:
            path = self.cache_dir / f"{rev_id}.json"
            if path.exists():
                return DiffDoc.from_json_dict(json.loads(path.read_text("utf-8")), source="cache")
        return None

    def _write_cache(self, doc: DiffDoc) -> None:
        if self.cache_dir is None:
            return
        self.cache_dir.mkdir(parents=True, exist_ok=True)
        path = self.cache_dir / f"{doc.rev_id}.json"
        path.write_text(json.dumps(doc.to_json_dict(), sort_keys=True), "utf-8")

    # -- upstream -----------------------------------------------------------

    def _get_with_retry(self, params: dict) -> dict:
        assert self.api_url is not None
        attempt = 0
        while True:
            try:
                return self.transport.get_json(self.api_url, params)
            except TransportNotFound as exc:
                raise RevisionNotFoundError(str(exc)) from None
            except (TransportRetryable, httpx.TransportError) as exc:
                if attempt >= len(RETRY_DELAYS):
                    raise UpstreamUnavailableError(f"upstream failed after retries: {exc}") from None
                self._sleep(RETRY_DELAYS[attempt])
                attempt += 1

    def _fetch_revision(self, rev_id: int) -> tuple[str, int]:
        """Returns (content, parent_rev_id) for one revision."""
        data = self._get_with_retry(
            {
                "action": "query",
                "prop": "revisions",
                "revids": str(rev_id),
                "rvslots": "main",
                "rvprop": "ids|content",
                "format": "json",
                "formatversion": "2",
            }
        )
        try:
            pages = data["query"]["pages"]
            revision = pages[0]["revisions"][0]
            content = revision["slots"]["main"]["content"]
            parent = int(revision.get("parentid", 0))
        except (KeyError, IndexError, TypeError):
            raise RevisionNotFoundError(f"revision {rev_id} missing upstream") from None
        return content, parent

    def _fetch_upstream(self, rev_id: int) -> DiffDoc:
        after, parent_id = self._fetch_revision(rev_id)
        before = "" if parent_id == 0 else self._fetch_revision(parent_id)[0]
        return build_diff_doc(rev_id, before, after, source="upstream")


def write_fixture_diff(fixtures_dir: str | Path, doc: DiffDoc) -> None:
    directory = Path(fixtures_dir)
    directory.mkdir(parents=True, exist_ok=True)
    (directory / f"{doc.rev_id}.json").write_text(json.dumps(doc.to_json_dict(), sort_keys=True), "utf-8")
