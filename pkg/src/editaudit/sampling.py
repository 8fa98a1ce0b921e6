"""Deterministic seeded sampling over the filtered, bucketed dataset.

Each eligible revision gets a 64-bit key mixed from (seed, rev_id); sorting
by key yields a uniform random permutation that is stable across processes
and restarts, so pagination is just an offset into that ordering and the
whole request is reproducible from (filter, bucket, seed, cursor) alone.
"""

from __future__ import annotations

import base64
import binascii
import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .backend import kernels
from .buckets import BUCKET_CODES, FocusBucket
from .dataset import Dataset
from .filters import FilterSpec
from .records import EditRecord

MAX_PAGE_SIZE = 500
MAX_SEED = 2**64 - 1


class CursorError(ValueError):
    """Cursor is malformed or belongs to a different request."""


@dataclass(frozen=True)
class SampleRequest:
    filter: FilterSpec = field(default_factory=FilterSpec)
    bucket: FocusBucket | None = None
    n: int = 50
    seed: int = 0
    cursor: str | None = None

    def __post_init__(self) -> None:
        if not 0 <= self.n <= MAX_PAGE_SIZE:
            raise ValueError(f"n must be in [0, {MAX_PAGE_SIZE}], got {self.n}")
        if not 0 <= self.seed <= MAX_SEED:
            raise ValueError("seed must fit in 64 unsigned bits")

    def fingerprint(self) -> str:
        """Identifies (filter, bucket, seed); cursors are bound to this."""
        basis = f"{self.filter.to_canonical_json()}|{self.bucket.value if self.bucket else ''}|{self.seed}"
        return hashlib.sha256(basis.encode("utf-8")).hexdigest()[:16]


@dataclass(frozen=True)
class QueryResult:
    records: list[EditRecord]
    next_cursor: str | None
    counts: dict[FocusBucket, int]
    filtered_total: int
    censored_excluded: int

    def counts_payload(self) -> dict:
        return {bucket.value: self.counts[bucket] for bucket in FocusBucket}


def encode_cursor(offset: int, fingerprint: str) -> str:
    raw = json.dumps({"o": offset, "f": fingerprint}, sort_keys=True, separators=(",", ":"))
    return base64.urlsafe_b64encode(raw.encode("ascii")).decode("ascii").rstrip("=")


def decode_cursor(cursor: str, fingerprint: str) -> int:
    try:
        padded = cursor + "=" * (-len(cursor) % 4)
        data = json.loads(base64.urlsafe_b64decode(padded.encode("ascii")).decode("ascii"))
        offset = data["o"]
        fp = data["f"]
    except (binascii.Error, UnicodeDecodeError, json.JSONDecodeError, KeyError, TypeError) as exc:
        raise CursorError(f"malformed cursor: {exc}") from None
    if type(offset) is not int or offset < 0:
        raise CursorError("malformed cursor offset")
    if fp != fingerprint:
        raise CursorError("cursor does not match this (filter, bucket, seed)")
    return offset


def query(dataset: Dataset, request: SampleRequest, threshold: float) -> QueryResult:
    """Uniform sample without replacement from the requested slice.

    Population counts cover all four buckets of the filtered set before
    sampling, with censored unreverted edits excluded (their consensus
    outcome is unobservable), so the four counts partition the auditable
    filtered population.
    """
    fmask = dataset.filter_mask(request.filter)
    codes = dataset.bucket_codes(threshold)
    auditable = dataset.auditable_mask()
    counted = fmask & auditable
    raw_counts = kernels.masked_bucket_counts(codes, counted.view(np.uint8))
    counts = {bucket: int(raw_counts[code]) for bucket, code in BUCKET_CODES.items()}

    eligible = counted
    if request.bucket is not None:
        eligible = eligible & (codes == BUCKET_CODES[request.bucket])
    indices = np.flatnonzero(eligible)
    rev_ids = dataset.columns["rev_id"][indices]
    keys = kernels.sample_keys(rev_ids, request.seed)
    ordered = indices[np.lexsort((rev_ids, keys))]

    fingerprint = request.fingerprint()
    offset = decode_cursor(request.cursor, fingerprint) if request.cursor else 0
    offset = min(offset, len(ordered))
    page = ordered[offset : offset + request.n]
    end = offset + len(page)
    next_cursor = encode_cursor(end, fingerprint) if end < len(ordered) else None

    return QueryResult(
        records=dataset.records(page),
        next_cursor=next_cursor,
        counts=counts,
        filtered_total=int(fmask.sum()),
        censored_excluded=int((fmask & ~auditable).sum()),
    )
