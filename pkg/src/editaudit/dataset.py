"""Immutable columnar edit dataset.

Rows are EditRecords stored column-wise in NumPy arrays so the scan kernels
can stream them. The on-disk form is a single file: an 8-byte magic, a
version byte, a JSON metadata block, then the columns as an embedded NPZ
archive. The format is internal; the magic/version gate is what future
readers key on.
"""

from __future__ import annotations

import io
import json
import struct
from pathlib import Path

import numpy as np

from .backend import kernels
from .filters import FilterSpec
from .records import EditRecord

MAGIC = b"EDAUDSET"
FORMAT_VERSION = 1

# Sentinels for absent filter bounds, wide enough for any real value.
_BOUND_LO = -(2**62)
_BOUND_HI = 2**62

_TRI_CODE = {"any": -1, "yes": 1, "no": 0}

_INT_COLUMNS = (
    "rev_id",
    "parent_rev_id",
    "page_id",
    "page_namespace",
    "page_size_before",
    "byte_delta",
    "timestamp",
    "editor_edit_count_at_time",
    "editor_account_age_at_time",
    "reverting_rev_id",
    "seconds_to_revert",
)
_FLAG_COLUMNS = ("is_minor", "editor_is_registered", "editor_is_bot", "reverted", "is_self_revert", "censored")
_STR_COLUMNS = ("page_title", "page_categories", "editor_name")


class DatasetFormatError(ValueError):
    """File is not a dataset or carries an unsupported version."""


class Dataset:
    def __init__(self, columns: dict[str, np.ndarray], meta: dict):
        self.columns = columns
        self.meta = meta
        self._rev_index: dict[int, int] | None = None
        self._category_index: dict[str, np.ndarray] | None = None

    def __len__(self) -> int:
        return len(self.columns["rev_id"])

    # -- construction ------------------------------------------------------

    @classmethod
    def from_records(cls, records: list[EditRecord], meta: dict) -> "Dataset":
        n = len(records)
        cols: dict[str, np.ndarray] = {}
        for name in _INT_COLUMNS:
            cols[name] = np.empty(n, dtype=np.int64)
        for name in _FLAG_COLUMNS:
            cols[name] = np.empty(n, dtype=np.uint8)
        titles, cats, editors, hashes = [], [], [], []
        for i, r in enumerate(records):
            cols["rev_id"][i] = r.rev_id
            cols["parent_rev_id"][i] = r.parent_rev_id
            cols["page_id"][i] = r.page_id
            cols["page_namespace"][i] = r.page_namespace
            cols["page_size_before"][i] = r.page_size_before
            cols["byte_delta"][i] = r.byte_delta
            cols["timestamp"][i] = r.timestamp
            cols["editor_edit_count_at_time"][i] = r.editor_edit_count_at_time
            cols["editor_account_age_at_time"][i] = r.editor_account_age_at_time
            cols["reverting_rev_id"][i] = r.reverting_rev_id if r.reverting_rev_id is not None else 0
            cols["seconds_to_revert"][i] = r.seconds_to_revert if r.seconds_to_revert is not None else -1
            cols["is_minor"][i] = r.is_minor
            cols["editor_is_registered"][i] = r.editor_is_registered
            cols["editor_is_bot"][i] = r.editor_is_bot
            cols["reverted"][i] = r.reverted
            cols["is_self_revert"][i] = r.is_self_revert
            cols["censored"][i] = r.censored
            titles.append(r.page_title)
            cats.append("|".join(sorted(r.page_categories)))
            editors.append(r.editor_name)
            hashes.append(r.content_hash)
        cols["page_title"] = np.array(titles, dtype=np.str_) if n else np.empty(0, dtype="U1")
        cols["page_categories"] = np.array(cats, dtype=np.str_) if n else np.empty(0, dtype="U1")
        cols["editor_name"] = np.array(editors, dtype=np.str_) if n else np.empty(0, dtype="U1")
        cols["content_hash"] = np.array(hashes, dtype="S40") if n else np.empty(0, dtype="S40")
        cols["damaging_prob"] = np.array([r.damaging_prob for r in records], dtype=np.float64)
        meta = dict(meta)
        meta["record_count"] = n
        return cls(cols, meta)

    # -- row access --------------------------------------------------------

    def record(self, i: int) -> EditRecord:
        c = self.columns
        reverted = bool(c["reverted"][i])
        cats = str(c["page_categories"][i])
        return EditRecord(
            rev_id=int(c["rev_id"][i]),
            parent_rev_id=int(c["parent_rev_id"][i]),
            page_id=int(c["page_id"][i]),
            page_namespace=int(c["page_namespace"][i]),
            page_title=str(c["page_title"][i]),
            page_categories=frozenset(cats.split("|")) if cats else frozenset(),
            page_size_before=int(c["page_size_before"][i]),
            byte_delta=int(c["byte_delta"][i]),
            is_minor=bool(c["is_minor"][i]),
            timestamp=int(c["timestamp"][i]),
            editor_name=str(c["editor_name"][i]),
            editor_is_registered=bool(c["editor_is_registered"][i]),
            editor_is_bot=bool(c["editor_is_bot"][i]),
            editor_edit_count_at_time=int(c["editor_edit_count_at_time"][i]),
            editor_account_age_at_time=int(c["editor_account_age_at_time"][i]),
            content_hash=c["content_hash"][i].decode("ascii"),
            damaging_prob=float(c["damaging_prob"][i]),
            reverted=reverted,
            reverting_rev_id=int(c["reverting_rev_id"][i]) if reverted else None,
            seconds_to_revert=int(c["seconds_to_revert"][i]) if reverted else None,
            is_self_revert=bool(c["is_self_revert"][i]),
            censored=bool(c["censored"][i]),
        )

    def records(self, indices) -> list[EditRecord]:
        return [self.record(int(i)) for i in indices]

    def iter_records(self):
        for i in range(len(self)):
            yield self.record(i)

    @property
    def rev_index(self) -> dict[int, int]:
        if self._rev_index is None:
            self._rev_index = {int(rev): i for i, rev in enumerate(self.columns["rev_id"])}
        return self._rev_index

    def has_rev(self, rev_id: int) -> bool:
        return rev_id in self.rev_index

    # -- scan support ------------------------------------------------------

    def category_candidates(self, categories: frozenset[str]) -> np.ndarray:
        """Boolean mask of rows whose category set intersects ``categories``."""
        if self._category_index is None:
            index: dict[str, list[int]] = {}
            for i, joined in enumerate(self.columns["page_categories"]):
                joined = str(joined)
                if not joined:
                    continue
                for cat in joined.split("|"):
                    index.setdefault(cat, []).append(i)
            self._category_index = {cat: np.array(idx, dtype=np.int64) for cat, idx in index.items()}
        mask = np.zeros(len(self), dtype=bool)
        for cat in categories:
            hits = self._category_index.get(cat)
            if hits is not None:
                mask[hits] = True
        return mask

    def filter_mask(self, spec: FilterSpec) -> np.ndarray:
        """Boolean mask of rows matching the spec; equals a per-record scan."""
        c = self.columns
        has_ns = spec.namespaces is not None
        ns_values = np.array(sorted(spec.namespaces), dtype=np.int64) if has_ns else np.empty(0, dtype=np.int64)
        raw = kernels.filter_mask(
            c["page_namespace"],
            c["page_size_before"],
            c["byte_delta"],
            c["is_minor"],
            c["editor_is_registered"],
            c["editor_is_bot"],
            c["editor_edit_count_at_time"],
            c["editor_account_age_at_time"],
            int(has_ns),
            ns_values,
            spec.page_size_min if spec.page_size_min is not None else _BOUND_LO,
            spec.page_size_max if spec.page_size_max is not None else _BOUND_HI,
            spec.abs_edit_size_min if spec.abs_edit_size_min is not None else _BOUND_LO,
            spec.abs_edit_size_max if spec.abs_edit_size_max is not None else _BOUND_HI,
            _TRI_CODE[spec.minor],
            _TRI_CODE[spec.registered],
            _TRI_CODE[spec.bot],
            spec.editor_edit_count_min if spec.editor_edit_count_min is not None else _BOUND_LO,
            spec.editor_edit_count_max if spec.editor_edit_count_max is not None else _BOUND_HI,
            spec.editor_account_age_min if spec.editor_account_age_min is not None else _BOUND_LO,
            spec.editor_account_age_max if spec.editor_account_age_max is not None else _BOUND_HI,
        )
        mask = raw.astype(bool)
        if spec.categories_any is not None:
            mask &= self.category_candidates(spec.categories_any)
        return mask

    def bucket_codes(self, threshold: float) -> np.ndarray:
        return kernels.bucket_codes(self.columns["damaging_prob"], self.columns["reverted"], threshold)

    def auditable_mask(self) -> np.ndarray:
        """Rows whose community outcome is observable.

        Censored, not-yet-reverted edits cannot be asserted "kept", so they
        are excluded from the consensus buckets and from sampling.
        """
        c = self.columns
        return ~((c["censored"] == 1) & (c["reverted"] == 0))

    # -- persistence -------------------------------------------------------

    def save(self, path: str | Path) -> None:
        payload = io.BytesIO()
        np.savez_compressed(payload, **self.columns)
        meta_bytes = json.dumps(self.meta, sort_keys=True).encode("utf-8")
        with open(path, "wb") as fh:
            fh.write(MAGIC)
            fh.write(bytes([FORMAT_VERSION]))
            fh.write(struct.pack(">I", len(meta_bytes)))
            fh.write(meta_bytes)
            fh.write(payload.getvalue())

    @classmethod
    def load(cls, path: str | Path) -> "Dataset":
        with open(path, "rb") as fh:
            head = fh.read(len(MAGIC))
            if head != MAGIC:
                raise DatasetFormatError(f"{path}: not an edit dataset (bad magic)")
            version = fh.read(1)
            if not version or version[0] != FORMAT_VERSION:
                raise DatasetFormatError(f"{path}: unsupported dataset version {version!r}")
            (meta_len,) = struct.unpack(">I", fh.read(4))
            meta = json.loads(fh.read(meta_len).decode("utf-8"))
            archive = np.load(io.BytesIO(fh.read()), allow_pickle=False)
            columns = {name: archive[name] for name in archive.files}
        return cls(columns, meta)
