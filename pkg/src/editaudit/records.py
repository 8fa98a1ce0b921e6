"""Domain records: raw edits, model predictions, revert outcomes, joined rows.

A RawEdit is one revision's metadata as parsed from the edits TSV. A
Prediction is the model's damaging score for one revision. RevertStatus is
the community outcome computed by revert detection. An EditRecord is the
flattened join of all three plus the censoring flag, and is what the
query/annotation layers operate on.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, fields

HASH_RE = re.compile(r"^[0-9a-f]{40}$")

NAMESPACE_MAX = 5999


@dataclass(frozen=True, slots=True)
class RawEdit:
    rev_id: int
    parent_rev_id: int
    page_id: int
    page_namespace: int
    page_title: str
    page_categories: frozenset[str]
    page_size_before: int
    byte_delta: int
    is_minor: bool
    timestamp: int
    editor_name: str
    editor_is_registered: bool
    editor_is_bot: bool
    editor_edit_count_at_time: int
    editor_account_age_at_time: int
    content_hash: str

    def validate(self) -> None:
        """Raise ValueError on any field outside its documented domain."""
        if self.rev_id <= 0:
            raise ValueError(f"rev_id must be positive, got {self.rev_id}")
        if self.parent_rev_id < 0:
            raise ValueError("parent_rev_id must be >= 0")
        if self.page_id <= 0:
            raise ValueError("page_id must be positive")
        if not 0 <= self.page_namespace <= NAMESPACE_MAX:
            raise ValueError(f"page_namespace out of range: {self.page_namespace}")
        if self.page_size_before < 0:
            raise ValueError("page_size_before must be >= 0")
        if self.editor_edit_count_at_time < 0:
            raise ValueError("editor_edit_count_at_time must be >= 0")
        if self.editor_account_age_at_time < 0:
            raise ValueError("editor_account_age_at_time must be >= 0")
        if not HASH_RE.match(self.content_hash):
            raise ValueError(f"content_hash is not a 40-char hex digest: {self.content_hash!r}")


@dataclass(frozen=True, slots=True)
class Prediction:
    rev_id: int
    damaging_prob: float
    model_version: str

    def validate(self) -> None:
        if self.rev_id <= 0:
            raise ValueError(f"rev_id must be positive, got {self.rev_id}")
        if not 0.0 <= self.damaging_prob <= 1.0:
            raise ValueError(f"damaging_prob out of [0,1]: {self.damaging_prob}")


@dataclass(frozen=True, slots=True)
class RevertStatus:
    rev_id: int
    reverted: bool
    reverting_rev_id: int | None = None
    seconds_to_revert: int | None = None
    is_self_revert: bool = False

    def __post_init__(self) -> None:
        if self.reverted:
            if self.reverting_rev_id is None or self.seconds_to_revert is None:
                raise ValueError("reverted status requires reverting_rev_id and seconds_to_revert")
        else:
            if self.reverting_rev_id is not None or self.seconds_to_revert is not None:
                raise ValueError("non-reverted status must not carry revert details")


@dataclass(frozen=True, slots=True)
class EditRecord:
    """One joined row: RawEdit fields + damaging score + revert outcome.

    ``censored`` marks edits too close to the dataset end for the full
    revert-observation window to have elapsed; such edits are excluded from
    the consensus buckets because "was not reverted" cannot be asserted yet.
    """

    rev_id: int
    parent_rev_id: int
    page_id: int
    page_namespace: int
    page_title: str
    page_categories: frozenset[str]
    page_size_before: int
    byte_delta: int
    is_minor: bool
    timestamp: int
    editor_name: str
    editor_is_registered: bool
    editor_is_bot: bool
    editor_edit_count_at_time: int
    editor_account_age_at_time: int
    content_hash: str
    damaging_prob: float
    reverted: bool
    reverting_rev_id: int | None
    seconds_to_revert: int | None
    is_self_revert: bool
    censored: bool

    def to_payload(self) -> dict:
        """JSON-safe dict with deterministic member ordering for API bodies."""
        return {
            "rev_id": self.rev_id,
            "parent_rev_id": self.parent_rev_id,
            "page_id": self.page_id,
            "page_namespace": self.page_namespace,
            "page_title": self.page_title,
            "page_categories": sorted(self.page_categories),
            "page_size_before": self.page_size_before,
            "byte_delta": self.byte_delta,
            "is_minor": self.is_minor,
            "timestamp": self.timestamp,
            "editor_name": self.editor_name,
            "editor_is_registered": self.editor_is_registered,
            "editor_is_bot": self.editor_is_bot,
            "editor_edit_count_at_time": self.editor_edit_count_at_time,
            "editor_account_age_at_time": self.editor_account_age_at_time,
            "content_hash": self.content_hash,
            "damaging_prob": self.damaging_prob,
            "reverted": self.reverted,
            "reverting_rev_id": self.reverting_rev_id,
            "seconds_to_revert": self.seconds_to_revert,
            "is_self_revert": self.is_self_revert,
            "censored": self.censored,
        }


EDIT_RECORD_FIELDS = tuple(f.name for f in fields(EditRecord))


def make_record(edit: RawEdit, damaging_prob: float, status: RevertStatus, censored: bool) -> EditRecord:
    return EditRecord(
        rev_id=edit.rev_id,
        parent_rev_id=edit.parent_rev_id,
        page_id=edit.page_id,
        page_namespace=edit.page_namespace,
        page_title=edit.page_title,
        page_categories=edit.page_categories,
        page_size_before=edit.page_size_before,
        byte_delta=edit.byte_delta,
        is_minor=edit.is_minor,
        timestamp=edit.timestamp,
        editor_name=edit.editor_name,
        editor_is_registered=edit.editor_is_registered,
        editor_is_bot=edit.editor_is_bot,
        editor_edit_count_at_time=edit.editor_edit_count_at_time,
        editor_account_age_at_time=edit.editor_account_age_at_time,
        content_hash=edit.content_hash,
        damaging_prob=damaging_prob,
        reverted=status.reverted,
        reverting_rev_id=status.reverting_rev_id,
        seconds_to_revert=status.seconds_to_revert,
        is_self_revert=status.is_self_revert,
        censored=censored,
    )
