"""Declarative edit filters.

A FilterSpec is a conjunction of optional constraints over article, edit,
and editor attributes. An empty spec matches everything. The canonical JSON
form (sorted keys, absent constraints omitted) is the wire format and is
what the 64-bit filter fingerprint is computed from, so clients and server
agree on which population an annotation was made against.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, replace

from .records import EditRecord

TRI_STATES = ("any", "yes", "no")

_RANGE_PAIRS = (
    ("page_size_min", "page_size_max"),
    ("abs_edit_size_min", "abs_edit_size_max"),
    ("editor_edit_count_min", "editor_edit_count_max"),
    ("editor_account_age_min", "editor_account_age_max"),
)

_INT_FIELDS = tuple(name for pair in _RANGE_PAIRS for name in pair)
_TRI_FIELDS = ("minor", "registered", "bot")


class FilterError(ValueError):
    """Malformed filter: bad key, bad type, or inconsistent bounds."""


@dataclass(frozen=True, slots=True)
class FilterSpec:
    namespaces: frozenset[int] | None = None
    categories_any: frozenset[str] | None = None
    page_size_min: int | None = None
    page_size_max: int | None = None
    abs_edit_size_min: int | None = None
    abs_edit_size_max: int | None = None
    minor: str = "any"
    registered: str = "any"
    bot: str = "any"
    editor_edit_count_min: int | None = None
    editor_edit_count_max: int | None = None
    editor_account_age_min: int | None = None
    editor_account_age_max: int | None = None

    def __post_init__(self) -> None:
        for name in _TRI_FIELDS:
            if getattr(self, name) not in TRI_STATES:
                raise FilterError(f"{name} must be one of {TRI_STATES}, got {getattr(self, name)!r}")
        for lo_name, hi_name in _RANGE_PAIRS:
            lo, hi = getattr(self, lo_name), getattr(self, hi_name)
            if lo is not None and hi is not None and lo > hi:
                raise FilterError(f"{lo_name} ({lo}) exceeds {hi_name} ({hi})")

    def is_empty(self) -> bool:
        return self == FilterSpec()

    def to_canonical_dict(self) -> dict:
        """Constraints only, with set fields as sorted lists."""
        out: dict = {}
        if self.namespaces is not None:
            out["namespaces"] = sorted(self.namespaces)
        if self.categories_any is not None:
            out["categories_any"] = sorted(self.categories_any)
        for name in _INT_FIELDS:
            value = getattr(self, name)
            if value is not None:
                out[name] = value
        for name in _TRI_FIELDS:
            value = getattr(self, name)
            if value != "any":
                out[name] = value
        return out

    def to_canonical_json(self) -> str:
        return json.dumps(self.to_canonical_dict(), sort_keys=True, separators=(",", ":"), ensure_ascii=False)

    def fingerprint(self) -> int:
        """64-bit unsigned hash of the canonical JSON form."""
        digest = hashlib.sha256(self.to_canonical_json().encode("utf-8")).digest()
        return int.from_bytes(digest[:8], "big")

    @classmethod
    def from_dict(cls, data: dict) -> "FilterSpec":
        if not isinstance(data, dict):
            raise FilterError(f"filter must be a JSON object, got {type(data).__name__}")
        kwargs: dict = {}
        for key, value in data.items():
            if key == "namespaces":
                kwargs[key] = frozenset(_require_int(v, key) for v in _require_list(value, key))
            elif key == "categories_any":
                kwargs[key] = frozenset(_require_str(v, key) for v in _require_list(value, key))
            elif key in _INT_FIELDS:
                kwargs[key] = _require_int(value, key)
            elif key in _TRI_FIELDS:
                kwargs[key] = _require_str(value, key)
            else:
                raise FilterError(f"unknown filter field: {key!r}")
        return cls(**kwargs)

    @classmethod
    def from_json(cls, text: str) -> "FilterSpec":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise FilterError(f"filter is not valid JSON: {exc}") from None
        return cls.from_dict(data)

    def with_constraint(self, **kwargs) -> "FilterSpec":
        return replace(self, **kwargs)


def _require_list(value, key: str) -> list:
    if not isinstance(value, list):
        raise FilterError(f"{key} must be a list")
    return value


def _require_int(value, key: str) -> int:
    if type(value) is not int:
        raise FilterError(f"{key} must contain integers, got {value!r}")
    return value


def _require_str(value, key: str) -> str:
    if not isinstance(value, str):
        raise FilterError(f"{key} must be a string, got {value!r}")
    return value


def _tri_ok(state: str, actual: bool) -> bool:
    if state == "any":
        return True
    return actual if state == "yes" else not actual


def matches(spec: FilterSpec, record: EditRecord) -> bool:
    """Evaluate the conjunction of all present constraints on one record."""
    if spec.namespaces is not None and record.page_namespace not in spec.namespaces:
        return False
    if spec.categories_any is not None and not (record.page_categories & spec.categories_any):
        return False
    if spec.page_size_min is not None and record.page_size_before < spec.page_size_min:
        return False
    if spec.page_size_max is not None and record.page_size_before > spec.page_size_max:
        return False
    abs_delta = abs(record.byte_delta)
    if spec.abs_edit_size_min is not None and abs_delta < spec.abs_edit_size_min:
        return False
    if spec.abs_edit_size_max is not None and abs_delta > spec.abs_edit_size_max:
        return False
    if not _tri_ok(spec.minor, record.is_minor):
        return False
    if not _tri_ok(spec.registered, record.editor_is_registered):
        return False
    if not _tri_ok(spec.bot, record.editor_is_bot):
        return False
    if spec.editor_edit_count_min is not None and record.editor_edit_count_at_time < spec.editor_edit_count_min:
        return False
    if spec.editor_edit_count_max is not None and record.editor_edit_count_at_time > spec.editor_edit_count_max:
        return False
    if spec.editor_account_age_min is not None and record.editor_account_age_at_time < spec.editor_account_age_min:
        return False
    if spec.editor_account_age_max is not None and record.editor_account_age_at_time > spec.editor_account_age_max:
        return False
    return True


# Saved presets mirrored by the UI. "Newcomer" is a convention, not a fact
# about the data: registered editors with at most 100 prior edits.
DEFAULT_FILTER = FilterSpec(namespaces=frozenset({0}), bot="no")
NEWCOMER_FILTER = FilterSpec(registered="yes", editor_edit_count_max=100)
EXPERIENCED_FILTER = FilterSpec(registered="yes", editor_edit_count_min=101, bot="no")
