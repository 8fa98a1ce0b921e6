"""TSV readers/writers for the edit and prediction input files.

Both files are UTF-8 TSV with a header row. Values never contain tabs or
newlines, so no escaping is applied. The writer emits the canonical form
(sorted categories, zero-padded nothing, ISO-8601 Z timestamps); parsing a
canonical file and re-serializing it reproduces the bytes exactly.
"""

from __future__ import annotations

import io
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import IO, Iterable

from ..records import HASH_RE, NAMESPACE_MAX, Prediction, RawEdit

EDIT_COLUMNS = (
    "rev_id",
    "parent_rev_id",
    "page_id",
    "page_namespace",
    "page_title",
    "page_categories",
    "page_size_before",
    "byte_delta",
    "is_minor",
    "timestamp",
    "editor_name",
    "editor_is_registered",
    "editor_is_bot",
    "editor_edit_count_at_time",
    "editor_account_age_at_time",
    "content_hash",
)

PREDICTION_COLUMNS = ("rev_id", "damaging_prob", "model_version")

_TS_FORMAT = "%Y-%m-%dT%H:%M:%SZ"


class MalformedHeaderError(ValueError):
    """The file's header row does not match the documented columns."""


class RowError(ValueError):
    """A data row failed validation (raised only in strict mode)."""

    def __init__(self, line_no: int, reason: str, detail: str):
        super().__init__(f"line {line_no}: {reason}: {detail}")
        self.line_no = line_no
        self.reason = reason


@dataclass
class ParseReport:
    rows_total: int = 0
    parsed: int = 0
    dropped: Counter = field(default_factory=Counter)

    @property
    def dropped_total(self) -> int:
        return sum(self.dropped.values())

    def to_dict(self) -> dict:
        return {
            "rows_total": self.rows_total,
            "parsed": self.parsed,
            "dropped": dict(sorted(self.dropped.items())),
        }


def _text(stream: IO) -> IO[str]:
    if isinstance(stream, io.TextIOBase):
        return stream
    return io.TextIOWrapper(stream, encoding="utf-8", newline="")


def _parse_int(value: str) -> int:
    if value and (value.isdigit() or (value[0] == "-" and value[1:].isdigit())):
        return int(value)
    raise ValueError(value)


def _parse_flag(value: str) -> bool:
    if value == "0":
        return False
    if value == "1":
        return True
    raise ValueError(value)


def parse_timestamp(value: str) -> int:
    dt = datetime.strptime(value, _TS_FORMAT).replace(tzinfo=timezone.utc)
    return int(dt.timestamp())


def format_timestamp(seconds: int) -> str:
    return datetime.fromtimestamp(seconds, tz=timezone.utc).strftime(_TS_FORMAT)


def _classify_edit_row(parts: list[str], line_no: int, seen: set[int]) -> RawEdit:
    """Build a RawEdit or raise RowError with a drop reason."""
    if len(parts) != len(EDIT_COLUMNS):
        raise RowError(line_no, "bad_columns", f"expected {len(EDIT_COLUMNS)} columns, got {len(parts)}")
    try:
        rev_id = _parse_int(parts[0])
        parent_rev_id = _parse_int(parts[1])
        page_id = _parse_int(parts[2])
        page_namespace = _parse_int(parts[3])
        page_size_before = _parse_int(parts[6])
        byte_delta = _parse_int(parts[7])
        edit_count = _parse_int(parts[13])
        account_age = _parse_int(parts[14])
    except ValueError as exc:
        raise RowError(line_no, "bad_int", str(exc)) from None
    try:
        is_minor = _parse_flag(parts[8])
        registered = _parse_flag(parts[11])
        bot = _parse_flag(parts[12])
    except ValueError as exc:
        raise RowError(line_no, "bad_flag", str(exc)) from None
    try:
        timestamp = parse_timestamp(parts[9])
    except ValueError:
        raise RowError(line_no, "bad_timestamp", parts[9]) from None
    content_hash = parts[15]
    if not HASH_RE.match(content_hash):
        raise RowError(line_no, "bad_hash", content_hash)
    if not 0 <= page_namespace <= NAMESPACE_MAX:
        raise RowError(line_no, "bad_namespace", parts[3])
    if rev_id <= 0 or parent_rev_id < 0 or page_id <= 0 or page_size_before < 0 or edit_count < 0 or account_age < 0:
        raise RowError(line_no, "out_of_range", "negative or non-positive id/size")
    if rev_id in seen:
        raise RowError(line_no, "duplicate_rev_id", parts[0])
    categories = frozenset(parts[5].split("|")) if parts[5] else frozenset()
    return RawEdit(
        rev_id=rev_id,
        parent_rev_id=parent_rev_id,
        page_id=page_id,
        page_namespace=page_namespace,
        page_title=parts[4],
        page_categories=categories,
        page_size_before=page_size_before,
        byte_delta=byte_delta,
        is_minor=is_minor,
        timestamp=timestamp,
        editor_name=parts[10],
        editor_is_registered=registered,
        editor_is_bot=bot,
        editor_edit_count_at_time=edit_count,
        editor_account_age_at_time=account_age,
        content_hash=content_hash,
    )


def parse_edits(stream: IO, strict: bool = False) -> tuple[list[RawEdit], ParseReport]:
    """Parse the edits TSV; invalid rows are dropped and counted per reason.

    A bad header is always fatal. With ``strict`` any bad row is fatal too.
    """
    text = _text(stream)
    header = text.readline().rstrip("\n")
    if header.split("\t") != list(EDIT_COLUMNS):
        raise MalformedHeaderError(f"edits header mismatch: {header!r}")
    report = ParseReport()
    edits: list[RawEdit] = []
    seen: set[int] = set()
    for line_no, line in enumerate(text, start=2):
        line = line.rstrip("\n")
        if not line:
            continue
        report.rows_total += 1
        try:
            edit = _classify_edit_row(line.split("\t"), line_no, seen)
        except RowError as exc:
            if strict:
                raise
            report.dropped[exc.reason] += 1
            continue
        seen.add(edit.rev_id)
        edits.append(edit)
        report.parsed += 1
    return edits, report


def parse_predictions(stream: IO, strict: bool = False) -> tuple[list[Prediction], ParseReport]:
    text = _text(stream)
    header = text.readline().rstrip("\n")
    if header.split("\t") != list(PREDICTION_COLUMNS):
        raise MalformedHeaderError(f"predictions header mismatch: {header!r}")
    report = ParseReport()
    preds: list[Prediction] = []
    seen: set[int] = set()
    for line_no, line in enumerate(text, start=2):
        line = line.rstrip("\n")
        if not line:
            continue
        report.rows_total += 1
        try:
            pred = _classify_prediction_row(line.split("\t"), line_no, seen)
        except RowError as exc:
            if strict:
                raise
            report.dropped[exc.reason] += 1
            continue
        seen.add(pred.rev_id)
        preds.append(pred)
        report.parsed += 1
    return preds, report


def _classify_prediction_row(parts: list[str], line_no: int, seen: set[int]) -> Prediction:
    if len(parts) != len(PREDICTION_COLUMNS):
        raise RowError(line_no, "bad_columns", f"expected {len(PREDICTION_COLUMNS)} columns, got {len(parts)}")
    try:
        rev_id = _parse_int(parts[0])
    except ValueError:
        raise RowError(line_no, "bad_int", parts[0]) from None
    if rev_id <= 0:
        raise RowError(line_no, "out_of_range", parts[0])
    if rev_id in seen:
        raise RowError(line_no, "duplicate_rev_id", parts[0])
    try:
        prob = float(parts[1])
    except ValueError:
        raise RowError(line_no, "bad_probability", parts[1]) from None
    if not 0.0 <= prob <= 1.0:
        raise RowError(line_no, "bad_probability", parts[1])
    return Prediction(rev_id=rev_id, damaging_prob=prob, model_version=parts[2])


def format_edit_row(edit: RawEdit) -> str:
    return "\t".join(
        (
            str(edit.rev_id),
            str(edit.parent_rev_id),
            str(edit.page_id),
            str(edit.page_namespace),
            edit.page_title,
            "|".join(sorted(edit.page_categories)),
            str(edit.page_size_before),
            str(edit.byte_delta),
            "1" if edit.is_minor else "0",
            format_timestamp(edit.timestamp),
            edit.editor_name,
            "1" if edit.editor_is_registered else "0",
            "1" if edit.editor_is_bot else "0",
            str(edit.editor_edit_count_at_time),
            str(edit.editor_account_age_at_time),
            edit.content_hash,
        )
    )


def serialize_edits(edits: Iterable[RawEdit], stream: IO[str]) -> None:
    stream.write("\t".join(EDIT_COLUMNS) + "\n")
    for edit in edits:
        stream.write(format_edit_row(edit) + "\n")


def serialize_predictions(predictions: Iterable[Prediction], stream: IO[str]) -> None:
    stream.write("\t".join(PREDICTION_COLUMNS) + "\n")
    for pred in predictions:
        stream.write(f"{pred.rev_id}\t{pred.damaging_prob:.6f}\t{pred.model_version}\n")
