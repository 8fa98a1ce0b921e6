"""Batch ingestion: parse edit/prediction files, detect reverts, join."""

from .tsv import (
    EDIT_COLUMNS,
    PREDICTION_COLUMNS,
    MalformedHeaderError,
    ParseReport,
    RowError,
    parse_edits,
    parse_predictions,
    serialize_edits,
    serialize_predictions,
)
from .reverts import UnsortedHistoryError, detect_reverts, detect_reverts_all
from .join import JoinReport, join_dataset, build_dataset

__all__ = [
    "EDIT_COLUMNS",
    "PREDICTION_COLUMNS",
    "MalformedHeaderError",
    "ParseReport",
    "RowError",
    "parse_edits",
    "parse_predictions",
    "serialize_edits",
    "serialize_predictions",
    "UnsortedHistoryError",
    "detect_reverts",
    "detect_reverts_all",
    "JoinReport",
    "join_dataset",
    "build_dataset",
]
