"""Join parsed edits with predictions and revert outcomes into a Dataset."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ..dataset import Dataset
from ..records import Prediction, RawEdit, RevertStatus, make_record
from .reverts import DEFAULT_RADIUS, DEFAULT_WINDOW, detect_reverts_all


@dataclass
class JoinReport:
    edits_unmatched: int = 0
    predictions_unmatched: int = 0

    def to_dict(self) -> dict:
        return {
            "edits_unmatched": self.edits_unmatched,
            "predictions_unmatched": self.predictions_unmatched,
        }


def join_dataset(
    edits: Sequence[RawEdit],
    predictions: Sequence[Prediction],
    statuses: dict[int, RevertStatus] | Sequence[RevertStatus],
    window: int = DEFAULT_WINDOW,
    radius: int = DEFAULT_RADIUS,
    count_self_reverts: bool = True,
) -> tuple[Dataset, JoinReport]:
    """One EditRecord per rev_id present in both inputs, sorted by rev_id.

    Edits without a prediction are dropped and counted: an audit needs a
    real score, not a default. Statuses must cover every edit. Duplicate
    rev_ids anywhere are fatal.
    """
    if not isinstance(statuses, dict):
        statuses = {s.rev_id: s for s in statuses}

    seen_edits: set[int] = set()
    for e in edits:
        if e.rev_id in seen_edits:
            raise ValueError(f"duplicate rev_id in edits: {e.rev_id}")
        seen_edits.add(e.rev_id)
    by_rev: dict[int, Prediction] = {}
    for p in predictions:
        if p.rev_id in by_rev:
            raise ValueError(f"duplicate rev_id in predictions: {p.rev_id}")
        by_rev[p.rev_id] = p

    end_ts = max((e.timestamp for e in edits), default=0)
    report = JoinReport()
    records = []
    for e in sorted(edits, key=lambda e: e.rev_id):
        pred = by_rev.get(e.rev_id)
        if pred is None:
            report.edits_unmatched += 1
            continue
        status = statuses.get(e.rev_id)
        if status is None:
            raise ValueError(f"revert status missing for rev_id {e.rev_id}")
        censored = (end_ts - e.timestamp) < window
        records.append(make_record(e, pred.damaging_prob, status, censored))
    report.predictions_unmatched = len(by_rev.keys() - seen_edits)

    meta = {
        "revert_window_seconds": window,
        "revert_radius": radius,
        "count_self_reverts": count_self_reverts,
        "end_timestamp": end_ts,
        "model_versions": sorted({p.model_version for p in predictions}),
    }
    return Dataset.from_records(records, meta), report


def build_dataset(
    edits: Sequence[RawEdit],
    predictions: Sequence[Prediction],
    window: int = DEFAULT_WINDOW,
    radius: int = DEFAULT_RADIUS,
    count_self_reverts: bool = True,
) -> tuple[Dataset, JoinReport]:
    """Full pipeline: detect reverts per page, then join."""
    statuses = detect_reverts_all(edits, window=window, radius=radius, count_self_reverts=count_self_reverts)
    return join_dataset(
        edits, predictions, statuses, window=window, radius=radius, count_self_reverts=count_self_reverts
    )
