"""Shared summary/comparison assembly for the API and the offline report.

Both the HTTP endpoints and `audit report` go through these functions and
serialize with `canonical_json`, which is what makes their outputs
bit-identical on identical inputs.
"""

from __future__ import annotations

import json

from .buckets import BUCKET_CODES, FocusBucket
from .dataset import Dataset
from .filters import FilterSpec
from .stats import AuditSummary, GroupComparison, compare, summarize
from .store import Annotation, AnnotationStore


def canonical_json(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def select_slice(
    dataset: Dataset,
    annotations: list[Annotation],
    flt: FilterSpec,
    bucket: FocusBucket,
    threshold: float,
) -> list[Annotation]:
    """Annotations whose revision currently falls in (filter, bucket).

    Membership is recomputed from the dataset rather than trusted from the
    stored fingerprint, so one labeling pass can be re-sliced by any later
    filter (e.g. labeling everything, then comparing subpopulations).
    """
    mask = dataset.filter_mask(flt)
    codes = dataset.bucket_codes(threshold)
    want = BUCKET_CODES[bucket]
    rev_index = dataset.rev_index
    out = []
    for ann in annotations:
        row = rev_index.get(ann.rev_id)
        if row is not None and mask[row] and codes[row] == want:
            out.append(ann)
    return out


def build_summary(
    dataset: Dataset,
    store: AnnotationStore,
    flt: FilterSpec,
    bucket: FocusBucket,
    threshold: float,
    alpha: float,
    auditor_id: str | None = None,
) -> AuditSummary:
    """Summary over one auditor's labels (or everyone's when auditor_id is None)."""
    annotations = store.live_annotations(auditor_id)
    sliced = select_slice(dataset, annotations, flt, bucket, threshold)
    return summarize(bucket, sliced, flt, alpha)


def build_comparison(
    dataset: Dataset,
    store: AnnotationStore,
    filter_a: FilterSpec,
    filter_b: FilterSpec,
    bucket: FocusBucket,
    threshold: float,
    alpha: float,
    auditor_id: str | None = None,
) -> GroupComparison:
    a = build_summary(dataset, store, filter_a, bucket, threshold, alpha, auditor_id)
    b = build_summary(dataset, store, filter_b, bucket, threshold, alpha, auditor_id)
    return compare(a, b)
