"""Identity-revert detection over per-page histories.

A revision R reverts when its content hash equals the hash of the nearest
earlier revision O within ``radius`` revisions; everything strictly between
O and R is marked reverted by R, provided R lands strictly later and within
``window`` seconds of the marked revision. Processing in chronological order
means the earliest qualifying reverting revision wins, and marked revisions
are never re-marked. Reverting to the nearest matching state also keeps a
restoring revision from ever being swallowed by a later revert of the same
state.
"""

from __future__ import annotations

from collections import defaultdict
from typing import Sequence

import numpy as np

from ..backend import kernels
from ..records import RawEdit, RevertStatus

DEFAULT_RADIUS = 15
DEFAULT_WINDOW = 365 * 24 * 3600


class UnsortedHistoryError(ValueError):
    """Page history violated the sorted-by-(timestamp, rev_id) contract."""


def detect_reverts(
    page_edits: Sequence[RawEdit],
    window: int = DEFAULT_WINDOW,
    radius: int = DEFAULT_RADIUS,
    count_self_reverts: bool = True,
) -> list[RevertStatus]:
    """Revert status for each edit of one page, aligned with the input.

    With ``count_self_reverts`` off, an editor restoring past their own edit
    does not mark it (the self-revert is skipped, not merely flagged).
    """
    n = len(page_edits)
    if n == 0:
        return []
    page_id = page_edits[0].page_id
    prev_key = None
    for e in page_edits:
        if e.page_id != page_id:
            raise ValueError(f"mixed pages in one history: {page_id} vs {e.page_id}")
        key = (e.timestamp, e.rev_id)
        if prev_key is not None and key < prev_key:
            raise UnsortedHistoryError(f"history not sorted by (timestamp, rev_id) at rev {e.rev_id}")
        prev_key = key

    hash_codes = np.empty(n, dtype=np.int64)
    editor_codes = np.empty(n, dtype=np.int64)
    timestamps = np.empty(n, dtype=np.int64)
    hash_ids: dict[str, int] = {}
    editor_ids: dict[str, int] = {}
    for i, e in enumerate(page_edits):
        hash_codes[i] = hash_ids.setdefault(e.content_hash, len(hash_ids))
        editor_codes[i] = editor_ids.setdefault(e.editor_name, len(editor_ids))
        timestamps[i] = e.timestamp

    reverted, reverting_idx, seconds, self_rev = kernels.detect_reverts_scan(
        hash_codes, timestamps, editor_codes, radius, window, int(count_self_reverts)
    )
    statuses = []
    for i, e in enumerate(page_edits):
        if reverted[i]:
            statuses.append(
                RevertStatus(
                    rev_id=e.rev_id,
                    reverted=True,
                    reverting_rev_id=page_edits[int(reverting_idx[i])].rev_id,
                    seconds_to_revert=int(seconds[i]),
                    is_self_revert=bool(self_rev[i]),
                )
            )
        else:
            statuses.append(RevertStatus(rev_id=e.rev_id, reverted=False))
    return statuses


def detect_reverts_all(
    edits: Sequence[RawEdit],
    window: int = DEFAULT_WINDOW,
    radius: int = DEFAULT_RADIUS,
    count_self_reverts: bool = True,
) -> dict[int, RevertStatus]:
    """Group edits by page, sort each history, and detect reverts per page."""
    pages: dict[int, list[RawEdit]] = defaultdict(list)
    for e in edits:
        pages[e.page_id].append(e)
    statuses: dict[int, RevertStatus] = {}
    for page_edits in pages.values():
        page_edits.sort(key=lambda e: (e.timestamp, e.rev_id))
        for status in detect_reverts(page_edits, window=window, radius=radius, count_self_reverts=count_self_reverts):
            statuses[status.rev_id] = status
    return statuses
