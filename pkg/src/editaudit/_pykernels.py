"""NumPy implementations of the hot scan kernels.

These are the fallback twins of the compiled ``_kernels`` extension: same
signatures, same results, selected at import time by :mod:`editaudit.backend`
when the extension is unavailable or explicitly disabled. Correctness of
both is defined by equivalence to the per-record linear scan, which the test
suite checks directly.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "python"

_U64 = np.uint64
_MIX_A = _U64(0xBF58476D1CE4E5B9)
_MIX_B = _U64(0x94D049BB133111EB)
_GOLDEN = _U64(0x9E3779B97F4A7C15)


def _mix64(x: np.ndarray) -> np.ndarray:
    x = x.astype(np.uint64, copy=True)
    x ^= x >> _U64(30)
    x *= _MIX_A
    x ^= x >> _U64(27)
    x *= _MIX_B
    x ^= x >> _U64(31)
    return x


def sample_keys(rev_ids: np.ndarray, seed: int) -> np.ndarray:
    """Deterministic 64-bit ranking key per revision for seeded sampling.

    Sorting eligible revisions by (key, rev_id) yields a uniform random
    permutation that is reproducible across platforms and restarts.
    """
    seed_mix = _mix64(np.array([np.uint64(seed & 0xFFFFFFFFFFFFFFFF) ^ _GOLDEN], dtype=np.uint64))[0]
    x = rev_ids.astype(np.uint64) ^ seed_mix
    return _mix64(x)


def bucket_codes(probs: np.ndarray, reverted: np.ndarray, threshold: float) -> np.ndarray:
    """Quadrant code per record: 0=UR, 1=UC, 2=ER, 3=EC."""
    predicted = probs >= threshold
    rev = reverted.astype(bool)
    out = np.empty(len(probs), dtype=np.uint8)
    out[~predicted & rev] = 0
    out[predicted & ~rev] = 1
    out[predicted & rev] = 2
    out[~predicted & ~rev] = 3
    return out


def masked_bucket_counts(codes: np.ndarray, mask: np.ndarray) -> np.ndarray:
    counts = np.bincount(codes[mask.astype(bool)], minlength=4)
    return counts.astype(np.int64)


def filter_mask(
    namespace: np.ndarray,
    page_size: np.ndarray,
    byte_delta: np.ndarray,
    is_minor: np.ndarray,
    registered: np.ndarray,
    bot: np.ndarray,
    edit_count: np.ndarray,
    account_age: np.ndarray,
    has_namespaces: int,
    ns_values: np.ndarray,
    page_size_lo: int,
    page_size_hi: int,
    abs_delta_lo: int,
    abs_delta_hi: int,
    minor_tri: int,
    registered_tri: int,
    bot_tri: int,
    edit_count_lo: int,
    edit_count_hi: int,
    account_age_lo: int,
    account_age_hi: int,
) -> np.ndarray:
    """Evaluate every non-category constraint over the columns.

    Bounds use int64 sentinels for "absent"; tri-states are -1 (any),
    1 (yes), 0 (no). Category membership is intersected by the caller.
    """
    mask = np.ones(len(namespace), dtype=bool)
    if has_namespaces:
        mask &= np.isin(namespace, ns_values)
    mask &= (page_size >= page_size_lo) & (page_size <= page_size_hi)
    abs_delta = np.abs(byte_delta)
    mask &= (abs_delta >= abs_delta_lo) & (abs_delta <= abs_delta_hi)
    if minor_tri >= 0:
        mask &= is_minor.astype(bool) if minor_tri else ~is_minor.astype(bool)
    if registered_tri >= 0:
        mask &= registered.astype(bool) if registered_tri else ~registered.astype(bool)
    if bot_tri >= 0:
        mask &= bot.astype(bool) if bot_tri else ~bot.astype(bool)
    mask &= (edit_count >= edit_count_lo) & (edit_count <= edit_count_hi)
    mask &= (account_age >= account_age_lo) & (account_age <= account_age_hi)
    return mask.astype(np.uint8)


def detect_reverts_scan(
    hash_codes: np.ndarray,
    timestamps: np.ndarray,
    editor_codes: np.ndarray,
    radius: int,
    window: int,
    count_self: int,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Single pass over one page history sorted by (timestamp, rev_id).

    A revision whose hash matches the nearest earlier revision within
    ``radius`` reverts every revision strictly between them, provided the
    revert lands strictly later and within ``window`` seconds of the
    reverted revision. Earlier reverting revisions win; nothing is
    re-marked.
    """
    n = len(hash_codes)
    reverted = np.zeros(n, dtype=np.uint8)
    reverting_idx = np.full(n, -1, dtype=np.int64)
    seconds = np.full(n, -1, dtype=np.int64)
    self_rev = np.zeros(n, dtype=np.uint8)
    last_seen: dict[int, int] = {}
    for j in range(n):
        h = int(hash_codes[j])
        origin = last_seen.get(h, -1)
        if origin >= 0 and j - origin <= radius:
            tj = int(timestamps[j])
            ej = int(editor_codes[j])
            for m in range(origin + 1, j):
                if reverted[m]:
                    continue
                tm = int(timestamps[m])
                if tj <= tm or tj - tm > window:
                    continue
                if not count_self and int(editor_codes[m]) == ej:
                    continue
                reverted[m] = 1
                reverting_idx[m] = j
                seconds[m] = tj - tm
                self_rev[m] = 1 if int(editor_codes[m]) == ej else 0
        last_seen[h] = j
    return reverted, reverting_idx, seconds, self_rev
