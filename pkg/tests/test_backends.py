"""The compiled kernels and the NumPy fallback must agree bit for bit."""

import random

import numpy as np
import pytest

from editaudit import _pykernels

compiled = pytest.importorskip("editaudit._kernels")


def test_backend_names_differ():
    assert _pykernels.BACKEND_NAME == "python"
    assert compiled.BACKEND_NAME == "compiled"


def test_sample_keys_agree():
    rng = np.random.default_rng(0)
    ids = rng.integers(1, 2**62, size=5000).astype(np.int64)
    for seed in (0, 1, 42, 2**63, 2**64 - 1):
        a = compiled.sample_keys(ids, seed)
        b = _pykernels.sample_keys(ids.astype(np.uint64), seed)
        assert np.array_equal(a, b)


def test_bucket_codes_agree():
    rng = np.random.default_rng(1)
    probs = np.round(rng.random(4000), 6)
    probs[:10] = [0.0, 1.0, 0.5, 0.499999, 0.500001, 0.3, 0.7, 0.5, 0.5, 0.5]
    reverted = (rng.random(4000) < 0.4).astype(np.uint8)
    for threshold in (0.1, 0.5, 0.9):
        a = compiled.bucket_codes(probs, reverted, threshold)
        b = _pykernels.bucket_codes(probs, reverted, threshold)
        assert np.array_equal(a, b)


def test_masked_bucket_counts_agree():
    rng = np.random.default_rng(2)
    codes = rng.integers(0, 4, size=3000).astype(np.uint8)
    mask = (rng.random(3000) < 0.5).astype(np.uint8)
    assert np.array_equal(compiled.masked_bucket_counts(codes, mask), _pykernels.masked_bucket_counts(codes, mask))
    assert int(compiled.masked_bucket_counts(codes, mask).sum()) == int(mask.sum())


def _random_filter_args(rng):
    n = 2000
    cols = dict(
        namespace=rng.integers(0, 6, n).astype(np.int64),
        page_size=rng.integers(0, 60000, n).astype(np.int64),
        byte_delta=rng.integers(-5000, 5000, n).astype(np.int64),
        is_minor=(rng.random(n) < 0.2).astype(np.uint8),
        registered=(rng.random(n) < 0.7).astype(np.uint8),
        bot=(rng.random(n) < 0.1).astype(np.uint8),
        edit_count=rng.integers(0, 100000, n).astype(np.int64),
        account_age=rng.integers(0, 86400 * 4000, n).astype(np.int64),
    )
    has_ns = int(rng.random() < 0.5)
    ns_values = np.sort(rng.choice(6, size=rng.integers(1, 4), replace=False)).astype(np.int64)
    lo, hi = -(2**62), 2**62
    args = dict(
        has_namespaces=has_ns,
        ns_values=ns_values,
        page_size_lo=int(rng.integers(0, 1000)) if rng.random() < 0.5 else lo,
        page_size_hi=int(rng.integers(1000, 60000)) if rng.random() < 0.5 else hi,
        abs_delta_lo=int(rng.integers(0, 100)) if rng.random() < 0.5 else lo,
        abs_delta_hi=int(rng.integers(100, 5000)) if rng.random() < 0.5 else hi,
        minor_tri=int(rng.integers(-1, 2)),
        registered_tri=int(rng.integers(-1, 2)),
        bot_tri=int(rng.integers(-1, 2)),
        edit_count_lo=lo,
        edit_count_hi=int(rng.integers(0, 100000)) if rng.random() < 0.5 else hi,
        account_age_lo=lo,
        account_age_hi=hi,
    )
    return cols, args


def test_filter_mask_agrees():
    rng = np.random.default_rng(3)
    for _ in range(25):
        cols, args = _random_filter_args(rng)
        a = compiled.filter_mask(*cols.values(), **args)
        b = _pykernels.filter_mask(*cols.values(), **args)
        assert np.array_equal(a, b)


def test_detect_reverts_scan_agrees():
    rng = random.Random(4)
    for _ in range(200):
        n = rng.randint(1, 60)
        hashes = np.array([rng.randrange(8) for _ in range(n)], dtype=np.int64)
        ts = np.cumsum([rng.randint(0, 400) for _ in range(n)]).astype(np.int64)
        editors = np.array([rng.randrange(5) for _ in range(n)], dtype=np.int64)
        radius = rng.choice((1, 3, 15))
        window = rng.choice((0, 500, 10**9))
        count_self = rng.choice((0, 1))
        got_a = compiled.detect_reverts_scan(hashes, ts, editors, radius, window, count_self)
        got_b = _pykernels.detect_reverts_scan(hashes, ts, editors, radius, window, count_self)
        for a, b in zip(got_a, got_b):
            assert np.array_equal(a, b)
