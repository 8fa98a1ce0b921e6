import random

import numpy as np
import pytest

from editaudit.dataset import Dataset, DatasetFormatError
from editaudit.filters import FilterSpec, matches

from conftest import random_dataset, random_record


def test_round_trip_through_file(tmp_path):
    rng = random.Random(1)
    dataset = random_dataset(rng, 200)
    path = tmp_path / "edits.dataset"
    dataset.save(path)
    loaded = Dataset.load(path)
    assert len(loaded) == 200
    assert loaded.meta == dataset.meta
    for i in (0, 57, 199):
        assert loaded.record(i) == dataset.record(i)


def test_bad_magic_rejected(tmp_path):
    path = tmp_path / "not_a_dataset"
    path.write_bytes(b"something else entirely")
    with pytest.raises(DatasetFormatError):
        Dataset.load(path)


def test_bad_version_rejected(tmp_path):
    rng = random.Random(2)
    dataset = random_dataset(rng, 10)
    path = tmp_path / "edits.dataset"
    dataset.save(path)
    raw = bytearray(path.read_bytes())
    raw[8] = 99
    path.write_bytes(bytes(raw))
    with pytest.raises(DatasetFormatError):
        Dataset.load(path)


def test_filter_mask_equals_per_record_scan():
    rng = random.Random(3)
    dataset = random_dataset(rng, 500)
    records = [dataset.record(i) for i in range(len(dataset))]
    specs = [
        FilterSpec(),
        FilterSpec(namespaces=frozenset({0}), bot="no"),
        FilterSpec(categories_any=frozenset({"alpha", "delta"})),
        FilterSpec(page_size_min=1000, page_size_max=30000, minor="no"),
        FilterSpec(abs_edit_size_min=100, registered="yes", editor_edit_count_max=5000),
        FilterSpec(editor_account_age_min=86400, editor_account_age_max=86400 * 1000),
    ]
    for spec in specs:
        mask = dataset.filter_mask(spec)
        expected = np.array([matches(spec, r) for r in records])
        assert np.array_equal(mask, expected)


def test_empty_dataset_round_trip(tmp_path):
    dataset = Dataset.from_records([], {"end_timestamp": 0})
    path = tmp_path / "empty.dataset"
    dataset.save(path)
    loaded = Dataset.load(path)
    assert len(loaded) == 0
    assert loaded.filter_mask(FilterSpec()).shape == (0,)


def test_rev_index_and_has_rev():
    rng = random.Random(4)
    dataset = random_dataset(rng, 50)
    assert dataset.has_rev(dataset.record(10).rev_id)
    assert not dataset.has_rev(10**9)


def test_auditable_mask_excludes_censored_unreverted():
    from conftest import record

    records = [
        record(rev_id=1, censored=False, reverted=False),
        record(rev_id=2, censored=True, reverted=False),
        record(rev_id=3, censored=True, reverted=True, reverting_rev_id=9, seconds_to_revert=5),
        record(rev_id=4, censored=False, reverted=True, reverting_rev_id=9, seconds_to_revert=5),
    ]
    dataset = Dataset.from_records(records, {"end_timestamp": 0})
    assert dataset.auditable_mask().tolist() == [True, False, True, True]
