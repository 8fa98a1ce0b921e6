"""Shared fixtures: record factories, random corpora, and the 10k fixture."""

from __future__ import annotations

import random

import pytest

from editaudit.dataset import Dataset
from editaudit.records import EditRecord


def record(**overrides) -> EditRecord:
    base = dict(
        rev_id=1,
        parent_rev_id=0,
        page_id=100,
        page_namespace=0,
        page_title="Article_0001",
        page_categories=frozenset(),
        page_size_before=1000,
        byte_delta=50,
        is_minor=False,
        timestamp=1514764800,
        editor_name="Editor_0",
        editor_is_registered=True,
        editor_is_bot=False,
        editor_edit_count_at_time=500,
        editor_account_age_at_time=86400 * 400,
        content_hash="0" * 40,
        damaging_prob=0.1,
        reverted=False,
        reverting_rev_id=None,
        seconds_to_revert=None,
        is_self_revert=False,
        censored=False,
    )
    base.update(overrides)
    return EditRecord(**base)


CATEGORIES = ("alpha", "beta", "gamma", "delta", "epsilon")


def random_spec(rng: random.Random, categories=CATEGORIES):
    """A random FilterSpec drawing from the synthetic corpus's value ranges."""
    from editaudit.filters import FilterSpec

    kwargs = {}
    if rng.random() < 0.4:
        kwargs["namespaces"] = frozenset(rng.sample((0, 1, 2, 4), rng.randint(1, 3)))
    if rng.random() < 0.3:
        kwargs["categories_any"] = frozenset(rng.sample(categories, rng.randint(1, 2)))
    if rng.random() < 0.3:
        lo, hi = sorted((rng.randint(0, 60000), rng.randint(0, 60000)))
        kwargs["page_size_min"], kwargs["page_size_max"] = lo, hi
    if rng.random() < 0.3:
        kwargs["abs_edit_size_min"] = rng.randint(0, 1000)
    if rng.random() < 0.3:
        kwargs["abs_edit_size_max"] = kwargs.get("abs_edit_size_min", 0) + rng.randint(0, 3000)
    for tri in ("minor", "registered", "bot"):
        if rng.random() < 0.3:
            kwargs[tri] = rng.choice(("yes", "no"))
    if rng.random() < 0.3:
        kwargs["editor_edit_count_max"] = rng.randint(0, 150000)
    if rng.random() < 0.2:
        kwargs["editor_edit_count_min"] = rng.randint(0, kwargs.get("editor_edit_count_max", 150000))
    if rng.random() < 0.2:
        lo, hi = sorted((rng.randint(0, 86400 * 4000), rng.randint(0, 86400 * 4000)))
        kwargs["editor_account_age_min"], kwargs["editor_account_age_max"] = lo, hi
    return FilterSpec(**kwargs)


def random_record(rng: random.Random, rev_id: int) -> EditRecord:
    reverted = rng.random() < 0.3
    return record(
        rev_id=rev_id,
        page_id=rng.randint(1, 40),
        page_namespace=rng.choice((0, 0, 0, 1, 2, 4)),
        page_title=f"Article_{rng.randint(0, 40):04d}",
        page_categories=frozenset(rng.sample(CATEGORIES, rng.randint(0, 3))),
        page_size_before=rng.randint(0, 60000),
        byte_delta=rng.randint(-4000, 4000),
        is_minor=rng.random() < 0.2,
        timestamp=1514764800 + rng.randint(0, 10_000_000),
        editor_name=f"Editor_{rng.randint(0, 50)}",
        editor_is_registered=rng.random() < 0.7,
        editor_is_bot=rng.random() < 0.15,
        editor_edit_count_at_time=rng.randint(0, 200000),
        editor_account_age_at_time=rng.randint(0, 86400 * 5000),
        content_hash=f"{rng.getrandbits(160):040x}",
        damaging_prob=rng.random(),
        reverted=reverted,
        reverting_rev_id=rev_id + 1 if reverted else None,
        seconds_to_revert=rng.randint(1, 100000) if reverted else None,
        censored=rng.random() < 0.05,
    )


def random_dataset(rng: random.Random, n: int) -> Dataset:
    records = [random_record(rng, i + 1) for i in range(n)]
    meta = {
        "revert_window_seconds": 31536000,
        "revert_radius": 15,
        "count_self_reverts": True,
        "end_timestamp": max(r.timestamp for r in records),
        "model_versions": ["damaging-0.5.1"],
    }
    return Dataset.from_records(records, meta)


@pytest.fixture(scope="session")
def fixture_corpus(tmp_path_factory):
    """The standard 10,000-edit synthetic corpus plus its ground truth."""
    from editaudit.fixture import FixtureParams, generate_fixture

    out = tmp_path_factory.mktemp("corpus")
    truth = generate_fixture(FixtureParams(n_edits=10000, n_pages=200, seed=7, write_diffs=False), out)
    return out, truth


@pytest.fixture(scope="session")
def fixture_dataset(fixture_corpus):
    """The corpus ingested through the real pipeline."""
    from editaudit.ingest import build_dataset, parse_edits, parse_predictions

    out, truth = fixture_corpus
    with open(out / "edits.tsv", "rb") as fh:
        edits, _ = parse_edits(fh)
    with open(out / "predictions.tsv", "rb") as fh:
        predictions, _ = parse_predictions(fh)
    dataset, report = build_dataset(edits, predictions)
    return dataset, report, truth
