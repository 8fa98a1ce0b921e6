import json
import random

import pytest

from editaudit.buckets import FocusBucket
from editaudit.store import (
    AnnotationStore,
    CorruptLogError,
    UnknownAuditorError,
    UnknownRevisionError,
)

BUCKET = FocusBucket.UNEXPECTED_REVERT


@pytest.fixture
def store(tmp_path):
    return AnnotationStore.in_directory(tmp_path, rev_exists=lambda rev: rev < 10**6)


def test_first_label_is_live(store):
    auditor, _ = store.create_auditor("sam")
    ann = store.record_annotation(auditor.auditor_id, 42, "damaging", BUCKET, 123)
    assert ann.superseded_by is None
    assert store.live_label(auditor.auditor_id, 42).annotation_id == ann.annotation_id


def test_relabel_supersedes(store):
    auditor, _ = store.create_auditor("sam")
    first = store.record_annotation(auditor.auditor_id, 42, "damaging", BUCKET, 1)
    second = store.record_annotation(auditor.auditor_id, 42, "not_damaging", BUCKET, 1)
    assert store.live_label(auditor.auditor_id, 42).annotation_id == second.annotation_id
    assert first.superseded_by == second.annotation_id
    live, _ = store.annotation_history(auditor.auditor_id)
    assert [a.annotation_id for a in live] == [second.annotation_id]


def test_two_auditors_labels_are_independent(store):
    a1, _ = store.create_auditor("sam")
    a2, _ = store.create_auditor("alex")
    store.record_annotation(a1.auditor_id, 42, "damaging", BUCKET, 1)
    store.record_annotation(a2.auditor_id, 42, "not_damaging", BUCKET, 1)
    assert store.live_label(a1.auditor_id, 42).label == "damaging"
    assert store.live_label(a2.auditor_id, 42).label == "not_damaging"


def test_unknown_auditor_and_rev(store):
    with pytest.raises(UnknownAuditorError):
        store.record_annotation("aud-nope", 42, "damaging", BUCKET, 1)
    auditor, _ = store.create_auditor("sam")
    with pytest.raises(UnknownRevisionError):
        store.record_annotation(auditor.auditor_id, 10**7, "damaging", BUCKET, 1)
    with pytest.raises(UnknownAuditorError):
        store.annotation_history("aud-nope")


def test_validation(store):
    auditor, _ = store.create_auditor("sam")
    with pytest.raises(ValueError):
        store.record_annotation(auditor.auditor_id, 1, "meh", BUCKET, 1)
    with pytest.raises(ValueError):
        store.record_annotation(auditor.auditor_id, 1, "skip", BUCKET, 1, note="x" * 1001)
    with pytest.raises(ValueError):
        store.create_auditor("")
    with pytest.raises(ValueError):
        store.create_auditor("x" * 65)


def test_token_auth(store):
    auditor, token = store.create_auditor("sam")
    assert store.auth(token).auditor_id == auditor.auditor_id
    assert store.auth("bogus") is None


def test_duplicate_display_names_allowed(store):
    a1, _ = store.create_auditor("sam")
    a2, _ = store.create_auditor("sam")
    assert a1.auditor_id != a2.auditor_id


def test_history_counts(store):
    auditor, _ = store.create_auditor("sam")
    for rev in (1, 2, 3):
        store.record_annotation(auditor.auditor_id, rev, "damaging", BUCKET, 1)
    for rev in (4, 5):
        store.record_annotation(auditor.auditor_id, rev, "skip", BUCKET, 1)
    live, counts = store.annotation_history(auditor.auditor_id)
    assert counts == {"UnexpectedRevert": {"damaging": 3, "skip": 2}}
    assert [a.rev_id for a in live] == [1, 2, 3, 4, 5]


def test_empty_history(store):
    auditor, _ = store.create_auditor("sam")
    live, counts = store.annotation_history(auditor.auditor_id)
    assert live == [] and counts == {}


def test_replay_reproduces_live_set(tmp_path):
    rng = random.Random(8)
    store = AnnotationStore.in_directory(tmp_path, rev_exists=lambda rev: True)
    auditors = [store.create_auditor(f"auditor{i}")[0].auditor_id for i in range(3)]
    for _ in range(1000):
        store.record_annotation(
            rng.choice(auditors),
            rng.randint(1, 80),
            rng.choice(("damaging", "not_damaging", "skip")),
            rng.choice(list(FocusBucket)),
            rng.getrandbits(64),
        )
    replayed = AnnotationStore.in_directory(tmp_path, rev_exists=lambda rev: True)
    original = [(a.auditor_id, a.rev_id, a.label, a.annotation_id) for a in store.live_annotations()]
    recovered = [(a.auditor_id, a.rev_id, a.label, a.annotation_id) for a in replayed.live_annotations()]
    assert original == recovered
    for auditor_id in auditors:
        assert replayed.annotation_history(auditor_id)[1] == store.annotation_history(auditor_id)[1]


def test_history_counts_equal_recount_of_returned_list(tmp_path):
    rng = random.Random(12)
    store = AnnotationStore.in_directory(tmp_path, rev_exists=lambda rev: True)
    auditor = store.create_auditor("sam")[0].auditor_id
    for _ in range(300):
        store.record_annotation(
            auditor,
            rng.randint(1, 40),
            rng.choice(("damaging", "not_damaging", "skip")),
            rng.choice(list(FocusBucket)),
            0,
        )
    live, counts = store.annotation_history(auditor)
    recount: dict = {}
    for ann in live:
        recount.setdefault(ann.bucket.value, {}).setdefault(ann.label, 0)
        recount[ann.bucket.value][ann.label] += 1
    assert counts == recount


def test_torn_final_line_is_recovered(tmp_path):
    store = AnnotationStore.in_directory(tmp_path, rev_exists=lambda rev: True)
    auditor = store.create_auditor("sam")[0].auditor_id
    store.record_annotation(auditor, 1, "damaging", BUCKET, 1)
    store.record_annotation(auditor, 2, "not_damaging", BUCKET, 1)
    raw = store.annotations_path.read_bytes()
    store.annotations_path.write_bytes(raw[: len(raw) - 7])  # tear the last record
    recovered = AnnotationStore.in_directory(tmp_path, rev_exists=lambda rev: True)
    live = recovered.live_annotations(auditor)
    assert [a.rev_id for a in live] == [1]
    # And the store keeps accepting writes afterwards.
    recovered.record_annotation(auditor, 3, "skip", BUCKET, 1)
    assert len(recovered.live_annotations(auditor)) == 2


def test_mid_file_corruption_is_fatal(tmp_path):
    store = AnnotationStore.in_directory(tmp_path, rev_exists=lambda rev: True)
    auditor = store.create_auditor("sam")[0].auditor_id
    store.record_annotation(auditor, 1, "damaging", BUCKET, 1)
    store.record_annotation(auditor, 2, "damaging", BUCKET, 1)
    lines = store.annotations_path.read_bytes().split(b"\n")
    lines[0] = b"{corrupted"
    store.annotations_path.write_bytes(b"\n".join(lines))
    with pytest.raises(CorruptLogError):
        AnnotationStore.in_directory(tmp_path, rev_exists=lambda rev: True)


def test_log_lines_carry_exact_annotation_fields(tmp_path):
    store = AnnotationStore.in_directory(tmp_path, rev_exists=lambda rev: True)
    auditor = store.create_auditor("sam")[0].auditor_id
    store.record_annotation(auditor, 1, "damaging", BUCKET, 77, note="looks bad")
    line = store.annotations_path.read_text().strip().splitlines()[0]
    data = json.loads(line)
    assert set(data) == {
        "annotation_id",
        "auditor_id",
        "rev_id",
        "label",
        "filter_fingerprint",
        "bucket",
        "note",
        "created_at",
        "superseded_by",
    }
    assert data["bucket"] == "UnexpectedRevert"
    assert data["filter_fingerprint"] == 77


def test_crash_at_random_point_leaves_consistent_state(tmp_path):
    """Kill-and-replay: truncate the log at a random byte; replay must yield
    at most one live annotation per (auditor, rev)."""
    rng = random.Random(99)
    workdir = tmp_path / "full"
    store = AnnotationStore.in_directory(workdir, rev_exists=lambda rev: True)
    auditors = [store.create_auditor(f"a{i}")[0].auditor_id for i in range(2)]
    for _ in range(500):
        store.record_annotation(
            rng.choice(auditors),
            rng.randint(1, 30),
            rng.choice(("damaging", "not_damaging")),
            rng.choice(list(FocusBucket)),
            0,
        )
    raw = store.annotations_path.read_bytes()
    for trial in range(25):
        cut = rng.randint(0, len(raw))
        crash_dir = tmp_path / f"crash{trial}"
        crash_dir.mkdir()
        (crash_dir / "auditors.ndjson").write_bytes(store.auditors_path.read_bytes())
        (crash_dir / "annotations.ndjson").write_bytes(raw[:cut])
        recovered = AnnotationStore.in_directory(crash_dir, rev_exists=lambda rev: True)
        live = recovered.live_annotations()
        keys = [(a.auditor_id, a.rev_id) for a in live]
        assert len(keys) == len(set(keys))
        # Only fully written records survive; they must be a prefix.
        surviving_ids = sorted(a.annotation_id for a in recovered._annotations.values())
        assert surviving_ids == list(range(1, len(surviving_ids) + 1))
