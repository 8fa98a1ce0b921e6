"""Synthetic audit corpora with planted, recoverable structure.

The real production-scale edit/prediction dumps are not available at desk
scale, so reproducible synthetic corpora are a first-class product feature:
the generator emits an edits TSV, a predictions TSV, a per-revision diff
fixture store, and a ground-truth sidecar recording exactly which edits are
truly damaging and which planted rates a full labeling pass must recover.

Planted structure, per quadrant of the (prediction, outcome) grid:

  * reverted edits are realized as hash-identity revert chains (damaged
    revision immediately restored by a later editor within the window), so
    the ingest pipeline genuinely detects them;
  * subpopulations (newcomer / experienced / anonymous / bot) carry
    different planted misclassification rates in the UnexpectedConsensus
    bucket, with counts rounded so the rates are exact ratios;
  * a small late tail of edits sits inside the revert window of the corpus
    end and must be censored by ingest;
  * a handful of edits lack predictions (and vice versa) to exercise the
    join report.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path

from .ingest.tsv import serialize_edits, serialize_predictions
from .records import Prediction, RawEdit
from .wiki import build_diff_doc, write_fixture_diff

DAY = 86400
T0 = 1514764800  # 2018-01-01T00:00:00Z
BULK_SPAN = 300 * DAY
TAIL_START = T0 + 660 * DAY
TAIL_SPAN = 40 * DAY
END_TS = T0 + 710 * DAY

MODEL_VERSION = "damaging-0.5.1"

CATEGORY_POOL = (
    "geography",
    "history",
    "science",
    "sports",
    "music",
    "politics",
    "art",
    "technology",
    "health",
    "lgbt_history",
    "biography",
    "film",
)


@dataclass
class FixtureParams:
    n_edits: int = 10000
    n_pages: int = 200
    seed: int = 0
    frac_unexpected_consensus: float = 0.025
    frac_unexpected_revert: float = 0.02
    frac_expected_revert: float = 0.03
    frac_censored_tail: float = 0.01
    uc_fp_rate_newcomer: float = 0.6
    uc_fp_rate_experienced: float = 0.2
    uc_fp_rate_anon: float = 0.4
    ur_fn_rate: float = 0.4
    er_fp_rate: float = 0.05
    overall_error_rate: float = 0.02
    missing_predictions: int | None = None  # default: 10 when the corpus is big enough
    extra_predictions: int | None = None
    write_diffs: bool = True


@dataclass
class _Plan:
    population: str  # newcomer | experienced | anon | bot
    bucket: str  # planned bucket name, or "censored"
    true_damaging: bool
    reverted: bool
    is_restorer: bool = False
    is_creation: bool = False
    has_prediction: bool = True


@dataclass
class _PendingEdit:
    plan: _Plan
    page: "_Page"
    timestamp: int
    content_hash: str
    editor: "_Editor"
    byte_delta: int
    page_size_before: int
    is_minor: bool
    rev_id: int = 0
    parent_rev_id: int = 0


@dataclass
class _Editor:
    name: str
    registered: bool
    bot: bool
    base_edit_count: int
    account_age: int
    uses: int = 0


@dataclass
class _Page:
    page_id: int
    title: str
    namespace: int
    categories: frozenset[str]
    size: int = 0
    current_hash: str = ""
    edits: list = field(default_factory=list)


def _mult5(x: int) -> int:
    return 5 * round(x / 5)


class _Pools:
    def __init__(self, rng: random.Random, expected_edits: dict[str, int]):
        self.rng = rng
        self.pools: dict[str, list[_Editor]] = {}
        self.cursors: dict[str, int] = {}
        n_new = max(1, -(-expected_edits.get("newcomer", 0) // 6))
        self.pools["newcomer"] = [
            _Editor(f"Newcomer_{k}", True, False, rng.randint(0, 80), rng.randint(1, 90) * DAY)
            for k in range(n_new)
        ]
        n_exp = max(2, -(-expected_edits.get("experienced", 0) // 40))
        self.pools["experienced"] = [
            _Editor(f"Editor_{k}", True, False, rng.randint(1000, 50000), rng.randint(1, 15) * 365 * DAY)
            for k in range(n_exp)
        ]
        n_anon = max(1, -(-expected_edits.get("anon", 0) // 10))
        self.pools["anon"] = [
            _Editor(f"203.0.113.{k % 256}" if k < 256 else f"198.51.100.{k - 256}", False, False, 0, 0)
            for k in range(n_anon)
        ]
        n_bot = max(1, -(-expected_edits.get("bot", 0) // 200))
        self.pools["bot"] = [
            _Editor(f"ExampleBot_{k}", True, True, rng.randint(100000, 900000), rng.randint(2, 10) * 365 * DAY)
            for k in range(n_bot)
        ]
        for name in self.pools:
            self.cursors[name] = 0

    def take(self, population: str) -> _Editor:
        pool = self.pools[population]
        editor = pool[self.cursors[population] % len(pool)]
        self.cursors[population] += 1
        editor.uses += 1
        return editor


def _build_plans(params: FixtureParams, rng: random.Random) -> tuple[list, dict]:
    """Event list (single edits and damaged+restorer pairs) plus quota facts.

    Totals are planned so that the emitted TSV has exactly ``n_edits`` rows:
    one creation edit per page, the planted quadrant quotas (reverted edits
    paired with their restorers), the censored tail (whose last member is
    the sentinel pinning the corpus end time), and ExpectedConsensus filler
    for the remainder.
    """
    m = params.n_edits

    def class_split(total: int) -> dict[str, int]:
        new = _mult5(round(total * 0.4))
        exp = _mult5(round(total * 0.4))
        return {"newcomer": new, "experienced": exp, "anon": total - new - exp}

    n_uc = _mult5(round(params.frac_unexpected_consensus * m))
    n_ur = _mult5(round(params.frac_unexpected_revert * m))
    n_er = round(params.frac_expected_revert * m)
    n_censor = max(1, round(params.frac_censored_tail * m))

    uc_split = class_split(n_uc)
    ur_split = class_split(n_ur)
    uc_rates = {
        "newcomer": params.uc_fp_rate_newcomer,
        "experienced": params.uc_fp_rate_experienced,
        "anon": params.uc_fp_rate_anon,
    }

    events: list[list[_Plan]] = []
    uc_errors = 0
    for pop, count in uc_split.items():
        errors = round(uc_rates[pop] * count)
        uc_errors += errors
        for i in range(count):
            # Model called it damaging; the error cases are truly fine edits.
            events.append([_Plan(pop, "UnexpectedConsensus", true_damaging=(i >= errors), reverted=False)])
    ur_errors = 0
    for pop, count in ur_split.items():
        errors = round(params.ur_fn_rate * count)
        ur_errors += errors
        for i in range(count):
            damaged = _Plan(pop, "UnexpectedRevert", true_damaging=(i < errors), reverted=True)
            restorer = _Plan("experienced", "restorer", true_damaging=False, reverted=False, is_restorer=True)
            events.append([damaged, restorer])
    er_errors = round(params.er_fp_rate * n_er)
    er_pops = ["experienced", "newcomer", "anon"]
    for i in range(n_er):
        damaged = _Plan(er_pops[i % 3], "ExpectedRevert", true_damaging=(i >= er_errors), reverted=True)
        restorer = _Plan("experienced", "restorer", true_damaging=False, reverted=False, is_restorer=True)
        events.append([damaged, restorer])

    n_restorers = n_ur + n_er
    n_filler = m - n_uc - n_ur - n_er - n_restorers - n_censor - params.n_pages
    if n_filler < 0:
        raise ValueError(f"corpus too small for planted structure: need > {m - n_filler} edits")
    dataset_target = m - (params.missing_predictions if params.missing_predictions is not None else (10 if m >= 2000 else 0))
    e_total = round(params.overall_error_rate * dataset_target)
    e_ec = min(n_filler, max(0, e_total - uc_errors - ur_errors - er_errors))
    filler_pops = ["experienced", "experienced", "anon", "newcomer", "bot"]
    missing = params.missing_predictions if params.missing_predictions is not None else (10 if m >= 2000 else 0)
    missing = min(missing, max(0, n_filler - e_ec))
    n_missing_left = missing
    for i in range(n_filler):
        # Errors first so they never coincide with the no-prediction rows.
        truly_damaging = i < e_ec
        plan = _Plan(filler_pops[i % 5], "ExpectedConsensus", true_damaging=truly_damaging, reverted=False)
        if not truly_damaging and n_missing_left > 0:
            plan.has_prediction = False
            n_missing_left -= 1
        events.append([plan])

    rng.shuffle(events)

    censor_events: list[list[_Plan]] = []
    for i in range(n_censor):
        # Half look like would-be UnexpectedConsensus (high score, and truly
        # damaging so the model is right about them) to exercise the censor
        # exclusion; the tail contributes zero prediction-vs-truth errors.
        censor_events.append([_Plan(filler_pops[i % 5], "censored", true_damaging=(i % 2 == 0), reverted=False)])

    facts = {
        "uc_count": n_uc,
        "uc_split": uc_split,
        "uc_errors": uc_errors,
        "ur_count": n_ur,
        "ur_split": ur_split,
        "ur_errors": ur_errors,
        "er_count": n_er,
        "er_errors": er_errors,
        "ec_filler": n_filler,
        "ec_errors": e_ec,
        "restorers": n_restorers,
        "page_creations": params.n_pages,
        "censored": n_censor,
        "missing_predictions": missing,
        "total_errors": uc_errors + ur_errors + er_errors + e_ec,
    }
    return events, censor_events, facts


def _new_hash(rng: random.Random, used: set[str]) -> str:
    while True:
        digest = f"{rng.getrandbits(160):040x}"
        if digest not in used:
            used.add(digest)
            return digest


def _score_micro(rng: random.Random, plan: _Plan) -> int:
    if plan.is_restorer:
        return rng.randint(0, 350000)
    if plan.bucket in ("UnexpectedConsensus", "ExpectedRevert"):
        return rng.randint(500001, 995000)
    if plan.bucket == "censored":
        # Score matches the planted truth: the tail carries no model errors.
        return rng.randint(500001, 995000) if plan.true_damaging else rng.randint(0, 499990)
    return rng.randint(0, 499990)


def generate_fixture(params: FixtureParams, out_dir: str | Path) -> dict:
    """Write edits.tsv, predictions.tsv, ground_truth.json (and diffs/).

    Returns the ground-truth dict. Fully deterministic in ``params.seed``.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = random.Random(params.seed)

    extra_preds = params.extra_predictions if params.extra_predictions is not None else (5 if params.n_edits >= 2000 else 0)
    bulk_events, censor_events, facts = _build_plans(params, rng)

    pages = []
    creation_pops = ("experienced", "experienced", "experienced", "anon", "bot")
    for i in range(params.n_pages):
        ns_draw = rng.random()
        namespace = 0 if ns_draw < 0.85 else (1 if ns_draw < 0.95 else 4)
        n_cats = rng.randint(0, 4)
        cats = frozenset(rng.sample(CATEGORY_POOL, n_cats)) if n_cats else frozenset()
        pages.append(
            _Page(
                page_id=1000 + i,
                title=f"Article_{i:04d}",
                namespace=namespace,
                categories=cats,
            )
        )
    creation_events = [
        [_Plan(creation_pops[i % 5], "ExpectedConsensus", False, False, is_creation=True)]
        for i in range(params.n_pages)
    ]

    expected_population_edits: dict[str, int] = {}
    for event in bulk_events + censor_events + creation_events:
        for plan in event:
            expected_population_edits[plan.population] = expected_population_edits.get(plan.population, 0) + 1
    pools = _Pools(rng, expected_population_edits)

    used_hashes: set[str] = set()

    # Deal bulk events to pages round-robin over a shuffled page order. Every
    # page timeline starts with its creation edit, so every later revert pair
    # restores a state that exists as a visible revision.
    page_order = pages[:]
    rng.shuffle(page_order)
    per_page_events: dict[int, list] = {}
    for i, page in enumerate(pages):
        per_page_events[page.page_id] = [creation_events[i]]
    for i, event in enumerate(bulk_events):
        page = page_order[i % len(page_order)]
        per_page_events[page.page_id].append(event)

    pending: list[_PendingEdit] = []
    pages_by_id = {p.page_id: p for p in pages}
    for page_id, events in per_page_events.items():
        page = pages_by_id[page_id]
        base = T0 + rng.randint(0, 20 * DAY)
        step = max(16, BULK_SPAN // (len(events) + 1))
        for k, event in enumerate(events):
            start = base + k * step + rng.randint(0, max(1, step // 8))
            pending.extend(_realize_event(event, page, start, step, rng, pools, used_hashes))

    # Censored tail; its last edit is the sentinel pinning the corpus end.
    sentinel_event = censor_events[-1]
    tail_events = censor_events[:-1]
    tail_order = pages[:]
    rng.shuffle(tail_order)
    tail_step = max(16, TAIL_SPAN // (len(tail_events) + 1))
    for i, event in enumerate(tail_events):
        page = tail_order[i % len(tail_order)]
        ts = TAIL_START + i * tail_step + rng.randint(0, max(1, tail_step // 8))
        pending.extend(_realize_event(event, page, ts, tail_step, rng, pools, used_hashes))
    pending.extend(_realize_event(sentinel_event, pages[0], END_TS, 16, rng, pools, used_hashes))

    # Revision ids are assigned in shuffled order so id order differs from
    # time order (the pipeline must not assume otherwise).
    rng.shuffle(pending)
    for i, edit in enumerate(pending):
        edit.rev_id = i + 1
    by_page: dict[int, list[_PendingEdit]] = {}
    for e in pending:
        by_page.setdefault(e.page.page_id, []).append(e)
    for page_edits in by_page.values():
        page_edits.sort(key=lambda e: (e.timestamp, e.rev_id))
        parent = 0
        for e in page_edits:
            e.parent_rev_id = parent
            parent = e.rev_id

    raw_edits = [
        RawEdit(
            rev_id=e.rev_id,
            parent_rev_id=e.parent_rev_id,
            page_id=e.page.page_id,
            page_namespace=e.page.namespace,
            page_title=e.page.title,
            page_categories=e.page.categories,
            page_size_before=e.page_size_before,
            byte_delta=e.byte_delta,
            is_minor=e.is_minor,
            timestamp=e.timestamp,
            editor_name=e.editor.name,
            editor_is_registered=e.editor.registered,
            editor_is_bot=e.editor.bot,
            editor_edit_count_at_time=(e.editor.base_edit_count + e.editor.uses) if e.editor.registered else 0,
            editor_account_age_at_time=e.editor.account_age,
            content_hash=e.content_hash,
        )
        for e in sorted(pending, key=lambda e: e.rev_id)
    ]

    predictions = []
    truth_edits = {}
    pending_by_rev = {e.rev_id: e for e in pending}
    for edit in raw_edits:
        e = pending_by_rev[edit.rev_id]
        if e.plan.has_prediction:
            predictions.append(
                Prediction(edit.rev_id, _score_micro(rng, e.plan) / 1_000_000, MODEL_VERSION)
            )
        truth_edits[str(edit.rev_id)] = {
            "population": e.plan.population,
            "planned_bucket": e.plan.bucket if not e.plan.is_restorer else "ExpectedConsensus",
            "restorer": e.plan.is_restorer,
            "true_damaging": e.plan.true_damaging,
            "censored": e.plan.bucket == "censored",
            "has_prediction": e.plan.has_prediction,
        }
    for k in range(extra_preds):
        predictions.append(Prediction(params.n_edits + 1000 + k, rng.randint(0, 999999) / 1_000_000, MODEL_VERSION))

    with open(out / "edits.tsv", "w", encoding="utf-8", newline="") as fh:
        serialize_edits(raw_edits, fh)
    with open(out / "predictions.tsv", "w", encoding="utf-8", newline="") as fh:
        serialize_predictions(predictions, fh)

    truth = {
        "params": {
            "n_edits": params.n_edits,
            "n_pages": params.n_pages,
            "seed": params.seed,
            "assumed_window_seconds": 365 * DAY,
            "threshold": 0.5,
        },
        "planted": {
            **facts,
            "extra_predictions": extra_preds,
            "uc_fp_rates": {
                "newcomer": params.uc_fp_rate_newcomer,
                "experienced": params.uc_fp_rate_experienced,
                "anon": params.uc_fp_rate_anon,
            },
            "ur_fn_rate": params.ur_fn_rate,
        },
        "edits": truth_edits,
    }
    with open(out / "ground_truth.json", "w", encoding="utf-8") as fh:
        json.dump(truth, fh, sort_keys=True, indent=1)
        fh.write("\n")

    if params.write_diffs:
        _write_diffs(out / "diffs", raw_edits, pending_by_rev)
    return truth


def _realize_event(
    event: list[_Plan],
    page: _Page,
    start: int,
    step: int,
    rng: random.Random,
    pools: "_Pools",
    used_hashes: set[str],
) -> list[_PendingEdit]:
    out = []
    if len(event) == 1:
        plan = event[0]
        editor = pools.take(plan.population)
        delta = rng.randint(200, 30000) if plan.is_creation else rng.randint(-1500, 2000)
        out.append(_make_edit(plan, page, start, _advance_hash(page, rng, used_hashes), editor, delta, rng))
    else:
        damaged_plan, restorer_plan = event
        pre_damage_hash = page.current_hash
        damaged_editor = pools.take(damaged_plan.population)
        gap_hi = min(3600, max(2, step // 2))
        gap = rng.randint(1, gap_hi) if gap_hi < 60 else rng.randint(60, gap_hi)
        delta = rng.choice((-1, 1)) * rng.randint(50, 3000)
        damaged_hash = _new_hash(rng, used_hashes)
        out.append(_make_edit(damaged_plan, page, start, damaged_hash, damaged_editor, delta, rng))
        # Every 20th pair is a self-revert: the damaging editor cleans up.
        if rng.random() < 0.05:
            restorer_editor = damaged_editor
            restorer_editor.uses += 1
        else:
            restorer_editor = pools.take("experienced")
            while restorer_editor.name == damaged_editor.name:
                restorer_editor = pools.take("experienced")
        out.append(
            _make_edit(restorer_plan, page, start + gap, pre_damage_hash, restorer_editor, -delta, rng, minor_rate=0.6)
        )
        page.current_hash = pre_damage_hash
    return out


def _advance_hash(page: _Page, rng: random.Random, used_hashes: set[str]) -> str:
    page.current_hash = _new_hash(rng, used_hashes)
    return page.current_hash


def _make_edit(
    plan: _Plan,
    page: _Page,
    ts: int,
    content_hash: str,
    editor: _Editor,
    delta: int,
    rng: random.Random,
    minor_rate: float = 0.1,
) -> _PendingEdit:
    size_before = page.size
    page.size = max(0, page.size + delta)
    return _PendingEdit(
        plan=plan,
        page=page,
        timestamp=ts,
        content_hash=content_hash,
        editor=editor,
        byte_delta=delta,
        page_size_before=size_before,
        is_minor=rng.random() < minor_rate,
    )


def _write_diffs(diff_dir: Path, raw_edits: list[RawEdit], pending_by_rev: dict) -> None:
    diff_dir.mkdir(parents=True, exist_ok=True)
    for edit in raw_edits:
        plan = pending_by_rev[edit.rev_id].plan
        before = f"{edit.page_title} is an article.\nIt has stable content.\nReferences follow."
        if plan.true_damaging:
            after = f"{edit.page_title} is an article.\nIT HAS VANDAL SCRIBBLES!!!\nReferences follow."
        elif plan.is_restorer:
            after = before
        else:
            after = f"{edit.page_title} is an article.\nIt has stable content, now expanded (rev {edit.rev_id}).\nReferences follow."
        write_fixture_diff(diff_dir, build_diff_doc(edit.rev_id, before, after, source="fixture"))
