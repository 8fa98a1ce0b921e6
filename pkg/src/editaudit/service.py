"""HTTP API binding the dataset, sampling, stats, store, and diff client.

Design constraints the handlers enforce uniformly:

  * every /api route except auditor creation requires a bearer token;
  * unknown query parameters are rejected (400), not ignored;
  * all bodies are canonical JSON (sorted keys, no whitespace), so identical
    requests produce byte-identical responses across restarts;
  * GET endpoints are read-only and fully determined by their parameters
    plus store state; sampling state lives in the request (seed + cursor),
    never on the server.
"""

from __future__ import annotations

import time
from collections import deque
from pathlib import Path
from typing import Callable

from fastapi import FastAPI, Request, Response
from fastapi.staticfiles import StaticFiles

from .buckets import FocusBucket
from .config import ServiceConfig
from .dataset import Dataset
from .filters import FilterError, FilterSpec
from .reporting import build_comparison, build_summary, canonical_json
from .sampling import MAX_PAGE_SIZE, CursorError, SampleRequest, query
from .stats import compare
from .store import AnnotationStore, Auditor, LABELS, MAX_NAME_LEN, UnknownRevisionError
from .wiki import RevisionNotFoundError, Transport, UpstreamUnavailableError, WikiClient

WRITE_RATE_LIMIT = 10  # writes per second per token


class ApiError(Exception):
    def __init__(self, status_code: int, message: str):
        self.status_code = status_code
        self.message = message


class RateLimiter:
    """Sliding one-second window per token."""

    def __init__(self, limit: int = WRITE_RATE_LIMIT, clock: Callable[[], float] = time.monotonic):
        self.limit = limit
        self.clock = clock
        self._windows: dict[str, deque] = {}

    def allow(self, token: str) -> bool:
        now = self.clock()
        window = self._windows.setdefault(token, deque())
        while window and now - window[0] >= 1.0:
            window.popleft()
        if len(window) >= self.limit:
            return False
        window.append(now)
        return True


def _json_response(payload: dict, status_code: int = 200) -> Response:
    return Response(content=canonical_json(payload), status_code=status_code, media_type="application/json")


def _check_params(request: Request, allowed: set[str]) -> None:
    unknown = set(request.query_params.keys()) - allowed
    if unknown:
        raise ApiError(400, f"unknown query parameters: {sorted(unknown)}")


def _parse_filter(raw: str | None, param: str = "filter") -> FilterSpec:
    if raw is None:
        return FilterSpec()
    try:
        return FilterSpec.from_json(raw)
    except FilterError as exc:
        raise ApiError(400, f"malformed {param}: {exc}")


def _parse_bucket(raw: str | None, required: bool = False) -> FocusBucket | None:
    if raw is None:
        if required:
            raise ApiError(400, "bucket parameter is required")
        return None
    try:
        return FocusBucket.parse(raw)
    except ValueError as exc:
        raise ApiError(400, str(exc))


def _parse_int(raw: str | None, name: str, default: int, lo: int, hi: int) -> int:
    if raw is None:
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ApiError(400, f"{name} must be an integer")
    if not lo <= value <= hi:
        raise ApiError(400, f"{name} must be in [{lo}, {hi}]")
    return value


def _parse_alpha(raw: str | None, default: float) -> float:
    if raw is None:
        return default
    try:
        alpha = float(raw)
    except ValueError:
        raise ApiError(400, "alpha must be a number")
    if not 0.0 < alpha < 1.0:
        raise ApiError(400, "alpha must be in (0, 1)")
    return alpha


async def _parse_body(request: Request) -> dict:
    try:
        data = await request.json()
    except Exception:
        raise ApiError(400, "request body must be JSON")
    if not isinstance(data, dict):
        raise ApiError(400, "request body must be a JSON object")
    return data


def create_app(
    config: ServiceConfig,
    dataset: Dataset | None = None,
    store: AnnotationStore | None = None,
    wiki_client: WikiClient | None = None,
    transport: Transport | None = None,
    clock: Callable[[], float] = time.monotonic,
) -> FastAPI:
    """Build the service; dataset/store/client may be injected for tests."""
    if dataset is None:
        if not config.dataset_path:
            raise ValueError("config.dataset_path is required")
        dataset = Dataset.load(config.dataset_path)
    if store is None:
        if not config.annotations_path:
            raise ValueError("config.annotations_path is required")
        store = AnnotationStore(config.annotations_path, rev_exists=dataset.has_rev)
    if wiki_client is None:
        wiki_client = WikiClient(
            fixtures_dir=config.diff_fixtures_dir,
            cache_dir=config.diff_cache_dir,
            api_url=config.upstream_wiki_api_url,
            transport=transport,
        )

    app = FastAPI(title="editaudit", docs_url=None, redoc_url=None, openapi_url=None)
    app.state.dataset = dataset
    app.state.store = store
    app.state.wiki = wiki_client
    app.state.config = config
    limiter = RateLimiter(clock=clock)

    @app.exception_handler(ApiError)
    async def handle_api_error(request: Request, exc: ApiError) -> Response:
        return _json_response({"error": exc.message}, exc.status_code)

    def authenticate(request: Request) -> Auditor:
        header = request.headers.get("authorization", "")
        if not header.startswith("Bearer "):
            raise ApiError(401, "missing bearer token")
        auditor = store.auth(header[len("Bearer ") :])
        if auditor is None:
            raise ApiError(401, "invalid token")
        return auditor

    def request_token(request: Request) -> str:
        return request.headers.get("authorization", "")[len("Bearer ") :]

    # -- auditors ----------------------------------------------------------

    @app.post("/api/auditors")
    async def create_auditor(request: Request) -> Response:
        _check_params(request, set())
        data = await _parse_body(request)
        name = data.get("display_name")
        if set(data) - {"display_name"}:
            raise ApiError(400, "unexpected fields in body")
        if not isinstance(name, str) or not name or len(name) > MAX_NAME_LEN:
            raise ApiError(400, f"display_name must be a 1..{MAX_NAME_LEN} character string")
        auditor, token = store.create_auditor(name)
        return _json_response(
            {
                "auditor_id": auditor.auditor_id,
                "display_name": auditor.display_name,
                "created_at": auditor.created_at,
                "token": token,
            },
            201,
        )

    # -- edits -------------------------------------------------------------

    @app.get("/api/edits")
    def get_edits(request: Request) -> Response:
        auditor = authenticate(request)
        _check_params(request, {"filter", "bucket", "n", "seed", "cursor"})
        params = request.query_params
        flt = _parse_filter(params.get("filter"))
        bucket = _parse_bucket(params.get("bucket"))
        n = _parse_int(params.get("n"), "n", default=50, lo=0, hi=MAX_PAGE_SIZE)
        seed = _parse_int(params.get("seed"), "seed", default=0, lo=0, hi=2**64 - 1)
        sample = SampleRequest(filter=flt, bucket=bucket, n=n, seed=seed, cursor=params.get("cursor"))
        try:
            result = query(dataset, sample, config.threshold)
        except CursorError as exc:
            raise ApiError(400, str(exc))
        edits = []
        for record in result.records:
            payload = record.to_payload()
            live = store.live_label(auditor.auditor_id, record.rev_id)
            payload["my_label"] = live.label if live else None
            edits.append(payload)
        return _json_response(
            {
                "edits": edits,
                "counts": result.counts_payload(),
                "next_cursor": result.next_cursor,
                "filtered_total": result.filtered_total,
                "censored_excluded": result.censored_excluded,
            }
        )

    # -- annotations ---------------------------------------------------------

    @app.post("/api/annotations")
    async def post_annotation(request: Request) -> Response:
        auditor = authenticate(request)
        _check_params(request, set())
        if not limiter.allow(request_token(request)):
            raise ApiError(429, "write rate limit exceeded (10/s)")
        data = await _parse_body(request)
        extra = set(data) - {"rev_id", "label", "bucket", "filter", "note"}
        if extra:
            raise ApiError(400, f"unexpected fields in body: {sorted(extra)}")
        rev_id = data.get("rev_id")
        if type(rev_id) is not int or rev_id <= 0:
            raise ApiError(400, "rev_id must be a positive integer")
        label = data.get("label")
        if label not in LABELS:
            raise ApiError(400, f"label must be one of {list(LABELS)}")
        bucket = _parse_bucket(data.get("bucket"), required=True)
        filter_obj = data.get("filter", {})
        if not isinstance(filter_obj, dict):
            raise ApiError(400, "filter must be a JSON object")
        try:
            flt = FilterSpec.from_dict(filter_obj)
        except FilterError as exc:
            raise ApiError(400, f"malformed filter: {exc}")
        note = data.get("note")
        if note is not None and not isinstance(note, str):
            raise ApiError(400, "note must be a string")
        prior = store.live_label(auditor.auditor_id, rev_id)
        try:
            ann = store.record_annotation(
                auditor_id=auditor.auditor_id,
                rev_id=rev_id,
                label=label,
                bucket=bucket,
                filter_fingerprint=flt.fingerprint(),
                note=note,
            )
        except UnknownRevisionError:
            raise ApiError(404, f"unknown rev_id: {rev_id}")
        except ValueError as exc:
            raise ApiError(400, str(exc))
        payload = ann.to_json_dict()
        payload["supersedes"] = prior.annotation_id if prior else None
        return _json_response(payload, 201)

    @app.get("/api/annotations/history")
    def get_history(request: Request) -> Response:
        auditor = authenticate(request)
        _check_params(request, set())
        live, counts = store.annotation_history(auditor.auditor_id)
        return _json_response(
            {
                "annotations": [a.to_json_dict() for a in live],
                "counts": counts,
            }
        )

    # -- statistics -----------------------------------------------------------

    @app.get("/api/summary")
    def get_summary(request: Request) -> Response:
        auditor = authenticate(request)
        _check_params(request, {"filter", "bucket", "alpha"})
        params = request.query_params
        flt = _parse_filter(params.get("filter"))
        bucket = _parse_bucket(params.get("bucket"), required=True)
        alpha = _parse_alpha(params.get("alpha"), config.alpha_default)
        assert bucket is not None
        summary = build_summary(dataset, store, flt, bucket, config.threshold, alpha, auditor.auditor_id)
        return _json_response(summary.to_payload())

    @app.get("/api/compare")
    def get_compare(request: Request) -> Response:
        auditor = authenticate(request)
        _check_params(request, {"filter_a", "filter_b", "bucket", "alpha"})
        params = request.query_params
        filter_a = _parse_filter(params.get("filter_a"), "filter_a")
        filter_b = _parse_filter(params.get("filter_b"), "filter_b")
        bucket = _parse_bucket(params.get("bucket"), required=True)
        alpha = _parse_alpha(params.get("alpha"), config.alpha_default)
        assert bucket is not None
        a = build_summary(dataset, store, filter_a, bucket, config.threshold, alpha, auditor.auditor_id)
        b = build_summary(dataset, store, filter_b, bucket, config.threshold, alpha, auditor.auditor_id)
        if a.n_labeled < 1 or b.n_labeled < 1:
            raise ApiError(409, "insufficient data: both groups need at least one labeled edit")
        return _json_response(compare(a, b).to_payload())

    # -- diffs ---------------------------------------------------------------

    @app.get("/api/diff/{rev_id}")
    def get_diff(request: Request, rev_id: int) -> Response:
        authenticate(request)
        _check_params(request, set())
        if not dataset.has_rev(rev_id):
            raise ApiError(404, f"unknown rev_id: {rev_id}")
        try:
            doc = wiki_client.get_diff(rev_id)
        except RevisionNotFoundError:
            raise ApiError(404, f"no diff available for rev_id {rev_id}")
        except UpstreamUnavailableError as exc:
            raise ApiError(503, str(exc))
        return _json_response(doc.to_json_dict())

    if config.static_dir and Path(config.static_dir).is_dir():
        app.mount("/", StaticFiles(directory=config.static_dir, html=True), name="ui")

    return app
