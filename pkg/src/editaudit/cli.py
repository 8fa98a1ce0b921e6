"""Operator command line: build datasets, generate fixtures, serve, report.

Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .buckets import FocusBucket
from .config import ConfigError, load_config
from .dataset import Dataset
from .filters import FilterError, FilterSpec
from .fixture import FixtureParams, generate_fixture
from .ingest import MalformedHeaderError, RowError, build_dataset, parse_edits, parse_predictions
from .ingest.reverts import DEFAULT_RADIUS, DEFAULT_WINDOW
from .reporting import build_summary, canonical_json
from .sampling import SampleRequest, query
from .stats import compare
from .store import AnnotationStore


@click.group()
def main() -> None:
    """Audit edit-quality model predictions against community behavior."""


def _parse_bucket_arg(name: str) -> FocusBucket:
    try:
        return FocusBucket.parse(name)
    except ValueError as exc:
        raise click.UsageError(str(exc))


def _parse_filter_arg(raw: str, option: str) -> FilterSpec:
    try:
        return FilterSpec.from_json(raw)
    except FilterError as exc:
        raise click.UsageError(f"{option}: {exc}")


@main.command()
@click.option("--edits", "edits_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--predictions", "predictions_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False, writable=True))
@click.option("--window", default=DEFAULT_WINDOW, show_default=True, help="Revert observation window, seconds.")
@click.option("--radius", default=DEFAULT_RADIUS, show_default=True, help="Identity-revert search radius, revisions.")
@click.option("--threshold", default=0.5, show_default=True, help="Damaging threshold for the bucket report.")
@click.option("--strict", is_flag=True, help="Fail on the first malformed row instead of dropping it.")
@click.option("--count-self-reverts/--no-count-self-reverts", default=True, show_default=True)
def ingest(edits_path, predictions_path, out_path, window, radius, threshold, strict, count_self_reverts) -> None:
    """Parse inputs, detect reverts, join, and write the dataset file."""
    try:
        with open(edits_path, "rb") as fh:
            edits, edits_report = parse_edits(fh, strict=strict)
        with open(predictions_path, "rb") as fh:
            predictions, predictions_report = parse_predictions(fh, strict=strict)
    except (MalformedHeaderError, RowError) as exc:
        raise click.ClickException(str(exc))
    dataset, join_report = build_dataset(
        edits, predictions, window=window, radius=radius, count_self_reverts=count_self_reverts
    )
    dataset.save(out_path)
    result = query(dataset, SampleRequest(n=0), threshold)
    report = {
        "dataset": str(out_path),
        "records": len(dataset),
        "edits_parse": edits_report.to_dict(),
        "predictions_parse": predictions_report.to_dict(),
        "join": join_report.to_dict(),
        "reverted": int(dataset.columns["reverted"].sum()),
        "threshold": threshold,
        "bucket_counts": result.counts_payload(),
        "censored_excluded": result.censored_excluded,
    }
    click.echo(json.dumps(report, indent=2, sort_keys=True))


@main.command()
@click.option("--edits", "n_edits", default=10000, show_default=True, help="Total edit rows to generate.")
@click.option("--pages", "n_pages", default=200, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out-dir", required=True, type=click.Path(file_okay=False))
@click.option("--uc-fp-newcomer", default=0.6, show_default=True, help="Planted newcomer FP rate in UnexpectedConsensus.")
@click.option("--uc-fp-experienced", default=0.2, show_default=True, help="Planted experienced FP rate in UnexpectedConsensus.")
@click.option("--diffs/--no-diffs", default=True, show_default=True, help="Also write per-revision diff fixtures.")
def fixture(n_edits, n_pages, seed, out_dir, uc_fp_newcomer, uc_fp_experienced, diffs) -> None:
    """Generate a synthetic corpus with planted structure and a ground-truth sidecar."""
    if n_edits < 1 or n_pages < 1:
        raise click.UsageError("--edits and --pages must be positive")
    params = FixtureParams(
        n_edits=n_edits,
        n_pages=n_pages,
        seed=seed,
        uc_fp_rate_newcomer=uc_fp_newcomer,
        uc_fp_rate_experienced=uc_fp_experienced,
        write_diffs=diffs,
    )
    try:
        truth = generate_fixture(params, out_dir)
    except ValueError as exc:
        raise click.ClickException(str(exc))
    click.echo(json.dumps({"out_dir": str(out_dir), "planted": truth["planted"]}, indent=2, sort_keys=True))


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True, dir_okay=False))
def serve(config_path) -> None:
    """Run the HTTP service."""
    import uvicorn

    from .service import create_app

    try:
        config = load_config(config_path)
        app = create_app(config)
        host, port = config.host_and_port()
    except (ConfigError, OSError, ValueError) as exc:
        raise click.ClickException(str(exc))
    uvicorn.run(app, host=host, port=port, log_level="info")


@main.command()
@click.option("--dataset", "dataset_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--annotations", "annotations_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--filter", "filter_json", default="{}", show_default=True, help="FilterSpec as JSON.")
@click.option("--bucket", required=True, help="Focus bucket name.")
@click.option("--compare-filter", "compare_filter_json", default=None, help="Second FilterSpec for a group comparison.")
@click.option("--alpha", default=0.05, show_default=True)
@click.option("--threshold", default=0.5, show_default=True)
@click.option("--auditor", "auditor_id", default=None, help="Restrict to one auditor (default: the only one, or all).")
def report(dataset_path, annotations_path, filter_json, bucket, compare_filter_json, alpha, threshold, auditor_id) -> None:
    """Print an audit summary (and optional comparison) as text plus JSON."""
    flt = _parse_filter_arg(filter_json, "--filter")
    bucket_val = _parse_bucket_arg(bucket)
    compare_flt = _parse_filter_arg(compare_filter_json, "--compare-filter") if compare_filter_json else None
    if not 0.0 < alpha < 1.0:
        raise click.UsageError("--alpha must be in (0, 1)")

    dataset = Dataset.load(dataset_path)
    store = AnnotationStore(annotations_path, rev_exists=dataset.has_rev)
    if auditor_id is None:
        ids = store.auditor_ids()
        auditor_id = ids[0] if len(ids) == 1 else None  # None aggregates everyone

    summary = build_summary(dataset, store, flt, bucket_val, threshold, alpha, auditor_id)
    payload: dict = {"summary": summary.to_payload()}

    click.echo(f"Bucket:  {bucket_val.value}")
    click.echo(f"Filter:  {flt.to_canonical_json()}")
    click.echo(f"Labeled: {summary.n_labeled} ({summary.n_model_error} model errors, {summary.n_skipped} skipped)")
    if summary.rate_defined:
        pct = 100 * (1 - alpha)
        click.echo(
            f"{summary.error_kind} rate: {summary.rate:.4f}  "
            f"CI{pct:g}: [{summary.ci_low:.4f}, {summary.ci_high:.4f}]"
        )
    else:
        click.echo(f"{summary.error_kind} rate: undefined (no labeled edits)")

    if compare_flt is not None:
        summary_b = build_summary(dataset, store, compare_flt, bucket_val, threshold, alpha, auditor_id)
        if summary.n_labeled < 1 or summary_b.n_labeled < 1:
            raise click.ClickException("insufficient data: both groups need at least one labeled edit")
        comparison = compare(summary, summary_b)
        payload["comparison"] = comparison.to_payload()
        click.echo("")
        click.echo(f"Compare: {compare_flt.to_canonical_json()}")
        click.echo(f"Group B: {summary_b.n_labeled} labeled, rate {summary_b.rate:.4f}")
        click.echo(
            f"Difference: {comparison.rate_diff:+.4f}  "
            f"[{comparison.diff_ci_low:+.4f}, {comparison.diff_ci_high:+.4f}]  "
            f"p={comparison.p_value:.6g} ({comparison.method})"
        )

    click.echo("--- report-json ---")
    click.echo(canonical_json(payload))


if __name__ == "__main__":
    sys.exit(main())
