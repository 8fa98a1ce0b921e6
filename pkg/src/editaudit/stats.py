"""Prevalence estimates and two-group comparisons over audit labels.

Wilson score intervals (not Wald) because desk-scale audits live at small n
and rates near 0 or 1. Group comparison uses a pooled two-proportion z-test,
falling back to Fisher's exact test whenever any cell of the 2x2 table is
below 5; the rule is fixed so behavior is deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from statistics import NormalDist

from .buckets import ERROR_KIND, ERROR_LABEL, FocusBucket
from .filters import FilterSpec

_NORMAL = NormalDist()


def z_critical(alpha: float) -> float:
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha out of (0,1): {alpha}")
    return _NORMAL.inv_cdf(1.0 - alpha / 2.0)


def wilson_interval(k: int, n: int, alpha: float) -> tuple[float, float]:
    """Wilson score interval for k successes in n trials.

    The bounds are exact 0.0 / 1.0 at k=0 / k=n (where the algebraic formula
    collapses exactly, so float noise must not leak through).
    """
    if n < 1:
        raise ValueError("wilson_interval requires at least one trial")
    if not 0 <= k <= n:
        raise ValueError(f"k={k} out of [0, {n}]")
    z = z_critical(alpha)
    p_hat = k / n
    z2 = z * z
    denom = 1.0 + z2 / n
    center = (p_hat + z2 / (2.0 * n)) / denom
    half = z * math.sqrt(p_hat * (1.0 - p_hat) / n + z2 / (4.0 * n * n)) / denom
    low = 0.0 if k == 0 else max(0.0, center - half)
    high = 1.0 if k == n else min(1.0, center + half)
    return low, high


def two_proportion_z_pvalue(k1: int, n1: int, k2: int, n2: int) -> tuple[float, float]:
    """Two-sided pooled z-test; returns (z, p). Degenerate pooled rates give p=1."""
    p1, p2 = k1 / n1, k2 / n2
    pooled = (k1 + k2) / (n1 + n2)
    se = math.sqrt(pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2))
    if se == 0.0:
        return 0.0, 1.0
    z = (p1 - p2) / se
    return z, math.erfc(abs(z) / math.sqrt(2.0))


def fisher_exact_pvalue(k1: int, n1: int, k2: int, n2: int) -> float:
    """Two-sided Fisher exact p for the 2x2 table [[k1, n1-k1], [k2, n2-k2]].

    Sums hypergeometric probabilities no larger than the observed table's.
    Integer arithmetic throughout, so tie handling at equal probabilities is
    exact rather than epsilon-based.
    """
    for name, val in (("k1", k1), ("k2", k2)):
        if val < 0:
            raise ValueError(f"{name} must be >= 0")
    if k1 > n1 or k2 > n2:
        raise ValueError("successes exceed trials")
    total_k = k1 + k2
    x_min = max(0, total_k - n2)
    x_max = min(n1, total_k)
    observed = math.comb(n1, k1) * math.comb(n2, k2)
    numer = 0
    for x in range(x_min, x_max + 1):
        weight = math.comb(n1, x) * math.comb(n2, total_k - x)
        if weight <= observed:
            numer += weight
    return float(Fraction(numer, math.comb(n1 + n2, total_k)))


@dataclass(frozen=True)
class AuditSummary:
    filter: FilterSpec
    bucket: FocusBucket
    n_labeled: int
    n_skipped: int
    n_model_error: int
    error_kind: str
    alpha: float
    rate: float | None
    ci_low: float | None
    ci_high: float | None

    @property
    def rate_defined(self) -> bool:
        return self.rate is not None

    def to_payload(self) -> dict:
        return {
            "filter": self.filter.to_canonical_dict(),
            "bucket": self.bucket.value,
            "n_labeled": self.n_labeled,
            "n_skipped": self.n_skipped,
            "n_model_error": self.n_model_error,
            "error_kind": self.error_kind,
            "alpha": self.alpha,
            "rate": self.rate,
            "ci_low": self.ci_low,
            "ci_high": self.ci_high,
            "rate_defined": self.rate_defined,
        }


@dataclass(frozen=True)
class GroupComparison:
    a: AuditSummary
    b: AuditSummary
    rate_diff: float
    diff_ci_low: float
    diff_ci_high: float
    p_value: float
    method: str  # "two_proportion_z" | "fisher_exact"

    def to_payload(self) -> dict:
        return {
            "a": self.a.to_payload(),
            "b": self.b.to_payload(),
            "rate_diff": self.rate_diff,
            "diff_ci_low": self.diff_ci_low,
            "diff_ci_high": self.diff_ci_high,
            "p_value": self.p_value,
            "method": self.method,
        }


def summarize(bucket: FocusBucket, annotations: list, flt: FilterSpec, alpha: float = 0.05) -> AuditSummary:
    """Fold a slice's annotations into a prevalence estimate.

    Skips express no judgment and are excluded from the denominator (which
    biases toward confident cases; callers surface n_skipped for that
    reason). Which label counts as a model error depends on the bucket: see
    ERROR_LABEL.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha out of (0,1): {alpha}")
    error_label = ERROR_LABEL[bucket]
    n_skipped = sum(1 for a in annotations if a.label == "skip")
    labeled = [a for a in annotations if a.label in ("damaging", "not_damaging")]
    n_labeled = len(labeled)
    n_error = sum(1 for a in labeled if a.label == error_label)
    if n_labeled == 0:
        return AuditSummary(
            filter=flt,
            bucket=bucket,
            n_labeled=0,
            n_skipped=n_skipped,
            n_model_error=0,
            error_kind=ERROR_KIND[bucket],
            alpha=alpha,
            rate=None,
            ci_low=None,
            ci_high=None,
        )
    low, high = wilson_interval(n_error, n_labeled, alpha)
    return AuditSummary(
        filter=flt,
        bucket=bucket,
        n_labeled=n_labeled,
        n_skipped=n_skipped,
        n_model_error=n_error,
        error_kind=ERROR_KIND[bucket],
        alpha=alpha,
        rate=n_error / n_labeled,
        ci_low=low,
        ci_high=high,
    )


def compare(a: AuditSummary, b: AuditSummary) -> GroupComparison:
    """Difference in misclassification rates between two audited slices."""
    if a.error_kind != b.error_kind:
        raise ValueError(f"cannot compare {a.error_kind} against {b.error_kind}")
    if a.n_labeled < 1 or b.n_labeled < 1:
        raise ValueError("compare requires at least one labeled edit per group")
    assert a.rate is not None and b.rate is not None
    cells = (a.n_model_error, a.n_labeled - a.n_model_error, b.n_model_error, b.n_labeled - b.n_model_error)
    if min(cells) < 5:
        method = "fisher_exact"
        p_value = fisher_exact_pvalue(a.n_model_error, a.n_labeled, b.n_model_error, b.n_labeled)
    else:
        method = "two_proportion_z"
        _, p_value = two_proportion_z_pvalue(a.n_model_error, a.n_labeled, b.n_model_error, b.n_labeled)
    rate_diff = a.rate - b.rate
    z = z_critical(a.alpha)
    se = math.sqrt(a.rate * (1.0 - a.rate) / a.n_labeled + b.rate * (1.0 - b.rate) / b.n_labeled)
    return GroupComparison(
        a=a,
        b=b,
        rate_diff=rate_diff,
        diff_ci_low=rate_diff - z * se,
        diff_ci_high=rate_diff + z * se,
        p_value=p_value,
        method=method,
    )
