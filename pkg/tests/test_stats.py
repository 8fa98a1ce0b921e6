import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from editaudit.buckets import FocusBucket
from editaudit.filters import FilterSpec
from editaudit.stats import (
    compare,
    fisher_exact_pvalue,
    summarize,
    two_proportion_z_pvalue,
    wilson_interval,
)
from editaudit.store import Annotation

from oracles import fisher_oracle, two_proportion_z_oracle, wilson_oracle


def ann(label, rev_id=1, bucket=FocusBucket.UNEXPECTED_CONSENSUS):
    return Annotation(
        annotation_id=rev_id,
        auditor_id="aud-x",
        rev_id=rev_id,
        label=label,
        filter_fingerprint=0,
        bucket=bucket,
        note=None,
        created_at=0,
    )


class TestWilson:
    def test_zero_successes_lower_bound_exact(self):
        low, high = wilson_interval(0, 1, 0.05)
        assert low == 0.0
        assert 0 < high < 1

    def test_all_successes_upper_bound_exact(self):
        low, high = wilson_interval(7, 7, 0.05)
        assert high == 1.0
        assert low > 0

    def test_five_of_ten(self):
        # Frozen from the high-precision oracle.
        low, high = wilson_interval(5, 10, 0.05)
        assert low == pytest.approx(0.2365930905, abs=1e-3)
        assert high == pytest.approx(0.7634069095, abs=1e-3)

    @pytest.mark.parametrize("n", [2, 10, 48, 1000])
    def test_symmetric_at_half(self, n):
        low, high = wilson_interval(n // 2, n, 0.05)
        assert abs((low + high) / 2 - 0.5) < 1e-12

    def test_rejects_no_trials(self):
        with pytest.raises(ValueError):
            wilson_interval(0, 0, 0.05)

    def test_rejects_bad_k(self):
        with pytest.raises(ValueError):
            wilson_interval(5, 4, 0.05)

    def test_matches_oracle(self):
        rng = random.Random(11)
        for _ in range(500):
            n = rng.randint(1, 5000)
            k = rng.randint(0, n)
            alpha = rng.uniform(0.001, 0.5)
            low, high = wilson_interval(k, n, alpha)
            olow, ohigh = wilson_oracle(k, n, alpha)
            assert low == pytest.approx(olow, abs=1e-9)
            assert high == pytest.approx(ohigh, abs=1e-9)

    @given(st.integers(0, 500), st.integers(1, 500))
    def test_bounds_bracket_estimate(self, k, n):
        if k > n:
            k, n = n, k
        low, high = wilson_interval(k, n, 0.05)
        assert 0.0 <= low <= k / n <= high <= 1.0

    def test_width_shrinks_with_n(self):
        widths = []
        for n in (10, 40, 160, 640):
            low, high = wilson_interval(3 * n // 10, n, 0.05)
            widths.append(high - low)
        assert widths == sorted(widths, reverse=True)

    def test_coverage_simulation(self):
        # 10,000 simulated binomial(50, 0.3) draws: the 95% interval must
        # cover the true rate in 94..96.5% of trials.
        rng = np.random.default_rng(1234)
        draws = rng.binomial(50, 0.3, size=10000)
        covered = 0
        for k in draws:
            low, high = wilson_interval(int(k), 50, 0.05)
            covered += low <= 0.3 <= high
        assert 0.94 <= covered / 10000 <= 0.965


class TestFisher:
    def test_matches_oracle_on_example(self):
        assert fisher_exact_pvalue(7, 10, 2, 10) == pytest.approx(fisher_oracle(7, 10, 2, 10), abs=1e-6)

    def test_in_unit_interval_and_symmetric(self):
        rng = random.Random(5)
        for _ in range(200):
            n1, n2 = rng.randint(1, 25), rng.randint(1, 25)
            k1, k2 = rng.randint(0, n1), rng.randint(0, n2)
            p = fisher_exact_pvalue(k1, n1, k2, n2)
            assert 0.0 < p <= 1.0
            assert p == pytest.approx(fisher_exact_pvalue(k2, n2, k1, n1), abs=1e-12)

    def test_all_small_tables_match_oracle(self):
        for n1 in range(1, 13):
            for n2 in range(1, 13):
                for k1 in range(n1 + 1):
                    for k2 in range(n2 + 1):
                        p = fisher_exact_pvalue(k1, n1, k2, n2)
                        assert p == pytest.approx(fisher_oracle(k1, n1, k2, n2), abs=1e-6)


class TestTwoProportionZ:
    def test_identical_counts_give_p_one(self):
        z, p = two_proportion_z_pvalue(7, 10, 7, 10)
        assert z == 0.0
        assert p == 1.0

    def test_extreme_difference(self):
        _, p = two_proportion_z_pvalue(70, 100, 20, 100)
        assert p < 1e-6
        assert p == pytest.approx(two_proportion_z_oracle(70, 100, 20, 100), rel=1e-6)

    def test_matches_oracle_randomly(self):
        rng = random.Random(21)
        for _ in range(200):
            n1, n2 = rng.randint(1, 400), rng.randint(1, 400)
            k1, k2 = rng.randint(0, n1), rng.randint(0, n2)
            _, p = two_proportion_z_pvalue(k1, n1, k2, n2)
            assert p == pytest.approx(two_proportion_z_oracle(k1, n1, k2, n2), rel=1e-9, abs=1e-300)


class TestSummarize:
    def test_unexpected_consensus_seven_of_ten(self):
        labels = ["not_damaging"] * 7 + ["damaging"] * 3
        summary = summarize(FocusBucket.UNEXPECTED_CONSENSUS, [ann(l, i) for i, l in enumerate(labels)], FilterSpec())
        assert summary.n_labeled == 10
        assert summary.n_model_error == 7
        assert summary.error_kind == "FalsePositive"
        assert summary.rate == pytest.approx(0.7)

    def test_all_skips_rate_undefined(self):
        summary = summarize(FocusBucket.EXPECTED_REVERT, [ann("skip", i) for i in range(5)], FilterSpec())
        assert summary.n_labeled == 0
        assert summary.n_skipped == 5
        assert not summary.rate_defined
        assert summary.rate is None and summary.ci_low is None

    def test_unexpected_revert_wilson_ci(self):
        summary = summarize(FocusBucket.UNEXPECTED_REVERT, [ann("damaging", 1), ann("not_damaging", 2)], FilterSpec())
        assert summary.error_kind == "FalseNegative"
        assert summary.rate == pytest.approx(0.5)
        assert summary.ci_low == pytest.approx(0.0945, abs=1e-3)
        assert summary.ci_high == pytest.approx(0.9055, abs=1e-3)

    @pytest.mark.parametrize(
        "bucket,error_label",
        [
            (FocusBucket.UNEXPECTED_CONSENSUS, "not_damaging"),
            (FocusBucket.EXPECTED_REVERT, "not_damaging"),
            (FocusBucket.UNEXPECTED_REVERT, "damaging"),
            (FocusBucket.EXPECTED_CONSENSUS, "damaging"),
        ],
    )
    def test_error_label_per_bucket(self, bucket, error_label):
        other = "damaging" if error_label == "not_damaging" else "not_damaging"
        anns = [ann(error_label, 1, bucket), ann(other, 2, bucket), ann("skip", 3, bucket)]
        summary = summarize(bucket, anns, FilterSpec())
        assert summary.n_labeled == 2
        assert summary.n_model_error == 1
        assert summary.n_skipped == 1

    @given(st.integers(0, 60), st.integers(0, 60), st.integers(0, 20))
    @settings(max_examples=60)
    def test_rate_is_exact_ratio(self, errors, fine, skips):
        error_label = "not_damaging"
        anns = (
            [ann(error_label, i) for i in range(errors)]
            + [ann("damaging", 100 + i) for i in range(fine)]
            + [ann("skip", 1000 + i) for i in range(skips)]
        )
        summary = summarize(FocusBucket.UNEXPECTED_CONSENSUS, anns, FilterSpec())
        assert summary.n_skipped == skips
        if errors + fine == 0:
            assert not summary.rate_defined
        else:
            assert summary.rate == errors / (errors + fine)
            assert round(summary.rate * summary.n_labeled) == summary.n_model_error


class TestCompare:
    def _summary(self, k, n, bucket=FocusBucket.UNEXPECTED_CONSENSUS):
        error_label = "not_damaging" if bucket in (FocusBucket.UNEXPECTED_CONSENSUS, FocusBucket.EXPECTED_REVERT) else "damaging"
        other = "damaging" if error_label == "not_damaging" else "not_damaging"
        anns = [ann(error_label, i, bucket) for i in range(k)] + [ann(other, 100 + i, bucket) for i in range(n - k)]
        return summarize(bucket, anns, FilterSpec())

    def test_identical_groups(self):
        a = self._summary(7, 14)
        result = compare(a, a)
        assert result.rate_diff == 0.0
        assert result.p_value == 1.0
        assert result.method == "two_proportion_z"

    def test_fisher_selected_on_small_cells(self):
        result = compare(self._summary(7, 10), self._summary(2, 10))
        assert result.method == "fisher_exact"
        assert result.p_value == pytest.approx(fisher_oracle(7, 10, 2, 10), abs=1e-6)

    def test_z_selected_on_large_cells(self):
        result = compare(self._summary(70, 100), self._summary(20, 100))
        assert result.method == "two_proportion_z"
        assert result.p_value < 1e-6
        assert result.rate_diff == pytest.approx(0.5)
        # Unpooled normal diff CI.
        se = math.sqrt(0.7 * 0.3 / 100 + 0.2 * 0.8 / 100)
        assert result.diff_ci_low == pytest.approx(0.5 - 1.959963985 * se, abs=1e-9)
        assert result.diff_ci_high == pytest.approx(0.5 + 1.959963985 * se, abs=1e-9)

    def test_mismatched_error_kinds_rejected(self):
        a = self._summary(3, 10, FocusBucket.UNEXPECTED_CONSENSUS)
        b = self._summary(3, 10, FocusBucket.UNEXPECTED_REVERT)
        with pytest.raises(ValueError):
            compare(a, b)

    def test_empty_group_rejected(self):
        a = self._summary(3, 10)
        empty = summarize(FocusBucket.UNEXPECTED_CONSENSUS, [], FilterSpec())
        with pytest.raises(ValueError):
            compare(a, empty)
