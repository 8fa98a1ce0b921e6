"""Focus buckets: the prediction-vs-community-outcome quadrants.

Crossing the thresholded model prediction with the observed revert outcome
gives four quadrants. The two "unexpected" quadrants are where the model and
the community disagree, and are where auditing attention pays off.
"""

from __future__ import annotations

from enum import Enum


class FocusBucket(str, Enum):
    UNEXPECTED_REVERT = "UnexpectedRevert"
    UNEXPECTED_CONSENSUS = "UnexpectedConsensus"
    EXPECTED_REVERT = "ExpectedRevert"
    EXPECTED_CONSENSUS = "ExpectedConsensus"

    @classmethod
    def parse(cls, name: str) -> "FocusBucket":
        try:
            return cls(name)
        except ValueError:
            raise ValueError(f"unknown focus bucket: {name!r}") from None


# Stable integer codes shared with the columnar kernels.
BUCKET_CODES = {
    FocusBucket.UNEXPECTED_REVERT: 0,
    FocusBucket.UNEXPECTED_CONSENSUS: 1,
    FocusBucket.EXPECTED_REVERT: 2,
    FocusBucket.EXPECTED_CONSENSUS: 3,
}
BUCKETS_BY_CODE = {code: bucket for bucket, code in BUCKET_CODES.items()}

# Auditor label that counts as a model error, per bucket. In the consensus
# buckets the model's "damaging" call stood unchallenged, so a not-damaging
# label exposes a false positive; in the revert buckets the roles flip.
ERROR_LABEL = {
    FocusBucket.UNEXPECTED_CONSENSUS: "not_damaging",
    FocusBucket.EXPECTED_REVERT: "not_damaging",
    FocusBucket.UNEXPECTED_REVERT: "damaging",
    FocusBucket.EXPECTED_CONSENSUS: "damaging",
}

ERROR_KIND = {
    FocusBucket.UNEXPECTED_CONSENSUS: "FalsePositive",
    FocusBucket.EXPECTED_REVERT: "FalsePositive",
    FocusBucket.UNEXPECTED_REVERT: "FalseNegative",
    FocusBucket.EXPECTED_CONSENSUS: "FalseNegative",
}


def classify_focus(damaging_prob: float, reverted: bool, threshold: float) -> FocusBucket:
    """Map one (score, outcome) pair to its quadrant.

    A score exactly at the threshold counts as predicted-damaging.
    """
    if not 0.0 <= damaging_prob <= 1.0:
        raise ValueError(f"damaging_prob out of [0,1]: {damaging_prob}")
    if not 0.0 < threshold < 1.0:
        raise ValueError(f"threshold out of (0,1): {threshold}")
    predicted_damaging = damaging_prob >= threshold
    if predicted_damaging:
        return FocusBucket.EXPECTED_REVERT if reverted else FocusBucket.UNEXPECTED_CONSENSUS
    return FocusBucket.UNEXPECTED_REVERT if reverted else FocusBucket.EXPECTED_CONSENSUS
