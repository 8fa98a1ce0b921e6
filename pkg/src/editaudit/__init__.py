"""editaudit: audit edit-quality model predictions against community behavior.

Builds a joined edit/prediction/revert dataset, surfaces the edits where the
model and the community disagree, collects human judgments on them, and
turns those judgments into misclassification-prevalence estimates per
population slice.
"""

from .backend import backend_name
from .buckets import FocusBucket, classify_focus
from .filters import DEFAULT_FILTER, EXPERIENCED_FILTER, NEWCOMER_FILTER, FilterSpec, matches
from .records import EditRecord, Prediction, RawEdit, RevertStatus

__version__ = "0.1.0"

__all__ = [
    "backend_name",
    "FocusBucket",
    "classify_focus",
    "FilterSpec",
    "matches",
    "DEFAULT_FILTER",
    "NEWCOMER_FILTER",
    "EXPERIENCED_FILTER",
    "EditRecord",
    "Prediction",
    "RawEdit",
    "RevertStatus",
    "__version__",
]
