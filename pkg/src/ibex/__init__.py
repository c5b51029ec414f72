"""Harvest uniquely identified entities and their names from HTML corpora."""

__version__ = "0.1.0"

from .aggregate import (  # noqa: E402
    FreqDistribution,
    OutlierParams,
    build_distributions,
    detect_outlier,
    phase2_filter,
    phase3_resolve,
)
from .evaluation import CoverageSimConfig, coverage_simulation, evaluate, wilson_interval  # noqa: E402
from .frametree import parse_html  # noqa: E402
from .idspec import IdType, ValidatedId, detect, normalize_name, validate  # noqa: E402
from .records import extract_page, extract_r1, extract_records  # noqa: E402
from .rows import CandidateRow, EntityRow, RecordKind  # noqa: E402

__all__ = [
    "CandidateRow", "CoverageSimConfig", "EntityRow", "FreqDistribution", "IdType", "OutlierParams",
    "RecordKind", "ValidatedId", "build_distributions", "coverage_simulation", "detect",
    "detect_outlier", "evaluate", "extract_page", "extract_r1", "extract_records", "normalize_name",
    "parse_html", "phase2_filter", "phase3_resolve", "validate", "wilson_interval",
]
