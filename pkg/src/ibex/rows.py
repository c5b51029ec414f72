"""Row types flowing between the phases (tables R1, R2 and R3)."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .idspec import ValidatedId


class RecordKind(str, Enum):
    DETAIL = "detail"
    FREE = "free"


@dataclass(frozen=True, order=True)
class CandidateRow:
    """One R1/R2 row: an id, one name candidate for it, its score and source page."""

    id: ValidatedId
    name_norm: str
    name_raw: str
    score: float
    record_kind: RecordKind
    url: str

    def sort_key(self) -> tuple:
        return (self.id.canonical, self.name_norm, self.name_raw, self.score,
                self.record_kind.value, self.url)


@dataclass(frozen=True)
class EntityRow:
    """One R3 row: the resolved name of an id and every page it was seen on."""

    id: ValidatedId
    name_raw: str
    urls: frozenset = field(default_factory=frozenset)
