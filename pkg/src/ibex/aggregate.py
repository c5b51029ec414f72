"""Phases 2 and 3: corpus-wide frequency filtering and name resolution.

Both phases are group-by aggregations and give the same result for any
ordering of their input rows.  Ties are broken lexicographically, never by
arrival order.
"""
from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .idspec import ValidatedId, config_for
from .rows import CandidateRow, EntityRow


@dataclass(frozen=True)
class OutlierParams:
    i: int = 3
    p: float = 0.30

    def __post_init__(self):
        if self.i < 0:
            raise ValueError(f"i must be non-negative, got {self.i}")
        if not 0.0 < self.p < 1.0:
            raise ValueError(f"p must be in (0, 1), got {self.p}")


@dataclass
class FreqDistribution:
    name_norm: str
    counts: Counter = field(default_factory=Counter)

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def ranked(self) -> list[tuple[ValidatedId, int]]:
        """Ids by decreasing count, ties by id."""
        return sorted(self.counts.items(), key=lambda kv: (-kv[1], kv[0].canonical))


def _dedupe(rows: Iterable[CandidateRow]) -> list[CandidateRow]:
    seen = set()
    out = []
    for r in rows:
        key = (r.id, r.name_norm, r.url)
        if key not in seen:
            seen.add(key)
            out.append(r)
    return out


def build_distributions(rows: Iterable[CandidateRow], dedupe: bool = False) -> dict[str, FreqDistribution]:
    """Count, for every normalized name, how often it occurs with each id."""
    if dedupe:
        rows = _dedupe(rows)
    dists: dict[str, FreqDistribution] = {}
    for r in rows:
        if not r.name_norm:
            continue
        d = dists.get(r.name_norm)
        if d is None:
            d = dists[r.name_norm] = FreqDistribution(r.name_norm)
        d.counts[r.id] += 1
    return dists


def detect_outlier(d: FreqDistribution, params: OutlierParams = OutlierParams()) -> Optional[ValidatedId]:
    ranked = d.ranked()
    if not ranked:
        return None
    top, f1 = ranked[0]
    if len(ranked) == 1:
        return top
    f2 = ranked[1][1]
    if f1 > params.p * d.total and f1 > params.i * f2:
        return top
    return None


def find_outliers(rows: Iterable[CandidateRow], params: OutlierParams = OutlierParams(),
                  dedupe: bool = False) -> dict[str, ValidatedId]:
    out = {}
    for name, d in build_distributions(rows, dedupe).items():
        top = detect_outlier(d, params)
        if top is not None:
            out[name] = top
    return out


def _skips_phase2(row: CandidateRow) -> bool:
    return config_for(row.id.id_type).skip_phase2


def apply_outliers(rows: Iterable[CandidateRow], outliers: dict[str, ValidatedId]) -> list[CandidateRow]:
    return [r for r in rows if _skips_phase2(r) or outliers.get(r.name_norm) == r.id]


def phase2_filter(rows: Iterable[CandidateRow], params: OutlierParams = OutlierParams(),
                  dedupe: bool = False) -> list[CandidateRow]:
    """Keep the rows whose name has a clear outlier id, and only for that id."""
    rows = list(rows)
    outliers = find_outliers((r for r in rows if not _skips_phase2(r)), params, dedupe)
    return apply_outliers(rows, outliers)


def resolve_entity(vid: ValidatedId, rows: list[CandidateRow]) -> EntityRow:
    freq = Counter(r.name_norm for r in rows)
    best_score: dict[str, float] = {}
    for r in rows:
        if r.name_norm not in best_score or r.score > best_score[r.name_norm]:
            best_score[r.name_norm] = r.score
    name = min(freq, key=lambda n: (-freq[n], -best_score[n], n))
    raw = min(r.name_raw for r in rows if r.name_norm == name and r.score == best_score[name])
    return EntityRow(vid, raw, frozenset(r.url for r in rows))


def group_by_id(rows: Iterable[CandidateRow]) -> dict[ValidatedId, list[CandidateRow]]:
    groups: dict[ValidatedId, list[CandidateRow]] = defaultdict(list)
    for r in rows:
        if r.name_norm:
            groups[r.id].append(r)
    return groups


def phase3_resolve(rows: Iterable[CandidateRow]) -> list[EntityRow]:
    """One entity per id: most frequent name, then best score, then lexicographic."""
    groups = group_by_id(rows)
    return [resolve_entity(vid, groups[vid]) for vid in sorted(groups, key=lambda v: v.canonical)]
