"""Analytics over resolved entity tables.

Every report depends only on the set of entity rows, never on their order:
counts are over distinct ids and ties rank by key.
"""
from __future__ import annotations

import bisect
import math
import re
from collections import Counter, defaultdict
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional
from urllib.parse import urlsplit

from .idspec import IdType, gtin_company_prefix, gtin_country_prefix
from .rows import EntityRow

UNASSIGNED = "unassigned"


@dataclass(frozen=True)
class DomainCount:
    domain: str
    entity_count: int


@dataclass(frozen=True)
class CountryCount:
    prefix: str
    label: str
    count: int


def rank(counter: "Counter | dict", k: Optional[int] = None) -> list[tuple[str, int]]:
    """Descending by count, ties by key."""
    items = sorted(counter.items(), key=lambda kv: (-kv[1], kv[0]))
    return items if k is None else items[:k]


def _distinct(r3: Iterable[EntityRow]) -> dict:
    by_id: dict = {}
    for e in r3:
        prev = by_id.get(e.id)
        by_id[e.id] = e if prev is None else EntityRow(e.id, min(prev.name_raw, e.name_raw), prev.urls | e.urls)
    return by_id


def host_of(url: str) -> str:
    try:
        return (urlsplit(url).hostname or "").lower()
    except ValueError:
        return ""


def top_sources(r3: Iterable[EntityRow], k: Optional[int] = None) -> list[DomainCount]:
    """Hosts ranked by the number of distinct ids seen on them."""
    counts: Counter = Counter()
    for e in _distinct(r3).values():
        for host in {host_of(u) for u in e.urls}:
            if host:
                counts[host] += 1
    return [DomainCount(d, n) for d, n in rank(counts, k)]


def top_email_domains(r3: Iterable[EntityRow], k: Optional[int] = None) -> list[DomainCount]:
    """Email providers ranked by the number of distinct addresses."""
    counts: Counter = Counter()
    for vid in _distinct(r3):
        if vid.id_type is IdType.EMAIL:
            counts[vid.canonical.rpartition("@")[2]] += 1
    return [DomainCount(d, n) for d, n in rank(counts, k)]


def person_order(name: str) -> str:
    """'Last, First Middle' becomes 'First Middle Last'; whitespace collapsed."""
    last, sep, first = name.partition(",")
    if sep and first.strip() and last.strip() and "," not in first:
        name = f"{first} {last}"
    return " ".join(name.split())


@dataclass(frozen=True)
class PersonNames:
    given: list
    family: list
    full: list


def common_person_names(r3: Iterable[EntityRow], k: Optional[int] = None) -> PersonNames:
    given: Counter = Counter()
    family: Counter = Counter()
    full: Counter = Counter()
    for vid, e in _distinct(r3).items():
        if vid.id_type is not IdType.EMAIL:
            continue
        name = person_order(e.name_raw)
        tokens = name.split()
        if not tokens:
            continue
        given[tokens[0]] += 1
        if len(tokens) > 1:
            family[tokens[-1]] += 1
        full[name] += 1
    return PersonNames(rank(given, k), rank(family, k), rank(full, k))


# --- GTIN prefixes --------------------------------------------------------


class PrefixTable:
    """Inclusive three-digit prefix ranges mapped to labels."""

    def __init__(self, ranges: Iterable[tuple[int, int, str]]):
        self.ranges = sorted(ranges)
        for (a1, b1, _), (a2, _, _) in zip(self.ranges, self.ranges[1:]):
            if a2 <= b1:
                raise ValueError(f"overlapping prefix ranges at {a2:03d}")
        self._starts = [r[0] for r in self.ranges]

    def label(self, prefix: str) -> str:
        n = int(prefix)
        i = bisect.bisect_right(self._starts, n) - 1
        if i >= 0 and self.ranges[i][0] <= n <= self.ranges[i][1]:
            return self.ranges[i][2]
        return UNASSIGNED

    @classmethod
    def parse(cls, text: str) -> "PrefixTable":
        ranges = []
        for line in text.splitlines():
            if not line.strip() or line.startswith("#"):
                continue
            start, end, label = line.split("\t", 2)
            ranges.append((int(start), int(end), label.strip()))
        return cls(ranges)

    @classmethod
    def from_file(cls, path: "str | Path") -> "PrefixTable":
        return cls.parse(Path(path).read_text("utf-8"))


@lru_cache(maxsize=1)
def default_prefix_table() -> PrefixTable:
    return PrefixTable.parse((resources.files("ibex") / "data" / "gs1_prefixes.tsv").read_text("utf-8"))


def load_prefix_table(path: "str | Path | None" = None) -> PrefixTable:
    return default_prefix_table() if path is None else PrefixTable.from_file(path)


def _gtins(r3: Iterable[EntityRow]) -> dict:
    return {vid: e for vid, e in _distinct(r3).items() if vid.id_type is IdType.GTIN}


def products_by_country(r3: Iterable[EntityRow], table: Optional[PrefixTable] = None) -> list[CountryCount]:
    """Distinct GTINs per EAN-13 country prefix; GTIN-8 ids have no prefix and are left out."""
    table = table or default_prefix_table()
    counts: Counter = Counter()
    for vid in _gtins(r3):
        try:
            counts[gtin_country_prefix(vid)] += 1
        except ValueError:
            continue
    return [CountryCount(p, table.label(p), n) for p, n in rank(counts)]


def countries(by_prefix: Iterable[CountryCount]) -> list[tuple[str, int]]:
    """Prefix counts summed per label."""
    totals: Counter = Counter()
    for c in by_prefix:
        totals[c.label] += c.count
    return rank(totals)


_WORD = re.compile(r"[^\W_]+")


def name_tokens(name: str) -> set[str]:
    return {t.upper() for t in _WORD.findall(name) if any(c.isalpha() for c in t)}


def company_labels(r3: Iterable[EntityRow], prefix_len: int = 7) -> dict[str, str]:
    """Most distinctive name token of every company prefix group.

    weight = products in the group whose name holds the token
             x log(groups / groups holding the token)
    """
    if not 4 <= prefix_len <= 7:
        raise ValueError("prefix_len must be in 4..7")
    groups: dict[str, list[set]] = defaultdict(list)
    for vid, e in _gtins(r3).items():
        try:
            groups[gtin_company_prefix(vid, prefix_len)].append(name_tokens(e.name_raw))
        except ValueError:
            continue
    n_groups = len(groups)
    spread: Counter = Counter()
    for products in groups.values():
        spread.update(set().union(*products))
    labels = {}
    for prefix, products in groups.items():
        if len(products) < 2:
            continue
        freq: Counter = Counter()
        for toks in products:
            freq.update(toks)
        best = None
        for tok, f in freq.items():
            if spread[tok] * 2 > n_groups:
                continue
            w = f * math.log(n_groups / spread[tok])
            if w > 0 and (best is None or (-w, tok) < (-best[0], best[1])):
                best = (w, tok)
        if best is not None:
            labels[prefix] = best[1]
    return dict(sorted(labels.items()))
