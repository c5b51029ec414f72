"""On-disk phase tables.

R1 and R2 share one schema; R3 has one row per id.  Every file starts with a
single ``#`` header line and is UTF-8 with no tabs inside fields.
"""
from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, TextIO

from .idspec import IdType, ValidatedId, config_for, detect, get_spec, normalize_name
from .rows import CandidateRow, EntityRow, RecordKind

R1_HEADER = "#id\tname_raw\tname_norm\tscore\trecord_kind\turl"
R3_HEADER = "#id\tname\turls"
GOLD_HEADER = "#id\tname"
RANKED_HEADER = "#rank\tkey\tcount"


@dataclass
class ReadStats:
    rows: int = 0
    malformed: int = 0


def clean(field: str) -> str:
    return field.replace("\t", " ").replace("\r", " ").replace("\n", " ")


def format_score(score: float) -> str:
    return "%g" % score


def _parse_id(text: str, id_type: Optional[IdType]) -> Optional[ValidatedId]:
    if id_type is not None:
        return get_spec(id_type).validate(text)
    return detect(text)


def write_rows(out: TextIO, rows: Iterable[CandidateRow]) -> int:
    out.write(R1_HEADER + "\n")
    n = 0
    for r in rows:
        out.write("\t".join((r.id.canonical, clean(r.name_raw), clean(r.name_norm),
                             format_score(r.score), r.record_kind.value, clean(r.url))) + "\n")
        n += 1
    return n


def read_rows(lines: Iterable[str], id_type: "IdType | str | None" = None,
              stats: Optional[ReadStats] = None) -> Iterator[CandidateRow]:
    t = IdType.parse(id_type) if id_type is not None else None
    stats = stats if stats is not None else ReadStats()
    for line in lines:
        line = line.rstrip("\n").rstrip("\r")
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        try:
            if len(parts) != 6:
                raise ValueError("field count")
            vid = _parse_id(parts[0], t)
            if vid is None:
                raise ValueError("bad id")
            score = float(parts[3])
            kind = RecordKind(parts[4])
            # normalization is recomputed so the stored column cannot drift
            norm = normalize_name(parts[1], config_for(vid.id_type))
            if not norm or not parts[5]:
                raise ValueError("empty field")
        except ValueError:
            stats.malformed += 1
            continue
        stats.rows += 1
        yield CandidateRow(vid, norm, parts[1], score, kind, parts[5])


def encode_url(url: str) -> str:
    return clean(url).replace(";", "%3B")


def write_entities(out: TextIO, entities: Iterable[EntityRow]) -> int:
    out.write(R3_HEADER + "\n")
    n = 0
    for e in sorted(entities, key=lambda e: e.id.canonical):
        out.write("\t".join((e.id.canonical, clean(e.name_raw),
                             ";".join(sorted(encode_url(u) for u in e.urls)))) + "\n")
        n += 1
    return n


def read_entities(lines: Iterable[str], id_type: "IdType | str | None" = None,
                  stats: Optional[ReadStats] = None) -> Iterator[EntityRow]:
    t = IdType.parse(id_type) if id_type is not None else None
    stats = stats if stats is not None else ReadStats()
    for line in lines:
        line = line.rstrip("\n").rstrip("\r")
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        vid = _parse_id(parts[0], t) if len(parts) == 3 else None
        if vid is None or not parts[1]:
            stats.malformed += 1
            continue
        stats.rows += 1
        urls = frozenset(u.replace("%3B", ";") for u in parts[2].split(";") if u)
        yield EntityRow(vid, parts[1], urls)


def read_gold(lines: Iterable[str], id_type: "IdType | str | None" = None,
              stats: Optional[ReadStats] = None) -> dict[ValidatedId, str]:
    """Gold standard: ``id TAB name`` per line."""
    t = IdType.parse(id_type) if id_type is not None else None
    stats = stats if stats is not None else ReadStats()
    gold = {}
    for line in lines:
        line = line.rstrip("\n").rstrip("\r")
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        vid = _parse_id(parts[0], t) if len(parts) >= 2 else None
        if vid is None:
            stats.malformed += 1
            continue
        stats.rows += 1
        gold[vid] = parts[1]
    return gold


def write_gold(out: TextIO, gold: dict) -> None:
    out.write(GOLD_HEADER + "\n")
    for vid in sorted(gold, key=lambda v: v.canonical):
        out.write(f"{vid.canonical}\t{clean(gold[vid])}\n")


def write_ranked(out: TextIO, ranked: Iterable[tuple[str, int]]) -> None:
    out.write(RANKED_HEADER + "\n")
    for i, (key, count) in enumerate(ranked, 1):
        out.write(f"{i}\t{clean(str(key))}\t{count}\n")


def rows_to_text(rows: Iterable[CandidateRow]) -> str:
    buf = io.StringIO()
    write_rows(buf, rows)
    return buf.getvalue()


def entities_to_text(entities: Iterable[EntityRow]) -> str:
    buf = io.StringIO()
    write_entities(buf, entities)
    return buf.getvalue()
