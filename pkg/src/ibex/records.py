"""Record extraction and Phase 1 candidate scoring.

A record is the subtree around exactly one id occurrence.  Pages with a
single id yield one detail record spanning the page; pages with several ids
yield free records, one per shallowest subframe holding exactly one id.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence, Union

from .frametree import Frame, FrameNode, Text, page_title, parse_html
from .idspec import IdType, ValidatedId, config_for, get_spec, normalize_name
from .nerfind import (
    FirstNameDictionary,
    NameCandidate,
    find_formula,
    find_names,
    load_dictionary,
)
from .rows import CandidateRow, RecordKind

HEADERS = frozenset({"h1", "h2", "h3", "h4", "h5", "h6"})
HIDING = frozenset({"small", "strike", "s", "del"})
HIGHLIGHTING = frozenset({"b", "strong", "i", "em", "u"})
FIRST_N_FRAMES = 3

NameFinder = Callable[[str, ValidatedId, FirstNameDictionary], list]


def style_of(path: Iterable[str]) -> int:
    """1 hiding, 2 plain, 3 highlighting, 4 header; header wins over all."""
    hiding = highlight = False
    for name in path:
        if name in HEADERS:
            return 4
        if name in HIDING:
            hiding = True
        elif name in HIGHLIGHTING:
            highlight = True
    if hiding:
        return 1
    return 3 if highlight else 2


class PageFrames:
    """Indexed view of a frame tree: text frames in document order, their
    styles, and the text-frame index range covered by every node."""

    def __init__(self, root: Frame):
        self.root = root
        self.texts: list[str] = []
        self.styles: list[int] = []
        self.ranges: dict[int, tuple[int, int]] = {}
        self._index(root)
        self._title: Optional[str] = None
        self._title_done = False

    def _index(self, root: Frame) -> None:
        # state: (header, hiding, highlight) inherited down the tree
        stack: list = [(root, False, (False, False, False))]
        while stack:
            node, done, state = stack.pop()
            if done:
                self.ranges[id(node)] = (self.ranges[id(node)][0], len(self.texts))
                continue
            if isinstance(node, Text):
                start = len(self.texts)
                self.texts.append(node.content)
                header, hiding, highlight = state
                self.styles.append(4 if header else 1 if hiding else 3 if highlight else 2)
                self.ranges[id(node)] = (start, start + 1)
                continue
            self.ranges[id(node)] = (len(self.texts), -1)
            name = node.tag.name if not node.tag.is_synthetic else ""
            header, hiding, highlight = state
            state = (header or name in HEADERS, hiding or name in HIDING,
                     highlight or name in HIGHLIGHTING)
            stack.append((node, True, state))
            for child in reversed(node.children):
                stack.append((child, False, state))

    @property
    def title(self) -> Optional[str]:
        if not self._title_done:
            self._title = page_title(self.root)
            self._title_done = True
        return self._title

    def range_of(self, node: FrameNode) -> tuple[int, int]:
        return self.ranges[id(node)]


@dataclass(frozen=True)
class Record:
    kind: RecordKind
    id: ValidatedId
    root: FrameNode
    id_frame_index: int
    start: int
    texts: tuple
    styles: tuple


@dataclass(frozen=True)
class ScoredCandidate:
    name: NameCandidate
    score: float
    style: int


def _as_page(tree: "Frame | PageFrames") -> PageFrames:
    return tree if isinstance(tree, PageFrames) else PageFrames(tree)


def mark_ids(tree: "Frame | PageFrames", id_type: "IdType | str") -> list[tuple[int, ValidatedId]]:
    """Text frames whose whole content is a valid id of ``id_type``."""
    page = _as_page(tree)
    validate = get_spec(id_type).validate
    hits = []
    for i, text in enumerate(page.texts):
        if len(text) <= 256:
            vid = validate(text)
            if vid is not None:
                hits.append((i, vid))
    return hits


def extract_records(tree: "Frame | PageFrames", id_type: "IdType | str",
                    marks: Optional[list] = None) -> list[Record]:
    page = _as_page(tree)
    if marks is None:
        marks = mark_ids(page, id_type)
    if not marks:
        return []
    by_index = dict(marks)
    # prefix[i] = number of id frames among text frames [0, i)
    prefix = [0] * (len(page.texts) + 1)
    for i in range(len(page.texts)):
        prefix[i + 1] = prefix[i] + (i in by_index)

    def make(kind: RecordKind, node: FrameNode) -> Record:
        start, end = page.range_of(node)
        id_index = next(i for i in range(start, end) if i in by_index)
        return Record(kind, by_index[id_index], node, id_index - start, start,
                      tuple(page.texts[start:end]), tuple(page.styles[start:end]))

    if len(marks) == 1:
        return [make(RecordKind.DETAIL, page.root)]
    records = []
    stack: list[FrameNode] = [page.root]
    while stack:
        node = stack.pop()
        start, end = page.range_of(node)
        count = prefix[end] - prefix[start]
        if count == 1:
            records.append(make(RecordKind.FREE, node))
        elif count > 1:
            stack.extend(reversed(node.children))
    return records


def record_candidates(record: Record, finder: NameFinder,
                      names: FirstNameDictionary) -> list[NameCandidate]:
    out = []
    for offset, text in enumerate(record.texts):
        if offset == record.id_frame_index:
            continue
        for raw in finder(text, record.id, names):
            raw = raw.strip()
            if raw:
                out.append(NameCandidate(raw, offset))
    return out


def score_detail(record: Record, candidates: Sequence[NameCandidate],
                 title: Optional[str] = None) -> list[ScoredCandidate]:
    """order + distance + style4 + title."""
    cfg = config_for(record.id.id_type)
    title_norm = normalize_name(title, cfg) if title else None
    kept = []
    for c in candidates:
        if c.record_offset >= record.id_frame_index:
            continue
        if record.styles[c.record_offset] != 4:
            continue
        if title_norm is not None and normalize_name(c.raw, cfg) not in title_norm:
            continue
        kept.append(c)
    kept.sort(key=lambda c: c.record_offset)
    m = len(kept)
    return [ScoredCandidate(c, float(-(m - 1 - k)), 4) for k, c in enumerate(kept)]


def score_free(record: Record, candidates: Sequence[NameCandidate]) -> list[ScoredCandidate]:
    """first3 + style."""
    out = []
    for c in candidates:
        if c.record_offset < FIRST_N_FRAMES:
            style = record.styles[c.record_offset]
            out.append(ScoredCandidate(c, float(style), style))
    return out


def score_record(record: Record, candidates: Sequence[NameCandidate],
                 title: Optional[str] = None) -> list[ScoredCandidate]:
    if record.kind is RecordKind.DETAIL:
        return score_detail(record, candidates, title)
    return score_free(record, candidates)


@dataclass
class PageResult:
    rows: dict
    records: int = 0
    ids: int = 0
    candidates: int = 0
    records_by_type: dict = field(default_factory=dict)
    ids_by_type: dict = field(default_factory=dict)


def extract_page(page: Union[bytes, str, Frame], url: str, id_types: Iterable["IdType | str"],
                 names: Optional[FirstNameDictionary] = None,
                 finder: Optional[NameFinder] = None) -> PageResult:
    """Phase 1 for one page and several id types, parsing the page once."""
    names = names or load_dictionary()
    finder = finder or find_names
    root = page if isinstance(page, Frame) else parse_html(page)
    frames = PageFrames(root)
    result = PageResult(rows={})
    for t in id_types:
        t = IdType.parse(t)
        cfg = config_for(t)
        marks = mark_ids(frames, t)
        records = extract_records(frames, t, marks)
        result.ids += len(marks)
        result.records += len(records)
        result.ids_by_type[t] = len(marks)
        result.records_by_type[t] = len(records)
        rows = []
        for rec in records:
            cands = record_candidates(rec, finder, names)
            title = frames.title if rec.kind is RecordKind.DETAIL else None
            for sc in score_record(rec, cands, title):
                norm = normalize_name(sc.name.raw, cfg)
                if norm:
                    rows.append(CandidateRow(rec.id, norm, sc.name.raw, sc.score, rec.kind, url))
        result.candidates += len(rows)
        result.rows[t] = rows
    return result


def extract_r1(page: Union[bytes, str, Frame], url: str, id_type: "IdType | str",
               names: Optional[FirstNameDictionary] = None,
               finder: Optional[NameFinder] = None) -> list[CandidateRow]:
    t = IdType.parse(id_type)
    return extract_page(page, url, [t], names, finder).rows[t]


def formula_finder(text: str, vid: ValidatedId, names: FirstNameDictionary) -> list[str]:
    """Attribute finder: chemical formulae instead of names."""
    return find_formula(text)
