"""Input checks shared by the estimators."""
from __future__ import annotations

from typing import Iterable

from .corpus import PageItem, Source
from .idspec import ValidatedId, detect
from .rows import CandidateRow


def check_pages(X) -> list[PageItem]:
    """Accept PageItems, (url, body) pairs or bare bodies and return PageItems."""
    if isinstance(X, (str, bytes)):
        raise TypeError("expected an iterable of pages, got a single str/bytes")
    out = []
    for k, item in enumerate(X):
        if isinstance(item, PageItem):
            out.append(item)
        elif isinstance(item, tuple) and len(item) == 2:
            url, body = item
            if not isinstance(url, str) or not url:
                raise ValueError(f"page {k}: url must be a non-empty string")
            out.append(PageItem(url, _as_bytes(body, k), Source.FILE))
        elif isinstance(item, (str, bytes)):
            out.append(PageItem(f"page:{k}", _as_bytes(item, k), Source.FILE))
        else:
            raise TypeError(f"page {k}: unsupported type {type(item).__name__}")
    return out


def _as_bytes(body, k: int) -> bytes:
    if isinstance(body, bytes):
        return body
    if isinstance(body, str):
        return body.encode("utf-8")
    raise TypeError(f"page {k}: body must be str or bytes")


def check_rows(X: Iterable) -> list[CandidateRow]:
    if isinstance(X, (str, bytes)):
        raise TypeError("expected an iterable of CandidateRow")
    rows = list(X)
    for k, r in enumerate(rows):
        if not isinstance(r, CandidateRow):
            raise TypeError(f"row {k}: expected CandidateRow, got {type(r).__name__}")
    return rows


def check_ids(X: Iterable) -> list[ValidatedId]:
    out = []
    for k, x in enumerate(X):
        if isinstance(x, ValidatedId):
            out.append(x)
            continue
        vid = detect(x) if isinstance(x, str) else None
        if vid is None:
            raise ValueError(f"item {k}: not a valid id: {x!r}")
        out.append(vid)
    return out


def check_outlier_params(i, p) -> None:
    if not isinstance(i, int) or isinstance(i, bool) or i < 0:
        raise ValueError(f"i must be a non-negative integer, got {i!r}")
    if not 0.0 < float(p) < 1.0:
        raise ValueError(f"p must lie in (0, 1), got {p!r}")
