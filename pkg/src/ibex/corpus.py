"""Corpus ingestion: WARC archives and directories of HTML files.

The WARC reader handles WARC/1.0 and 1.1 framing, whole-file and
per-record gzip, and recovers from corrupt records by resynchronising on the
next ``WARC/`` version line.  Every skipped or altered page is counted.
"""
from __future__ import annotations

import codecs
import gzip
import re
import zlib
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import BinaryIO, Iterable, Iterator, Optional

DEFAULT_PAGE_CAP = 4 * 1024 * 1024
GZIP_MAGIC = b"\x1f\x8b"

_CHARSET_HEADER = re.compile(rb"charset\s*=\s*[\"']?([A-Za-z0-9._:-]+)", re.I)
_META_CHARSET = re.compile(rb"<meta[^>]+charset\s*=\s*[\"']?([A-Za-z0-9._:-]+)", re.I)


class Source(str, Enum):
    WARC = "warc"
    FILE = "file"


@dataclass(frozen=True)
class PageItem:
    url: str
    body: bytes
    source: Source


@dataclass
class CorpusStats:
    pages: int = 0
    skipped: int = 0
    truncated: int = 0
    non_response: int = 0
    non_200: int = 0

    def merge(self, other: "CorpusStats") -> None:
        for k in vars(self):
            setattr(self, k, getattr(self, k) + getattr(other, k))


# --- WARC -----------------------------------------------------------------


class _Corrupt(Exception):
    pass


def _open_stream(path: "str | Path") -> BinaryIO:
    f = open(path, "rb")
    head = f.peek(2)[:2] if hasattr(f, "peek") else b""
    if head == GZIP_MAGIC:
        # gzip.GzipFile reads concatenated members as one stream
        return gzip.GzipFile(fileobj=f)  # type: ignore[return-value]
    return f


def _read_headers(stream: BinaryIO) -> Optional[tuple[str, dict]]:
    """Version line and headers of the next record; None at end of input."""
    line = stream.readline()
    while line in (b"\r\n", b"\n"):
        line = stream.readline()
    if not line:
        return None
    if not line.startswith(b"WARC/1."):
        raise _Corrupt("missing version line")
    version = line.strip().decode("ascii", "replace")
    headers: dict[str, str] = {}
    while True:
        line = stream.readline()
        if not line:
            raise _Corrupt("truncated headers")
        if line in (b"\r\n", b"\n"):
            return version, headers
        if line.startswith(b"WARC/1."):
            # a new record started before this one's headers ended
            stream.push(line)
            raise _Corrupt("unterminated headers")
        name, sep, value = line.decode("utf-8", "replace").partition(":")
        if not sep:
            raise _Corrupt("bad header line")
        headers[name.strip().lower()] = value.strip()


def _resync(stream: BinaryIO) -> Optional[bytes]:
    """Skip to the next line starting a record; returns it or None at EOF."""
    while True:
        line = stream.readline()
        if not line:
            return None
        if line.startswith(b"WARC/1."):
            return line


class _Pushback:
    """Stream wrapper that can return one line to the front."""

    def __init__(self, stream: BinaryIO):
        self.stream = stream
        self.pending = b""

    def push(self, line: bytes) -> None:
        self.pending = line + self.pending

    def readline(self, size: int = -1) -> bytes:
        if self.pending:
            nl = self.pending.find(b"\n")
            if nl >= 0:
                line, self.pending = self.pending[:nl + 1], self.pending[nl + 1:]
                return line
            line, self.pending = self.pending, b""
            return line + self.stream.readline()
        return self.stream.readline()

    def read(self, size: int = -1) -> bytes:
        head, self.pending = self.pending, b""
        if size < 0:
            return head + self.stream.read()
        if len(head) >= size:
            self.pending = head[size:]
            return head[:size]
        return head + self.stream.read(size - len(head))


def _dechunk(body: bytes) -> bytes:
    out = bytearray()
    pos = 0
    while True:
        nl = body.find(b"\r\n", pos)
        if nl < 0:
            break
        try:
            size = int(body[pos:nl].split(b";")[0].strip() or b"0", 16)
        except ValueError:
            break
        if size == 0:
            break
        out += body[nl + 2:nl + 2 + size]
        pos = nl + 2 + size + 2
    return bytes(out)


def split_http(block: bytes) -> Optional[tuple[int, dict, bytes]]:
    """Status, headers and body of an HTTP response block."""
    end = block.find(b"\r\n\r\n")
    sep = 4
    if end < 0:
        end = block.find(b"\n\n")
        sep = 2
    if end < 0:
        return None
    lines = block[:end].split(b"\n")
    status = lines[0].split()
    if len(status) < 2 or not status[0].startswith(b"HTTP/"):
        return None
    try:
        code = int(status[1])
    except ValueError:
        return None
    headers = {}
    for raw in lines[1:]:
        name, _, value = raw.decode("latin-1").partition(":")
        headers[name.strip().lower()] = value.strip()
    body = block[end + sep:]
    if "chunked" in headers.get("transfer-encoding", "").lower():
        body = _dechunk(body)
    return code, headers, body


def sniff_charset(content_type: str, body: bytes) -> Optional[str]:
    m = _CHARSET_HEADER.search(content_type.encode("latin-1", "replace"))
    if m is None:
        m = _META_CHARSET.search(body[:4096])
    if m is None:
        return None
    try:
        return codecs.lookup(m.group(1).decode("ascii")).name
    except LookupError:
        return None


def to_utf8(body: bytes, charset: Optional[str]) -> bytes:
    if charset is None or charset == "utf-8":
        return body
    return body.decode(charset, "replace").encode("utf-8")


def _cap(body: bytes, cap: int, stats: CorpusStats) -> bytes:
    if len(body) > cap:
        stats.truncated += 1
        return body[:cap]
    return body


def iter_warc(path: "str | Path", stats: Optional[CorpusStats] = None,
              page_cap: int = DEFAULT_PAGE_CAP) -> Iterator[PageItem]:
    """HTTP 200 response records of a WARC file, in archive order."""
    stats = stats if stats is not None else CorpusStats()
    raw = _open_stream(path)
    stream = _Pushback(raw)
    try:
        while True:
            try:
                rec = _read_headers(stream)
                if rec is None:
                    return
                _, headers = rec
                length = int(headers.get("content-length", ""))
                if length < 0:
                    raise _Corrupt("negative length")
                block = stream.read(length)
                if len(block) < length:
                    raise _Corrupt("truncated block")
            except (_Corrupt, ValueError, EOFError, OSError, zlib.error):
                stats.skipped += 1
                try:
                    line = _resync(stream)
                except (EOFError, OSError, zlib.error):
                    return
                if line is None:
                    return
                stream.push(line)
                continue
            if headers.get("warc-type", "").lower() != "response":
                stats.non_response += 1
                continue
            url = headers.get("warc-target-uri", "").strip("<>")
            http = split_http(block)
            if http is None or not url:
                stats.skipped += 1
                continue
            code, hdrs, body = http
            if code != 200:
                stats.non_200 += 1
                continue
            body = to_utf8(body, sniff_charset(hdrs.get("content-type", ""), body))
            stats.pages += 1
            yield PageItem(url, _cap(body, page_cap, stats), Source.WARC)
    finally:
        raw.close()


def warc_record(headers: dict, block: bytes, version: str = "WARC/1.0") -> bytes:
    lines = [version]
    for k, v in headers.items():
        lines.append(f"{k}: {v}")
    lines.append(f"Content-Length: {len(block)}")
    return ("\r\n".join(lines) + "\r\n\r\n").encode("utf-8") + block + b"\r\n\r\n"


def response_record(url: str, html: bytes, status: int = 200, content_type: str = "text/html; charset=utf-8",
                    version: str = "WARC/1.0") -> bytes:
    http = (f"HTTP/1.1 {status} OK\r\nContent-Type: {content_type}\r\n"
            f"Content-Length: {len(html)}\r\n\r\n").encode("latin-1") + html
    return warc_record({"WARC-Type": "response", "WARC-Target-URI": url,
                        "Content-Type": "application/http; msgtype=response"}, http, version)


def write_warc(path: "str | Path", records: Iterable[bytes], compress: str = "none", level: int = 6) -> None:
    """Write raw records; ``compress`` is none, file (one member) or record (one member each)."""
    if compress not in ("none", "file", "record"):
        raise ValueError(f"unknown compression mode {compress!r}")
    with open(path, "wb") as f:
        if compress == "none":
            for r in records:
                f.write(r)
        elif compress == "file":
            f.write(gzip.compress(b"".join(records), level, mtime=0))
        else:
            for r in records:
                f.write(gzip.compress(r, level, mtime=0))


# --- Directories ----------------------------------------------------------


def read_manifest(path: "str | Path") -> dict[str, str]:
    out = {}
    for line in Path(path).read_text("utf-8").splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        rel, sep, url = line.partition("\t")
        if sep and url.strip():
            out[rel.strip()] = url.strip()
    return out


def iter_dir(path: "str | Path", manifest: "str | Path | dict | None" = None,
             stats: Optional[CorpusStats] = None,
             page_cap: int = DEFAULT_PAGE_CAP) -> Iterator[PageItem]:
    """Every .html/.htm file below ``path`` in lexicographic relative-path order."""
    root = Path(path)
    if not root.is_dir():
        raise NotADirectoryError(str(root))
    stats = stats if stats is not None else CorpusStats()
    mapping = manifest if isinstance(manifest, dict) else read_manifest(manifest) if manifest else {}
    files = [p for p in root.rglob("*") if p.is_file() and p.suffix.lower() in (".html", ".htm")]
    for p in sorted(files, key=lambda p: p.relative_to(root).as_posix()):
        rel = p.relative_to(root).as_posix()
        try:
            body = p.read_bytes()
        except OSError:
            stats.skipped += 1
            continue
        stats.pages += 1
        url = mapping.get(rel) or p.resolve().as_uri()
        yield PageItem(url, _cap(body, page_cap, stats), Source.FILE)


def is_warc(path: "str | Path") -> bool:
    name = Path(path).name.lower()
    return name.endswith((".warc", ".warc.gz", ".arc.gz"))


def iter_inputs(paths: Iterable["str | Path"], stats: Optional[CorpusStats] = None,
                manifest: "str | Path | None" = None,
                page_cap: int = DEFAULT_PAGE_CAP) -> Iterator[PageItem]:
    """Dispatch each input to the directory, WARC or single-file reader."""
    stats = stats if stats is not None else CorpusStats()
    for path in paths:
        p = Path(path)
        if p.is_dir():
            yield from iter_dir(p, manifest, stats, page_cap)
        elif is_warc(p):
            yield from iter_warc(p, stats, page_cap)
        else:
            body = p.read_bytes()
            stats.pages += 1
            yield PageItem(p.resolve().as_uri(), _cap(body, page_cap, stats), Source.FILE)
