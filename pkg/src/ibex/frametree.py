"""Lenient HTML tokenizer and frame-tree builder.

A frame tree is a DOM-like tree with extra synthetic frames: every separator
tag ``t`` (h1-h6, p, hr, br) opens a frame ``t*`` holding the separator
itself plus all following content up to the next separator of equal or
higher weight, or the end of the enclosing frame.  The builder never fails;
whatever the markup, it returns a tree whose leaves are the page's
non-whitespace text runs in document order.
"""
from __future__ import annotations

import html
import re
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Optional, Union

SEPARATORS = frozenset({"h1", "h2", "h3", "h4", "h5", "h6", "hr", "br", "p"})
WEIGHT = {"h1": 7, "h2": 6, "h3": 5, "h4": 4, "h5": 3, "h6": 2, "p": 1, "hr": 1, "br": 1}
VOID = frozenset(
    {"br", "hr", "img", "input", "meta", "link", "area", "base", "col", "embed",
     "param", "source", "track", "wbr", "keygen"}
)
RAW_TEXT = frozenset({"script", "style", "noscript", "template", "xmp"})

STRUCTURAL = frozenset({"html", "head", "body"})
HEAD_CONTENT = frozenset({"title", "meta", "link", "base", "script", "style", "noscript"})
PHRASING = frozenset(
    """a abbr acronym b bdi bdo big blink cite code data del dfn em font i img ins
    kbd label mark nobr q rp rt ruby s samp small span strike strong sub sup time
    tt u var wbr input select option optgroup button textarea output meter
    progress canvas svg math audio video picture source embed object iframe map
    area""".split()
)
HEADER_LIKE = frozenset({"h1", "h2", "h3", "h4", "h5", "h6", "p", "pre"})
TABLE_CELL_STOP = frozenset({"td", "th", "tr", "thead", "tbody", "tfoot", "caption", "colgroup"})
TABLE_ROW_STOP = frozenset({"tr", "thead", "tbody", "tfoot", "caption", "colgroup"})
TABLE_SECTION_STOP = frozenset({"thead", "tbody", "tfoot", "caption", "colgroup"})
KNOWN_BLOCK = frozenset(
    """div section article main nav aside header footer form fieldset legend
    blockquote center figure figcaption address details summary dialog menu ul
    ol li dl dt dd table caption colgroup thead tbody tfoot tr td th frameset
    frame noframes hgroup search""".split()
)
KNOWN = PHRASING | KNOWN_BLOCK | SEPARATORS | STRUCTURAL | HEAD_CONTENT | {"pre", "doc"}


@dataclass(frozen=True, slots=True)
class Tag:
    name: str
    is_closing: bool = False
    is_self_closing: bool = False
    is_separator: bool = False
    is_synthetic: bool = False

    @property
    def label(self) -> str:
        return self.name + "*" if self.is_synthetic else self.name


@dataclass(slots=True)
class Text:
    content: str


@dataclass(slots=True)
class Frame:
    tag: Tag
    children: list = field(default_factory=list)

    @property
    def label(self) -> str:
        return self.tag.label


FrameNode = Union[Frame, Text]


@lru_cache(maxsize=4096)
def make_tag(name: str, closing: bool = False, self_closing: bool = False,
             synthetic: bool = False) -> Tag:
    return Tag(name, closing, self_closing or name in VOID, name in SEPARATORS, synthetic)


# --- Tokenizer ------------------------------------------------------------

_TAG_QUOTED = re.compile(
    r"<(/?)([A-Za-z][^\s/>]*)((?:[^>\"']|\"[^\"]{0,4096}\"|'[^']{0,4096}'){0,8192})>", re.S
)
_FAST = re.compile(
    r"([^<]+)|<(/?)([A-Za-z][^\s/>]*)((?:[^>\"']|\"[^\"]{0,4096}\"|'[^']{0,4096}'){0,8192})>", re.S
)
_TAG_PLAIN = re.compile(r"<(/?)([A-Za-z][^\s/>]*)([^>]*)>", re.S)
_RAW_END = {name: re.compile(rf"</{name}\s*>", re.I) for name in RAW_TEXT}


def _decode(data: "bytes | str") -> str:
    if isinstance(data, str):
        return data
    return data.decode("utf-8", errors="replace")


def tokenize(data: "bytes | str") -> Iterator[Union[Tag, Text]]:
    """Yield tags and text runs in document order.  Never raises."""
    s = _decode(data)
    n = len(s)
    pos = 0
    fast = _FAST.match
    while pos < n:
        m = fast(s, pos)
        if m is not None:
            # common case: a text run or a well-formed tag
            pos = m.end()
            text = m.group(1)
            if text is not None:
                yield Text(html.unescape(text) if "&" in text else text)
                continue
            name = m.group(3).lower()
            closing = m.group(2) == "/" and name != "br"
            self_closing = not closing and m.group(4).rstrip().endswith("/")
            yield make_tag(name, closing, self_closing)
            if not closing and name in RAW_TEXT and not self_closing:
                end = _RAW_END[name].search(s, pos)
                pos = n if end is None else end.end()
            continue
        nxt = s[pos + 1:pos + 2]
        if s.startswith("<!--", pos):
            end = s.find("-->", pos + 4)
            pos = n if end < 0 else end + 3
            continue
        if nxt in ("!", "?"):
            end = s.find(">", pos + 2)
            pos = n if end < 0 else end + 1
            continue
        m = _TAG_QUOTED.match(s, pos) or _TAG_PLAIN.match(s, pos)
        if m is None:
            # stray "<": keep it as text up to the next "<"
            end = s.find("<", pos + 1)
            end = n if end < 0 else end
            chunk = s[pos:end]
            yield Text(html.unescape(chunk) if "&" in chunk else chunk)
            pos = end
            continue
        pos = m.end()
        closing = m.group(1) == "/"
        name = m.group(2).lower()
        if closing and name == "br":
            # browsers read </br> as <br>
            closing = False
        self_closing = not closing and m.group(3).rstrip().endswith("/")
        yield make_tag(name, closing, self_closing)
        if not closing and name in RAW_TEXT and not self_closing:
            end = _RAW_END[name].search(s, pos)
            pos = n if end is None else end.end()


# --- Containment ----------------------------------------------------------


def can_contain(parent: Tag, child: str) -> bool:
    """Containment relation between a non-synthetic frame and a child tag."""
    return _can_contain(parent.name, child)


@lru_cache(maxsize=65536)
def _can_contain(p: str, child: str) -> bool:
    if p == "doc":
        return True
    if child in STRUCTURAL:
        return p == "html" and child != "html"
    if p == "head":
        return child in HEAD_CONTENT
    if p == "title":
        return False
    if p in HEADER_LIKE or p in PHRASING:
        if child == "a" and p == "a":
            return False
        return child in PHRASING or child == "br" or child not in KNOWN
    if p in ("td", "th"):
        return child not in TABLE_CELL_STOP
    if p == "tr":
        return child not in TABLE_ROW_STOP
    if p in ("thead", "tbody", "tfoot"):
        return child not in TABLE_SECTION_STOP
    if p == "li":
        return child != "li"
    if p in ("dt", "dd"):
        return child not in ("dt", "dd")
    return True


def synthetic_can_contain(sep: Tag, child: str) -> bool:
    """Weight rule for ``t*`` frames: a separator of equal or higher weight ends it."""
    if child in STRUCTURAL:
        return False
    return child not in SEPARATORS or WEIGHT[child] < WEIGHT[sep.name]


@lru_cache(maxsize=65536)
def _accepts(name: str, synthetic: bool, owner: str, child: str) -> bool:
    if synthetic:
        return synthetic_can_contain(make_tag(name, synthetic=True), child) and _can_contain(owner, child)
    return _can_contain(name, child)


# --- Builder --------------------------------------------------------------


class _Open:
    __slots__ = ("frame", "owner", "header", "parent_children", "slot")

    def __init__(self, frame, owner, parent_children, slot, header=None):
        self.frame = frame
        self.owner = owner          # nearest non-synthetic frame, for containment
        self.header = header        # for t* frames: the separator frame t itself
        self.parent_children = parent_children
        self.slot = slot


def parse_frames(tokens: Iterable[Union[Tag, Text]]) -> Frame:
    """Build the frame tree rooted at a dummy ``doc`` frame."""
    root = Frame(make_tag("doc"))
    stack = [_Open(root, root, None, 0)]
    open_names: Counter = Counter()
    after_br = False

    def pop() -> None:
        top = stack.pop()
        fr = top.frame
        if fr.tag.is_synthetic:
            # t* that absorbed nothing collapses to the bare separator frame
            if len(fr.children) == 1 and fr.children[0] is top.header:
                top.parent_children[top.slot] = top.header
        else:
            open_names[fr.tag.name] -= 1

    for tok in tokens:
        while tok is not None:
            t, tok = tok, None
            top = stack[-1]
            cur = top.frame
            if isinstance(t, Text):
                text = " ".join(t.content.split())
                if text:
                    cur.children.append(Text(text))
                    after_br = False
                continue
            if after_br and t.name == "br" and not t.is_closing:
                continue
            if t.is_closing:
                # closers with nothing to close are invisible, so they do not break a br run
                if len(stack) == 1:
                    continue
                if not cur.tag.is_synthetic and cur.tag.name == t.name:
                    after_br = False
                    pop()
                elif open_names[t.name] > 0:
                    after_br = False
                    pop()
                    tok = t
                continue
            after_br = False
            if not _accepts(cur.tag.name, cur.tag.is_synthetic, top.owner.tag.name, t.name):
                pop()
                tok = t
                continue
            if t.is_separator:
                header = Frame(t)
                wrapper = Frame(make_tag(t.name, synthetic=True), [header])
                cur.children.append(wrapper)
                stack.append(_Open(wrapper, top.owner, cur.children, len(cur.children) - 1, header))
                if header.tag.is_self_closing:
                    after_br = t.name == "br"
                else:
                    stack.append(_Open(header, header, wrapper.children, 0))
                    open_names[t.name] += 1
            else:
                fr = Frame(t)
                cur.children.append(fr)
                if not fr.tag.is_self_closing:
                    stack.append(_Open(fr, fr, cur.children, len(cur.children) - 1))
                    open_names[t.name] += 1
    while len(stack) > 1:
        pop()
    return root


def parse_html(data: "bytes | str") -> Frame:
    return parse_frames(tokenize(data))


# --- Traversal -------------------------------------------------------------


class Ancestry:
    """Linked chain of ancestor frames, innermost last."""

    __slots__ = ("frame", "parent")

    def __init__(self, frame: Frame, parent: "Optional[Ancestry]"):
        self.frame = frame
        self.parent = parent

    def labels(self) -> tuple[str, ...]:
        out = []
        node: Optional[Ancestry] = self
        while node is not None:
            out.append(node.frame.label)
            node = node.parent
        return tuple(reversed(out))

    def __iter__(self) -> Iterator[Frame]:
        node: Optional[Ancestry] = self
        while node is not None:
            yield node.frame
            node = node.parent


def walk(root: Frame) -> Iterator[tuple[FrameNode, int, Optional[Ancestry]]]:
    """Pre-order (node, depth, ancestry-of-parent) traversal without recursion."""
    stack: list = [(root, 0, None)]
    while stack:
        node, depth, anc = stack.pop()
        yield node, depth, anc
        if isinstance(node, Frame):
            here = Ancestry(node, anc)
            for child in reversed(node.children):
                stack.append((child, depth + 1, here))


def text_frames(root: Frame) -> list[tuple[Text, Ancestry]]:
    return [(node, anc) for node, _, anc in walk(root) if isinstance(node, Text)]


def page_title(root: Frame) -> Optional[str]:
    for node, _, _ in walk(root):
        if isinstance(node, Frame) and not node.tag.is_synthetic and node.tag.name == "title":
            text = " ".join(t.content for t, _ in text_frames(node))
            return text or None
    return None


# --- Serialization --------------------------------------------------------


def dump_tree(root: Frame) -> str:
    """Indented one-node-per-line dump; text nodes are double-quoted."""
    lines = []
    for node, depth, _ in walk(root):
        pad = "  " * depth
        if isinstance(node, Text):
            lines.append(f'{pad}"{node.content}"')
        else:
            lines.append(pad + node.label)
    return "\n".join(lines) + "\n"


def to_html(root: Frame) -> str:
    """Serialize back to markup that parses to an isomorphic tree."""
    out: list[str] = []
    stack: list = [(root, False)]
    prev_text = False
    while stack:
        node, closing = stack.pop()
        if closing:
            out.append(f"</{node.tag.name}>")
            prev_text = False
            continue
        if isinstance(node, Text):
            if prev_text:
                out.append("<!---->")
            out.append(html.escape(node.content, quote=False))
            prev_text = True
            continue
        tag = node.tag
        emit = tag.name != "doc" and not tag.is_synthetic
        if emit:
            out.append(f"<{tag.name}>")
            prev_text = False
        if emit and not tag.is_self_closing:
            stack.append((node, True))
        for child in reversed(node.children):
            stack.append((child, False))
    return "".join(out)
