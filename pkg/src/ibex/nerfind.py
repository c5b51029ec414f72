"""Name finders and validators per id type, plus the chemical formula finder.

A name finder takes the text of one text frame and returns the substrings
that may name the entity behind an id.  GTIN and CAS finders are plain
validators (the whole frame is the candidate or nothing is); the email and
DOI finders search inside the frame.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional

from .idspec import IdType, ValidatedId, is_isbn

MAX_NAME_LENGTH = 250
MIN_WORD_LENGTH = 4


@dataclass(frozen=True)
class NameCandidate:
    raw: str
    record_offset: int


class FirstNameDictionary:
    """Case-insensitive set of given names."""

    def __init__(self, names: Iterable[str]):
        self.names = frozenset(n.strip().lower() for n in names if n.strip())
        if not self.names:
            raise ValueError("first-name dictionary is empty")

    def __contains__(self, word: str) -> bool:
        return word.lower() in self.names

    def __len__(self) -> int:
        return len(self.names)

    @classmethod
    def from_file(cls, path: "str | Path", removed: Iterable[str] = ()) -> "FirstNameDictionary":
        drop = {w.lower() for w in removed}
        return cls(n for n in _read_word_list(Path(path).read_text("utf-8")) if n not in drop)

    @classmethod
    def default(cls) -> "FirstNameDictionary":
        return _default_dictionary()


def _read_word_list(text: str) -> list[str]:
    out = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip().lower()
        if line:
            out.append(line)
    return out


@lru_cache(maxsize=1)
def _default_dictionary() -> FirstNameDictionary:
    data = resources.files("ibex") / "data"
    names = _read_word_list((data / "firstnames.txt").read_text("utf-8"))
    removed = set(_read_word_list((data / "removed_names.txt").read_text("utf-8")))
    return FirstNameDictionary(n for n in names if n not in removed)


def load_dictionary(path: "str | Path | None" = None) -> FirstNameDictionary:
    if path is None:
        return FirstNameDictionary.default()
    data = resources.files("ibex") / "data"
    removed = _read_word_list((data / "removed_names.txt").read_text("utf-8"))
    return FirstNameDictionary.from_file(path, removed)


# --- Author lists ---------------------------------------------------------

_AUTHOR_TOKENS = re.compile(r",|[^\s,]+")
_STRIP = "\"'()[]{}.;:!?"


def _is_initial(token: str) -> bool:
    # bare "A"/"a"/"I" are English words, not initials; "A." still is one
    if len(token) == 2 and token[1] == "." and token[0].isalpha():
        return True
    return len(token) == 1 and token.isalpha() and token not in "AaI"


def looks_like_author_list(s: str, names: FirstNameDictionary) -> bool:
    tokens = _AUTHOR_TOKENS.findall(s)
    if not tokens:
        return False
    commas = 0
    for tok in tokens:
        if tok == ",":
            commas += 1
            continue
        if _is_initial(tok):
            return True
        word = tok.strip(_STRIP)
        if word and word in names:
            return True
    return commas * 3 > len(tokens)


# --- GTIN / CAS validators ------------------------------------------------


def _has_long_word(s: str) -> bool:
    return any(len(tok) >= MIN_WORD_LENGTH for tok in s.split())


def accept_name_gtin(s: str, vid: ValidatedId, names: FirstNameDictionary) -> bool:
    if not s or len(s) > MAX_NAME_LENGTH or not s[0].isalnum():
        return False
    if not _has_long_word(s):
        return False
    return not (is_isbn(vid) and looks_like_author_list(s, names))


_CAS_NAME_PUNCT = frozenset("()[]{}'\",.-")


def accept_name_cas(s: str) -> bool:
    if not s or len(s) > MAX_NAME_LENGTH or not _has_long_word(s):
        return False
    for c in s:
        if not (c.isalnum() or c.isspace() or c in _CAS_NAME_PUNCT):
            return False
    return not find_formula(s)


# --- Email ----------------------------------------------------------------

_NAME_TOKENS = re.compile(r"[^\W\d_]+(?:[-'][^\W\d_]+)*|\S")


def _is_word(tok: str) -> bool:
    """Capitalized, possibly hyphenated word of two or more letters."""
    return len(tok) > 1 and tok[0].isupper() and tok[0].isalpha()


def _match_first(toks: list[str], i: int, names: FirstNameDictionary) -> int:
    """Number of given names (up to 2) starting at ``i``."""
    n = 0
    while n < 2 and i + n < len(toks):
        tok = toks[i + n]
        if not _is_word(tok) or tok not in names:
            break
        n += 1
    return n


def _match_middle(toks: list[str], j: int) -> int:
    """Tokens taken by an optional middle name or initial at ``j``."""
    if j >= len(toks):
        return 0
    tok = toks[j]
    if len(tok) == 1 and tok.isupper():
        return 2 if j + 1 < len(toks) and toks[j + 1] == "." else 1
    return 1 if _is_word(tok) else 0


def _match_person(toks: list[str], i: int, names: FirstNameDictionary) -> int:
    """Token count of the longest person name starting at ``i``, or 0."""
    # first middle last
    for nf in range(_match_first(toks, i, names), 0, -1):
        j = i + nf
        nm = _match_middle(toks, j)
        if nm and j + nm < len(toks) and _is_word(toks[j + nm]):
            return nf + nm + 1
        if j < len(toks) and _is_word(toks[j]):
            return nf + 1
    # last, first middle
    if i + 2 < len(toks) and _is_word(toks[i]) and toks[i + 1] == ",":
        nf = _match_first(toks, i + 2, names)
        if nf:
            return 2 + nf + _match_middle(toks, i + 2 + nf)
    return 0


def _span_text(s: str, spans: list[tuple[int, int]], i: int, n: int) -> str:
    return s[spans[i][0]:spans[i + n - 1][1]]


def _overlaps_address(name: str, local: str) -> bool:
    for tok in re.split(r"[\s,.\-']+", name):
        if len(tok) >= 3 and tok.lower() in local:
            return True
    return False


def find_names_email(s: str, vid: ValidatedId, names: FirstNameDictionary) -> list[str]:
    local = vid.canonical.split("@", 1)[0]
    matches = list(_NAME_TOKENS.finditer(s))
    toks = [m.group() for m in matches]
    spans = [m.span() for m in matches]
    out: list[str] = []
    i = 0
    while i < len(toks):
        n = _match_person(toks, i, names)
        if n:
            name = _span_text(s, spans, i, n)
            if len(name) <= MAX_NAME_LENGTH and _overlaps_address(name, local):
                out.append(name)
            i += n
        else:
            i += 1
    return out


# --- DOI ------------------------------------------------------------------

_DOI_SPLIT = re.compile(r'[.;"?!]')


def find_names_doi(s: str, names: FirstNameDictionary) -> list[str]:
    out = []
    for part in _DOI_SPLIT.split(s):
        part = part.strip()
        if len(part.split()) < 4 or len(part) > MAX_NAME_LENGTH:
            continue
        if not looks_like_author_list(part, names):
            out.append(part)
    return out


# --- Chemical formulae ----------------------------------------------------

ELEMENTS = frozenset(
    """H He Li Be B C N O F Ne Na Mg Al Si P S Cl Ar K Ca Sc Ti V Cr Mn Fe Co
    Ni Cu Zn Ga Ge As Se Br Kr Rb Sr Y Zr Nb Mo Tc Ru Rh Pd Ag Cd In Sn Sb Te
    I Xe Cs Ba La Ce Pr Nd Pm Sm Eu Gd Tb Dy Ho Er Tm Yb Lu Hf Ta W Re Os Ir
    Pt Au Hg Tl Pb Bi Po At Rn Fr Ra Ac Th Pa U Np Pu Am Cm Bk Cf Es Fm Md No
    Lr Rf Db Sg Bh Hs Mt Ds Rg Cn Nh Fl Mc Lv Ts Og""".split()
)


class PeriodicTable:
    def __init__(self, symbols: Iterable[str] = ELEMENTS):
        self.symbols = frozenset(symbols)
        alt = "|".join(sorted(self.symbols, key=lambda e: (-len(e), e)))
        element = rf"(?:{alt})[0-9]*"
        inner = rf"(?:{element})+"
        group = rf"(?:\((?:{element}|\[{inner}\][0-9]*)+\)|\[(?:{element}|\({inner}\)[0-9]*)+\])[0-9]*"
        self._unit = re.compile(rf"{element}|{group}")
        self._formula = re.compile(rf"(?:{element}|{group})+")

    def units(self, token: str) -> Optional[int]:
        """Number of top-level units if ``token`` fully decomposes, else None."""
        if not self._formula.fullmatch(token):
            return None
        pos = n = 0
        while pos < len(token):
            m = self._unit.match(token, pos)
            if m is None:
                return None
            pos = m.end()
            n += 1
        return n


_TRIM = ".,;:!?\"'"


@lru_cache(maxsize=1)
def default_periodic_table() -> PeriodicTable:
    return PeriodicTable()


def find_formula(s: str, table: Optional[PeriodicTable] = None) -> list[str]:
    table = table or default_periodic_table()
    out = []
    for tok in s.split():
        tok = tok.strip(_TRIM)
        if tok and tok[0] in "([" or tok[:1].isupper():
            n = table.units(tok)
            if n is not None and n >= 2:
                out.append(tok)
    return out


# --- Dispatch -------------------------------------------------------------


def find_names(text: str, vid: ValidatedId, names: FirstNameDictionary) -> list[str]:
    """Apply the name finder of ``vid``'s type to one text frame."""
    t = vid.id_type
    if t is IdType.GTIN:
        return [text] if accept_name_gtin(text, vid, names) else []
    if t is IdType.CAS:
        return [text] if accept_name_cas(text) else []
    if t is IdType.EMAIL:
        return find_names_email(text, vid, names)
    if t is IdType.DOI:
        return find_names_doi(text, names)
    raise ValueError(f"no name finder for {t}")
