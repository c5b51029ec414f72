"""Id type registry: validators, check digits, name normalization and GTIN
prefix decoding.

Every validator takes an arbitrary string and returns a :class:`ValidatedId`
or ``None``.  The ``explain_*`` variants additionally return a short
rejection reason, which is what ``ibex validate`` prints.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional


class IdType(str, Enum):
    GTIN = "gtin"
    CAS = "cas"
    DOI = "doi"
    EMAIL = "email"

    @property
    def canonical_name(self) -> str:
        return self.value

    @classmethod
    def parse(cls, name: "str | IdType") -> "IdType":
        if isinstance(name, IdType):
            return name
        try:
            return cls(name.strip().lower())
        except ValueError:
            raise ValueError(f"unknown id type: {name!r}") from None


class Normalization(str, Enum):
    LETTERS_ONLY = "letters"
    ALPHANUMERIC = "alphanumeric"


@dataclass(frozen=True)
class IdTypeConfig:
    skip_phase2: bool = False
    normalization: Normalization = Normalization.LETTERS_ONLY
    is_pseudo_id: bool = False


@dataclass(frozen=True, order=True)
class ValidatedId:
    id_type: IdType
    canonical: str

    def __str__(self) -> str:
        return self.canonical


# --- GTIN -----------------------------------------------------------------

GTIN_LENGTHS = (8, 12, 13, 14)


def gtin_check_digit(data: str) -> int:
    """Mod-10 check digit for the 13 data digits of a 14-digit GTIN."""
    if len(data) != 13 or not data.isascii() or not data.isdigit():
        raise ValueError(f"expected 13 decimal digits, got {data!r}")
    total = 0
    for pos, ch in enumerate(data):
        total += int(ch) * (3 if pos % 2 == 0 else 1)
    return (10 - total % 10) % 10


def explain_gtin(s: str) -> tuple[Optional[ValidatedId], str]:
    if not s or not s.isascii() or not s.isdigit():
        return None, "invalid syntax"
    if len(s) not in GTIN_LENGTHS:
        return None, "invalid length"
    padded = s.zfill(14)
    if gtin_check_digit(padded[:13]) != int(padded[13]):
        return None, "invalid check digit"
    return ValidatedId(IdType.GTIN, padded), "valid"


def validate_gtin(s: str) -> Optional[ValidatedId]:
    return explain_gtin(s)[0]


# --- CAS ------------------------------------------------------------------

_CAS_RE = re.compile(r"([0-9]{2,7})-([0-9]{2})-([0-9])")


def cas_check_digit(data: str) -> int:
    """Rightmost data digit weighs 1, the next 2, and so on; sum mod 10."""
    if not data.isascii() or not data.isdigit():
        raise ValueError(f"expected decimal digits, got {data!r}")
    return sum(int(ch) * w for w, ch in enumerate(reversed(data), start=1)) % 10


def explain_cas(s: str) -> tuple[Optional[ValidatedId], str]:
    m = _CAS_RE.fullmatch(s) if s.isascii() else None
    if m is None:
        return None, "invalid syntax"
    if cas_check_digit(m.group(1) + m.group(2)) != int(m.group(3)):
        return None, "invalid check digit"
    return ValidatedId(IdType.CAS, s), "valid"


def validate_cas(s: str) -> Optional[ValidatedId]:
    return explain_cas(s)[0]


# --- DOI ------------------------------------------------------------------

_DOI_SCHEME = re.compile(r"(?i)doi:\s*")
_DOI_PREFIX = re.compile(r"10\.[0-9]+(?:\.[0-9]+)*")


def explain_doi(s: str) -> tuple[Optional[ValidatedId], str]:
    m = _DOI_SCHEME.match(s)
    if m:
        s = s[m.end():]
    prefix, slash, suffix = s.partition("/")
    if not slash:
        return None, "invalid syntax"
    if not _DOI_PREFIX.fullmatch(prefix):
        return None, "invalid prefix"
    if not suffix or not suffix.isprintable() or any(c.isspace() for c in suffix):
        return None, "invalid suffix"
    # DOI names are case-insensitive; one key per document
    return ValidatedId(IdType.DOI, f"{prefix}/{suffix.lower()}"), "valid"


def validate_doi(s: str) -> Optional[ValidatedId]:
    return explain_doi(s)[0]


# --- Email ----------------------------------------------------------------

_EMAIL_LOCAL = re.compile(r"[A-Za-z0-9._%+-]+")
_EMAIL_LABEL = re.compile(r"[A-Za-z0-9-]+")


def explain_email(s: str) -> tuple[Optional[ValidatedId], str]:
    local, at, domain = s.rpartition("@")
    if not at:
        return None, "invalid syntax"
    if not _EMAIL_LOCAL.fullmatch(local):
        return None, "invalid local part"
    labels = domain.split(".")
    if (
        len(labels) < 2
        or not all(_EMAIL_LABEL.fullmatch(label) for label in labels)
        or len(labels[-1]) < 2
        or not (labels[-1].isascii() and labels[-1].isalpha())
    ):
        return None, "invalid domain"
    return ValidatedId(IdType.EMAIL, s.lower()), "valid"


def validate_email(s: str) -> Optional[ValidatedId]:
    return explain_email(s)[0]


# --- Registry -------------------------------------------------------------


@dataclass(frozen=True)
class IdSpec:
    id_type: IdType
    config: IdTypeConfig
    explain: Callable[[str], tuple[Optional[ValidatedId], str]]

    def validate(self, s: str) -> Optional[ValidatedId]:
        return self.explain(s)[0]


REGISTRY: dict[IdType, IdSpec] = {
    IdType.GTIN: IdSpec(IdType.GTIN, IdTypeConfig(), explain_gtin),
    IdType.CAS: IdSpec(
        IdType.CAS, IdTypeConfig(normalization=Normalization.ALPHANUMERIC), explain_cas
    ),
    IdType.DOI: IdSpec(IdType.DOI, IdTypeConfig(), explain_doi),
    IdType.EMAIL: IdSpec(
        IdType.EMAIL, IdTypeConfig(skip_phase2=True, is_pseudo_id=True), explain_email
    ),
}


def get_spec(id_type: "IdType | str") -> IdSpec:
    return REGISTRY[IdType.parse(id_type)]


def config_for(id_type: "IdType | str") -> IdTypeConfig:
    return get_spec(id_type).config


def validate(id_type: "IdType | str", s: str) -> Optional[ValidatedId]:
    return get_spec(id_type).validate(s)


def detect(s: str) -> Optional[ValidatedId]:
    """Validate ``s`` against every registered type, first match wins."""
    for spec in REGISTRY.values():
        vid = spec.validate(s)
        if vid is not None:
            return vid
    return None


# --- Names ----------------------------------------------------------------


def normalize_name(name: str, cfg: "IdTypeConfig | Normalization") -> str:
    mode = cfg.normalization if isinstance(cfg, IdTypeConfig) else cfg
    upper = name.upper()
    if mode is Normalization.ALPHANUMERIC:
        return "".join(c for c in upper if c.isalnum())
    return "".join(c for c in upper if c.isalpha())


# --- GTIN prefixes --------------------------------------------------------


def _ean13(vid: ValidatedId) -> str:
    if vid.id_type is not IdType.GTIN:
        raise ValueError(f"not a GTIN: {vid}")
    ean = vid.canonical[1:]
    # a zero-padded GTIN-8 carries no GS1 country or company prefix
    if ean.startswith("00000"):
        raise ValueError(f"GTIN-8 has no GS1 prefix: {vid}")
    return ean


def gtin_country_prefix(vid: ValidatedId) -> str:
    return _ean13(vid)[:3]


def gtin_company_prefix(vid: ValidatedId, length: int) -> str:
    if not 4 <= length <= 7:
        raise ValueError(f"company prefix length must be in 4..7, got {length}")
    return _ean13(vid)[:length]


def is_isbn(vid: ValidatedId) -> bool:
    # only 978 (Bookland) counts, 979 is ignored on purpose
    try:
        return gtin_country_prefix(vid) == "978"
    except ValueError:
        return False
