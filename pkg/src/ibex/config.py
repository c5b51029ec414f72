"""Pipeline configuration: a flat ``key = value`` file plus command-line overrides."""
from __future__ import annotations

import os
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

from .aggregate import OutlierParams
from .idspec import IdType

ENV_VAR = "IBEX_CONFIG"
DEFAULT_PAGE_CAP = 4 * 1024 * 1024


@dataclass(frozen=True)
class PipelineConfig:
    id_types: tuple = (IdType.GTIN, IdType.CAS, IdType.DOI, IdType.EMAIL)
    outlier: OutlierParams = field(default_factory=OutlierParams)
    company_prefix_len: int = 7
    page_size_cap: int = DEFAULT_PAGE_CAP
    worker_count: int = 1
    dictionary_path: Optional[str] = None
    prefix_table_path: Optional[str] = None
    dedupe_rows: bool = False

    def __post_init__(self):
        if self.worker_count < 1:
            raise ValueError("workers must be at least 1")
        if not 4 <= self.company_prefix_len <= 7:
            raise ValueError("company_prefix_len must be in 4..7")
        if self.page_size_cap < 1:
            raise ValueError("page_size_cap must be positive")

    def with_overrides(self, **kw) -> "PipelineConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


def _bool(v: str) -> bool:
    low = v.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {v!r}")


def parse_types(v: str) -> tuple:
    return tuple(IdType.parse(t.strip()) for t in v.split(",") if t.strip())


def parse_config(text: str) -> PipelineConfig:
    values: dict = {}
    i, p = OutlierParams.i, OutlierParams.p
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        if key == "types":
            values["id_types"] = parse_types(val)
        elif key == "outlier_i":
            i = int(val)
        elif key == "outlier_p":
            p = float(val)
        elif key in ("company_prefix_len", "page_size_cap"):
            values[key] = int(val)
        elif key == "workers":
            values["worker_count"] = int(val)
        elif key in ("dictionary_path", "prefix_table_path"):
            values[key] = val or None
        elif key == "dedupe_rows":
            values[key] = _bool(val)
        else:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
    return PipelineConfig(outlier=OutlierParams(i, p), **values)


def load_config(path: "str | Path | None" = None) -> PipelineConfig:
    """Read ``path``, else $IBEX_CONFIG, else built-in defaults."""
    if path is None:
        path = os.environ.get(ENV_VAR) or None
    if path is None:
        return PipelineConfig()
    return parse_config(Path(path).read_text("utf-8"))

