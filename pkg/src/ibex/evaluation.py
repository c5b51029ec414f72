"""Evaluation against a gold standard, Wilson intervals and the coverage simulation."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping, Optional, Sequence

import numpy as np

from .idspec import Normalization, normalize_name


@dataclass(frozen=True)
class EvalResult:
    accuracy: float
    recall: float
    correct: int
    assigned: int
    gold: int
    no_assignments: bool = False


def names_match(a: str, b: str) -> bool:
    return normalize_name(a, Normalization.LETTERS_ONLY) == normalize_name(b, Normalization.LETTERS_ONLY)


def evaluate(assigned: Mapping, gold: Mapping, matcher: Optional[Callable[[str, str], bool]] = None) -> EvalResult:
    """Accuracy over the gold ids that received a name, recall over all gold ids.

    ``matcher`` compares an assigned name with the gold name; the default
    compares the letters-only upper-cased forms.
    """
    if not gold:
        raise ValueError("gold standard is empty")
    if matcher is None:
        matcher = names_match

    made = correct = 0
    for key, want in gold.items():
        got = assigned.get(key)
        if got is None:
            continue
        made += 1
        correct += bool(matcher(got, want))
    if made == 0:
        return EvalResult(0.0, 0.0, 0, 0, len(gold), no_assignments=True)
    return EvalResult(correct / made, correct / len(gold), correct, made, len(gold))


def wilson_interval(successes: int, n: int, z: float = 1.96) -> tuple[float, float]:
    if n < 1:
        raise ValueError("n must be at least 1")
    if not 0 <= successes <= n:
        raise ValueError("successes must lie in [0, n]")
    if z <= 0:
        raise ValueError("z must be positive")
    phat = successes / n
    z2 = z * z
    denom = 1 + z2 / n
    center = (phat + z2 / (2 * n)) / denom
    half = z * math.sqrt(phat * (1 - phat) / n + z2 / (4 * n * n)) / denom
    # pin the exact boundary cases against rounding
    low = 0.0 if successes == 0 else max(0.0, center - half)
    high = 1.0 if successes == n else min(1.0, center + half)
    return low, high


@dataclass
class CoverageSimConfig:
    num_pages: int
    entity_of_page: Sequence
    alpha: float
    trials: int = 10000

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must be in (0, 1), got {self.alpha}")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if len(self.entity_of_page) != self.num_pages:
            raise ValueError("entity_of_page must list one entity set per page")
        if any(len(s) == 0 for s in self.entity_of_page):
            raise ValueError("every page must mention at least one entity")

    def incidence(self) -> tuple[np.ndarray, list]:
        """Boolean page x entity matrix and the sorted entity list."""
        entities = sorted({e for s in self.entity_of_page for e in s}, key=repr)
        col = {e: j for j, e in enumerate(entities)}
        m = np.zeros((self.num_pages, len(entities)), dtype=bool)
        for i, s in enumerate(self.entity_of_page):
            for e in s:
                m[i, col[e]] = True
        return m, entities


def coverage_simulation(cfg: CoverageSimConfig, seed: Optional[int] = None) -> tuple[float, float]:
    """Mean and standard error of |E'|/|E| when a fraction alpha of pages is kept."""
    incidence, entities = cfg.incidence()
    draw = int(math.floor(cfg.alpha * cfg.num_pages))
    rng = np.random.default_rng(seed)
    # a uniform subset per trial: the first `draw` columns of a random permutation
    keys = rng.random((cfg.trials, cfg.num_pages))
    chosen = np.argsort(keys, axis=1)[:, :draw]
    mask = np.zeros((cfg.trials, cfg.num_pages), dtype=np.int32)
    np.put_along_axis(mask, chosen, 1, axis=1)
    hits = mask @ incidence.astype(np.int32)
    cov = (hits > 0).sum(axis=1) / len(entities)
    mean = float(cov.mean())
    stderr = float(cov.std(ddof=1) / math.sqrt(cfg.trials)) if cfg.trials > 1 else 0.0
    return mean, stderr


def exact_coverage(cfg: CoverageSimConfig) -> float:
    """Expected coverage in closed form: mean over entities of 1 - C(W-k, m)/C(W, m)."""
    incidence, _ = cfg.incidence()
    w = cfg.num_pages
    m = int(math.floor(cfg.alpha * w))
    total = math.comb(w, m)
    miss = [math.comb(w - int(k), m) / total for k in incidence.sum(axis=0)]
    return 1.0 - float(np.mean(miss))
