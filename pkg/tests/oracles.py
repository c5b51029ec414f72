"""Independent reference implementations used only by the tests.

Each one is written from the textbook definition and shares no code with the
package, so agreement between the two is evidence, not tautology.
"""
from __future__ import annotations

from collections import defaultdict
from fractions import Fraction
from math import comb

from mpmath import mp, mpf, sqrt


def gtin_is_valid(code: str) -> bool:
    """GS1 rule on the full code read right to left: weights 1, 3, 1, 3, ... sum to 0 mod 10."""
    if not code.isdigit() or not code.isascii() or len(code) not in (8, 12, 13, 14):
        return False
    total = sum(int(d) * (3 if k % 2 else 1) for k, d in enumerate(reversed(code)))
    return total % 10 == 0


def cas_is_valid(s: str) -> bool:
    parts = s.split("-")
    if len(parts) != 3 or not all(p.isdigit() and p.isascii() for p in parts):
        return False
    a, b, c = parts
    if not (2 <= len(a) <= 7 and len(b) == 2 and len(c) == 1):
        return False
    digits = a + b
    return sum(k * int(d) for k, d in enumerate(reversed(digits), 1)) % 10 == int(c)


def wilson_closed_form(k: int, n: int, z: float = 1.96) -> tuple[float, float]:
    """Wilson bounds in 50-digit arithmetic, rounded to float at the end."""
    mp.dps = 50
    k, n, z = mpf(k), mpf(n), mpf(z)
    p = k / n
    centre = (p + z * z / (2 * n)) / (1 + z * z / n)
    half = z / (1 + z * z / n) * sqrt(p * (1 - p) / n + z * z / (4 * n * n))
    return float(centre - half), float(centre + half)


def exact_expected_coverage(num_pages: int, pages_per_entity: list[int], alpha: float) -> Fraction:
    """E|E'|/|E| with m = floor(alpha W) pages drawn without replacement."""
    m = int(alpha * num_pages)
    total = comb(num_pages, m)
    miss = sum(Fraction(comb(num_pages - k, m), total) for k in pages_per_entity)
    return 1 - miss / len(pages_per_entity)


def brute_force_phases(rows, i: int = 3, p: float = 0.30, skip=lambda r: False):
    """R2 and R3 by direct transcription of the set definitions.

    freq_n(id) = |{r in R1 : r.name = n and r.id = id}|, computed by rescanning
    R1 for every (name, id) pair.  Ties: lexicographic id, then name, then raw.
    """
    r1 = [r for r in rows if r.name_norm]
    names = sorted({r.name_norm for r in r1 if not skip(r)})
    outlier = {}
    for n in names:
        ids = sorted({r.id.canonical for r in r1 if r.name_norm == n and not skip(r)})
        freq = {x: sum(1 for r in r1 if r.name_norm == n and r.id.canonical == x and not skip(r)) for x in ids}
        total = sum(freq.values())
        order = sorted(ids, key=lambda x: (-freq[x], x))
        top = order[0]
        f1 = freq[top]
        f2 = freq[order[1]] if len(order) > 1 else 0
        if len(order) == 1 or (f1 > p * total and i * f2 < f1):
            outlier[n] = top
    r2 = [r for r in r1 if skip(r) or outlier.get(r.name_norm) == r.id.canonical]

    by_id = defaultdict(list)
    for r in r2:
        by_id[r.id.canonical].append(r)
    r3 = {}
    for x in sorted(by_id):
        rs = by_id[x]
        cands = sorted({r.name_norm for r in rs})
        def freq(n):
            return sum(1 for r in rs if r.name_norm == n)
        def best(n):
            return max(r.score for r in rs if r.name_norm == n)
        win = sorted(cands, key=lambda n: (-freq(n), -best(n), n))[0]
        raw = sorted(r.name_raw for r in rs if r.name_norm == win and r.score == best(win))[0]
        r3[x] = (raw, frozenset(r.url for r in rs))
    return r2, r3
