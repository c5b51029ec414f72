"""Command-line pipeline: ``ibex extract|filter|resolve|run|validate|eval|stats``.

Phase boundaries are TSV files.  Exit status is 0 on success, 1 on fatal
I/O errors and 2 on bad arguments.  Counters go to stderr as key=value pairs.
"""
from __future__ import annotations

import argparse
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import islice
from pathlib import Path
from typing import Iterable, Iterator, Optional

from . import __version__
from .aggregate import phase2_filter, phase3_resolve
from .config import PipelineConfig, load_config, parse_types
from .corpus import CorpusStats, PageItem, iter_inputs
from .evaluation import evaluate, wilson_interval
from .frametree import dump_tree, parse_html
from .idspec import IdType, explain_cas, explain_doi, explain_email, explain_gtin
from .nerfind import load_dictionary
from .records import NameFinder, extract_page, formula_finder
from .rows import CandidateRow
from . import stats as stats_mod
from . import tsvio

CHUNK = 64

EXPLAIN = {IdType.GTIN: explain_gtin, IdType.CAS: explain_cas,
           IdType.DOI: explain_doi, IdType.EMAIL: explain_email}


class UsageError(Exception):
    pass


def log_counters(name: str, **counts) -> None:
    body = " ".join(f"{k}={v}" for k, v in counts.items())
    print(f"{name}: {body}", file=sys.stderr)


# --- Phase 1 --------------------------------------------------------------


@dataclass
class ExtractCounters:
    pages: int = 0
    records: int = 0
    ids: int = 0
    candidates: int = 0
    failures: int = 0
    per_type: dict = field(default_factory=dict)

    def merge(self, other: "ExtractCounters") -> None:
        self.pages += other.pages
        self.records += other.records
        self.ids += other.ids
        self.candidates += other.candidates
        self.failures += other.failures
        for t, d in other.per_type.items():
            mine = self.per_type.setdefault(t, {"records": 0, "ids": 0, "candidates": 0})
            for k, v in d.items():
                mine[k] += v


@lru_cache(maxsize=4)
def _dictionary(path: Optional[str]):
    return load_dictionary(path)


def extract_chunk(pages: list[tuple[str, bytes]], types: tuple, dictionary_path: Optional[str],
                  attribute: str) -> tuple[dict, ExtractCounters]:
    """Phase 1 over a batch of (url, body) pairs; one bad page never sinks the batch."""
    names = _dictionary(dictionary_path)
    finder: Optional[NameFinder] = formula_finder if attribute == "formula" else None
    rows: dict = {t: [] for t in types}
    c = ExtractCounters()
    for url, body in pages:
        c.pages += 1
        try:
            res = extract_page(body, url, types, names, finder)
        except Exception:  # noqa: BLE001 - per-page failures are counted, never fatal
            c.failures += 1
            continue
        for t in types:
            rows[t].extend(res.rows[t])
            d = c.per_type.setdefault(t, {"records": 0, "ids": 0, "candidates": 0})
            d["candidates"] += len(res.rows[t])
            d["ids"] += res.ids_by_type[t]
            d["records"] += res.records_by_type[t]
        c.records += res.records
        c.ids += res.ids
        c.candidates += res.candidates
    return rows, c


def _chunks(items: Iterable[PageItem], size: int) -> Iterator[list[tuple[str, bytes]]]:
    it = iter(items)
    while True:
        batch = [(p.url, p.body) for p in islice(it, size)]
        if not batch:
            return
        yield batch


def run_phase1(items: Iterable[PageItem], types: tuple, workers: int = 1,
               dictionary_path: Optional[str] = None,
               attribute: str = "name") -> tuple[dict, ExtractCounters]:
    """R1 rows per type, sorted so the result is independent of scheduling."""
    rows: dict = {t: [] for t in types}
    total = ExtractCounters()

    def absorb(part):
        r, c = part
        for t in types:
            rows[t].extend(r[t])
        total.merge(c)

    if workers <= 1:
        for batch in _chunks(items, CHUNK):
            absorb(extract_chunk(batch, types, dictionary_path, attribute))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            pending = []
            for batch in _chunks(items, CHUNK):
                pending.append(pool.submit(extract_chunk, batch, types, dictionary_path, attribute))
                # bound the number of batches held in memory
                if len(pending) >= 4 * workers:
                    absorb(pending.pop(0).result())
            for fut in pending:
                absorb(fut.result())
    for t in types:
        rows[t].sort(key=CandidateRow.sort_key)
    return rows, total


# --- Helpers --------------------------------------------------------------


def _config(args) -> PipelineConfig:
    try:
        cfg = load_config(getattr(args, "config", None))
        over = {}
        if getattr(args, "workers", None) is not None:
            over["worker_count"] = args.workers
        if getattr(args, "types", None):
            over["id_types"] = parse_types(args.types)
        if getattr(args, "dictionary", None):
            over["dictionary_path"] = args.dictionary
        if getattr(args, "dedupe", False):
            over["dedupe_rows"] = True
        if getattr(args, "prefix_len", None) is not None:
            over["company_prefix_len"] = args.prefix_len
        return cfg.with_overrides(**over)
    except ValueError as e:
        raise UsageError(str(e)) from e


def _type(name: Optional[str]) -> Optional[IdType]:
    if name is None:
        return None
    try:
        return IdType.parse(name)
    except ValueError as e:
        raise UsageError(str(e)) from e


def _open_out(path: Optional[str]):
    if path is None or path == "-":
        return _NoClose(sys.stdout)
    return open(path, "w", encoding="utf-8", newline="\n")


class _NoClose:
    def __init__(self, f):
        self.f = f

    def __enter__(self):
        return self.f

    def __exit__(self, *exc):
        self.f.flush()
        return False


def _read_lines(path: str) -> list[str]:
    with open(path, encoding="utf-8", newline="") as f:
        return f.read().splitlines()


def _log_corpus(cs: CorpusStats, c: ExtractCounters) -> None:
    log_counters("extract", pages=c.pages, records=c.records, ids=c.ids, candidates=c.candidates,
                 skips=cs.skipped + c.failures, truncated=cs.truncated,
                 non_response=cs.non_response, non_200=cs.non_200)


# --- Commands -------------------------------------------------------------


def cmd_extract(args) -> int:
    cfg = _config(args)
    t = _type(args.type)
    cs = CorpusStats()
    items = iter_inputs(args.inputs, cs, args.manifest, cfg.page_size_cap)
    rows, c = run_phase1(items, (t,), cfg.worker_count, cfg.dictionary_path, args.attribute)
    with _open_out(args.out) as out:
        tsvio.write_rows(out, rows[t])
    _log_corpus(cs, c)
    return 0


def cmd_filter(args) -> int:
    cfg = _config(args)
    rs = tsvio.ReadStats()
    rows = list(tsvio.read_rows(_read_lines(args.r1), _type(args.type), rs))
    kept = phase2_filter(rows, cfg.outlier, cfg.dedupe_rows)
    with _open_out(args.out) as out:
        tsvio.write_rows(out, sorted(kept, key=CandidateRow.sort_key))
    names_in = {r.name_norm for r in rows}
    names_kept = {r.name_norm for r in kept}
    log_counters("filter", rows_in=len(rows), rows_kept=len(kept), names_kept=len(names_kept),
                 names_dropped=len(names_in - names_kept), malformed=rs.malformed)
    return 0


def cmd_resolve(args) -> int:
    rs = tsvio.ReadStats()
    rows = list(tsvio.read_rows(_read_lines(args.r2), _type(args.type), rs))
    entities = phase3_resolve(rows)
    with _open_out(args.out) as out:
        tsvio.write_entities(out, entities)
    log_counters("resolve", rows_in=len(rows), entities=len(entities), malformed=rs.malformed)
    return 0


def cmd_run(args) -> int:
    cfg = _config(args)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    cs = CorpusStats()
    items = iter_inputs(args.inputs, cs, args.manifest, cfg.page_size_cap)
    types = tuple(cfg.id_types)
    rows, c = run_phase1(items, types, cfg.worker_count, cfg.dictionary_path, args.attribute)
    _log_corpus(cs, c)
    for t in types:
        r1 = rows[t]
        r2 = sorted(phase2_filter(r1, cfg.outlier, cfg.dedupe_rows), key=CandidateRow.sort_key)
        r3 = phase3_resolve(r2)
        for suffix, writer, data in (("r1", tsvio.write_rows, r1), ("r2", tsvio.write_rows, r2),
                                     ("r3", tsvio.write_entities, r3)):
            with open(outdir / f"{t.value}.{suffix}.tsv", "w", encoding="utf-8", newline="\n") as f:
                writer(f, data)
        log_counters(f"run[{t.value}]", r1=len(r1), r2=len(r2), r3=len(r3))
    return 0


def cmd_validate(args) -> int:
    t = _type(args.type)
    vid, reason = EXPLAIN[t](args.id)
    if vid is None:
        print(reason)
        return 0
    print(f"valid {vid.canonical}")
    return 0


def _detect_kind(lines: list[str]) -> str:
    for line in lines:
        if line.startswith("#"):
            head = line.rstrip("\r\n")
            if head == tsvio.R1_HEADER:
                return "rows"
            if head == tsvio.R3_HEADER:
                return "entities"
        break
    raise UsageError("cannot tell R1/R2 from R3: missing header line")


def assignments_from_rows(rows: Iterable[CandidateRow], seed: int = 0) -> dict:
    """One uniformly random candidate per id, reproducible for a fixed seed."""
    by_id: dict = {}
    for r in sorted(rows, key=CandidateRow.sort_key):
        by_id.setdefault(r.id, []).append(r.name_raw)
    rng = random.Random(seed)
    return {vid: rng.choice(by_id[vid]) for vid in sorted(by_id, key=lambda v: v.canonical)}


def cmd_eval(args) -> int:
    t = _type(args.type)
    lines = _read_lines(args.table)
    rs = tsvio.ReadStats()
    if _detect_kind(lines) == "rows":
        assigned = assignments_from_rows(tsvio.read_rows(lines, t, rs), args.seed)
    else:
        assigned = {e.id: e.name_raw for e in tsvio.read_entities(lines, t, rs)}
    gold = tsvio.read_gold(_read_lines(args.gold), t)
    if not gold:
        raise UsageError("gold standard is empty")
    res = evaluate(assigned, gold)
    line = f"accuracy={res.accuracy:.4f} recall={res.recall:.4f} correct={res.correct} " \
           f"assigned={res.assigned} gold={res.gold}"
    if res.no_assignments:
        line += " no_assignments=1"
    else:
        lo, hi = wilson_interval(res.correct, res.assigned, args.z)
        line += f" wilson_low={lo:.4f} wilson_high={hi:.4f}"
    print(line)
    return 0


REPORTS = ("sources", "email-domains", "given-names", "family-names", "full-names",
           "countries", "prefixes", "companies")


def cmd_stats(args) -> int:
    cfg = _config(args)
    rs = tsvio.ReadStats()
    r3 = list(tsvio.read_entities(_read_lines(args.r3), _type(args.type), rs))
    k = args.k
    rep = args.report
    if rep == "sources":
        ranked = [(d.domain, d.entity_count) for d in stats_mod.top_sources(r3, k)]
    elif rep == "email-domains":
        ranked = [(d.domain, d.entity_count) for d in stats_mod.top_email_domains(r3, k)]
    elif rep in ("given-names", "family-names", "full-names"):
        names = stats_mod.common_person_names(r3, k)
        ranked = {"given-names": names.given, "family-names": names.family, "full-names": names.full}[rep]
    elif rep in ("countries", "prefixes"):
        table = stats_mod.load_prefix_table(cfg.prefix_table_path)
        by_prefix = stats_mod.products_by_country(r3, table)
        if rep == "countries":
            ranked = stats_mod.countries(by_prefix)
        else:
            ranked = [(f"{c.prefix} {c.label}", c.count) for c in by_prefix]
        ranked = ranked[:k] if k else ranked
    else:
        labels = stats_mod.company_labels(r3, cfg.company_prefix_len)
        with _open_out(args.out) as out:
            out.write("#prefix\tlabel\n")
            for prefix, label in labels.items():
                out.write(f"{prefix}\t{label}\n")
        return 0
    with _open_out(args.out) as out:
        tsvio.write_ranked(out, ranked)
    return 0


def cmd_frames(args) -> int:
    data = Path(args.file).read_bytes()
    sys.stdout.write(dump_tree(parse_html(data)))
    return 0


def cmd_synth(args) -> int:
    from .synth import generate, write_corpus

    c = generate(args.pages, seed=args.seed, page_bytes=args.page_bytes, cas_fraction=args.cas_fraction)
    target = write_corpus(c, args.out, args.format)
    log_counters("synth", pages=c.truth.pages, ids=c.truth.ids, records=c.truth.records,
                 entities=len(c.entities), corpus=str(target))
    return 0


# --- Parser ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ibex", description="Harvest id-keyed entities from HTML corpora.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, workers=False):
        sp.add_argument("--config", help="key=value config file (default: $IBEX_CONFIG)")
        if workers:
            sp.add_argument("--workers", type=int, help="Phase-1 worker processes")
            sp.add_argument("--manifest", help="TSV mapping relative html paths to urls")
            sp.add_argument("--dictionary", help="first-name dictionary file")
            sp.add_argument("--attribute", choices=("name", "formula"), default="name",
                            help="what to harvest for each id (default: name)")

    sp = sub.add_parser("extract", help="Phase 1: pages -> R1")
    sp.add_argument("inputs", nargs="+", help="WARC files, html files or directories")
    sp.add_argument("--type", required=True, help="id type: gtin, cas, doi or email")
    sp.add_argument("--out", help="output TSV (default: stdout)")
    common(sp, workers=True)
    sp.set_defaults(func=cmd_extract)

    sp = sub.add_parser("filter", help="Phase 2: R1 -> R2")
    sp.add_argument("r1")
    sp.add_argument("--type", help="id type of the rows (default: detect per row)")
    sp.add_argument("--out")
    sp.add_argument("--dedupe", action="store_true", help="count each (id, name, url) once")
    common(sp)
    sp.set_defaults(func=cmd_filter)

    sp = sub.add_parser("resolve", help="Phase 3: R2 -> R3")
    sp.add_argument("r2")
    sp.add_argument("--type")
    sp.add_argument("--out")
    common(sp)
    sp.set_defaults(func=cmd_resolve)

    sp = sub.add_parser("run", help="all phases for every enabled id type")
    sp.add_argument("inputs", nargs="+")
    sp.add_argument("--type", dest="types", help="comma-separated id types (default: from config)")
    sp.add_argument("--out", required=True, help="output directory")
    sp.add_argument("--dedupe", action="store_true")
    common(sp, workers=True)
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("validate", help="check one id string")
    sp.add_argument("type")
    sp.add_argument("id")
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("eval", help="accuracy and recall of R1/R2/R3 against a gold TSV")
    sp.add_argument("table")
    sp.add_argument("gold")
    sp.add_argument("--type")
    sp.add_argument("--seed", type=int, default=0, help="seed for picking one R1/R2 candidate per id")
    sp.add_argument("--z", type=float, default=1.96)
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("stats", help="ranked reports over R3")
    sp.add_argument("r3")
    sp.add_argument("report", choices=REPORTS)
    sp.add_argument("--type")
    sp.add_argument("-k", type=int, default=None, help="keep the top k entries")
    sp.add_argument("--prefix-len", type=int, help="company prefix length, 4..7")
    sp.add_argument("--out")
    common(sp)
    sp.set_defaults(func=cmd_stats)

    sp = sub.add_parser("frames", help="print the frame tree of one html file")
    sp.add_argument("file")
    sp.set_defaults(func=cmd_frames)

    sp = sub.add_parser("synth", help="write a synthetic corpus with gold files")
    sp.add_argument("out")
    sp.add_argument("--pages", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--page-bytes", type=int, default=30000)
    sp.add_argument("--cas-fraction", type=float, default=0.1)
    sp.add_argument("--format", choices=("warc", "dir"), default="warc")
    sp.set_defaults(func=cmd_synth)
    return p


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"ibex: error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"ibex: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
