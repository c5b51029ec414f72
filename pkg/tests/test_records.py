import random

import pytest
from hypothesis import given, settings, strategies as st

from ibex.frametree import parse_html
from ibex.idspec import IdType, gtin_check_digit, validate_gtin
from ibex.nerfind import NameCandidate
from ibex.records import (
    PageFrames,
    RecordKind,
    extract_page,
    extract_r1,
    extract_records,
    formula_finder,
    mark_ids,
    score_detail,
    score_free,
    style_of,
)


def gtin(seed: int) -> str:
    data = str(400000000000 + seed * 7919).zfill(13)[:13]
    return data + str(gtin_check_digit(data))


class TestMarkIds:
    def test_golden_page(self, golden_html):
        hits = mark_ids(parse_html(golden_html), IdType.GTIN)
        assert [(i, v.canonical) for i, v in hits] == [(2, "08806085725072"), (5, "04047443213525")]

    def test_surrounding_text_blocks_match(self):
        assert mark_ids(parse_html("<p>Id: 8806085725072</p>"), "gtin") == []

    def test_empty(self):
        assert mark_ids(parse_html(""), "gtin") == []

    def test_whitespace_trimmed(self):
        assert len(mark_ids(parse_html("<td>\n  8806085725072  </td>"), "gtin")) == 1


class TestRecords:
    def test_golden_page_two_free_records(self, golden_html):
        recs = extract_records(parse_html(golden_html), "gtin")
        assert [r.kind for r in recs] == [RecordKind.FREE, RecordKind.FREE]
        assert [r.root.label for r in recs] == ["h1*", "h1*"]
        body = parse_html(golden_html).children[0]
        assert [r.id.canonical for r in recs] == ["08806085725072", "04047443213525"]
        assert len(body.children) == 2

    def test_golden_page_rows(self, golden_html):
        rows = extract_r1(golden_html, "http://x/", "gtin")
        pairs = {(r.id.canonical, r.name_raw, r.score) for r in rows}
        assert ("08806085725072", "Samsung Galaxy S4", 4.0) in pairs
        assert ("04047443213525", "Galaxy S4 Charging Cable", 4.0) in pairs
        assert all(r.name_raw != "Id:" for r in rows)
        # the second h1* record owns its own header
        assert ("04047443213525", "Accessories", 4.0) in pairs
        assert len(rows) == 3

    def test_single_id_is_detail(self):
        recs = extract_records(parse_html("<div><p>x</p><span>8806085725072</span></div>"), "gtin")
        assert len(recs) == 1 and recs[0].kind is RecordKind.DETAIL and recs[0].root.label == "doc"

    def test_no_ids(self):
        assert extract_records(parse_html("<p>nothing</p>"), "gtin") == []
        assert extract_r1("<p>nothing</p>", "u", "gtin") == []

    def test_table_rows(self):
        ids = [gtin(k) for k in range(3)]
        doc = "<table>" + "".join(f"<tr><td>Name {k}<td>{g}" for k, g in enumerate(ids)) + "</table>"
        recs = extract_records(parse_html(doc), "gtin")
        assert [r.root.label for r in recs] == ["tr"] * 3
        assert [r.id.canonical for r in recs] == [validate_gtin(g).canonical for g in ids]

    def test_repeated_id_value_in_separate_records(self):
        doc = "<ul><li>A 8806085725072<li><b>8806085725072</b><li><b>4047443213525</b></ul>"
        recs = extract_records(parse_html(doc), "gtin")
        assert [r.id.canonical for r in recs] == ["08806085725072", "04047443213525"]
        doc = "<ul><li><b>8806085725072</b><li><b>8806085725072</b></ul>"
        assert len(extract_records(parse_html(doc), "gtin")) == 2


class TestStyle:
    @pytest.mark.parametrize("path,style", [
        (["body", "h2"], 4), (["body", "b"], 3), (["body"], 2), (["small"], 1),
        (["small", "b"], 1), (["h1", "small"], 4), (["strike"], 1), (["em", "div"], 3),
    ])
    def test_examples(self, path, style):
        assert style_of(path) == style

    def test_page_styles_match_paths(self, golden_html):
        page = PageFrames(parse_html(golden_html))
        assert page.styles == [4, 2, 3, 4, 4, 2]


def _record(doc, kind):
    recs = extract_records(parse_html(doc), "gtin")
    assert recs[0].kind is kind
    return recs[0]


class TestScoring:
    def test_detail_adjacent_candidate(self):
        rec = _record("<title>Acme Drill</title><h1>Acme Drill</h1><span>8806085725072</span>", RecordKind.DETAIL)
        # the title element is itself text frame 0
        assert rec.texts == ("Acme Drill", "Acme Drill", "8806085725072")
        out = score_detail(rec, [NameCandidate("Acme Drill", 1)], "Acme Drill")
        assert [(s.name.raw, s.score) for s in out] == [("Acme Drill", 0.0)]

    def test_detail_filters(self):
        doc = "<h1>Drill</h1><h2>Saw</h2><b>Hammer</b><span>8806085725072</span><h3>After</h3>"
        rec = _record(doc, RecordKind.DETAIL)
        cands = [NameCandidate(t, i) for i, t in enumerate(rec.texts) if i != rec.id_frame_index]
        out = score_detail(rec, cands, None)
        assert [(s.name.raw, s.score) for s in out] == [("Drill", -1.0), ("Saw", 0.0)]
        out = score_detail(rec, cands, "Best Saw Ever")
        assert [(s.name.raw, s.score) for s in out] == [("Saw", 0.0)]

    def test_detail_distance_counts_survivors(self):
        doc = "".join(f"<h2>N{k}</h2>" for k in range(6)) + "<span>8806085725072</span>"
        rec = _record(doc, RecordKind.DETAIL)
        out = score_detail(rec, [NameCandidate(f"N{k}", k) for k in range(6)])
        assert [s.score for s in out] == [-5.0, -4.0, -3.0, -2.0, -1.0, 0.0]

    def test_free_first_three(self):
        doc = "<ul><li><h2>Alpha</h2>Beta<b>8806085725072</b>Gamma Delta<li><b>4047443213525</b></ul>"
        rec = extract_records(parse_html(doc), "gtin")[0]
        cands = [NameCandidate("Alpha", 0), NameCandidate("Beta", 1), NameCandidate("Gamma Delta", 3)]
        assert [(s.name.raw, s.score) for s in score_free(rec, cands)] == [("Alpha", 4.0), ("Beta", 2.0)]

    def test_detail_uses_page_title(self):
        doc = "<title>Acme Drill | Shop</title><h1>Acme Drill</h1><h1>Other Thing</h1><p>8806085725072"
        assert [r.name_raw for r in extract_r1(doc, "u", "gtin")] == ["Acme Drill"]


def test_formula_finder_on_cas_page():
    doc = "<ul><li><b>NaCl</b><i>7647-14-5</i><li><b>H2O</b><i>7732-18-5</i></ul>"
    rows = extract_r1(doc, "u", "cas", finder=formula_finder)
    assert sorted((r.id.canonical, r.name_raw) for r in rows) == [("7647-14-5", "NaCl"), ("7732-18-5", "H2O")]


def test_page_counters(golden_html):
    res = extract_page(golden_html, "u", ["gtin", "cas"])
    assert res.ids == 2 and res.records == 2
    assert res.ids_by_type == {IdType.GTIN: 2, IdType.CAS: 0}
    assert res.rows[IdType.CAS] == []


NAMES = ["Acme Drill", "Bolt Cutter", "Cordless Saw", "Disc Sander", "Edge Trimmer", "Floor Jack"]
WRAPPERS = ["li", "div", "p", "tr", "h3", "section", "span"]


@given(st.integers(2, 12), st.sampled_from(WRAPPERS), st.randoms(use_true_random=False))
@settings(max_examples=60, deadline=None)
def test_k_identical_items(k, wrapper, rnd):
    ids = [gtin(n) for n in rnd.sample(range(1000), k)]
    names = [f"{rnd.choice(NAMES)} Model {n}" for n in range(k)]
    items = "".join(f"<{wrapper}><b>{n}</b> <small>{g}</small></{wrapper}>" for n, g in zip(names, ids))
    doc = f"<body><table>{items}</table></body>" if wrapper == "tr" else f"<body>{items}</body>"
    rows = extract_r1(doc, "u", "gtin")
    expected = {(validate_gtin(g).canonical, n) for g, n in zip(ids, names)}
    assert {(r.id.canonical, r.name_raw) for r in rows} == expected
    assert len(rows) == k


def random_page(rng: random.Random) -> str:
    parts = []
    for _ in range(rng.randint(0, 25)):
        roll = rng.random()
        if roll < 0.2:
            parts.append(f"<b>{gtin(rng.randint(0, 50))}</b>")
        elif roll < 0.5:
            parts.append(f"<{rng.choice(['h1', 'h2', 'b', 'small', 'i'])}>{rng.choice(NAMES)}")
        else:
            parts.append(rng.choice(["<div>", "</div>", "<p>", "<li>", "<br>", "<tr><td>", "filler text", "</b>"]))
    return "".join(parts)


def test_record_invariants():
    rng = random.Random(4)
    for _ in range(400):
        doc = random_page(rng)
        page = PageFrames(parse_html(doc))
        marks = mark_ids(page, "gtin")
        recs = extract_records(page, "gtin")
        # id frames partition the marks; record subtrees are disjoint
        assert sorted(r.start + r.id_frame_index for r in recs) == [i for i, _ in marks]
        spans = sorted((r.start, r.start + len(r.texts)) for r in recs)
        assert all(a[1] <= b[0] for a, b in zip(spans, spans[1:]))
        if len(marks) >= 2:
            assert all(r.kind is RecordKind.FREE for r in recs)
        for r in extract_r1(doc, "u", "gtin"):
            assert validate_gtin(r.id.canonical) == r.id
            if r.record_kind is RecordKind.FREE:
                assert r.score in (1.0, 2.0, 3.0, 4.0)
            else:
                assert r.score <= 0


def test_free_offsets_bounded():
    rng = random.Random(5)
    for _ in range(200):
        page = PageFrames(parse_html(random_page(rng)))
        for rec in extract_records(page, "gtin"):
            if rec.kind is RecordKind.FREE:
                cands = [NameCandidate(t, i) for i, t in enumerate(rec.texts)]
                assert all(s.name.record_offset <= 2 for s in score_free(rec, cands))
