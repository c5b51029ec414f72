import io

import pytest
from hypothesis import given, strategies as st

from ibex.aggregate import OutlierParams
from ibex.config import ENV_VAR, PipelineConfig, load_config, parse_config
from ibex.idspec import IdType, config_for, normalize_name, validate_cas, validate_email, validate_gtin
from ibex.rows import CandidateRow, EntityRow, RecordKind
from ibex.tsvio import (
    R1_HEADER,
    R3_HEADER,
    ReadStats,
    entities_to_text,
    read_entities,
    read_gold,
    read_rows,
    rows_to_text,
    write_gold,
    write_ranked,
)

G = validate_gtin("8806085725072")


def crow(raw, vid=G, score=4.0, url="http://x/"):
    return CandidateRow(vid, normalize_name(raw, config_for(vid.id_type)), raw, score, RecordKind.FREE, url)


class TestRows:
    def test_round_trip(self):
        rows = [crow("Samsung Galaxy S4"), crow("Acme\tDrill", score=-2.5, url="http://y/")]
        text = rows_to_text(rows)
        assert text.splitlines()[0] == R1_HEADER
        assert "Acme Drill" in text and text.count("\t") == 15
        back = list(read_rows(io.StringIO(text)))
        assert back[0] == rows[0]
        assert back[1].name_raw == "Acme Drill" and back[1].score == -2.5

    def test_score_format(self):
        assert rows_to_text([crow("A B", score=4.0)]).splitlines()[1].split("\t")[3] == "4"

    def test_malformed_counted(self):
        lines = [R1_HEADER, "08806085725072\tA\tA\t4\tfree", "123\tA\tA\t4\tfree\tu",
                 "08806085725072\tA\tA\tx\tfree\tu", "08806085725072\tA\tA\t1\tbogus\tu",
                 "08806085725072\t123\t\t1\tfree\tu", "08806085725072\tOk\tOK\t1\tdetail\tu"]
        stats = ReadStats()
        rows = list(read_rows(lines, stats=stats))
        assert stats.malformed == 5 and stats.rows == 1 and rows[0].record_kind is RecordKind.DETAIL

    def test_norm_recomputed(self):
        (r,) = read_rows(["08806085725072\tGalaxy S4\tSTALE\t4\tfree\tu"])
        assert r.name_norm == "GALAXYS"

    def test_type_detection_and_forcing(self):
        lines = ["78123-16-7\tamphetamine\tx\t4\tfree\tu"]
        assert next(read_rows(lines)).id.id_type is IdType.CAS
        assert list(read_rows(lines, "gtin")) == []

    @given(st.text(min_size=1, max_size=30), st.text(min_size=1, max_size=30), st.integers(-10, 4))
    def test_fields_never_split(self, raw, url, score):
        r = crow(raw, score=float(score), url=url)
        # file iteration splits on newlines only
        lines = rows_to_text([r]).split("\n")
        assert len(lines) == 3 and lines[2] == "" and len(lines[1].split("\t")) == 6


class TestEntities:
    def test_round_trip_sorted(self):
        es = [EntityRow(validate_gtin("4047443213525"), "Cable", frozenset({"http://b/", "http://a/x;y"})),
              EntityRow(G, "Galaxy", frozenset({"http://a/"}))]
        text = entities_to_text(es)
        lines = text.splitlines()
        assert lines[0] == R3_HEADER
        assert lines[1].startswith("04047443213525\tCable\thttp://a/x%3By;http://b/")
        back = list(read_entities(io.StringIO(text)))
        assert {e.id: e for e in back} == {e.id: e for e in es}

    def test_malformed(self):
        stats = ReadStats()
        assert list(read_entities([R3_HEADER, "bad\tx\tu", "08806085725072\t\tu"], stats=stats)) == []
        assert stats.malformed == 2


class TestGold:
    def test_round_trip(self):
        gold = {G: "Galaxy", validate_cas("50-00-0"): "formaldehyde"}
        buf = io.StringIO()
        write_gold(buf, gold)
        assert read_gold(io.StringIO(buf.getvalue())) == gold

    def test_skips_bad(self):
        stats = ReadStats()
        assert read_gold(["nope\tx", "a@b.org"], "email", stats) == {}
        assert stats.malformed == 2


def test_ranked():
    buf = io.StringIO()
    write_ranked(buf, [("gmail.com", 3), ("aol\tcom", 1)])
    assert buf.getvalue() == "#rank\tkey\tcount\n1\tgmail.com\t3\n2\taol com\t1\n"


class TestConfig:
    def test_defaults(self):
        cfg = PipelineConfig()
        assert cfg.outlier == OutlierParams(3, 0.30) and cfg.worker_count == 1
        assert cfg.id_types == (IdType.GTIN, IdType.CAS, IdType.DOI, IdType.EMAIL)
        assert cfg.page_size_cap == 4 * 1024 * 1024 and cfg.company_prefix_len == 7

    def test_parse(self):
        cfg = parse_config("# c\ntypes = gtin, cas\noutlier_i = 4\noutlier_p=0.5  # note\nworkers = 3\n"
                           "dedupe_rows = yes\ncompany_prefix_len = 5\n")
        assert cfg.id_types == (IdType.GTIN, IdType.CAS)
        assert cfg.outlier == OutlierParams(4, 0.5) and cfg.worker_count == 3
        assert cfg.dedupe_rows and cfg.company_prefix_len == 5

    @pytest.mark.parametrize("text", ["bogus = 1", "workers = 0", "outlier_p = 1.5", "noequals",
                                      "types = isbn", "dedupe_rows = maybe", "company_prefix_len = 9"])
    def test_rejects(self, text):
        with pytest.raises(ValueError):
            parse_config(text)

    def test_env_var(self, tmp_path, monkeypatch):
        p = tmp_path / "c.conf"
        p.write_text("workers = 5\n")
        monkeypatch.setenv(ENV_VAR, str(p))
        assert load_config().worker_count == 5
        monkeypatch.delenv(ENV_VAR)
        assert load_config() == PipelineConfig()

    def test_overrides(self):
        cfg = PipelineConfig().with_overrides(worker_count=8, dictionary_path=None)
        assert cfg.worker_count == 8 and cfg.dictionary_path is None


def test_email_and_cas_ids_write_canonical():
    e = crow("Jennifer Widom", vid=validate_email("Widom@CS.stanford.edu"))
    assert rows_to_text([e]).splitlines()[1].startswith("widom@cs.stanford.edu\t")
