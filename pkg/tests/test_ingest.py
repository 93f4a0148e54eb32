import gzip
import json

import pytest
from hypothesis import given, strategies as st

from citeworth.ingest import (
    CaseDocument,
    DocumentFilter,
    InputSchema,
    MalformedRecord,
    MissingOpinion,
    SourceUnreadable,
    case_record,
    parse_case,
    repair_utf8,
    stream_corpus,
    write_jsonl,
)


def _bytes(rec) -> bytes:
    return json.dumps(rec).encode()


def test_well_formed_record_passes_through():
    doc = parse_case(_bytes(case_record("7", ["The court held X."], ["1 U.S. 1"])))
    assert doc.opinion_text == "The court held X."
    assert doc.metadata_citations == ("1 U.S. 1",)
    assert doc.case_id == "7" and doc.jurisdiction == "ill" and doc.decision_year == 1950


def test_missing_opinion():
    rec = case_record("7", ["x"])
    del rec["casebody"]
    with pytest.raises(MissingOpinion):
        parse_case(_bytes(rec))


@pytest.mark.parametrize("raw", [b"{not json", b"[1, 2]", b'{"casebody": {"opinions": "x"}}'])
def test_malformed(raw):
    with pytest.raises(MalformedRecord):
        parse_case(raw)


def test_only_opinions_are_kept():
    rec = case_record("1", ["Majority text.", "Dissent text."])
    rec["casebody"]["data"]["head_matter"] = "Syllabus. Headnote 1."
    doc = parse_case(_bytes(rec))
    assert doc.opinion_text == "Majority text.\n\nDissent text."
    assert "Syllabus" not in doc.opinion_text


def test_flat_schema_and_custom_schema():
    flat = {"case_id": "9", "opinion_text": "Plain.", "citations": ["2 Ill. 3"], "jurisdiction": "mass", "decision_year": 1901}
    doc = parse_case(_bytes(flat))
    assert (doc.case_id, doc.opinion_text, doc.metadata_citations, doc.jurisdiction, doc.decision_year) == (
        "9", "Plain.", ("2 Ill. 3",), "mass", 1901,
    )
    schema = InputSchema(case_id="meta.key", opinions="body")
    doc = parse_case(_bytes({"meta": {"key": "k"}, "body": "Text."}), schema)
    assert doc.case_id == "k" and doc.opinion_text == "Text."


def _replace_invalid_oracle(raw: bytes) -> tuple[str, int]:
    """Byte-level oracle: walk the buffer and validate each UTF-8 sequence by hand."""
    out, n, i = [], 0, 0
    while i < len(raw):
        b = raw[i]
        if b < 0x80:
            out.append(chr(b))
            i += 1
            continue
        if 0xC2 <= b <= 0xDF:
            need, lo, hi = 1, 0x80, 0xBF
        elif 0xE0 <= b <= 0xEF:
            need = 2
            lo, hi = {0xE0: (0xA0, 0xBF), 0xED: (0x80, 0x9F)}.get(b, (0x80, 0xBF))
        elif 0xF0 <= b <= 0xF4:
            need = 3
            lo, hi = {0xF0: (0x90, 0xBF), 0xF4: (0x80, 0x8F)}.get(b, (0x80, 0xBF))
        else:
            out.append("\ufffd")
            n += 1
            i += 1
            continue
        j = i + 1
        ok = True
        for k in range(need):
            if j >= len(raw):
                ok = False
                break
            c = raw[j]
            if not ((lo if k == 0 else 0x80) <= c <= (hi if k == 0 else 0xBF)):
                ok = False
                break
            j += 1
        if ok:
            out.append(raw[i:j].decode("utf-8"))
            i = j
        else:
            out.append("\ufffd")
            n += 1
            i = j if j > i + 1 else i + 1
    return "".join(out), n


def test_invalid_utf8_replaced():
    raw = b'{"id": "1", "opinion_text": "caf\xc3 \xff good"}'
    doc = parse_case(raw)
    assert doc.opinion_text == "caf\ufffd \ufffd good"
    assert doc.repairs == 2
    assert repair_utf8(b"ab\xc3\x28cd") == _replace_invalid_oracle(b"ab\xc3\x28cd")


@given(st.binary(max_size=60))
def test_repair_matches_byte_oracle(raw):
    text, n = repair_utf8(raw)
    assert (text, n) == _replace_invalid_oracle(raw)
    assert text == raw.decode("utf-8", errors="replace")
    text.encode("utf-8")


def test_stream_empty_directory(tmp_path):
    stream = stream_corpus(tmp_path)
    assert list(stream) == []
    assert stream.counters.encountered == 0 and stream.counters.skipped == 0


def test_stream_three_files_in_lexicographic_order(tmp_path, write_json):
    for cid in ("c", "a", "b"):
        write_json(f"{cid}.json", case_record(cid, [f"Opinion {cid}."]))
    docs = list(stream_corpus(tmp_path))
    assert [d.case_id for d in docs] == ["a", "b", "c"]
    assert [d.file_name for d in docs] == ["a.json", "b.json", "c.json"]


def test_stream_counts_malformed(tmp_path, write_json):
    write_json("a.json", case_record("a", ["A."]))
    write_json("b.json", case_record("b", ["B."]))
    (tmp_path / "c.json").write_text("{broken")
    stream = stream_corpus(tmp_path)
    docs = list(stream)
    assert len(docs) == 2
    assert stream.counters.malformed == 1
    assert stream.counters.yielded + stream.counters.skipped == stream.counters.encountered


def test_stream_jsonl_gzip_filter_and_limit(tmp_path):
    recs = [case_record(str(i), [f"Text {i}."], jurisdiction="ill" if i % 2 else "mass") for i in range(6)]
    recs.insert(2, {"id": "x"})
    path = tmp_path / "corpus.jsonl.gz"
    with gzip.open(path, "wt", encoding="utf-8") as fh:
        for r in recs:
            fh.write(json.dumps(r) + "\n")
    stream = stream_corpus(path, DocumentFilter(frozenset({"ill"})))
    docs = list(stream)
    assert [d.case_id for d in docs] == ["1", "3", "5"]
    assert docs[0].file_name == "corpus.jsonl.gz:0000002"
    c = stream.counters
    assert (c.encountered, c.missing_opinion, c.filtered) == (7, 1, 3)
    assert c.yielded + c.skipped == c.encountered
    assert len(list(stream_corpus(path, max_docs=2))) == 2


def test_stream_is_deterministic(tmp_path):
    write_jsonl((case_record(str(i), [f"T{i}."]) for i in range(20)), tmp_path / "x.jsonl")
    a = list(stream_corpus(tmp_path))
    b = list(stream_corpus(tmp_path))
    assert a == b


def test_unreadable_source(tmp_path):
    with pytest.raises(SourceUnreadable):
        stream_corpus(tmp_path / "missing")


def test_documents_are_immutable():
    doc = CaseDocument("1", "f", "ill", 1900, "x")
    with pytest.raises(AttributeError):
        doc.opinion_text = "y"
    with pytest.raises(MalformedRecord):
        CaseDocument("", "f", "ill", 1900, "x")
