import random
from collections import Counter

import pytest
from hypothesis import given, strategies as st

from citeworth.citations import PLACEHOLDER, ProcessedSentence, detect_citations, process_sentence
from citeworth.labeler import (
    SPLITS,
    VERSION_SIZES,
    LabeledRecord,
    SentenceType,
    StatsAccumulator,
    TargetTooLarge,
    classify_sentence_type,
    emit_records,
    make_split,
    profile,
    sample_version,
    select_documents,
)


def plain(text="Plain prose here."):
    return ProcessedSentence(text, text, (), False, False)


def test_classification_examples():
    carrier = process_sentence("This statute applies to alimony obligations created by verdict.")
    cite_only = process_sentence("See Allen v. Allen, 265 Ga. 53 (1) (452 SE2d 767) (1995)")
    tanorio = process_sentence("In Tanorio v. Superior Court, 1 N.Mar.I. 4, we determined under what conditions a writ of mandamus may issue.")
    not_cite = process_sentence("The appellant then was granted the right and did file amendments to its assignments of error.")
    assert classify_sentence_type(carrier, cite_only) is SentenceType.TYPE4
    assert classify_sentence_type(tanorio, plain()) is SentenceType.TYPE3
    assert classify_sentence_type(tanorio, cite_only) is SentenceType.TYPE3
    assert classify_sentence_type(not_cite, plain()) is SentenceType.TYPE1
    assert classify_sentence_type(not_cite, tanorio) is SentenceType.TYPE2
    assert classify_sentence_type(not_cite, None) is SentenceType.TYPE1


def test_emit_lacy_example():
    sents = [
        process_sentence("On appeal to this Court, we held that the railroad had acquired by condemnation proceedings a base or conditional fee, terminable on the cesser of the use for railroad purposes."),
        process_sentence("Lacy v. East Broad Top Railroad and Coal Co, 168 Pa. Superior Ct. 351, 77 A 2d 706."),
    ]
    recs = emit_records(sents, "f")
    assert recs == [LabeledRecord("f", 0, sents[0].original, 1)]


def test_emit_trivial_documents():
    assert [r.label for r in emit_records([plain(), plain(), plain()], "f")] == [0, 0, 0]
    inline = process_sentence("In Smith v. Jones, 5 Ill. 2d 7, we held so.")
    assert emit_records([inline], "f") == []


def test_sentence_number_counts_skipped_sentences():
    inline = process_sentence("In Smith v. Jones, 5 Ill. 2d 7, we held so.")
    cite = process_sentence("See Smith v. Jones, 5 Ill. 2d 7.")
    recs = emit_records([inline, plain("A."), cite, plain("B."), plain("C."), inline], "f")
    assert [(r.sentence_number, r.label) for r in recs] == [(1, 1), (3, 0)]


_kinds = st.sampled_from(["plain", "inline", "cite"])


@given(st.lists(_kinds, max_size=20))
def test_emission_replay(kinds):
    make = {
        "plain": lambda i: plain(f"Sentence {i} stands alone."),
        "inline": lambda i: process_sentence(f"In Smith v. Jones, {i + 1} Ill. 2d 7, it was held."),
        "cite": lambda i: process_sentence(f"See Smith v. Jones, {i + 1} Ill. 2d 7."),
    }
    sents = [make[k](i) for i, k in enumerate(kinds)]
    recs = emit_records(sents, "doc")
    assert len({r.sentence_number for r in recs}) == len(recs)
    for r in recs:
        assert PLACEHOLDER not in r.sentence and detect_citations(r.sentence) == []
        nxt = sents[r.sentence_number + 1] if r.sentence_number + 1 < len(sents) else None
        if r.label == 1:
            assert nxt is not None and nxt.is_citation_only
        else:
            assert nxt is None or not nxt.contains_inline_citation
    # Oracle: which positions should produce a record.
    expected = []
    for i, k in enumerate(kinds):
        if k != "plain":
            continue
        nk = kinds[i + 1] if i + 1 < len(kinds) else None
        if nk == "cite":
            expected.append((i, 1))
        elif nk != "inline":
            expected.append((i, 0))
    assert [(r.sentence_number, r.label) for r in recs] == expected


def test_record_json_roundtrip():
    r = LabeledRecord("a/b.json", 3, "Text.", 1)
    assert LabeledRecord.from_json(r.to_json()) == r
    assert list(r.to_json()) == ["file_name", "sentence_number", "sentence", "label"]
    with pytest.raises(ValueError):
        LabeledRecord("f", 0, "x", 2)


def test_split_small_and_deterministic():
    docs = [f"d{i}" for i in range(10)]
    s = make_split(docs, seed=3)
    assert s.counts() == {"train": 8, "dev": 1, "test": 1}
    assert make_split(docs, seed=3).assignment == s.assignment
    assert make_split(list(reversed(docs)), seed=3).assignment == s.assignment
    with pytest.raises(ValueError):
        make_split(["a", "a"])


@given(st.integers(0, 400), st.integers(0, 2**32))
def test_split_partition(n, seed):
    docs = [f"doc-{i}" for i in range(n)]
    s = make_split(docs, seed)
    assert set(s.assignment) == set(docs)
    members = [set(s.members(name)) for name in SPLITS]
    assert sum(len(m) for m in members) == n
    assert not (members[0] & members[1] or members[0] & members[2] or members[1] & members[2])
    counts = s.counts()
    assert abs(counts["train"] - 0.8 * n) <= 1 and abs(counts["dev"] - 0.1 * n) <= 1


def test_split_1000_fractions():
    s = make_split([f"case-{i}" for i in range(1000)], seed=11)
    c = s.counts()
    for name, target in zip(SPLITS, (0.8, 0.1, 0.1)):
        assert abs(c[name] / 1000 - target) <= 0.005


def _records(n_docs, seed=0, rate=0.0587):
    rng = random.Random(seed)
    out = []
    for d in range(n_docs):
        for i in range(rng.randint(5, 60)):
            out.append(LabeledRecord(f"doc{d:05d}", i, "x" * rng.randint(5, 200), int(rng.random() < rate)))
    return out


def test_sample_version_identity_and_empty():
    recs = _records(30)
    assert list(sample_version(recs, len(recs))) == recs
    assert list(sample_version(recs, None)) == recs
    assert list(sample_version(recs, 0)) == []
    with pytest.raises(TargetTooLarge):
        list(sample_version(recs, len(recs) + 1))


def test_sample_version_preserves_rate_and_whole_documents():
    recs = _records(4000, seed=5)
    target = len(recs) // 3
    out = list(sample_version(recs, target, seed=9))
    rate_in = sum(r.label for r in recs) / len(recs)
    rate_out = sum(r.label for r in out) / len(out)
    assert abs(rate_out - rate_in) < 0.005
    assert target <= len(out) < target + 60
    by_doc_in = Counter(r.file_name for r in recs)
    by_doc_out = Counter(r.file_name for r in out)
    assert all(by_doc_out[d] == by_doc_in[d] for d in by_doc_out)
    assert list(sample_version(recs, target, seed=9)) == out


def test_version_sizes():
    assert VERSION_SIZES == {"small": 1_000_000, "medium": 10_000_000, "large": None}


def test_select_documents_two_million_to_small():
    rng = random.Random(1)
    sizes = [(f"d{i}", rng.randint(1, 63)) for i in range(62_500)]
    total = sum(n for _, n in sizes)
    assert total > 1_900_000
    chosen = select_documents(sizes, VERSION_SIZES["small"], seed=4)
    got = sum(n for d, n in sizes if d in chosen)
    assert abs(got - 1_000_000) <= 20_000


def test_profile_small_examples():
    stats = profile([LabeledRecord("a", 0, "x" * 10, 1), LabeledRecord("a", 1, "y" * 20, 0)])
    assert (stats.avg_char_len_worthy, stats.avg_char_len_nonworthy) == (10.0, 20.0)
    empty = profile([])
    assert empty.total_sentences == 0 and empty.avg_char_len_worthy is None and empty.sentences_per_document is None


def test_profile_matches_counting_oracle():
    recs = _records(40, seed=2)[:1000]
    split = make_split(sorted({r.file_name for r in recs}), seed=1)
    stats = profile(recs, split.assignment)
    pos = [r for r in recs if r.label == 1]
    neg = [r for r in recs if r.label == 0]
    assert stats.total_sentences == len(recs) == 1000
    assert stats.citation_worthy_count + stats.non_citation_worthy_count == stats.total_sentences
    assert stats.citation_worthy_count == len(pos)
    assert stats.avg_char_len_worthy == pytest.approx(sum(len(r.sentence) for r in pos) / len(pos))
    assert stats.avg_char_len_nonworthy == pytest.approx(sum(len(r.sentence) for r in neg) / len(neg))
    files = {r.file_name for r in recs}
    assert stats.total_files == len(files)
    assert stats.sentences_per_document == pytest.approx(1000 / len(files))
    assert sum(stats.split_sentences.values()) == 1000
    assert sum(stats.split_files.values()) == len(files)
    for name in SPLITS:
        assert stats.split_sentences[name] == sum(1 for r in recs if split[r.file_name] == name)


def test_stats_accumulator_merge_is_associative():
    recs = _records(20, seed=8)
    a, b = StatsAccumulator(), StatsAccumulator()
    for i, r in enumerate(recs):
        (a if i % 2 else b).add(r, "train")
    whole = StatsAccumulator()
    for r in recs:
        whole.add(r, "train")
    assert a.merge(b).result() == whole.result()
