import re

import pytest
from hypothesis import assume, given, strategies as st

from citeworth.clean import (
    _CHAR_MAP,
    AbbreviationTable,
    CleanConfig,
    EmptyAfterCleaning,
    clean_opinion,
    clean_text,
    normalize_abbreviations,
    normalize_abbreviations_counted,
)
from citeworth.ingest import CaseDocument
from citeworth.segment import split_text

TABLE = AbbreviationTable.default()

# Tokens listed for normalization ("Eq." appears twice in the source list).
LISTED = (
    "Inc. Co. Ltd. No. Vol. Corp. Viz. Mfg. Dist. Commn. Sec. Pet. Com. Eq. Doc. Ins. Ex. Cf. "
    "Civ. a.m. p.m. e.g. Pvt. Ms. Mr. Jr. Sr. Dr. Al. A. Q. Cont. Aff. Cert. Art. Bros. Ref. "
    "Mrs. Ed. Nom. Ch. D.C. i.e."
).split()


def _apply_regions(original: str, regions) -> str:
    """Character-level oracle: keep every character not inside a removed region."""
    dead = set()
    for s, e, _ in regions:
        dead.update(range(s, e))
    return "".join(ch for i, ch in enumerate(original) if i not in dead)


def test_table_covers_listed_tokens():
    assert len(set(LISTED)) == 43
    for tok in LISTED:
        assert TABLE.is_key(tok), tok
    for key, value in TABLE.entries.items():
        assert key.endswith(".") and "." not in value


def test_documented_mappings():
    src = "admissible under Code (1427), Art. 4335, sec. 3459, and was produced by mr. Alex"
    assert normalize_abbreviations(src) == "admissible under Code (1427), Article 4335, section 3459, and was produced by mr Alex"


def test_inc_mapping_and_untouched_text():
    assert normalize_abbreviations("Smith v. Jones, Inc. lost.") == "Smith v. Jones, Incorporated lost."
    assert normalize_abbreviations("No abbreviations here") == "No abbreviations here"


@pytest.mark.parametrize(
    "src, out",
    [
        ("Part. Art.", "Part. Article"),
        ("See Sec. 5 and sec. 6.", "See Section 5 and section 6."),
        ("at 9 a.m. on", "at 9 am on"),
        ("in D.C. today", "in DC today"),
        ("by A. Smith", "by A Smith"),
        ("the a. b. c. list", "the a. b. c. list"),
        ("e.g., i.e.", "eg, ie"),
        ("No.5", "No.5"),
    ],
)
def test_token_boundaries_and_case(src, out):
    assert normalize_abbreviations(src) == out


def _oracle_normalize(text: str) -> str:
    """Scan left to right, trying the longest key first at each token start."""
    keys = sorted(TABLE.entries, key=len, reverse=True)
    out, i = [], 0
    while i < len(text):
        prev = text[i - 1] if i else ""
        hit = None
        if not prev or not (prev.isalnum() or prev in "._"):
            for key in keys:
                cand = text[i:i + len(key)]
                if len(cand) < len(key):
                    continue
                if len(key) == 2:
                    ok = cand == key
                else:
                    ok = cand[1:] == key[1:] and cand[0].lower() == key[0].lower()
                nxt = text[i + len(key):i + len(key) + 1]
                if ok and not (nxt and (nxt.isalnum() or nxt == "_")):
                    hit = cand
                    break
        if hit:
            out.append(TABLE.replacement(hit))
            i += len(hit)
        else:
            out.append(text[i])
            i += 1
    return "".join(out)


_words = st.sampled_from(LISTED + ["Part.", "the", "court", "Mr", "art.", "INC.", "sec.", "x", "12", "(", ")", ","])


@given(st.lists(_words, max_size=12), st.lists(st.sampled_from([" ", "", "  ", "\n"]), min_size=12, max_size=12))
def test_normalize_matches_oracle(words, seps):
    text = "".join(w + s for w, s in zip(words, seps))
    got, count = normalize_abbreviations_counted(text)
    assert got == _oracle_normalize(text)
    # No standalone key survives and a second pass changes nothing.
    assert TABLE.pattern.search(got) is None
    assert normalize_abbreviations(got) == got
    assert count == len(TABLE.pattern.findall(text))


def test_custom_table_from_file(tmp_path):
    path = tmp_path / "abbr.txt"
    path.write_text("# comment\nAppx.\tappendix\nSupp. supp\n")
    table = AbbreviationTable.from_file(path)
    assert normalize_abbreviations("See Appx. 3 and supp. 4", table) == "See Appendix 3 and supp 4"
    with pytest.raises(ValueError):
        AbbreviationTable({"Bad": "x"})


def test_footnote_marker_removed():
    src = "The rule applies.17 We affirm."
    res = clean_text(src)
    assert res.text == "The rule applies. We affirm."
    assert [r[2] for r in res.removed_regions] == ["footnote"]
    assert _apply_regions(src, res.removed_regions) == res.text


def test_repeated_punctuation():
    assert clean_text("We affirm..").text == "We affirm."
    assert clean_text("Why?? Because!!").text == "Why? Because!"


def test_identity_on_clean_text():
    res = clean_text("The court held that the lease was void. We reverse.")
    assert res.text == "The court held that the lease was void. We reverse."
    assert res.removed_regions == ()


def test_page_lines_and_star_pages():
    src = "The court held\n\n123\n\nthat it was [*45] void.[3] Done."
    res = clean_text(src)
    assert res.text == "The court held\n\n\nthat it was void. Done."
    assert _apply_regions(src, res.removed_regions) == res.text
    assert {r[2] for r in res.removed_regions} == {"page_number", "footnote"}


def test_control_chars_and_quotes_normalized():
    src = "He said “no”.\x07 It’s over now﻿."
    res = clean_text(src)
    assert res.text == "He said \"no\". It's over now."


def test_pin_cites_survive():
    src = "See People v. Smith, 45 Ill. 2d 123, 125 (1970)."
    assert clean_text(src).text == src


def test_excerpt_removed_with_citation():
    quote = "the owner " * 25
    src = f'The court noted "{quote.strip()}." Smith v. Jones, 45 Ill. 2d 123 (1970). We agree.'
    res = clean_text(src)
    assert res.text == "The court noted. We agree."
    assert "excerpt" in {r[2] for r in res.removed_regions}
    short = 'The court noted "the owner is liable." Smith v. Jones, 45 Ill. 2d 123. We agree.'
    assert clean_text(short).text == short
    assert clean_text(src, config=CleanConfig(excerpt_min_chars=10_000)).text == normalize_abbreviations(src)


def test_placeholder_never_survives_cleaning():
    assert "[CITATION_SPAN]" not in clean_text("We held [CITATION_SPAN] that.").text


def test_empty_after_cleaning():
    with pytest.raises(EmptyAfterCleaning):
        clean_opinion(CaseDocument("1", "f", "ill", None, "\n12\n\x00\n"))


_noise_piece = st.sampled_from([
    "The court", "held", "that", "Art.", "sec.", "it", "was", "void.", "We", "affirm..", "[3]", "[*12]",
    "\n\n45\n\n", "\x0c", "’s", "no.17", "Co.", "(1970)", "??", "Mr.", "e.g.", " ", "\"",
])


@given(st.lists(_noise_piece, min_size=1, max_size=25))
def test_cleaning_properties(pieces):
    src = " ".join(pieces)
    res = clean_text(src)
    regions = res.removed_regions
    assert all(s < e for s, e, _ in regions)
    assert all(a[1] <= b[0] for a, b in zip(regions, regions[1:])), "regions must be sorted and disjoint"
    assert normalize_abbreviations(_apply_regions(src.translate(_CHAR_MAP), regions)) == res.text
    assert TABLE.pattern.search(res.text) is None
    assume(res.text.strip())
    again = clean_text(res.text)
    assert again.text == res.text


def test_cleaning_does_not_merge_sentences():
    from citeworth.synthetic import SyntheticConfig, generate_corpus

    docs = list(generate_corpus(SyntheticConfig(n_docs=40, noise_rate=0.3, seed=3)))
    for d in docs:
        noisy = clean_text(d.text).text
        clean_sentences = [re.sub(r" ?\[\*?\d+\]", "", s).replace("’", "'") for s in d.sentences]
        oracle = clean_text(" ".join(clean_sentences)).text
        assert len(split_text(noisy)) >= len(split_text(oracle))
