"""Gazetteers, topic term dictionaries, and keyword overrides."""

from __future__ import annotations

import warnings

import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from weaksup.corpus import ParseError
from weaksup.lexicon import (
    Gazetteer,
    TopicLexicon,
    build_gazetteer,
    build_topic_lexicon,
    load_gazetteer,
    load_keyword_overrides,
    load_topic_lexicon,
    normalize_term,
    normalize_token,
    strip_diacritics,
)


class TestNormalization:
    def test_strip_diacritics(self):
        assert strip_diacritics("Yorùbá") == "Yoruba"
        assert strip_diacritics("ọjọ́") == "ojo"  # dot-below is a combining mark too

    def test_strip_diacritics_plain_text_unchanged(self):
        assert strip_diacritics("Kano") == "Kano"

    def test_normalize_token_flags(self):
        assert normalize_token("Kano") == "Kano"
        assert normalize_token("Kano", lowercase=True) == "kano"
        assert normalize_token("àti", fold_diacritics=True) == "ati"
        assert normalize_token("Àti", lowercase=True, fold_diacritics=True) == "ati"

    def test_normalize_token_nfc(self):
        assert normalize_token("é") == "é"

    @settings(max_examples=100)
    @given(st.text(max_size=20))
    def test_strip_diacritics_idempotent(self, text):
        once = strip_diacritics(text)
        assert strip_diacritics(once) == once

    def test_normalize_term(self):
        assert normalize_term("United  Nations") == "united nations"
        assert normalize_term("Kano,") == "kano ,"
        assert normalize_term("") == ""


class TestGazetteer:
    def test_build_tokenizes_names(self):
        gaz = build_gazetteer("LOC", ["Kano", "Ras al Khaimah"])
        assert ("Kano",) in gaz.entries
        assert ("Ras", "al", "Khaimah") in gaz.entries
        assert gaz.max_entry_tokens == 3

    def test_min_length_drops_whole_name(self):
        # one short token disqualifies the full multi-token name
        gaz = build_gazetteer("ORG", ["Bank of Ghana", "Dangote"], min_token_length=4)
        assert len(gaz) == 1
        assert gaz.n_dropped == 1
        assert ("Dangote",) in gaz.entries

    def test_lowercase_matching(self):
        gaz = build_gazetteer("LOC", ["KANO"], lowercase=True)
        assert ["kano"] in gaz
        assert ["Kano"] in gaz

    def test_case_sensitive_by_default(self):
        gaz = build_gazetteer("LOC", ["Kano"])
        assert ["Kano"] in gaz
        assert ["kano"] not in gaz

    def test_diacritic_folding(self):
        gaz = build_gazetteer("PER", ["Adélékè"], fold_diacritics=True)
        assert ["Adeleke"] in gaz
        assert ["Adélékè"] in gaz

    def test_duplicate_entries_collapse(self):
        gaz = build_gazetteer("LOC", ["Kano", "kano"], lowercase=True)
        assert len(gaz) == 1

    def test_empty_gazetteer_warns(self):
        with pytest.warns(UserWarning, match="empty"):
            gaz = build_gazetteer("LOC", ["ab"], min_token_length=3)
        assert len(gaz) == 0
        assert gaz.n_dropped == 1

    def test_order_independent(self):
        names = ["Kano", "Lagos", "Abuja"]
        assert build_gazetteer("LOC", names) == build_gazetteer("LOC", names[::-1])

    def test_min_length_validation(self):
        with pytest.raises(ValueError):
            build_gazetteer("LOC", ["Kano"], min_token_length=0)

    def test_rejects_empty_entry(self):
        with pytest.raises(ValueError):
            Gazetteer(etype="LOC", entries=frozenset({()}))

    def test_load_skips_comments_and_blanks(self, tmp_path):
        path = tmp_path / "loc.txt"
        path.write_text("# header\nKano\n\n  Lagos  \n# done\n", encoding="utf-8")
        gaz = load_gazetteer(path, "LOC")
        assert gaz.entries == frozenset({("Kano",), ("Lagos",)})

    @settings(max_examples=50)
    @given(st.lists(st.text(alphabet="abcáé", min_size=1, max_size=6), max_size=10))
    def test_normalized_entries_always_match_themselves(self, names):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            gaz = build_gazetteer("PER", names, lowercase=True, fold_diacritics=True)
        for entry in gaz.entries:
            assert list(entry) in gaz


class TestTopicLexicon:
    def test_vote_counts_distinct_terms(self):
        lex = build_topic_lexicon(
            {"Sport": ["kwallo", "wasan kwallo"], "Health": ["cutar"]}
        )
        grams = ["kwallo", "wasan kwallo", "cutar", "kwallo"]
        assert lex.vote_counts(grams) == {"Health": 1, "Sport": 2}

    def test_repeated_gram_counts_once(self):
        lex = build_topic_lexicon({"Sport": ["kwallo"]})
        assert lex.vote_counts(["kwallo", "kwallo", "kwallo"]) == {"Sport": 1}

    def test_classes_sorted(self):
        lex = build_topic_lexicon({"b": [], "a": [], "c": []})
        assert lex.classes == ("a", "b", "c")

    def test_ngram_lengths(self):
        lex = build_topic_lexicon({"Sport": ["kwallo", "wasan kwallo"]})
        assert lex.ngram_lengths == (1, 2)

    def test_empty_lexicon_allowed(self):
        lex = TopicLexicon()
        assert lex.classes == ()
        assert lex.vote_counts(["anything"]) == {}

    def test_terms_normalized(self):
        lex = build_topic_lexicon({"Sport": ["  Wasan   KWALLO "]})
        assert lex.terms["Sport"] == frozenset({"wasan kwallo"})

    def test_long_terms_dropped_with_warning(self):
        with pytest.warns(UserWarning, match="longer than 2 tokens"):
            lex = build_topic_lexicon({"Sport": ["gasar cin kofin duniya", "kwallo"]})
        assert lex.terms["Sport"] == frozenset({"kwallo"})

    def test_direct_construction_rejects_long_terms(self):
        with pytest.raises(ValueError):
            TopicLexicon(terms={"Sport": frozenset({"a b c"})})

    def test_load_from_directory(self, tmp_path):
        (tmp_path / "Sport.txt").write_text("kwallo\n# note\n", encoding="utf-8")
        (tmp_path / "Health.txt").write_text("cutar\nasibiti\n", encoding="utf-8")
        lex = load_topic_lexicon(tmp_path)
        assert lex.classes == ("Health", "Sport")
        assert lex.terms["Health"] == frozenset({"cutar", "asibiti"})

    def test_load_with_explicit_classes(self, tmp_path):
        (tmp_path / "Sport.txt").write_text("kwallo\n", encoding="utf-8")
        with pytest.raises(ParseError, match="Health"):
            load_topic_lexicon(tmp_path, classes=["Sport", "Health"])

    def test_load_empty_directory_is_error(self, tmp_path):
        with pytest.raises(ParseError):
            load_topic_lexicon(tmp_path)


class TestKeywordOverrides:
    def test_file_order_preserved(self, tmp_path):
        path = tmp_path / "stage1.tsv"
        path.write_text("zaben\tPolitics\ncutar\tHealth\n", encoding="utf-8")
        assert load_keyword_overrides(path) == (
            ("zaben", "Politics"),
            ("cutar", "Health"),
        )

    def test_keywords_normalized(self, tmp_path):
        path = tmp_path / "stage1.tsv"
        path.write_text("CUTAR\tHealth\n", encoding="utf-8")
        assert load_keyword_overrides(path) == (("cutar", "Health"),)

    def test_duplicate_keyword_rejected(self, tmp_path):
        path = tmp_path / "stage1.tsv"
        path.write_text("cutar\tHealth\ncutar\tNigeria\n", encoding="utf-8")
        with pytest.raises(ParseError, match="duplicate"):
            load_keyword_overrides(path)

    def test_malformed_line_rejected(self, tmp_path):
        path = tmp_path / "stage1.tsv"
        path.write_text("just-a-keyword\n", encoding="utf-8")
        with pytest.raises(ParseError, match="line 1"):
            load_keyword_overrides(path)

    def test_comments_skipped(self, tmp_path):
        path = tmp_path / "stage1.tsv"
        path.write_text("# priority list\ncutar\tHealth\n", encoding="utf-8")
        assert load_keyword_overrides(path) == (("cutar", "Health"),)
