"""Lexical resources backing the rule annotators: entity gazetteers, per-class
term dictionaries for topic voting, and ordered keyword-override lists.

All resources are plain text, one entry per line, UTF-8. Lines are
NFC-normalized on load; ``#`` starts a comment line and blank lines are
ignored.
"""

from __future__ import annotations

import unicodedata
import warnings
from dataclasses import dataclass, field
from pathlib import Path

from .corpus import ParseError, tokenize


def strip_diacritics(text: str) -> str:
    """Remove combining marks (NFD decompose, drop Mn, recompose)."""
    decomposed = unicodedata.normalize("NFD", text)
    kept = "".join(ch for ch in decomposed if unicodedata.category(ch) != "Mn")
    return unicodedata.normalize("NFC", kept)


def normalize_token(token: str, lowercase: bool = False, fold_diacritics: bool = False) -> str:
    token = unicodedata.normalize("NFC", token)
    if fold_diacritics:
        token = strip_diacritics(token)
    if lowercase:
        token = token.lower()
    return token


def _data_lines(text: str):
    for lineno, line in enumerate(text.split("\n"), 1):
        line = unicodedata.normalize("NFC", line).strip()
        if not line or line.startswith("#"):
            continue
        yield lineno, line


@dataclass(frozen=True)
class Gazetteer:
    """Name list for one entity type, stored as normalized token tuples.

    ``n_dropped`` records how many input names the length filter removed;
    it is bookkeeping only and does not affect equality.
    """

    etype: str
    entries: frozenset[tuple[str, ...]]
    lowercase: bool = False
    fold_diacritics: bool = False
    n_dropped: int = field(default=0, compare=False)

    def __post_init__(self):
        if not self.etype:
            raise ValueError("entity type must be non-empty")
        for entry in self.entries:
            if not entry:
                raise ValueError("gazetteer entries must have at least one token")

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def max_entry_tokens(self) -> int:
        return max((len(e) for e in self.entries), default=0)

    def normalize(self, token: str) -> str:
        return normalize_token(token, self.lowercase, self.fold_diacritics)

    def __contains__(self, tokens) -> bool:
        return tuple(self.normalize(t) for t in tokens) in self.entries


def build_gazetteer(
    etype: str,
    names,
    min_token_length: int = 1,
    lowercase: bool = False,
    fold_diacritics: bool = False,
) -> Gazetteer:
    """Tokenize raw name strings into a Gazetteer.

    A name is dropped when any of its tokens is shorter than
    ``min_token_length`` characters; short function words inside names
    would otherwise cause high-noise matches.
    """
    if min_token_length < 1:
        raise ValueError("min_token_length must be at least 1")
    entries = set()
    dropped = 0
    for name in names:
        tokens = tuple(
            normalize_token(t, lowercase, fold_diacritics) for t in tokenize(name)
        )
        if not tokens:
            continue
        if any(len(t) < min_token_length for t in tokens):
            dropped += 1
            continue
        entries.add(tokens)
    if not entries:
        warnings.warn(f"gazetteer for {etype} is empty after filtering", stacklevel=2)
    return Gazetteer(
        etype=etype,
        entries=frozenset(entries),
        lowercase=lowercase,
        fold_diacritics=fold_diacritics,
        n_dropped=dropped,
    )


def load_gazetteer(
    path,
    etype: str,
    min_token_length: int = 1,
    lowercase: bool = False,
    fold_diacritics: bool = False,
) -> Gazetteer:
    text = Path(path).read_text(encoding="utf-8")
    names = [line for _, line in _data_lines(text)]
    return build_gazetteer(etype, names, min_token_length, lowercase, fold_diacritics)


@dataclass(frozen=True)
class TopicLexicon:
    """Per-class term dictionaries for the majority-vote topic annotator.

    Terms are stored as space-joined normalized 1- or 2-token grams;
    matching is case-insensitive by construction (terms and sentence
    grams are both lowercased). An empty lexicon is allowed and makes
    every vote abstain.
    """

    terms: dict[str, frozenset[str]] = field(default_factory=dict)

    def __post_init__(self):
        for label, grams in self.terms.items():
            if not label:
                raise ValueError("class labels must be non-empty")
            for gram in grams:
                if not gram:
                    raise ValueError(f"class {label!r} has an empty term")
                if len(gram.split(" ")) > 2:
                    raise ValueError(
                        f"class {label!r} term {gram!r} is longer than 2 tokens"
                    )

    @property
    def classes(self) -> tuple[str, ...]:
        return tuple(sorted(self.terms))

    @property
    def ngram_lengths(self) -> tuple[int, ...]:
        lengths = {len(g.split(" ")) for grams in self.terms.values() for g in grams}
        return tuple(sorted(lengths))

    def vote_counts(self, grams) -> dict[str, int]:
        """Per-class count of distinct dictionary terms present in ``grams``."""
        present = set(grams)
        return {label: len(self.terms[label] & present) for label in self.classes}


def normalize_term(term: str) -> str:
    """Canonical dictionary/gram form: NFC, lowercase, single spaces."""
    return " ".join(t.lower() for t in tokenize(term))


def build_topic_lexicon(class_terms: dict) -> TopicLexicon:
    """Normalize raw term lists into a TopicLexicon.

    Terms longer than two tokens cannot participate in the 1-/2-gram
    vote; they are dropped with a warning rather than rejected.
    """
    terms = {}
    for label, raw_terms in class_terms.items():
        grams = set()
        for raw in raw_terms:
            gram = normalize_term(raw)
            if not gram:
                continue
            if len(gram.split(" ")) > 2:
                warnings.warn(
                    f"dropping {label} term {raw!r}: longer than 2 tokens",
                    stacklevel=2,
                )
                continue
            grams.add(gram)
        terms[label] = frozenset(grams)
    return TopicLexicon(terms=terms)


def load_topic_lexicon(dict_dir, classes=None) -> TopicLexicon:
    """Load one ``<class>.txt`` term file per class from a directory.

    With ``classes`` given, exactly those files are required and a missing
    one is an error naming the class; otherwise classes are inferred from
    the files present.
    """
    dict_dir = Path(dict_dir)
    if classes is None:
        files = sorted(dict_dir.glob("*.txt"))
        if not files:
            raise ParseError(f"no *.txt dictionaries found in {dict_dir}")
    else:
        files = []
        for label in classes:
            path = dict_dir / f"{label}.txt"
            if not path.is_file():
                raise ParseError(f"missing dictionary for class {label!r}: {path}")
            files.append(path)
    class_terms = {}
    for path in files:
        text = path.read_text(encoding="utf-8")
        class_terms[path.stem] = [line for _, line in _data_lines(text)]
    return build_topic_lexicon(class_terms)


def load_keyword_overrides(path) -> tuple[tuple[str, str], ...]:
    """Ordered ``keyword<TAB>class`` pairs; file order is match priority."""
    text = Path(path).read_text(encoding="utf-8")
    pairs = []
    seen = set()
    for lineno, line in _data_lines(text):
        parts = line.split("\t")
        if len(parts) != 2 or not parts[0].strip() or not parts[1].strip():
            raise ParseError(f"line {lineno}: expected 'keyword<TAB>class', got {line!r}")
        keyword = normalize_term(parts[0])
        label = parts[1].strip()
        if not keyword:
            raise ParseError(f"line {lineno}: keyword is all punctuation")
        if keyword in seen:
            raise ParseError(f"line {lineno}: duplicate keyword {keyword!r}")
        seen.add(keyword)
        pairs.append((keyword, label))
    return tuple(pairs)
