"""Rule-based weak annotators.

NER rules produce token spans: gazetteer lookup (longest match first) and a
keyword-anchored date heuristic. Span layers from several rules are merged
into one BIO2 layer, longer spans winning. Topic rules assign a class per
sentence: an ordered keyword-override stage followed by a dictionary
majority vote with seeded tie breaking.

Annotators follow the transformer protocol: construction stores parameters
verbatim, ``transform`` maps a Dataset to a new Dataset with the weak label
layer filled in. They learn nothing from data, so ``fit`` only validates.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .corpus import NER, TOPIC, Dataset, Span, spans_to_tags
from .lexicon import Gazetteer, TopicLexicon, normalize_token

DEFAULT_TYPE_PRIORITY = ("PER", "LOC", "ORG", "DATE")


@dataclass(frozen=True)
class GazetteerMatcher:
    """Greedy longest-match scan of one gazetteer over a token sequence."""

    gazetteer: Gazetteer

    @property
    def etype(self) -> str:
        return self.gazetteer.etype

    def match(self, words) -> tuple[Span, ...]:
        words = tuple(words)
        norm = [self.gazetteer.normalize(w) for w in words]
        max_len = self.gazetteer.max_entry_tokens
        spans = []
        i = 0
        while i < len(norm):
            hit = 0
            for width in range(min(max_len, len(norm) - i), 0, -1):
                if tuple(norm[i : i + width]) in self.gazetteer.entries:
                    hit = width
                    break
            if hit:
                spans.append(Span(i, i + hit, self.etype))
                i += hit
            else:
                i += 1
        return tuple(spans)


@dataclass(frozen=True)
class DateMatcher:
    """Keyword-anchored date span heuristic.

    Date keywords (day/month/year words) seed candidate tokens. The token
    directly after a keyword joins when it is a number or a month name,
    then any number within ``max_gap`` tokens of an existing candidate
    joins, repeated to a fixpoint. Runs of candidates become spans, and
    neighboring spans merge when every token between them is a connector
    or conjunction and the gap is at most ``max_gap``. Without a keyword
    nothing fires, so bare numbers are never dates.
    """

    keywords: frozenset[str]
    months: frozenset[str] = frozenset()
    connectors: frozenset[str] = frozenset()
    conjunctions: frozenset[str] = frozenset()
    max_gap: int = 2
    etype: str = "DATE"

    def __post_init__(self):
        if not self.keywords:
            raise ValueError("date matcher needs at least one keyword")
        if self.max_gap < 0:
            raise ValueError("max_gap must be non-negative")
        for name in ("keywords", "months", "connectors", "conjunctions"):
            terms = frozenset(
                normalize_token(t, lowercase=True) for t in getattr(self, name)
            )
            object.__setattr__(self, name, terms)

    def match(self, words) -> tuple[Span, ...]:
        toks = [normalize_token(w, lowercase=True) for w in words]
        n = len(toks)
        numeric = [t.isdigit() for t in toks]

        candidates = {i for i, t in enumerate(toks) if t in self.keywords}
        for i in sorted(candidates):
            j = i + 1
            if j < n and (numeric[j] or toks[j] in self.months):
                candidates.add(j)
        if not candidates:
            return ()
        changed = True
        while changed:
            changed = False
            for i in range(n):
                if numeric[i] and i not in candidates:
                    near = range(max(0, i - self.max_gap), min(n, i + self.max_gap + 1))
                    if any(j in candidates for j in near):
                        candidates.add(i)
                        changed = True

        runs = []
        for i in sorted(candidates):
            if runs and i == runs[-1][1]:
                runs[-1][1] = i + 1
            else:
                runs.append([i, i + 1])

        bridges = self.connectors | self.conjunctions
        merged = [runs[0]]
        for start, end in runs[1:]:
            gap = range(merged[-1][1], start)
            if 0 < len(gap) <= self.max_gap and all(toks[g] in bridges for g in gap):
                merged[-1][1] = end
            else:
                merged.append([start, end])
        return tuple(Span(s, e, self.etype) for s, e in merged)


def merge_span_layers(span_layers, length: int, priority=DEFAULT_TYPE_PRIORITY) -> tuple[str, ...]:
    """Combine span layers from several rules into one BIO2 tag sequence.

    Spans claim tokens in order of decreasing length, then type priority,
    then position; a span only gets tokens no earlier span took. The tag
    sequence restarts with ``B-`` wherever token ownership changes, so
    partially shadowed spans stay decodable.
    """
    priority = tuple(priority)

    def rank(etype: str) -> int:
        return priority.index(etype) if etype in priority else len(priority)

    ordered = sorted(
        (
            (-len(span), rank(span.etype), span.start, layer_idx, span)
            for layer_idx, layer in enumerate(span_layers)
            for span in layer
        ),
        key=lambda item: item[:4],
    )
    owner: list[int | None] = [None] * length
    claimed: list[Span] = []
    for *_, span in ordered:
        if span.end > length:
            raise ValueError(f"span {span} exceeds sentence length {length}")
        sid = len(claimed)
        claimed.append(span)
        for t in range(span.start, span.end):
            if owner[t] is None:
                owner[t] = sid

    pieces = []
    i = 0
    while i < length:
        sid = owner[i]
        if sid is None:
            i += 1
            continue
        j = i
        while j < length and owner[j] == sid:
            j += 1
        pieces.append(Span(i, j, claimed[sid].etype))
        i = j
    return spans_to_tags(pieces, length)


class NerRuleAnnotator(TransformerMixin, BaseEstimator):
    """Apply span matchers to every sentence and write the weak tag layer.

    Parameters
    ----------
    matchers : sequence of objects with ``match(words) -> spans``
    priority : entity-type order used to resolve overlaps between rules
    """

    def __init__(self, matchers, priority=DEFAULT_TYPE_PRIORITY):
        self.matchers = matchers
        self.priority = priority

    def _check_params(self):
        if not self.matchers:
            raise ValueError("need at least one matcher")
        for m in self.matchers:
            if not callable(getattr(m, "match", None)):
                raise TypeError(f"{m!r} has no match() method")

    def fit(self, X=None, y=None):
        self._check_params()
        return self

    def annotate_sentence(self, words) -> tuple[str, ...]:
        self._check_params()
        words = tuple(words)
        layers = [m.match(words) for m in self.matchers]
        return merge_span_layers(layers, len(words), self.priority)

    def transform(self, dataset: Dataset) -> Dataset:
        self._check_params()
        if dataset.task != NER:
            raise ValueError(f"expected a {NER} dataset, got {dataset.task}")
        produced = {m.etype for m in self.matchers if hasattr(m, "etype")}
        label_set = tuple(sorted(set(dataset.label_set) | produced))
        sentences = tuple(
            replace(sent, weak_tags=self.annotate_sentence(sent.words))
            for sent in dataset.sentences
        )
        return replace(dataset, sentences=sentences, label_set=label_set)


class TopicRuleAnnotator(TransformerMixin, BaseEstimator):
    """Two-stage sentence classifier built from lexical resources.

    Stage one walks ``overrides`` in order and returns the first class
    whose keyword occurs in the sentence. Stage two counts dictionary
    terms per class and takes the majority; ties are broken by a seeded
    draw that depends only on (tie_seed, sentence index), and a sentence
    matching no term yields None (abstain) unless ``abstain_on_empty`` is
    off, in which case the tie break runs over all classes.
    """

    def __init__(self, lexicon, overrides=(), tie_seed=0, abstain_on_empty=True):
        self.lexicon = lexicon
        self.overrides = overrides
        self.tie_seed = tie_seed
        self.abstain_on_empty = abstain_on_empty

    def _check_params(self):
        if not isinstance(self.lexicon, TopicLexicon):
            raise TypeError("lexicon must be a TopicLexicon")
        for pair in self.overrides:
            if len(tuple(pair)) != 2:
                raise ValueError(f"override {pair!r} is not a (keyword, class) pair")

    def fit(self, X=None, y=None):
        self._check_params()
        return self

    def _grams(self, words) -> set[str]:
        toks = [normalize_token(w, lowercase=True) for w in words]
        lengths = set(self.lexicon.ngram_lengths) | {1}
        lengths.update(len(kw.split(" ")) for kw, _ in self.overrides)
        grams = set()
        for n in lengths:
            grams.update(" ".join(toks[i : i + n]) for i in range(len(toks) - n + 1))
        return grams

    def annotate_sentence(self, words, index: int = 0) -> str | None:
        self._check_params()
        grams = self._grams(words)
        for keyword, label in self.overrides:
            if keyword in grams:
                return label

        counts = self.lexicon.vote_counts(grams)
        top = max(counts.values(), default=0)
        if top == 0:
            if self.abstain_on_empty or not self.lexicon.classes:
                return None
            tied = list(self.lexicon.classes)
        else:
            tied = [label for label in self.lexicon.classes if counts[label] == top]
        if len(tied) == 1:
            return tied[0]
        rng = np.random.default_rng([self.tie_seed, index])
        return tied[int(rng.integers(len(tied)))]

    def transform(self, dataset: Dataset) -> Dataset:
        self._check_params()
        if dataset.task != TOPIC:
            raise ValueError(f"expected a {TOPIC} dataset, got {dataset.task}")
        extra = set(self.lexicon.classes) | {label for _, label in self.overrides}
        label_set = tuple(sorted(set(dataset.label_set) | extra))
        sentences = tuple(
            replace(sent, weak_class=self.annotate_sentence(sent.words, index=i))
            for i, sent in enumerate(dataset.sentences)
        )
        return replace(dataset, sentences=sentences, label_set=label_set)
