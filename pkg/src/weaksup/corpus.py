"""Corpus data model and file ingestion.

Two on-disk formats are supported: CoNLL-style ``token<TAB>tag`` files with
blank-line sentence separators (NER) and ``class<TAB>headline`` TSV files
(topic classification). Datasets are immutable after construction; every
operation returns a new ``Dataset``.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, replace

import numpy as np

NER = "ner"
TOPIC = "topic"
TASKS = (NER, TOPIC)

OUTSIDE = "O"

SENTENCE_UNIT = "sentence"
TOKEN_UNIT = "token"
SPLIT_UNITS = (SENTENCE_UNIT, TOKEN_UNIT)


class ParseError(ValueError):
    """An input file violates its expected line format."""


def is_valid_tag(tag: str) -> bool:
    """True for ``O`` or ``B-X``/``I-X`` with a non-empty type ``X``."""
    if tag == OUTSIDE:
        return True
    return len(tag) > 2 and tag[0] in "BI" and tag[1] == "-"


def tag_entity_type(tag: str) -> str | None:
    """Entity type of a ``B-X``/``I-X`` tag, ``None`` for ``O``."""
    if tag == OUTSIDE:
        return None
    return tag[2:]


def tag_alphabet(entity_types) -> tuple[str, ...]:
    """Full BIO2 tag list (``O`` plus B-/I- per type) used as model labels."""
    tags = [OUTSIDE]
    for etype in entity_types:
        tags.append(f"B-{etype}")
        tags.append(f"I-{etype}")
    return tuple(tags)


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def tokenize(raw: str) -> list[str]:
    """Split on whitespace, detaching leading/trailing punctuation.

    The input is NFC-normalized first. Interior punctuation (hyphens,
    apostrophes) stays attached; a chunk that is entirely punctuation
    becomes one token per character.
    """
    tokens: list[str] = []
    for chunk in unicodedata.normalize("NFC", raw).split():
        leading: list[str] = []
        while chunk and _is_punct(chunk[0]):
            leading.append(chunk[0])
            chunk = chunk[1:]
        trailing: list[str] = []
        while chunk and _is_punct(chunk[-1]):
            trailing.append(chunk[-1])
            chunk = chunk[:-1]
        tokens.extend(leading)
        if chunk:
            tokens.append(chunk)
        tokens.extend(reversed(trailing))
    return tokens


@dataclass(frozen=True)
class Token:
    surface: str
    index: int

    def __post_init__(self):
        if not self.surface:
            raise ValueError("token surface must be non-empty")
        if any(ch.isspace() for ch in self.surface):
            raise ValueError(f"token surface contains whitespace: {self.surface!r}")


@dataclass(frozen=True)
class Sentence:
    """One unit of text with optional gold and weak label layers.

    NER sentences carry per-token BIO2 tag layers; topic sentences carry a
    single class label per layer. Tag layers always match the token count.
    """

    tokens: tuple[Token, ...]
    gold_tags: tuple[str, ...] | None = None
    weak_tags: tuple[str, ...] | None = None
    gold_class: str | None = None
    weak_class: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        for name in ("gold_tags", "weak_tags"):
            layer = getattr(self, name)
            if layer is None:
                continue
            layer = tuple(layer)
            object.__setattr__(self, name, layer)
            if len(layer) != len(self.tokens):
                raise ValueError(
                    f"{name} has {len(layer)} tags for {len(self.tokens)} tokens"
                )
            for tag in layer:
                if not is_valid_tag(tag):
                    raise ValueError(f"invalid BIO2 tag string: {tag!r}")

    @classmethod
    def from_words(cls, words, **layers) -> "Sentence":
        return cls(
            tokens=tuple(Token(w, i) for i, w in enumerate(words)), **layers
        )

    @property
    def words(self) -> tuple[str, ...]:
        return tuple(tok.surface for tok in self.tokens)

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True)
class Dataset:
    """Immutable, ordered collection of sentences for one task.

    ``label_set`` is kept in sorted order so that it is canonical: loading,
    saving and re-loading a dataset reproduces it exactly.
    """

    sentences: tuple[Sentence, ...]
    task: str
    label_set: tuple[str, ...]
    language: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "sentences", tuple(self.sentences))
        object.__setattr__(self, "label_set", tuple(self.label_set))
        if self.task not in TASKS:
            raise ValueError(f"unknown task {self.task!r}, expected one of {TASKS}")
        if len(set(self.label_set)) != len(self.label_set):
            raise ValueError("label_set contains duplicates")
        known = set(self.label_set)
        for sent in self.sentences:
            for layer in (sent.gold_tags, sent.weak_tags):
                for tag in layer or ():
                    etype = tag_entity_type(tag)
                    if etype is not None and etype not in known:
                        raise ValueError(f"tag {tag!r} outside label set {sorted(known)}")
            for label in (sent.gold_class, sent.weak_class):
                if label is not None and label not in known:
                    raise ValueError(f"class {label!r} outside label set {sorted(known)}")

    def __len__(self) -> int:
        return len(self.sentences)

    @property
    def num_tokens(self) -> int:
        return sum(len(s) for s in self.sentences)


@dataclass(frozen=True)
class SplitSpec:
    """Train/dev/test fractions plus the unit they are measured in.

    The split is contiguous in corpus order; ``seed`` is carried for
    interface stability but the order-preserving policy does not use it.
    """

    ratios: tuple[float, float, float]
    unit: str = SENTENCE_UNIT
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "ratios", tuple(float(r) for r in self.ratios))
        if len(self.ratios) != 3:
            raise ValueError("ratios must have exactly three entries")
        if any(r < 0.0 or r > 1.0 for r in self.ratios):
            raise ValueError(f"ratios must lie in [0, 1]: {self.ratios}")
        if abs(sum(self.ratios) - 1.0) > 1e-9:
            raise ValueError(f"ratios must sum to 1: {self.ratios}")
        if self.unit not in SPLIT_UNITS:
            raise ValueError(f"unknown split unit {self.unit!r}")


def parse_conll(text: str, language: str | None = None) -> Dataset:
    """Parse CoNLL-style ``token<TAB>tag`` text into an NER dataset.

    Blank lines separate sentences; trailing blank lines are allowed. The
    tag column is read as the gold layer and the label set is inferred
    from the entity types that occur.
    """
    sentences: list[Sentence] = []
    words: list[str] = []
    tags: list[str] = []
    types: set[str] = set()

    def flush():
        if words:
            sentences.append(Sentence.from_words(words, gold_tags=tuple(tags)))
            words.clear()
            tags.clear()

    for lineno, line in enumerate(text.split("\n"), 1):
        if not line.strip():
            flush()
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ParseError(
                f"line {lineno}: expected 'token<TAB>tag', got {line!r}"
            )
        token, tag = parts
        if not token or any(ch.isspace() for ch in token):
            raise ParseError(f"line {lineno}: bad token field {token!r}")
        if not is_valid_tag(tag):
            raise ParseError(f"line {lineno}: invalid BIO2 tag {tag!r}")
        etype = tag_entity_type(tag)
        if etype is not None:
            types.add(etype)
        words.append(token)
        tags.append(tag)
    flush()

    return Dataset(
        sentences=tuple(sentences),
        task=NER,
        label_set=tuple(sorted(types)),
        language=language,
    )


def write_conll(dataset: Dataset, layer: str = "gold") -> str:
    """Serialize one tag layer back to CoNLL text (inverse of parse_conll)."""
    if layer not in ("gold", "weak"):
        raise ValueError(f"unknown layer {layer!r}")
    blocks = []
    for i, sent in enumerate(dataset.sentences):
        tags = sent.gold_tags if layer == "gold" else sent.weak_tags
        if tags is None:
            raise ValueError(f"sentence {i} has no {layer} tags")
        blocks.append(
            "\n".join(f"{tok.surface}\t{tag}" for tok, tag in zip(sent.tokens, tags))
        )
    if not blocks:
        return ""
    return "\n\n".join(blocks) + "\n"


ABSTAIN_MARKER = "ABSTAIN"


def parse_topic_tsv(text: str, language: str | None = None) -> Dataset:
    """Parse ``class<TAB>headline`` lines into a topic dataset.

    Headlines are tokenized with :func:`tokenize`; the class column is read
    as the gold layer. Fully empty lines are skipped.
    """
    sentences: list[Sentence] = []
    classes: set[str] = set()
    for lineno, line in enumerate(text.split("\n"), 1):
        if not line:
            continue
        if "\t" not in line:
            raise ParseError(f"line {lineno}: expected 'class<TAB>headline', got {line!r}")
        label, headline = line.split("\t", 1)
        label = label.strip()
        if not label:
            raise ParseError(f"line {lineno}: empty class label")
        words = tokenize(headline)
        if not words:
            raise ParseError(f"line {lineno}: empty headline")
        classes.add(label)
        sentences.append(Sentence.from_words(words, gold_class=label))
    return Dataset(
        sentences=tuple(sentences),
        task=TOPIC,
        label_set=tuple(sorted(classes)),
        language=language,
    )


def write_topic_tsv(dataset: Dataset, layer: str = "gold") -> str:
    """Serialize a topic dataset to TSV; abstained weak labels become ABSTAIN."""
    if layer not in ("gold", "weak"):
        raise ValueError(f"unknown layer {layer!r}")
    lines = []
    for i, sent in enumerate(dataset.sentences):
        label = sent.gold_class if layer == "gold" else sent.weak_class
        if label is None:
            if layer == "gold":
                raise ValueError(f"sentence {i} has no gold class")
            label = ABSTAIN_MARKER
        lines.append(f"{label}\t{' '.join(sent.words)}")
    if not lines:
        return ""
    return "\n".join(lines) + "\n"


def drop_abstained(dataset: Dataset) -> Dataset:
    """Remove topic rows whose label is the ABSTAIN marker.

    Weak-label files store abstentions as ABSTAIN rows; a training pool
    must not treat the marker as a real class. NER datasets pass through
    unchanged.
    """
    if dataset.task != TOPIC:
        return dataset
    kept = tuple(s for s in dataset.sentences if s.gold_class != ABSTAIN_MARKER)
    labels = tuple(l for l in dataset.label_set if l != ABSTAIN_MARKER)
    return replace(dataset, sentences=kept, label_set=labels)


def attach_weak_layer(gold: Dataset, weak: Dataset) -> Dataset:
    """Overlay a separately stored weak labeling onto a gold dataset.

    The weak dataset is a parallel file whose (gold-slot) labels are in
    fact weak: sentences must align one to one with identical tokens.
    Topic rows labeled with the ABSTAIN marker become unlabeled.
    """
    if gold.task != weak.task:
        raise ValueError(f"task mismatch: {gold.task} vs {weak.task}")
    if len(gold) != len(weak):
        raise ValueError(f"{len(gold)} gold sentences vs {len(weak)} weak")
    sentences = []
    for i, (g, w) in enumerate(zip(gold.sentences, weak.sentences)):
        if g.words != w.words:
            raise ValueError(f"sentence {i}: token mismatch between gold and weak")
        if gold.task == NER:
            sentences.append(replace(g, weak_tags=w.gold_tags))
        else:
            label = w.gold_class
            if label == ABSTAIN_MARKER:
                label = None
            sentences.append(replace(g, weak_class=label))
    label_set = set(gold.label_set) | set(weak.label_set)
    label_set.discard(ABSTAIN_MARKER)
    return replace(
        gold, sentences=tuple(sentences), label_set=tuple(sorted(label_set))
    )


def split_dataset(dataset: Dataset, spec: SplitSpec) -> tuple[Dataset, Dataset, Dataset]:
    """Contiguous train/dev/test partition in corpus order.

    With the token unit, each boundary is placed at the first sentence end
    whose cumulative token count reaches that part's quota, so sentences
    are never divided.
    """
    n = len(dataset)
    if n == 0:
        raise ValueError("cannot split an empty dataset")
    r_train, r_dev, _ = spec.ratios
    if spec.unit == SENTENCE_UNIT:
        b1 = round(n * r_train)
        b2 = round(n * (r_train + r_dev))
    else:
        total = dataset.num_tokens
        q1 = total * r_train
        q2 = total * (r_train + r_dev)
        b1 = b2 = n
        seen = 0
        for i, sent in enumerate(dataset.sentences):
            seen += len(sent)
            if b1 == n and seen >= q1:
                b1 = i + 1
            if b2 == n and seen >= q2:
                b2 = i + 1
    b2 = max(b1, b2)
    parts = (
        dataset.sentences[:b1],
        dataset.sentences[b1:b2],
        dataset.sentences[b2:],
    )
    return tuple(replace(dataset, sentences=part) for part in parts)


def downsample(dataset: Dataset, target_size: int, seed: int) -> Dataset:
    """Deterministic random subset of exactly ``target_size`` sentences.

    Implemented as the first ``target_size`` entries of one seeded
    permutation, restored to corpus order, so subsets are nested: the
    subset of size n is contained in the subset of size m >= n for the
    same seed.
    """
    n = len(dataset)
    if not 1 <= target_size <= n:
        raise ValueError(f"target_size {target_size} out of range 1..{n}")
    order = np.random.default_rng(seed).permutation(n)[:target_size]
    keep = sorted(int(i) for i in order)
    return replace(dataset, sentences=tuple(dataset.sentences[i] for i in keep))


def downsized_dev_target(dev_size: int, train_subset_size: int, train_full_size: int) -> int:
    """Dev-set size reduced by the training subset's factor, floored at 10.

    Keeps the train/dev ratio while guaranteeing at least ten dev sentences
    (or the whole dev set when it is smaller than ten), so the smallest
    training setting of ten sentences is paired with ten dev sentences.
    """
    if dev_size < 1 or train_subset_size < 1 or train_full_size < 1:
        raise ValueError("sizes must be positive")
    scaled = round(dev_size * train_subset_size / train_full_size)
    return min(dev_size, max(scaled, min(10, dev_size)))


@dataclass(frozen=True)
class Span:
    """Half-open token range [start, end) labeled with an entity type."""

    start: int
    end: int
    etype: str

    def __post_init__(self):
        if not 0 <= self.start < self.end:
            raise ValueError(f"bad span bounds [{self.start}, {self.end})")

    def __len__(self) -> int:
        return self.end - self.start

    def overlaps(self, other: "Span") -> bool:
        return self.start < other.end and other.start < self.end


def extract_spans(tags) -> tuple[Span, ...]:
    """Decode BIO2 tags into typed spans.

    ``B-X`` always opens a span. ``I-X`` continues a running span of the
    same type; an ``I-X`` with no matching open span (after ``O``, at the
    sentence start, or after a different type) opens one, so malformed
    sequences still decode rather than raising.
    """
    spans: list[Span] = []
    start = None
    etype = None
    for i, tag in enumerate(tags):
        if not is_valid_tag(tag):
            raise ValueError(f"invalid BIO2 tag string: {tag!r}")
        if tag == OUTSIDE:
            if start is not None:
                spans.append(Span(start, i, etype))
                start = None
            continue
        prefix, cur = tag[0], tag[2:]
        if start is not None and (prefix == "B" or cur != etype):
            spans.append(Span(start, i, etype))
            start = None
        if start is None:
            start = i
            etype = cur
    if start is not None:
        spans.append(Span(start, len(tuple(tags)), etype))
    return tuple(spans)


def repair_bio(tags) -> tuple[str, ...]:
    """Re-head orphan ``I-X`` tags as ``B-X`` so the sequence is valid BIO2.

    Decoding is unaffected: an orphan I opens a span under the permissive
    reading, and after repair the B opens the same span.
    """
    repaired = []
    prev = OUTSIDE
    for tag in tags:
        if not is_valid_tag(tag):
            raise ValueError(f"invalid BIO2 tag string: {tag!r}")
        if tag[0] == "I" and tag_entity_type(prev) != tag_entity_type(tag):
            tag = "B-" + tag[2:]
        repaired.append(tag)
        prev = tag
    return tuple(repaired)


def spans_to_tags(spans, length: int) -> tuple[str, ...]:
    """Encode non-overlapping spans as BIO2 tags over ``length`` tokens."""
    tags = [OUTSIDE] * length
    seen: list[Span] = []
    for span in spans:
        if span.end > length:
            raise ValueError(f"span {span} exceeds sentence length {length}")
        for prev in seen:
            if span.overlaps(prev):
                raise ValueError(f"overlapping spans: {prev} and {span}")
        seen.append(span)
        tags[span.start] = f"B-{span.etype}"
        for i in range(span.start + 1, span.end):
            tags[i] = f"I-{span.etype}"
    return tuple(tags)


INTERSECT = "intersect"
UNION = "union"


def project_labels(dataset: Dataset, target_labels, mode: str) -> Dataset:
    """Restrict (intersect) or extend (union) the dataset's label set.

    intersect: NER tags whose entity type is outside the target become
    ``O``; topic sentences whose gold class is outside the target are
    dropped (weak classes outside it are cleared). union: the label set
    grows, sentences are unchanged.
    """
    target = set(target_labels)
    if not target:
        raise ValueError("target_labels must be non-empty")
    if mode == UNION:
        merged = tuple(sorted(set(dataset.label_set) | target))
        return replace(dataset, label_set=merged)
    if mode != INTERSECT:
        raise ValueError(f"unknown projection mode {mode!r}")

    keep = set(dataset.label_set) & target
    label_set = tuple(sorted(keep))

    def project_tags(layer):
        if layer is None:
            return None
        return tuple(
            tag if tag_entity_type(tag) in keep or tag == OUTSIDE else OUTSIDE
            for tag in layer
        )

    sentences = []
    for sent in dataset.sentences:
        if dataset.task == TOPIC:
            if sent.gold_class is not None and sent.gold_class not in keep:
                continue
            weak = sent.weak_class if sent.weak_class in keep else None
            sentences.append(replace(sent, weak_class=weak))
        else:
            sentences.append(
                replace(
                    sent,
                    gold_tags=project_tags(sent.gold_tags),
                    weak_tags=project_tags(sent.weak_tags),
                )
            )
    return replace(dataset, sentences=tuple(sentences), label_set=label_set)
