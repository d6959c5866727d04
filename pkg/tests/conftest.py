"""Shared strategies and helpers for the test suite."""

from __future__ import annotations

import sys

import hypothesis.strategies as st
import numpy as np

from weaksup.corpus import NER, TOPIC, Dataset, Sentence


def pytest_terminal_summary(terminalreporter):
    """Echo the acceptance pass/fail lines after the test report."""
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)

LETTERS = "abcdefghkmnprstuwyzɓɗƙACDEKLMNOS"

words = st.text(alphabet=LETTERS, min_size=1, max_size=8)

entity_types = ("PER", "LOC", "ORG", "DATE")


@st.composite
def bio_tags(draw, length: int, types=entity_types):
    """Arbitrary syntactically valid BIO2 tags, orphan I-X included."""
    tags = []
    for _ in range(length):
        kind = draw(st.sampled_from(("O", "B", "I")))
        if kind == "O":
            tags.append("O")
        else:
            tags.append(f"{kind}-{draw(st.sampled_from(types))}")
    return tuple(tags)


@st.composite
def ner_sentences(draw, types=entity_types):
    n = draw(st.integers(min_value=1, max_value=12))
    sent_words = [draw(words) for _ in range(n)]
    return Sentence.from_words(sent_words, gold_tags=draw(bio_tags(n, types)))


@st.composite
def ner_datasets(draw):
    sentences = draw(st.lists(ner_sentences(), min_size=0, max_size=8))
    used = sorted(
        {tag[2:] for s in sentences for tag in s.gold_tags if tag != "O"}
    )
    return Dataset(sentences=tuple(sentences), task=NER, label_set=tuple(used))


TOPIC_CLASSES = ("Health", "Politics", "Sport")
TOPIC_VOCAB = {
    "Health": ["cuta", "magani", "asibiti", "likita", "rigakafi", "jinya"],
    "Politics": ["zabe", "majalisa", "gwamna", "jam'iyya", "shugaba", "dokoki"],
    "Sport": ["kwallo", "wasa", "gasar", "filin", "horo", "nasara"],
}


def make_topic_corpus(n, seed, flip=0.0, length=4):
    """Synthetic separable topic data with an optional corrupted weak layer."""
    rng = np.random.default_rng(seed)
    sentences = []
    for _ in range(n):
        gold = TOPIC_CLASSES[rng.integers(len(TOPIC_CLASSES))]
        sent_words = list(rng.choice(TOPIC_VOCAB[gold], size=length))
        weak = gold
        if flip and rng.random() < flip:
            weak = TOPIC_CLASSES[rng.integers(len(TOPIC_CLASSES))]
        sentences.append(
            Sentence.from_words(sent_words, gold_class=gold, weak_class=weak)
        )
    return Dataset(sentences=tuple(sentences), task=TOPIC, label_set=TOPIC_CLASSES)


def make_ner_corpus(n, seed):
    """Synthetic NER data whose weak layer randomly deletes some tags."""
    rng = np.random.default_rng(seed)
    sentences = []
    for _ in range(n):
        sent_words, tags = [], []
        for _ in range(rng.integers(2, 6)):
            if rng.random() < 0.3:
                sent_words.append(f"loc{rng.integers(5)}")
                tags.append("B-LOC")
            else:
                sent_words.append(f"w{rng.integers(20)}")
                tags.append("O")
        weak = tuple(t if rng.random() < 0.8 else "O" for t in tags)
        sentences.append(
            Sentence.from_words(sent_words, gold_tags=tuple(tags), weak_tags=weak)
        )
    return Dataset(sentences=tuple(sentences), task=NER, label_set=("LOC",))


@st.composite
def topic_datasets(draw, classes=TOPIC_CLASSES):
    n = draw(st.integers(min_value=1, max_value=8))
    sentences = []
    for _ in range(n):
        k = draw(st.integers(min_value=1, max_value=6))
        sentences.append(
            Sentence.from_words(
                [draw(words) for _ in range(k)],
                gold_class=draw(st.sampled_from(classes)),
            )
        )
    used = sorted({s.gold_class for s in sentences})
    return Dataset(sentences=tuple(sentences), task=TOPIC, label_set=tuple(used))
