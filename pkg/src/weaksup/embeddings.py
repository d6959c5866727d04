"""Word vectors and the fixed feature maps built from them.

Vectors come from a word2vec-style text file, or from a hashing scheme
that derives a reproducible pseudo-random vector per word so experiments
run without a pretrained file. Feature composition is fixed: a sentence
is the mean of its token vectors (topic), a token is the concatenation
of the vectors in a one-token window around it (NER).
"""

from __future__ import annotations

import hashlib
from pathlib import Path

import numpy as np

from .corpus import ParseError, Sentence


class WordEmbeddings:
    """In-memory word -> vector table with zero-vector fallback.

    Lookup tries the exact surface form, then its lowercase form, then
    returns zeros, so unknown words contribute nothing to features.
    """

    def __init__(self, vectors: dict, dim: int):
        if dim < 1:
            raise ValueError("embedding dimension must be positive")
        self.dim = dim
        self._vectors = {}
        for word, vec in vectors.items():
            arr = np.asarray(vec, dtype=np.float64)
            if arr.shape != (dim,):
                raise ValueError(
                    f"vector for {word!r} has shape {arr.shape}, expected ({dim},)"
                )
            self._vectors[word] = arr
        self._zero = np.zeros(dim, dtype=np.float64)

    def __len__(self) -> int:
        return len(self._vectors)

    def __contains__(self, word: str) -> bool:
        return word in self._vectors or word.lower() in self._vectors

    def vector(self, word: str) -> np.ndarray:
        hit = self._vectors.get(word)
        if hit is None:
            hit = self._vectors.get(word.lower())
        return self._zero if hit is None else hit


def load_word_embeddings(path) -> WordEmbeddings:
    """Read word2vec text format: optional ``count dim`` header, then one
    ``word v1 ... vD`` line per word. First occurrence of a word wins."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    start = 0
    dim = None
    if lines:
        head = lines[0].split()
        if len(head) == 2 and all(p.isdigit() for p in head):
            dim = int(head[1])
            start = 1
    vectors: dict[str, np.ndarray] = {}
    for lineno, line in enumerate(lines[start:], start + 1):
        if not line.strip():
            continue
        parts = line.rstrip().split(" ")
        if len(parts) < 2:
            raise ParseError(f"line {lineno}: expected 'word v1 ... vD', got {line!r}")
        word = parts[0]
        try:
            vec = np.array([float(p) for p in parts[1:] if p], dtype=np.float64)
        except ValueError as exc:
            raise ParseError(f"line {lineno}: bad float in vector: {exc}") from None
        if dim is None:
            dim = vec.size
        if vec.size != dim:
            raise ParseError(
                f"line {lineno}: vector has {vec.size} dims, expected {dim}"
            )
        vectors.setdefault(word, vec)
    if dim is None or not vectors:
        raise ParseError(f"no vectors found in {path}")
    return WordEmbeddings(vectors, dim)


class HashedEmbeddings:
    """Deterministic pseudo-random vectors: each word's vector is drawn
    from a generator seeded by (seed, sha256(word)), so the table needs no
    file and is identical across runs and machines."""

    def __init__(self, dim: int = 32, seed: int = 0):
        if dim < 1:
            raise ValueError("embedding dimension must be positive")
        self.dim = dim
        self.seed = seed
        self._cache: dict[str, np.ndarray] = {}

    def vector(self, word: str) -> np.ndarray:
        hit = self._cache.get(word)
        if hit is None:
            digest = hashlib.sha256(word.encode("utf-8")).digest()
            key = int.from_bytes(digest[:8], "little")
            rng = np.random.default_rng([self.seed, key])
            hit = rng.standard_normal(self.dim) / np.sqrt(self.dim)
            self._cache[word] = hit
        return hit


def topic_features(sentences, emb) -> np.ndarray:
    """(n_sentences, dim) matrix of token-vector means."""
    sentences = list(sentences)
    X = np.zeros((len(sentences), emb.dim), dtype=np.float64)
    for i, sent in enumerate(sentences):
        words = sent.words if isinstance(sent, Sentence) else tuple(sent)
        if not words:
            raise ValueError(f"sentence {i} has no tokens")
        X[i] = np.mean([emb.vector(w) for w in words], axis=0)
    return X


def ner_features(sentences, emb) -> np.ndarray:
    """(n_tokens, 3 * dim) matrix: previous, current, next token vectors
    concatenated, with zeros past the sentence edges."""
    rows = []
    zero = np.zeros(emb.dim, dtype=np.float64)
    for sent in sentences:
        words = sent.words if isinstance(sent, Sentence) else tuple(sent)
        vecs = [emb.vector(w) for w in words]
        for i in range(len(words)):
            prev_vec = vecs[i - 1] if i > 0 else zero
            next_vec = vecs[i + 1] if i + 1 < len(words) else zero
            rows.append(np.concatenate([prev_vec, vecs[i], next_vec]))
    if not rows:
        raise ValueError("no tokens to featurize")
    return np.stack(rows)


def sentence_offsets(sentences) -> np.ndarray:
    """Start index of each sentence's tokens in the stacked NER feature
    matrix, with a final entry equal to the total token count."""
    lengths = [len(s) for s in sentences]
    return np.concatenate([[0], np.cumsum(lengths)])
