"""Hashed token n-gram features.

Texts are lowercased and whitespace-split; unigrams and bigrams are hashed
with crc32 into a fixed space (2**18 by default). The hash is stable across
runs and platforms, so feature vectors are deterministic for a given text.
"""

from __future__ import annotations

import zlib
from typing import Iterable

import numpy as np
from scipy import sparse

DEFAULT_HASH_BITS = 18


def tokenize(text: str) -> list[str]:
    return text.lower().split()


def feature_vector(text: str, hash_bits: int = DEFAULT_HASH_BITS) -> dict[int, int]:
    """Sparse map of hashed {1,2}-gram ids to nonnegative counts."""
    mask = (1 << hash_bits) - 1
    tokens = tokenize(text)
    counts: dict[int, int] = {}
    for gram in _ngrams(tokens):
        h = zlib.crc32(gram.encode("utf-8")) & mask
        counts[h] = counts.get(h, 0) + 1
    return counts


def _ngrams(tokens: list[str]) -> Iterable[str]:
    yield from tokens
    for a, b in zip(tokens, tokens[1:]):
        yield f"{a} {b}"


def features_to_csr(
    vectors: list[dict[int, int]], hash_bits: int = DEFAULT_HASH_BITS
) -> sparse.csr_matrix:
    """Stack sparse feature maps into a (n, 2**hash_bits) CSR matrix."""
    dim = 1 << hash_bits
    indptr = [0]
    indices: list[int] = []
    data: list[float] = []
    for vec in vectors:
        for idx in sorted(vec):
            indices.append(idx)
            data.append(float(vec[idx]))
        indptr.append(len(indices))
    return sparse.csr_matrix(
        (np.asarray(data), np.asarray(indices, dtype=np.int64), np.asarray(indptr, dtype=np.int64)),
        shape=(len(vectors), dim),
    )
