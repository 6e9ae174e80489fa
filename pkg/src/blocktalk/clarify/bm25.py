"""Okapi BM25 over lowercase whitespace tokens.

Corpus statistics (document frequencies, average length) come from the
candidate pool itself. The idf uses the common nonnegative variant
ln(1 + (N - df + 0.5) / (df + 0.5)). Ties are broken by candidate id so
rankings are stable.
"""

from __future__ import annotations

import math
from collections import Counter

from ..features import tokenize
from .base import QuestionPool


class EmptyPool(ValueError):
    pass


def bm25_rank(query: str, pool: QuestionPool, k1: float = 1.2, b: float = 0.75) -> list[str]:
    """Rank pool candidate ids by BM25 relevance to the query, best first."""
    scored = bm25_scores(query, pool, k1=k1, b=b)
    return [qid for qid, _ in sorted(scored.items(), key=lambda kv: (-kv[1], kv[0]))]


def bm25_scores(query: str, pool: QuestionPool, k1: float = 1.2, b: float = 0.75) -> dict[str, float]:
    if not pool.candidates:
        raise EmptyPool("cannot rank an empty question pool")
    docs = [(qid, tokenize(text)) for qid, text in pool.candidates]
    n = len(docs)
    avgdl = sum(len(toks) for _, toks in docs) / n
    if avgdl == 0:
        avgdl = 1.0

    df: Counter = Counter()
    for _, toks in docs:
        for term in set(toks):
            df[term] += 1
    idf = {t: math.log(1.0 + (n - d + 0.5) / (d + 0.5)) for t, d in df.items()}

    query_terms = tokenize(query)
    scores: dict[str, float] = {}
    for qid, toks in docs:
        tf = Counter(toks)
        norm = k1 * (1.0 - b + b * len(toks) / avgdl)
        score = 0.0
        for term in query_terms:
            f = tf.get(term, 0)
            if f == 0:
                continue
            score += idf[term] * f * (k1 + 1.0) / (f + norm)
        scores[qid] = score
    return scores
