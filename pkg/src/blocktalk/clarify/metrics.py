"""Evaluation metrics for the clarification tasks."""

from __future__ import annotations

from typing import Hashable, Sequence


class LengthMismatch(ValueError):
    pass


class EmptyInput(ValueError):
    pass


def f1_score(predictions: Sequence, labels: Sequence, positive: Hashable = 1) -> float:
    """F1 of the positive class; 0.0 when precision + recall is 0."""
    if len(predictions) != len(labels):
        raise LengthMismatch(f"{len(predictions)} predictions vs {len(labels)} labels")
    if not labels:
        raise EmptyInput("no predictions to score")
    tp = sum(1 for p, y in zip(predictions, labels) if p == positive and y == positive)
    fp = sum(1 for p, y in zip(predictions, labels) if p == positive and y != positive)
    fn = sum(1 for p, y in zip(predictions, labels) if p != positive and y == positive)
    if tp == 0:
        return 0.0
    precision = tp / (tp + fp)
    recall = tp / (tp + fn)
    return 2 * precision * recall / (precision + recall)


def mrr_at_k(rankings: Sequence[tuple[Sequence[Hashable], Hashable]], k: int = 20) -> float:
    """Mean reciprocal rank with ranks beyond the cut-off scored as zero."""
    if k < 1:
        raise ValueError(f"cut-off must be >= 1, got {k}")
    if not rankings:
        raise EmptyInput("no rankings to score")
    total = 0.0
    for ranked, gold in rankings:
        for i, candidate in enumerate(ranked[:k]):
            if candidate == gold:
                total += 1.0 / (i + 1)
                break
    return total / len(rankings)
