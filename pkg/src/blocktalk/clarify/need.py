"""When to ask: clarification-need classification.

A logistic-regression model over hashed {1,2}-gram counts of the
instruction, optionally prefixed with the world verbalization so the
text carries grid context. Trained with full-batch gradient descent to a
convergence tolerance; with a fixed seed, training is bit-reproducible.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Mapping, Optional, Sequence

import numpy as np

from ..checkpoint import load_checkpoint, save_checkpoint
from ..features import DEFAULT_HASH_BITS, feature_vector, features_to_csr
from ..verbalize import verbalize_world
from ..world import VoxelWorld
from .base import AMBIGUOUS, CLEAR, LabeledInstruction


class DegenerateData(ValueError):
    pass


@dataclass(frozen=True)
class NeedClassifierConfig:
    hash_bits: int = DEFAULT_HASH_BITS
    learning_rate: float = 1.0
    max_iters: int = 800
    tol: float = 1e-8
    l2: float = 1e-6
    seed: int = 0


class NeedClassifier:
    """Linear clarification-need model; positive class is "ambiguous"."""

    def __init__(
        self,
        config: NeedClassifierConfig,
        use_world_prefix: bool,
        weights: Optional[np.ndarray] = None,
        bias: float = 0.0,
    ) -> None:
        self.config = config
        self.use_world_prefix = use_world_prefix
        dim = 1 << config.hash_bits
        self.weights = np.zeros(dim) if weights is None else np.asarray(weights, dtype=np.float64)
        self.bias = float(bias)

    def input_text(self, instruction: str, world: Optional[VoxelWorld] = None) -> str:
        if self.use_world_prefix and world is not None:
            return f"{verbalize_world(world)} {instruction}"
        return instruction

    def predict_proba(self, instruction: str, world: Optional[VoxelWorld] = None) -> float:
        fv = feature_vector(self.input_text(instruction, world), self.config.hash_bits)
        z = self.bias + sum(count * self.weights[idx] for idx, count in fv.items())
        return float(1.0 / (1.0 + np.exp(-z)))

    def predict(self, instruction: str, world: Optional[VoxelWorld] = None) -> str:
        return AMBIGUOUS if self.predict_proba(instruction, world) >= 0.5 else CLEAR

    def save(self, path) -> None:
        meta = {
            "kind": "need-classifier",
            "config": asdict(self.config),
            "use_world_prefix": self.use_world_prefix,
        }
        save_checkpoint(path, meta, {"weights": self.weights, "bias": np.array(self.bias)})

    @classmethod
    def load(cls, path) -> "NeedClassifier":
        meta, tensors = load_checkpoint(path)
        if meta.get("kind") != "need-classifier":
            raise ValueError(f"{path}: not a need-classifier checkpoint")
        return cls(
            NeedClassifierConfig(**meta["config"]),
            use_world_prefix=bool(meta["use_world_prefix"]),
            weights=tensors["weights"],
            bias=float(tensors["bias"]),
        )


def train_need_classifier(
    data: Sequence[LabeledInstruction],
    use_world_prefix: bool = False,
    config: Optional[NeedClassifierConfig] = None,
    worlds: Optional[Mapping[str, VoxelWorld]] = None,
) -> NeedClassifier:
    """Fit the classifier; raises DegenerateData on single-class input."""
    config = config or NeedClassifierConfig()
    labels = {rec.label for rec in data}
    if labels != {CLEAR, AMBIGUOUS}:
        raise DegenerateData(f"training data must contain both labels, got {sorted(labels)}")

    model = NeedClassifier(config, use_world_prefix)
    worlds = worlds or {}
    texts = [model.input_text(rec.instruction, worlds.get(rec.world_ref)) for rec in data]
    x = features_to_csr([feature_vector(t, config.hash_bits) for t in texts], config.hash_bits)
    y = np.array([1.0 if rec.is_ambiguous else 0.0 for rec in data])

    w = model.weights
    b = model.bias
    n = len(data)
    prev_loss = np.inf
    for _ in range(config.max_iters):
        z = x @ w + b
        p = 1.0 / (1.0 + np.exp(-z))
        eps = 1e-12
        loss = float(-np.mean(y * np.log(p + eps) + (1 - y) * np.log(1 - p + eps)))
        loss += 0.5 * config.l2 * float(w @ w)
        residual = (p - y) / n
        w -= config.learning_rate * (x.T @ residual + config.l2 * w)
        b -= config.learning_rate * float(residual.sum())
        if abs(prev_loss - loss) < config.tol:
            break
        prev_loss = loss
    model.weights = w
    model.bias = b
    return model


def evaluate_need(
    model: NeedClassifier,
    data: Sequence[LabeledInstruction],
    worlds: Optional[Mapping[str, VoxelWorld]] = None,
) -> tuple[list[str], list[str]]:
    """(predictions, gold labels) for downstream metric computation."""
    worlds = worlds or {}
    preds = [model.predict(rec.instruction, worlds.get(rec.world_ref)) for rec in data]
    golds = [rec.label for rec in data]
    return preds, golds
