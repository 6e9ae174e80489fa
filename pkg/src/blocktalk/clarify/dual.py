"""What to ask: dual-encoder question ranking.

Queries ("state: ...; instruction: ...") and candidate questions are
embedded by two linear maps over hashed n-gram features; relevance is the
dot product. Training minimizes a list-wise softmax loss of each gold
question against the other golds in its batch (in-batch negatives).
Gradients are analytic and applied only to the feature rows present in
the batch; the test suite checks them against finite differences.
"""

from __future__ import annotations

import random
from dataclasses import asdict, dataclass
from typing import Optional, Sequence

import numpy as np

from ..checkpoint import load_checkpoint, save_checkpoint
from ..features import DEFAULT_HASH_BITS, feature_vector
from ..verbalize import state_line
from ..world import VoxelWorld
from .base import QuestionPool
from .need import DegenerateData


@dataclass(frozen=True)
class DualEncoderConfig:
    hash_bits: int = DEFAULT_HASH_BITS
    embed_dim: int = 16
    learning_rate: float = 0.05
    epochs: int = 30
    negatives: int = 7  # in-batch list size is negatives + 1
    seed: int = 0


def build_query(instruction: str, world: VoxelWorld, seed: int) -> str:
    """Canonical ranking query: seeded one-color state summary plus the instruction."""
    return f"{state_line(world, seed)}; instruction: {instruction}"


class DualEncoder:
    def __init__(self, config: DualEncoderConfig) -> None:
        self.config = config
        dim = 1 << config.hash_bits
        rng = np.random.default_rng(config.seed)
        self.w_query = rng.uniform(-0.05, 0.05, (dim, config.embed_dim))
        self.w_question = rng.uniform(-0.05, 0.05, (dim, config.embed_dim))

    def _embed(self, weights: np.ndarray, fv: dict[int, int]) -> np.ndarray:
        if not fv:
            return np.zeros(self.config.embed_dim)
        ids = np.fromiter(fv.keys(), dtype=np.int64, count=len(fv))
        counts = np.fromiter(fv.values(), dtype=np.float64, count=len(fv))
        return counts @ weights[ids]

    def embed_query(self, text: str) -> np.ndarray:
        return self._embed(self.w_query, feature_vector(text, self.config.hash_bits))

    def embed_question(self, text: str) -> np.ndarray:
        return self._embed(self.w_question, feature_vector(text, self.config.hash_bits))

    def score(self, query: str, question: str) -> float:
        return float(self.embed_query(query) @ self.embed_question(question))

    def rank(self, query: str, pool: QuestionPool) -> list[str]:
        q = self.embed_query(query)
        scored = [(qid, float(q @ self.embed_question(text))) for qid, text in pool.candidates]
        return [qid for qid, _ in sorted(scored, key=lambda kv: (-kv[1], kv[0]))]

    def loss_and_grads(
        self, query_fvs: Sequence[dict[int, int]], gold_fvs: Sequence[dict[int, int]]
    ) -> tuple[float, dict[int, np.ndarray], dict[int, np.ndarray]]:
        """List-wise softmax loss over a batch, each row's gold on the diagonal.

        Returns sparse gradients as feature-row maps for each embedding side.
        """
        b = len(query_fvs)
        q = np.stack([self._embed(self.w_query, f) for f in query_fvs])
        d = np.stack([self._embed(self.w_question, f) for f in gold_fvs])
        scores = q @ d.T
        row_max = scores.max(axis=1, keepdims=True)
        logsumexp = np.log(np.exp(scores - row_max).sum(axis=1)) + row_max[:, 0]
        loss = float(np.mean(logsumexp - np.diag(scores)))

        probs = np.exp(scores - row_max)
        probs /= probs.sum(axis=1, keepdims=True)
        dscores = (probs - np.eye(b)) / b
        dq = dscores @ d
        dd = dscores.T @ q

        grad_q: dict[int, np.ndarray] = {}
        grad_d: dict[int, np.ndarray] = {}
        for i, fv in enumerate(query_fvs):
            for idx, count in fv.items():
                acc = grad_q.setdefault(idx, np.zeros(self.config.embed_dim))
                acc += count * dq[i]
        for i, fv in enumerate(gold_fvs):
            for idx, count in fv.items():
                acc = grad_d.setdefault(idx, np.zeros(self.config.embed_dim))
                acc += count * dd[i]
        return loss, grad_q, grad_d

    def step(
        self, query_fvs: Sequence[dict[int, int]], gold_fvs: Sequence[dict[int, int]]
    ) -> float:
        """One gradient step on a batch; returns the pre-step loss."""
        loss, grad_q, grad_d = self.loss_and_grads(query_fvs, gold_fvs)
        lr = self.config.learning_rate
        for idx, g in grad_q.items():
            self.w_query[idx] -= lr * g
        for idx, g in grad_d.items():
            self.w_question[idx] -= lr * g
        return loss

    def save(self, path) -> None:
        meta = {"kind": "dual-encoder", "config": asdict(self.config)}
        save_checkpoint(path, meta, {"w_query": self.w_query, "w_question": self.w_question})

    @classmethod
    def load(cls, path) -> "DualEncoder":
        meta, tensors = load_checkpoint(path)
        if meta.get("kind") != "dual-encoder":
            raise ValueError(f"{path}: not a dual-encoder checkpoint")
        enc = cls(DualEncoderConfig(**meta["config"]))
        enc.w_query = tensors["w_query"].astype(np.float64)
        enc.w_question = tensors["w_question"].astype(np.float64)
        return enc


def train_dual_encoder(
    data: Sequence[tuple[str, str]],
    pool: QuestionPool,
    config: Optional[DualEncoderConfig] = None,
) -> DualEncoder:
    """Fit on (query text, gold question id) pairs against a candidate pool."""
    config = config or DualEncoderConfig()
    if len({gold for _, gold in data}) < 2:
        raise DegenerateData("need at least 2 distinct gold questions to form negatives")
    texts = dict(pool.candidates)
    encoder = DualEncoder(config)
    query_fvs = [feature_vector(q, config.hash_bits) for q, _ in data]
    gold_fvs = [feature_vector(texts[gold], config.hash_bits) for _, gold in data]

    rng = random.Random(config.seed)
    order = list(range(len(data)))
    batch = config.negatives + 1
    for _ in range(config.epochs):
        rng.shuffle(order)
        for start in range(0, len(order), batch):
            chosen = order[start : start + batch]
            if len(chosen) < 2:
                continue
            encoder.step([query_fvs[i] for i in chosen], [gold_fvs[i] for i in chosen])
    return encoder
