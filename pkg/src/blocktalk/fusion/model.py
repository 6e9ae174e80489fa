"""Grid/text cross-modality fusion classifier with exact handwritten backprop.

Pipeline: the one-hot world tensor runs through a stack of same-padded 3D
convolutions with ReLU, whose output channels become per-cell grid tokens;
the role-tagged dialogue becomes embedded text tokens. Both streams carry
learned positional embeddings. Repeated block pairs then apply per-stream
self-attention followed by bidirectional cross-attention; the streams are
mean-pooled, concatenated, and projected to a single sigmoid probability
of "this instruction needs clarification".

Training is plain fixed-rate gradient descent on mean binary cross
entropy. Every gradient is computed analytically (see layers.py) and is
finite-difference checked in the test suite.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional, Sequence, Union

import numpy as np

from ..checkpoint import load_checkpoint, save_checkpoint
from .encode import UNK_ID, DialogueString, Vocab
from .layers import (
    attention_backward,
    attention_forward,
    bce_from_logit,
    conv3d_backward,
    conv3d_forward,
    sigmoid,
)

_ATTN_PARAMS = ("Wq", "Wk", "Wv", "Wo", "bq", "bk", "bv", "bo")
_ATTN_KINDS = ("gself", "tself", "gcross", "tcross")

DialogueInput = Union[DialogueString, str, Sequence[int]]


class ShapeMismatch(ValueError):
    pass


class NonFiniteLoss(ArithmeticError):
    pass


@dataclass(frozen=True)
class FusionConfig:
    conv_channels: tuple[int, ...] = (8, 16)  # last entry is the token width d
    embed_dim: int = 16
    heads: int = 2
    block_pairs: int = 2
    vocab_size: int = 512
    max_text_len: int = 64
    world_channels: int = 7
    grid_dims: tuple[int, int, int] = (11, 9, 11)
    kernel_size: int = 3
    learning_rate: float = 0.05
    seed: int = 0

    def __post_init__(self) -> None:
        numeric = (
            self.embed_dim, self.heads, self.block_pairs, self.vocab_size,
            self.max_text_len, self.world_channels, self.kernel_size,
        )
        if not self.conv_channels or any(c <= 0 for c in self.conv_channels):
            raise ShapeMismatch("conv_channels must be nonempty and positive")
        if any(v <= 0 for v in numeric) or any(v <= 0 for v in self.grid_dims):
            raise ShapeMismatch("config sizes must be positive")
        if self.learning_rate <= 0:
            raise ShapeMismatch("learning rate must be positive")
        if self.embed_dim % self.heads != 0:
            raise ShapeMismatch(f"embed_dim {self.embed_dim} not divisible by heads {self.heads}")
        if self.conv_channels[-1] != self.embed_dim:
            raise ShapeMismatch(
                f"last conv channel count {self.conv_channels[-1]} must equal embed_dim {self.embed_dim}"
            )
        if self.kernel_size % 2 != 1:
            raise ShapeMismatch("kernel_size must be odd for same padding")

    @property
    def grid_tokens(self) -> int:
        return int(np.prod(self.grid_dims))


class FusionModel:
    """Parameter container plus forward/backward for the fusion classifier."""

    def __init__(self, config: FusionConfig, vocab: Optional[Vocab] = None) -> None:
        self.config = config
        self.vocab = vocab
        rng = np.random.default_rng(config.seed)
        self.params: dict[str, np.ndarray] = {}
        d = config.embed_dim

        def add(name: str, *shape: int) -> None:
            self.params[name] = rng.uniform(-0.05, 0.05, shape)

        cin = config.world_channels
        k = config.kernel_size
        for i, cout in enumerate(config.conv_channels):
            add(f"conv{i}_W", cout, cin, k, k, k)
            add(f"conv{i}_b", cout)
            cin = cout
        add("tok_emb", config.vocab_size, d)
        add("grid_pos", config.grid_tokens, d)
        add("text_pos", config.max_text_len, d)
        for p in range(config.block_pairs):
            for kind in _ATTN_KINDS:
                for w in ("Wq", "Wk", "Wv", "Wo"):
                    add(f"p{p}_{kind}_{w}", d, d)
                for b in ("bq", "bk", "bv", "bo"):
                    add(f"p{p}_{kind}_{b}", d)
        add("dec_w", 2 * d)
        add("dec_b")

    def _attn_params(self, pair: int, kind: str) -> dict[str, np.ndarray]:
        return {w: self.params[f"p{pair}_{kind}_{w}"] for w in _ATTN_PARAMS}

    def encode_dialogue(self, dialogue: DialogueInput) -> list[int]:
        if isinstance(dialogue, DialogueString):
            text = dialogue.render()
        elif isinstance(dialogue, str):
            text = dialogue
        else:
            ids = [int(i) for i in dialogue]
            return ids[: self.config.max_text_len] or [UNK_ID]
        if self.vocab is None:
            raise ShapeMismatch("model has no vocabulary; pass token ids instead of text")
        return self.vocab.encode(text, self.config.max_text_len) or [UNK_ID]

    def forward(self, world_tensor: np.ndarray, dialogue: DialogueInput) -> float:
        logit, _ = self._forward(world_tensor, self.encode_dialogue(dialogue))
        return sigmoid(logit)

    def _forward(self, world_tensor: np.ndarray, ids: list[int]) -> tuple[float, dict]:
        cfg = self.config
        expected = (cfg.world_channels, *cfg.grid_dims)
        if tuple(world_tensor.shape) != expected:
            raise ShapeMismatch(f"world tensor shape {world_tensor.shape}, expected {expected}")
        if any(i < 0 or i >= cfg.vocab_size for i in ids):
            raise ShapeMismatch("token id outside the configured vocabulary")
        d = cfg.embed_dim
        cache: dict = {"ids": ids}

        x = np.asarray(world_tensor, dtype=np.float64)
        conv_caches = []
        for i in range(len(cfg.conv_channels)):
            pre = conv3d_forward(x, self.params[f"conv{i}_W"], self.params[f"conv{i}_b"])
            conv_caches.append((x, pre))
            x = np.maximum(pre, 0.0)
        cache["conv"] = conv_caches

        g = x.reshape(d, cfg.grid_tokens).T + self.params["grid_pos"]
        t = self.params["tok_emb"][ids] + self.params["text_pos"][: len(ids)]

        blocks = []
        for p in range(cfg.block_pairs):
            g1, c_gs = attention_forward(g, g, self._attn_params(p, "gself"), cfg.heads)
            t1, c_ts = attention_forward(t, t, self._attn_params(p, "tself"), cfg.heads)
            g2, c_gc = attention_forward(g1, t1, self._attn_params(p, "gcross"), cfg.heads)
            t2, c_tc = attention_forward(t1, g1, self._attn_params(p, "tcross"), cfg.heads)
            blocks.append((c_gs, c_ts, c_gc, c_tc))
            g, t = g2, t2
        cache["blocks"] = blocks

        pooled = np.concatenate([g.mean(axis=0), t.mean(axis=0)])
        cache["pooled"] = pooled
        logit = float(pooled @ self.params["dec_w"] + self.params["dec_b"])
        return logit, cache

    def _backward(self, cache: dict, dlogit: float) -> dict[str, np.ndarray]:
        cfg = self.config
        d = cfg.embed_dim
        grads = {name: np.zeros_like(arr) for name, arr in self.params.items()}

        grads["dec_w"] += dlogit * cache["pooled"]
        grads["dec_b"] += dlogit
        dpooled = dlogit * self.params["dec_w"]
        tg = cfg.grid_tokens
        tt = len(cache["ids"])
        dg = np.repeat(dpooled[None, :d] / tg, tg, axis=0)
        dt = np.repeat(dpooled[None, d:] / tt, tt, axis=0)

        for p in reversed(range(cfg.block_pairs)):
            c_gs, c_ts, c_gc, c_tc = cache["blocks"][p]
            dt1_a, dg1_a, g_tc = attention_backward(dt, c_tc, self._attn_params(p, "tcross"), cfg.heads)
            dg1_b, dt1_b, g_gc = attention_backward(dg, c_gc, self._attn_params(p, "gcross"), cfg.heads)
            dg1 = dg1_a + dg1_b
            dt1 = dt1_a + dt1_b
            dt_q, dt_kv, g_ts = attention_backward(dt1, c_ts, self._attn_params(p, "tself"), cfg.heads)
            dg_q, dg_kv, g_gs = attention_backward(dg1, c_gs, self._attn_params(p, "gself"), cfg.heads)
            dg = dg_q + dg_kv
            dt = dt_q + dt_kv
            for kind, block_grads in (("tcross", g_tc), ("gcross", g_gc), ("tself", g_ts), ("gself", g_gs)):
                for w, val in block_grads.items():
                    grads[f"p{p}_{kind}_{w}"] += val

        grads["grid_pos"] += dg
        grads["text_pos"][:tt] += dt
        np.add.at(grads["tok_emb"], cache["ids"], dt)

        dx = dg.T.reshape(cfg.conv_channels[-1], *cfg.grid_dims)
        for i in reversed(range(len(cfg.conv_channels))):
            x_in, pre = cache["conv"][i]
            dpre = dx * (pre > 0.0)
            dx, dw, db = conv3d_backward(dpre, x_in, self.params[f"conv{i}_W"])
            grads[f"conv{i}_W"] += dw
            grads[f"conv{i}_b"] += db
        return grads

    def loss_and_grads(
        self, batch: Sequence[tuple[np.ndarray, DialogueInput, int]]
    ) -> tuple[float, dict[str, np.ndarray]]:
        """Mean binary cross entropy and its analytic parameter gradients."""
        if not batch:
            raise ValueError("batch must be nonempty")
        total = {name: np.zeros_like(arr) for name, arr in self.params.items()}
        loss_sum = 0.0
        for world_tensor, dialogue, label in batch:
            ids = self.encode_dialogue(dialogue)
            logit, cache = self._forward(world_tensor, ids)
            loss, dlogit = bce_from_logit(logit, float(label))
            loss_sum += loss
            for name, g in self._backward(cache, dlogit).items():
                total[name] += g
        n = len(batch)
        for name in total:
            total[name] /= n
        loss = loss_sum / n
        if not math.isfinite(loss):
            raise NonFiniteLoss(f"training diverged, loss = {loss}")
        return loss, total

    def backward_and_step(
        self, batch: Sequence[tuple[np.ndarray, DialogueInput, int]]
    ) -> float:
        """One gradient-descent step on the batch; returns the pre-step loss."""
        loss, grads = self.loss_and_grads(batch)
        lr = self.config.learning_rate
        for name in self.params:
            self.params[name] -= lr * grads[name]
        return loss

    def batch_loss(self, batch: Sequence[tuple[np.ndarray, DialogueInput, int]]) -> float:
        loss_sum = 0.0
        for world_tensor, dialogue, label in batch:
            logit, _ = self._forward(world_tensor, self.encode_dialogue(dialogue))
            loss, _ = bce_from_logit(logit, float(label))
            loss_sum += loss
        return loss_sum / len(batch)

    def save(self, path) -> None:
        meta = {
            "kind": "fusion",
            "config": _config_to_dict(self.config),
            "vocab": self.vocab.to_list() if self.vocab is not None else None,
        }
        save_checkpoint(path, meta, self.params)

    @classmethod
    def load(cls, path) -> "FusionModel":
        meta, tensors = load_checkpoint(path)
        if meta.get("kind") != "fusion":
            raise ShapeMismatch(f"{path}: not a fusion checkpoint")
        config = _config_from_dict(meta["config"])
        vocab = Vocab.from_list(meta["vocab"]) if meta.get("vocab") else None
        model = cls(config, vocab)
        for name in model.params:
            if name not in tensors:
                raise ShapeMismatch(f"{path}: missing tensor {name!r}")
            if tensors[name].shape != model.params[name].shape:
                raise ShapeMismatch(f"{path}: tensor {name!r} has shape {tensors[name].shape}")
            model.params[name] = tensors[name].astype(np.float64)
        return model


def _config_to_dict(config: FusionConfig) -> dict:
    out = asdict(config)
    out["conv_channels"] = list(config.conv_channels)
    out["grid_dims"] = list(config.grid_dims)
    return out


def _config_from_dict(data: dict) -> FusionConfig:
    data = dict(data)
    data["conv_channels"] = tuple(data["conv_channels"])
    data["grid_dims"] = tuple(data["grid_dims"])
    return FusionConfig(**data)
