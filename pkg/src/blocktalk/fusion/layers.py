"""Hand-written forward/backward primitives for the fusion network.

Everything is float64 and loop-free over cells (offset loops over the 3x3x3
kernel only), so forward passes are fast enough for finite-difference
checking of every parameter at small scale.
"""

from __future__ import annotations

import math

import numpy as np


def conv3d_forward(x: np.ndarray, w: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Same-padded 3D convolution. x: (Cin, X, Y, Z), w: (Cout, Cin, K, K, K)."""
    cin, X, Y, Z = x.shape
    k = w.shape[2]
    pad = k // 2
    xp = np.pad(x, ((0, 0), (pad, pad), (pad, pad), (pad, pad)))
    out = np.empty((w.shape[0], X, Y, Z))
    out[:] = b[:, None, None, None]
    for a in range(k):
        for bb in range(k):
            for c in range(k):
                out += np.tensordot(w[:, :, a, bb, c], xp[:, a:a + X, bb:bb + Y, c:c + Z], axes=(1, 0))
    return out


def conv3d_backward(
    dout: np.ndarray, x: np.ndarray, w: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Returns (dx, dw, db) for conv3d_forward."""
    cin, X, Y, Z = x.shape
    k = w.shape[2]
    pad = k // 2
    xp = np.pad(x, ((0, 0), (pad, pad), (pad, pad), (pad, pad)))
    dxp = np.zeros_like(xp)
    dw = np.zeros_like(w)
    db = dout.sum(axis=(1, 2, 3))
    for a in range(k):
        for bb in range(k):
            for c in range(k):
                patch = xp[:, a:a + X, bb:bb + Y, c:c + Z]
                dw[:, :, a, bb, c] = np.tensordot(dout, patch, axes=([1, 2, 3], [1, 2, 3]))
                dxp[:, a:a + X, bb:bb + Y, c:c + Z] += np.tensordot(
                    w[:, :, a, bb, c], dout, axes=(0, 0)
                )
    dx = dxp[:, pad:X + pad, pad:Y + pad, pad:Z + pad]
    return dx, dw, db


def softmax_last(x: np.ndarray) -> np.ndarray:
    shifted = x - x.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def attention_forward(
    x_q: np.ndarray, x_kv: np.ndarray, p: dict[str, np.ndarray], heads: int
) -> tuple[np.ndarray, tuple]:
    """Residual multi-head attention: out = x_q + MHA(x_q, x_kv, x_kv).

    p holds Wq/Wk/Wv/Wo (d, d) and bq/bk/bv/bo (d,).
    """
    tq, d = x_q.shape
    tk = x_kv.shape[0]
    dh = d // heads
    scale = 1.0 / math.sqrt(dh)

    q = x_q @ p["Wq"] + p["bq"]
    k = x_kv @ p["Wk"] + p["bk"]
    v = x_kv @ p["Wv"] + p["bv"]
    qh = q.reshape(tq, heads, dh).transpose(1, 0, 2)
    kh = k.reshape(tk, heads, dh).transpose(1, 0, 2)
    vh = v.reshape(tk, heads, dh).transpose(1, 0, 2)
    scores = qh @ kh.transpose(0, 2, 1) * scale
    attn = softmax_last(scores)
    oh = attn @ vh
    o = oh.transpose(1, 0, 2).reshape(tq, d)
    out = x_q + o @ p["Wo"] + p["bo"]
    cache = (x_q, x_kv, qh, kh, vh, attn, o, scale)
    return out, cache


def attention_backward(
    dout: np.ndarray, cache: tuple, p: dict[str, np.ndarray], heads: int
) -> tuple[np.ndarray, np.ndarray, dict[str, np.ndarray]]:
    """Returns (dx_q, dx_kv, param grads). Self-attention callers sum the two inputs."""
    x_q, x_kv, qh, kh, vh, attn, o, scale = cache
    tq, d = x_q.shape
    tk = x_kv.shape[0]
    dh = d // heads

    grads = {}
    dx_q = dout.copy()  # residual path
    grads["Wo"] = o.T @ dout
    grads["bo"] = dout.sum(axis=0)
    do = dout @ p["Wo"].T
    doh = do.reshape(tq, heads, dh).transpose(1, 0, 2)

    dattn = doh @ vh.transpose(0, 2, 1)
    dvh = attn.transpose(0, 2, 1) @ doh
    # softmax jacobian, rows of attn sum to 1
    dscores = attn * (dattn - (dattn * attn).sum(axis=-1, keepdims=True))
    dscores *= scale
    dqh = dscores @ kh
    dkh = dscores.transpose(0, 2, 1) @ qh

    dq = dqh.transpose(1, 0, 2).reshape(tq, d)
    dk = dkh.transpose(1, 0, 2).reshape(tk, d)
    dv = dvh.transpose(1, 0, 2).reshape(tk, d)

    grads["Wq"] = x_q.T @ dq
    grads["bq"] = dq.sum(axis=0)
    grads["Wk"] = x_kv.T @ dk
    grads["bk"] = dk.sum(axis=0)
    grads["Wv"] = x_kv.T @ dv
    grads["bv"] = dv.sum(axis=0)

    dx_q += dq @ p["Wq"].T
    dx_kv = dk @ p["Wk"].T + dv @ p["Wv"].T
    return dx_q, dx_kv, grads


def sigmoid(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def bce_from_logit(logit: float, label: float) -> tuple[float, float]:
    """Numerically stable binary cross entropy; returns (loss, dloss/dlogit)."""
    loss = float(np.logaddexp(0.0, logit) - label * logit)
    return loss, sigmoid(logit) - label
