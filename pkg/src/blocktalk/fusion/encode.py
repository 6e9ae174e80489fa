"""World and dialogue encodings feeding the fusion network."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from ..world import SIZE_X, SIZE_Y, SIZE_Z, VoxelWorld

WORLD_CHANNELS = 7  # empty + six colors
ROLES = ("architect", "builder")

UNK_ID = 0
UNK_TOKEN = "<unk>"


def one_hot_encode(world: VoxelWorld) -> np.ndarray:
    """7 x 11 x 9 x 11 one-hot tensor; channel 0 marks empty cells."""
    eye = np.eye(WORLD_CHANNELS, dtype=np.float64)
    return eye[world.grid].transpose(3, 0, 1, 2)


def decode_world_tensor(tensor: np.ndarray) -> VoxelWorld:
    """Inverse of one_hot_encode for exactly one-hot tensors."""
    if tensor.shape != (WORLD_CHANNELS, SIZE_X, SIZE_Y, SIZE_Z):
        raise ValueError(f"expected {(WORLD_CHANNELS, SIZE_X, SIZE_Y, SIZE_Z)}, got {tensor.shape}")
    codes = tensor.argmax(axis=0)
    world = VoxelWorld()
    for x, y, z in zip(*np.nonzero(codes)):
        world.grid[x, y, z] = codes[x, y, z]
    return world


@dataclass(frozen=True)
class DialogueString:
    """Ordered (role, utterance) turns rendered with inline role tags."""

    turns: tuple[tuple[str, str], ...]

    def __post_init__(self) -> None:
        for role, _ in self.turns:
            if role not in ROLES:
                raise ValueError(f"unknown role {role!r}")

    def render(self) -> str:
        return " ".join(f"{role} {utterance}" for role, utterance in self.turns)


class Vocab:
    """Frequency-ranked whitespace token vocabulary with a reserved unknown id."""

    def __init__(self, tokens: Iterable[str]) -> None:
        self.token_to_id = {UNK_TOKEN: UNK_ID}
        for tok in tokens:
            if tok not in self.token_to_id:
                self.token_to_id[tok] = len(self.token_to_id)

    @classmethod
    def fit(cls, texts: Iterable[str], max_size: int) -> "Vocab":
        counts = Counter(tok for text in texts for tok in text.lower().split())
        ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
        return cls(tok for tok, _ in ranked[: max_size - 1])

    def __len__(self) -> int:
        return len(self.token_to_id)

    def encode(self, text: str, max_len: Optional[int] = None) -> list[int]:
        ids = [self.token_to_id.get(tok, UNK_ID) for tok in text.lower().split()]
        if max_len is not None:
            ids = ids[:max_len]
        return ids

    def to_list(self) -> list[str]:
        ordered = sorted(self.token_to_id.items(), key=lambda kv: kv[1])
        return [tok for tok, _ in ordered]

    @classmethod
    def from_list(cls, tokens: list[str]) -> "Vocab":
        if not tokens or tokens[0] != UNK_TOKEN:
            raise ValueError("vocabulary list must start with the unknown token")
        return cls(tokens[1:])
