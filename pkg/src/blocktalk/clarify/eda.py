"""Easy data augmentation: synonym replacement, insertion, swap, deletion.

Each operation fires per word with probability ``alpha`` using one seeded
generator, so augmentation is reproducible. The synonym table is a small
bundled lexicon tuned to building instructions. Output text is never empty.
"""

from __future__ import annotations

import random
from typing import Sequence

SYNONYMS: dict[str, tuple[str, ...]] = {
    "place": ("put", "set"),
    "put": ("place", "set"),
    "build": ("construct", "make"),
    "make": ("build", "create"),
    "break": ("remove", "destroy"),
    "remove": ("break", "destroy"),
    "destroy": ("break", "remove"),
    "block": ("cube", "box"),
    "blocks": ("cubes", "boxes"),
    "row": ("line", "strip"),
    "column": ("pillar", "stack"),
    "tower": ("pillar", "spire"),
    "big": ("large", "huge"),
    "small": ("little", "tiny"),
    "top": ("summit", "peak"),
    "under": ("beneath", "below"),
    "beside": ("next", "alongside"),
    "left": ("leftward",),
    "right": ("rightward",),
    "north": ("northward",),
    "south": ("southward",),
    "east": ("eastward",),
    "west": ("westward",),
}

ALL_OPS = ("sr", "ri", "rs", "rd")


def eda_augment(
    text: str,
    alpha: float,
    seed: int,
    ops: Sequence[str] = ALL_OPS,
) -> str:
    """Apply the four EDA operations with per-word probability ``alpha``."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    unknown = set(ops) - set(ALL_OPS)
    if unknown:
        raise ValueError(f"unknown EDA ops: {sorted(unknown)}")
    if alpha == 0.0 or not text.split():
        return text

    rng = random.Random(seed)
    words = text.split()
    if "sr" in ops:
        words = _synonym_replace(words, alpha, rng)
    if "ri" in ops:
        words = _random_insert(words, alpha, rng)
    if "rs" in ops:
        words = _random_swap(words, alpha, rng)
    if "rd" in ops:
        words = _random_delete(words, alpha, rng)
    return " ".join(words)


def _synonym_replace(words: list[str], alpha: float, rng: random.Random) -> list[str]:
    out = []
    for w in words:
        choices = SYNONYMS.get(w.lower())
        if choices and rng.random() < alpha:
            out.append(rng.choice(choices))
        else:
            out.append(w)
    return out


def _random_insert(words: list[str], alpha: float, rng: random.Random) -> list[str]:
    out = list(words)
    with_synonyms = [w for w in words if w.lower() in SYNONYMS]
    for _ in words:
        if rng.random() < alpha and with_synonyms:
            source = rng.choice(with_synonyms)
            synonym = rng.choice(SYNONYMS[source.lower()])
            out.insert(rng.randrange(len(out) + 1), synonym)
    return out


def _random_swap(words: list[str], alpha: float, rng: random.Random) -> list[str]:
    out = list(words)
    for i in range(len(out)):
        if rng.random() < alpha:
            j = rng.randrange(len(out))
            out[i], out[j] = out[j], out[i]
    return out


def _random_delete(words: list[str], alpha: float, rng: random.Random) -> list[str]:
    survivors = [w for w in words if rng.random() >= alpha]
    if not survivors:
        # never return empty text
        survivors = [rng.choice(words)]
    return survivors
