"""Deterministic text rendering of a voxel world's per-level color histogram.

Two renderings are produced:

* ``verbalize_world``: a full description, one sentence per occupied level,
  in a single canonical grammar so identical worlds always yield identical
  bytes. Used as a textual world prefix for classifiers.
* ``state_line``: a one-line summary naming a single randomly chosen color
  present in the world, used as compact state context for rankers.

``parse_description`` inverts the full description back to the exact
per-level histogram (it also accepts a looser legacy phrasing for level
sentences, kept as an alternate golden fixture in the tests).
"""

from __future__ import annotations

import random
import re
from collections import Counter
from dataclasses import dataclass

from .world import BlockColor, VoxelWorld

NUMBER_WORDS = (
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight",
    "nine", "ten", "eleven", "twelve", "thirteen", "fourteen", "fifteen",
    "sixteen", "seventeen", "eighteen", "nineteen", "twenty",
)

_COLOR_NAMES = {c.value for c in BlockColor}


class EmptyWorld(ValueError):
    pass


def level_histogram(world: VoxelWorld) -> dict[int, Counter]:
    """Map occupied level -> color value -> count."""
    levels: dict[int, Counter] = {}
    for pos, color in world.blocks():
        levels.setdefault(pos.y, Counter())[color.value] += 1
    return levels


def _format_items(counts: Counter) -> str:
    # Descending count; ties prefer the longer color name, then alphabetical.
    # The trailing noun agrees with the final item's count.
    items = sorted(counts.items(), key=lambda kv: (-kv[1], -len(kv[0]), kv[0]))
    parts = [f"{n} {color}" for color, n in items]
    noun = "block" if items[-1][1] == 1 else "blocks"
    if len(parts) == 1:
        return f"{parts[0]} {noun}"
    if len(parts) == 2:
        return f"{parts[0]} and {parts[1]} {noun}"
    return f"{', '.join(parts[:-1])}, and {parts[-1]} {noun}"


def verbalize_world(world: VoxelWorld) -> str:
    levels = level_histogram(world)
    total = world.block_count()
    if not levels:
        return "There are 0 levels. There are 0 different blocks."
    top = max(levels)
    sentences = [
        f"There are {top + 1} levels.",
        f"There are {total} different blocks.",
    ]
    for y in sorted(levels):
        items = _format_items(levels[y])
        if y == 0:
            sentences.append(f"At level 0, there are {items}.")
        else:
            sentences.append(f"Above at level {y}, there are {items}.")
    return " ".join(sentences)


def state_line(world: VoxelWorld, seed: int) -> str:
    """One-line state summary for a single seeded-random color present in the world."""
    counts = Counter(color.value for _, color in world.blocks())
    if not counts:
        raise EmptyWorld("state line needs at least one block")
    color = random.Random(seed).choice(sorted(counts))
    n = counts[color]
    word = NUMBER_WORDS[n] if n <= 20 else str(n)
    if n == 1:
        return f"state: There is one {color} block"
    return f"state: There are {word} {color} blocks"


@dataclass(frozen=True)
class ParsedDescription:
    declared_levels: int
    declared_blocks: int
    histogram: dict[int, dict[str, int]]


_HEAD_RE = re.compile(
    r"^There are (\d+) levels\. There are (\d+) different blocks\.(.*)$", re.DOTALL
)
_LEVEL_RES = (
    re.compile(r"^At level (\d+), there (?:are|is) (.+)$"),
    re.compile(r"^Above at level (\d+), there (?:are|is) (.+)$"),
    # Legacy mixed phrasing: "Above the 1st level, there are ..."
    re.compile(r"^Above the (\d+)(?:st|nd|rd|th) level, there (?:are|is) (.+)$"),
)
_ITEM_RE = re.compile(r"^(\d+) ([a-z]+)$")


def parse_description(text: str) -> ParsedDescription:
    """Recover the per-level histogram from a rendered description."""
    m = _HEAD_RE.match(text.strip())
    if not m:
        raise ValueError("description header not recognized")
    declared_levels, declared_blocks = int(m.group(1)), int(m.group(2))
    rest = m.group(3).strip()

    histogram: dict[int, dict[str, int]] = {}
    if rest:
        for sentence in re.split(r"\.\s*", rest):
            if not sentence:
                continue
            for pattern in _LEVEL_RES:
                lm = pattern.match(sentence)
                if lm:
                    break
            else:
                raise ValueError(f"level sentence not recognized: {sentence!r}")
            level = int(lm.group(1))
            histogram[level] = _parse_items(lm.group(2))
    return ParsedDescription(declared_levels, declared_blocks, histogram)


def _parse_items(body: str) -> dict[str, int]:
    body = re.sub(r" blocks?$", "", body)
    parts = re.split(r", and |, | and ", body)
    counts: dict[str, int] = {}
    for part in parts:
        im = _ITEM_RE.match(part.strip())
        if not im:
            raise ValueError(f"count item not recognized: {part!r}")
        n, color = int(im.group(1)), im.group(2)
        if color not in _COLOR_NAMES:
            raise ValueError(f"unknown color {color!r}")
        counts[color] = counts.get(color, 0) + n
    return counts
