"""Color-agreement post-filter for question rankings.

A candidate question that mentions a block color found neither in the
instruction text nor among the colors present in the world is almost
certainly irrelevant. Such candidates are demoted to the tail of the
ranking (relative order preserved) so rank metrics stay well defined;
strict mode removes them outright.
"""

from __future__ import annotations

import re
from typing import Optional, Sequence

from ..world import BlockColor, VoxelWorld

_COLOR_RE = re.compile(r"\b(" + "|".join(c.value for c in BlockColor) + r")\b")


def color_words(text: str) -> set[str]:
    return set(_COLOR_RE.findall(text.lower()))


def color_postfilter(
    instruction: str,
    world: Optional[VoxelWorld],
    ranking: Sequence[tuple[str, str]],
    exclude: bool = False,
) -> list[tuple[str, str]]:
    """Reorder (id, text) candidates, demoting color-mismatched ones.

    Candidates mentioning no color are always retained in place. With
    ``exclude=True`` mismatched candidates are dropped instead of demoted.
    """
    supported = color_words(instruction)
    if world is not None:
        supported |= {color.value for _, color in world.blocks()}

    retained: list[tuple[str, str]] = []
    demoted: list[tuple[str, str]] = []
    for qid, text in ranking:
        mentioned = color_words(text)
        if mentioned and not mentioned <= supported:
            demoted.append((qid, text))
        else:
            retained.append((qid, text))
    if exclude:
        return retained
    return retained + demoted
