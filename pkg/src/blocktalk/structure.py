"""Structure labeling and target comparison.

Labels formalize five informal difficulty tags over a finished build:

* flat: every block sits on the ground (y = 0);
* flying: some 6-connected component of blocks contains no ground block,
  so it cannot stand without scaffolding;
* diagonal: two blocks touch edge-diagonally in a vertical plane
  (one level apart, one horizontal step apart; corner diagonals with
  both horizontal deltas nonzero do not count);
* tricky: some block is hidden, all six face neighbors occupied or out
  of bounds;
* tall: the top of the build is above the reach of a ground-standing
  agent (max y > reach).

Matching compares a built world against a target exactly and under
horizontal translation.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .world import SIZE_X, SIZE_Z, VoxelWorld

TALL_THRESHOLD_Y = 3  # reachable from the ground with reach 3


class EmptyWorld(ValueError):
    pass


@dataclass(frozen=True)
class StructureLabels:
    flat: bool
    flying: bool
    diagonal: bool
    tricky: bool
    tall: bool

    def as_dict(self) -> dict[str, bool]:
        return {
            "flat": self.flat,
            "flying": self.flying,
            "diagonal": self.diagonal,
            "tricky": self.tricky,
            "tall": self.tall,
        }


@dataclass(frozen=True)
class MatchReport:
    exact: bool
    translated_match: bool
    offset: tuple[int, int]  # (dx, dz) applied to the built world
    missing: int  # target cells not realized at the best offset
    extra: int  # built cells absent from the target at the best offset


def classify_structure(world: VoxelWorld, tall_threshold: int = TALL_THRESHOLD_Y) -> StructureLabels:
    if world.block_count() == 0:
        raise EmptyWorld("cannot classify an empty world")
    occupied = {pos for pos, _ in world.blocks()}

    flat = all(p.y == 0 for p in occupied)
    tall = max(p.y for p in occupied) > tall_threshold
    flying = _has_ungrounded_component(occupied)
    diagonal = _has_vertical_edge_diagonal(occupied)
    tricky = _has_hidden_block(occupied)
    return StructureLabels(flat=flat, flying=flying, diagonal=diagonal, tricky=tricky, tall=tall)


def _has_ungrounded_component(occupied: set) -> bool:
    seen: set = set()
    for start in occupied:
        if start in seen:
            continue
        component = {start}
        grounded = start.y == 0
        queue = deque([start])
        seen.add(start)
        while queue:
            p = queue.popleft()
            for dx, dy, dz in ((1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)):
                n = type(p)(p.x + dx, p.y + dy, p.z + dz)
                if n in occupied and n not in seen:
                    seen.add(n)
                    component.add(n)
                    grounded = grounded or n.y == 0
                    queue.append(n)
        if not grounded:
            return True
    return False


def _has_vertical_edge_diagonal(occupied: set) -> bool:
    # One level up plus exactly one horizontal step; never face-adjacent.
    for p in occupied:
        for dx, dz in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            n = type(p)(p.x + dx, p.y + 1, p.z + dz)
            if n in occupied:
                return True
    return False


def _has_hidden_block(occupied: set) -> bool:
    for p in occupied:
        hidden = True
        for dx, dy, dz in ((1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)):
            n = type(p)(p.x + dx, p.y + dy, p.z + dz)
            if n.in_bounds() and n not in occupied:
                hidden = False
                break
        if hidden:
            return True
    return False


def match(world: VoxelWorld, target: VoxelWorld) -> MatchReport:
    """Compare a build against a target, exactly and under (dx, dz) shifts.

    ``missing``/``extra`` are reported at the best shift, the one with the
    fewest total mismatches; ties prefer smaller |dx| + |dz|, then (dx, dz)
    order, so a zero-offset perfect match is always reported as exact.
    """
    built = {(p.x, p.y, p.z): c for p, c in world.blocks()}
    goal = {(p.x, p.y, p.z): c for p, c in target.blocks()}

    exact = built == goal
    best = None  # (mismatch, |dx|+|dz|, dx, dz, missing, extra)
    translated = False
    for dx in range(-(SIZE_X - 1), SIZE_X):
        for dz in range(-(SIZE_Z - 1), SIZE_Z):
            shifted = {}
            in_bounds = True
            for (x, y, z), c in built.items():
                nx, nz = x + dx, z + dz
                if not (0 <= nx < SIZE_X and 0 <= nz < SIZE_Z):
                    in_bounds = False
                    break
                shifted[(nx, y, nz)] = c
            if not in_bounds:
                continue
            missing = sum(1 for cell, c in goal.items() if shifted.get(cell) != c)
            extra = sum(1 for cell, c in shifted.items() if goal.get(cell) != c)
            key = (missing + extra, abs(dx) + abs(dz), dx, dz)
            if best is None or key < best[:4]:
                best = (*key, missing, extra)
            if missing == 0 and extra == 0:
                translated = True

    assert best is not None  # dx = dz = 0 is always in bounds
    _, _, dx, dz, missing, extra = best
    return MatchReport(
        exact=exact,
        translated_match=translated,
        offset=(dx, dz),
        missing=missing,
        extra=extra,
    )
