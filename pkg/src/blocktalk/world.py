"""Deterministic voxel building environment.

The world is a fixed 11 (x) by 9 (y, up) by 11 (z) grid of optional colored
blocks. A single agent stands on one cell and edits the grid through four
actions: place, break, move, jump. Action legality rules:

* place: target empty, within Euclidean reach 3.0 of the agent cell center,
  and grounded (y = 0) or face-adjacent to an existing block (unless
  ``free_placement`` is enabled in the rules);
* break: target occupied and within the same reach;
* move: one cell along a compass direction onto a supported, passable cell;
  stepping up one level onto a block is allowed;
* jump: lifts the reach origin by one level for the next place/break.

Failed actions raise and leave both world and agent untouched. Everything
here is deterministic: replaying the same action log always produces a
bit-identical world.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable, Iterator, NamedTuple, Optional, Union

import numpy as np

# Grid extents: x in [0, 10], y in [0, 8] (0 = ground, grows up), z in [0, 10].
SIZE_X = 11
SIZE_Y = 9
SIZE_Z = 11

DEFAULT_REACH = 3.0


class BlockColor(str, Enum):
    BLUE = "blue"
    GREEN = "green"
    RED = "red"
    ORANGE = "orange"
    PURPLE = "purple"
    YELLOW = "yellow"


COLORS = tuple(BlockColor)
# uint8 grid codes; 0 is reserved for "empty".
COLOR_TO_CODE = {c: i + 1 for i, c in enumerate(COLORS)}
CODE_TO_COLOR = {i + 1: c for i, c in enumerate(COLORS)}


class Direction(str, Enum):
    NORTH = "N"
    SOUTH = "S"
    EAST = "E"
    WEST = "W"


# north decreases z, south increases z, east increases x, west decreases x
DIRECTION_DELTAS = {
    Direction.NORTH: (0, -1),
    Direction.SOUTH: (0, 1),
    Direction.EAST: (1, 0),
    Direction.WEST: (-1, 0),
}

FACE_NEIGHBORS = (
    (1, 0, 0), (-1, 0, 0),
    (0, 1, 0), (0, -1, 0),
    (0, 0, 1), (0, 0, -1),
)


class Position(NamedTuple):
    x: int
    y: int
    z: int

    def in_bounds(self) -> bool:
        return 0 <= self.x < SIZE_X and 0 <= self.y < SIZE_Y and 0 <= self.z < SIZE_Z


class ActionError(Exception):
    """Base for action legality violations. State is never changed on raise."""


class OutOfBounds(ActionError):
    pass


class CellOccupied(ActionError):
    pass


class CellEmpty(ActionError):
    pass


class OutOfReach(ActionError):
    pass


class Unsupported(ActionError):
    pass


class CorruptLog(Exception):
    """A persisted action log failed to replay (tampered serialization)."""


@dataclass(frozen=True)
class Place:
    pos: Position
    color: BlockColor
    t: int = 0  # milliseconds


@dataclass(frozen=True)
class Break:
    pos: Position
    t: int = 0


@dataclass(frozen=True)
class Move:
    direction: Direction
    t: int = 0


@dataclass(frozen=True)
class Jump:
    t: int = 0


Action = Union[Place, Break, Move, Jump]


@dataclass(frozen=True)
class AgentState:
    """Cell the agent's feet occupy plus facing and a pending jump flag.

    ``jump_pending`` lifts the reach origin one level for the next
    place/break. It is set by a jump, kept by repeated jumps (the lift does
    not stack), and cleared by any other successful action.
    """

    position: Position = Position(5, 0, 5)
    facing: Direction = Direction.NORTH
    jump_pending: bool = False


@dataclass(frozen=True)
class WorldRules:
    reach: float = DEFAULT_REACH
    free_placement: bool = False  # skip the face-adjacency support check


DEFAULT_RULES = WorldRules()


class VoxelWorld:
    """Dense 11x9x11 grid of optional colored blocks with a version counter.

    The version strictly increases on every successful mutation; failed
    actions never touch it. Safe to share for concurrent reads; callers
    serialize writes.
    """

    __slots__ = ("grid", "version")

    def __init__(self, grid: Optional[np.ndarray] = None, version: int = 0) -> None:
        if grid is None:
            grid = np.zeros((SIZE_X, SIZE_Y, SIZE_Z), dtype=np.uint8)
        else:
            grid = np.asarray(grid, dtype=np.uint8)
            if grid.shape != (SIZE_X, SIZE_Y, SIZE_Z):
                raise ValueError(f"grid must be {SIZE_X}x{SIZE_Y}x{SIZE_Z}, got {grid.shape}")
        self.grid = grid
        self.version = version

    def get(self, pos: Position) -> Optional[BlockColor]:
        code = int(self.grid[pos.x, pos.y, pos.z])
        return CODE_TO_COLOR.get(code)

    def is_empty(self, pos: Position) -> bool:
        return self.grid[pos.x, pos.y, pos.z] == 0

    def set_block(self, pos: Position, color: Optional[BlockColor]) -> None:
        """Raw cell write; bumps the version. Action legality lives in apply_action."""
        code = 0 if color is None else COLOR_TO_CODE[color]
        self.grid[pos.x, pos.y, pos.z] = code
        self.version += 1

    def blocks(self) -> Iterator[tuple[Position, BlockColor]]:
        for x, y, z in zip(*np.nonzero(self.grid)):
            pos = Position(int(x), int(y), int(z))
            yield pos, CODE_TO_COLOR[int(self.grid[x, y, z])]

    def block_count(self) -> int:
        return int(np.count_nonzero(self.grid))

    def copy(self) -> "VoxelWorld":
        return VoxelWorld(self.grid.copy(), self.version)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, VoxelWorld):
            return NotImplemented
        return bool(np.array_equal(self.grid, other.grid))

    def __repr__(self) -> str:
        return f"VoxelWorld(blocks={self.block_count()}, version={self.version})"

    @classmethod
    def from_blocks(cls, blocks: Iterable[tuple[int, int, int, BlockColor]]) -> "VoxelWorld":
        world = cls()
        for x, y, z, color in blocks:
            pos = Position(x, y, z)
            if not pos.in_bounds():
                raise OutOfBounds(f"block at {tuple(pos)} outside the grid")
            world.grid[x, y, z] = COLOR_TO_CODE[BlockColor(color)]
        world.version = 0
        return world


def _distance(a: Position, b: Position) -> float:
    # Cell centers sit on the integer lattice, so index deltas are exact.
    return math.sqrt((a.x - b.x) ** 2 + (a.y - b.y) ** 2 + (a.z - b.z) ** 2)


def _has_face_neighbor(world: VoxelWorld, pos: Position) -> bool:
    for dx, dy, dz in FACE_NEIGHBORS:
        n = Position(pos.x + dx, pos.y + dy, pos.z + dz)
        if n.in_bounds() and not world.is_empty(n):
            return True
    return False


def _is_supported_cell(world: VoxelWorld, pos: Position) -> bool:
    """A cell an agent may stand on: ground level or a block directly below."""
    if pos.y == 0:
        return True
    return not world.is_empty(Position(pos.x, pos.y - 1, pos.z))


def _reach_origin(agent: AgentState) -> Position:
    if agent.jump_pending:
        return Position(agent.position.x, agent.position.y + 1, agent.position.z)
    return agent.position


def apply_action(
    world: VoxelWorld,
    agent: AgentState,
    action: Action,
    rules: WorldRules = DEFAULT_RULES,
) -> tuple[VoxelWorld, AgentState]:
    """Apply one action, mutating ``world`` in place on success.

    Raises an ActionError naming the violated rule; on raise neither the
    world (contents and version) nor the agent is changed.
    """
    if isinstance(action, Place):
        pos = action.pos
        if not pos.in_bounds():
            raise OutOfBounds(f"place target {tuple(pos)} outside the grid")
        if pos == agent.position:
            raise CellOccupied(f"place target {tuple(pos)} is the agent's cell")
        if not world.is_empty(pos):
            raise CellOccupied(f"place target {tuple(pos)} already holds a block")
        origin = _reach_origin(agent)
        d = _distance(origin, pos)
        if d > rules.reach:
            raise OutOfReach(f"place target {tuple(pos)} at distance {d:.2f} > {rules.reach}")
        if not rules.free_placement and pos.y > 0 and not _has_face_neighbor(world, pos):
            raise Unsupported(f"place target {tuple(pos)} has no adjacent block and is above ground")
        world.set_block(pos, action.color)
        return world, replace(agent, jump_pending=False)

    if isinstance(action, Break):
        pos = action.pos
        if not pos.in_bounds():
            raise OutOfBounds(f"break target {tuple(pos)} outside the grid")
        if world.is_empty(pos):
            raise CellEmpty(f"break target {tuple(pos)} holds no block")
        origin = _reach_origin(agent)
        d = _distance(origin, pos)
        if d > rules.reach:
            raise OutOfReach(f"break target {tuple(pos)} at distance {d:.2f} > {rules.reach}")
        below_agent = Position(agent.position.x, agent.position.y - 1, agent.position.z)
        if agent.position.y > 0 and pos == below_agent:
            raise Unsupported(f"breaking {tuple(pos)} would leave the agent unsupported")
        world.set_block(pos, None)
        return world, replace(agent, jump_pending=False)

    if isinstance(action, Move):
        dx, dz = DIRECTION_DELTAS[action.direction]
        tgt = Position(agent.position.x + dx, agent.position.y, agent.position.z + dz)
        if not (0 <= tgt.x < SIZE_X and 0 <= tgt.z < SIZE_Z):
            raise OutOfBounds(f"move target {tuple(tgt)} outside the grid")
        if world.is_empty(tgt):
            if not _is_supported_cell(world, tgt):
                raise Unsupported(f"move target {tuple(tgt)} has nothing to stand on")
            dest = tgt
        else:
            # Step up one level onto the blocking block.
            dest = Position(tgt.x, tgt.y + 1, tgt.z)
            if not dest.in_bounds():
                raise OutOfBounds(f"step-up target {tuple(dest)} outside the grid")
            if not world.is_empty(dest):
                raise CellOccupied(f"step-up target {tuple(dest)} holds a block")
        return world, AgentState(position=dest, facing=action.direction, jump_pending=False)

    if isinstance(action, Jump):
        return world, replace(agent, jump_pending=True)

    raise TypeError(f"unknown action {action!r}")


class ActionLog:
    """Initial snapshot plus an ordered list of validated actions.

    Appends are validated against a shadow replay state, so a constructed
    log always replays cleanly; replay failures therefore signal tampered
    serialization.
    """

    def __init__(
        self,
        initial_world: VoxelWorld,
        initial_agent: AgentState = AgentState(),
        rules: WorldRules = DEFAULT_RULES,
    ) -> None:
        self.initial_world = initial_world.copy()
        self.initial_agent = initial_agent
        self.rules = rules
        self.steps: list[Action] = []
        self._shadow_world = initial_world.copy()
        self._shadow_agent = initial_agent

    def append(self, action: Action) -> None:
        if self.steps and action.t < self.steps[-1].t:
            raise ValueError(f"timestamps must be non-decreasing ({action.t} < {self.steps[-1].t})")
        self._shadow_world, self._shadow_agent = apply_action(
            self._shadow_world, self._shadow_agent, action, self.rules
        )
        self.steps.append(action)

    def __len__(self) -> int:
        return len(self.steps)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ActionLog):
            return NotImplemented
        return (
            self.initial_world == other.initial_world
            and self.initial_agent == other.initial_agent
            and self.steps == other.steps
        )

    def duration_ms(self) -> int:
        if not self.steps:
            return 0
        return self.steps[-1].t - self.steps[0].t

    def final_state(self) -> tuple["VoxelWorld", AgentState]:
        """State after all appended steps (tracked incrementally)."""
        return self._shadow_world.copy(), self._shadow_agent

    def to_jsonl(self) -> str:
        header = {
            "agent": {
                "facing": self.initial_agent.facing.value,
                "jump": self.initial_agent.jump_pending,
                "pos": list(self.initial_agent.position),
            },
            "world": [
                [p.x, p.y, p.z, c.value] for p, c in sorted(self.initial_world.blocks())
            ],
        }
        lines = [_dump_canonical(header)]
        for a in self.steps:
            lines.append(_dump_canonical(action_to_record(a)))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_jsonl(cls, text: str, rules: WorldRules = DEFAULT_RULES) -> "ActionLog":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise CorruptLog("empty action log")
        try:
            header = json.loads(lines[0])
            world = VoxelWorld.from_blocks(
                (x, y, z, BlockColor(c)) for x, y, z, c in header["world"]
            )
            agent = AgentState(
                position=Position(*header["agent"]["pos"]),
                facing=Direction(header["agent"]["facing"]),
                jump_pending=bool(header["agent"].get("jump", False)),
            )
            log = cls(world, agent, rules)
            for ln in lines[1:]:
                log.append(action_from_record(json.loads(ln)))
        except CorruptLog:
            raise
        except (ActionError, KeyError, ValueError, TypeError) as exc:
            raise CorruptLog(f"log does not replay: {exc}") from exc
        return log


def replay(log: ActionLog) -> tuple[VoxelWorld, AgentState]:
    """Re-run a log from its initial snapshot and return the final state."""
    world = log.initial_world.copy()
    agent = log.initial_agent
    for i, action in enumerate(log.steps):
        try:
            world, agent = apply_action(world, agent, action, log.rules)
        except ActionError as exc:
            raise CorruptLog(f"step {i} failed to replay: {exc}") from exc
    return world, agent


def diff_worlds(
    a: VoxelWorld, b: VoxelWorld
) -> list[tuple[Position, Optional[BlockColor], Optional[BlockColor]]]:
    """Minimal cell-wise difference; applying it to ``a`` yields ``b``."""
    out = []
    for x, y, z in zip(*np.nonzero(a.grid != b.grid)):
        pos = Position(int(x), int(y), int(z))
        out.append((pos, a.get(pos), b.get(pos)))
    out.sort(key=lambda e: e[0])
    return out


def apply_diff(
    world: VoxelWorld,
    diff: list[tuple[Position, Optional[BlockColor], Optional[BlockColor]]],
) -> VoxelWorld:
    out = world.copy()
    for pos, _, after in diff:
        out.grid[pos.x, pos.y, pos.z] = 0 if after is None else COLOR_TO_CODE[after]
    return out


def _dump_canonical(obj: object) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def action_to_record(a: Action) -> dict:
    if isinstance(a, Place):
        return {"t": a.t, "kind": "place", "pos": list(a.pos), "color": a.color.value}
    if isinstance(a, Break):
        return {"t": a.t, "kind": "break", "pos": list(a.pos)}
    if isinstance(a, Move):
        return {"t": a.t, "kind": "move", "dir": a.direction.value}
    if isinstance(a, Jump):
        return {"t": a.t, "kind": "jump"}
    raise TypeError(f"unknown action {a!r}")


def action_from_record(rec: dict) -> Action:
    kind = rec["kind"]
    t = int(rec["t"])
    if kind == "place":
        return Place(Position(*rec["pos"]), BlockColor(rec["color"]), t)
    if kind == "break":
        return Break(Position(*rec["pos"]), t)
    if kind == "move":
        return Move(Direction(rec["dir"]), t)
    if kind == "jump":
        return Jump(t)
    raise ValueError(f"unknown action kind {kind!r}")


def world_to_json(world: VoxelWorld) -> str:
    """Canonical snapshot serialization; identical worlds yield identical bytes."""
    return _dump_canonical(
        {
            "blocks": [[p.x, p.y, p.z, c.value] for p, c in sorted(world.blocks())],
            "size": [SIZE_X, SIZE_Y, SIZE_Z],
        }
    )


def world_from_json(text: str) -> VoxelWorld:
    data = json.loads(text)
    return VoxelWorld.from_blocks((x, y, z, BlockColor(c)) for x, y, z, c in data["blocks"])


def world_digest(world: VoxelWorld) -> str:
    return hashlib.sha256(world_to_json(world).encode()).hexdigest()
