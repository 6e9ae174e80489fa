"""Collaborative voxel-building playground.

A deterministic 11x9x11 block world with an acting agent, structure
labeling and target matching, world-to-text verbalization, a grid/text
fusion classifier, clarification-need and question-ranking baselines,
corpus tooling, and a turn-based Architect/Builder session service.
"""

__version__ = "0.1.0"

from .world import (
    ActionLog,
    AgentState,
    BlockColor,
    Break,
    Direction,
    Jump,
    Move,
    Place,
    Position,
    VoxelWorld,
    apply_action,
    diff_worlds,
    replay,
)

__all__ = [
    "ActionLog",
    "AgentState",
    "BlockColor",
    "Break",
    "Direction",
    "Jump",
    "Move",
    "Place",
    "Position",
    "VoxelWorld",
    "apply_action",
    "diff_worlds",
    "replay",
    "__version__",
]
