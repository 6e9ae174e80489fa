import random

import pytest

from blocktalk.world import BlockColor, VoxelWorld


@pytest.fixture
def fifteen_block_world() -> VoxelWorld:
    """Four-level, 15-block fixture used by the verbalizer golden test."""
    blocks = [(i, 0, 0, BlockColor.GREEN) for i in range(3)]
    blocks += [
        (0, 1, 0, BlockColor.PURPLE),
        (1, 1, 0, BlockColor.PURPLE),
        (2, 1, 0, BlockColor.YELLOW),
        (3, 1, 0, BlockColor.YELLOW),
        (4, 1, 0, BlockColor.GREEN),
    ]
    blocks += [(i, 2, 0, BlockColor.GREEN) for i in range(3)]
    blocks += [
        (0, 3, 0, BlockColor.YELLOW),
        (1, 3, 0, BlockColor.YELLOW),
        (2, 3, 0, BlockColor.GREEN),
        (3, 3, 0, BlockColor.GREEN),
    ]
    return VoxelWorld.from_blocks(blocks)


GOLDEN_DESCRIPTION = (
    "There are 4 levels. There are 15 different blocks. "
    "At level 0, there are 3 green blocks. "
    "Above at level 1, there are 2 purple, 2 yellow, and 1 green block. "
    "Above at level 2, there are 3 green blocks. "
    "Above at level 3, there are 2 yellow and 2 green blocks."
)


def random_world(rng: random.Random, n_blocks: int, max_y: int = 8) -> VoxelWorld:
    """Arbitrary (not necessarily buildable) occupied set; colors random."""
    world = VoxelWorld()
    cells = set()
    while len(cells) < n_blocks:
        cells.add((rng.randrange(11), rng.randrange(max_y + 1), rng.randrange(11)))
    for x, y, z in cells:
        world.grid[x, y, z] = rng.randint(1, 6)
    return world
