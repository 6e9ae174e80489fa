import random

import pytest

from blocktalk.structure import EmptyWorld, classify_structure, match
from blocktalk.world import BlockColor, VoxelWorld

from .conftest import random_world

GREEN = BlockColor.GREEN
RED = BlockColor.RED


# ---------------------------------------------------------------------------
# Independent brute-force oracle: pure-python set scans, no shared helpers.
# ---------------------------------------------------------------------------

def oracle_labels(world: VoxelWorld) -> dict:
    cells = {(x, y, z) for x in range(11) for y in range(9) for z in range(11)
             if world.grid[x, y, z] != 0}
    assert cells

    flat = all(y == 0 for _, y, _ in cells)
    tall = max(y for _, y, _ in cells) > 3

    # flying: exhaustive component build via repeated expansion
    def component(start):
        comp = {start}
        frontier = [start]
        while frontier:
            x, y, z = frontier.pop()
            for nx, ny, nz in ((x + 1, y, z), (x - 1, y, z), (x, y + 1, z),
                               (x, y - 1, z), (x, y, z + 1), (x, y, z - 1)):
                if (nx, ny, nz) in cells and (nx, ny, nz) not in comp:
                    comp.add((nx, ny, nz))
                    frontier.append((nx, ny, nz))
        return comp

    flying = False
    remaining = set(cells)
    while remaining:
        comp = component(next(iter(remaining)))
        remaining -= comp
        if all(y != 0 for _, y, _ in comp):
            flying = True

    diagonal = any(
        (x + dx, y + 1, z + dz) in cells
        for x, y, z in cells
        for dx, dz in ((1, 0), (-1, 0), (0, 1), (0, -1))
    )

    def covered(x, y, z):
        for nx, ny, nz in ((x + 1, y, z), (x - 1, y, z), (x, y + 1, z),
                           (x, y - 1, z), (x, y, z + 1), (x, y, z - 1)):
            inside = 0 <= nx < 11 and 0 <= ny < 9 and 0 <= nz < 11
            if inside and (nx, ny, nz) not in cells:
                return False
        return True

    tricky = any(covered(*c) for c in cells)
    return {"flat": flat, "flying": flying, "diagonal": diagonal, "tricky": tricky, "tall": tall}


def oracle_best_shift(world: VoxelWorld, target: VoxelWorld):
    built = {(int(x), int(y), int(z)): int(world.grid[x, y, z])
             for x in range(11) for y in range(9) for z in range(11) if world.grid[x, y, z]}
    goal = {(int(x), int(y), int(z)): int(target.grid[x, y, z])
            for x in range(11) for y in range(9) for z in range(11) if target.grid[x, y, z]}
    best = None
    for dx in range(-10, 11):
        for dz in range(-10, 11):
            shifted = {(x + dx, y, z + dz): c for (x, y, z), c in built.items()}
            if any(not (0 <= x < 11 and 0 <= z < 11) for x, _, z in shifted):
                continue
            missing = sum(1 for cell, c in goal.items() if shifted.get(cell) != c)
            extra = sum(1 for cell, c in shifted.items() if goal.get(cell) != c)
            key = (missing + extra, abs(dx) + abs(dz), dx, dz)
            if best is None or key < best[0]:
                best = (key, missing, extra)
    return best


class TestClassify:
    def test_flat_row(self):
        world = VoxelWorld.from_blocks([(i, 0, 0, GREEN) for i in range(3)])
        labels = classify_structure(world)
        assert labels.as_dict() == {
            "flat": True, "flying": False, "diagonal": False, "tricky": False, "tall": False,
        }

    def test_single_floater_is_flying_and_tall(self):
        labels = classify_structure(VoxelWorld.from_blocks([(5, 5, 5, RED)]))
        assert labels.flying and labels.tall
        assert not labels.flat

    def test_grounded_tower_not_flying(self):
        world = VoxelWorld.from_blocks([(5, y, 5, GREEN) for y in range(5)])
        labels = classify_structure(world)
        assert not labels.flying and labels.tall and not labels.flat

    def test_hidden_block_is_tricky(self):
        blocks = [(x, y, z, GREEN)
                  for x in range(3) for y in range(3) for z in range(3)]
        labels = classify_structure(VoxelWorld.from_blocks(blocks))
        assert labels.tricky  # the center block is fully enclosed

    def test_corner_diagonal_excluded(self):
        world = VoxelWorld.from_blocks([(0, 0, 0, GREEN), (1, 1, 1, GREEN)])
        assert not classify_structure(world).diagonal

    def test_vertical_edge_diagonal(self):
        world = VoxelWorld.from_blocks([(0, 0, 0, GREEN), (1, 1, 0, GREEN)])
        assert classify_structure(world).diagonal

    def test_empty_world_raises(self):
        with pytest.raises(EmptyWorld):
            classify_structure(VoxelWorld())

    def test_matches_oracle_on_random_structures(self):
        rng = random.Random(42)
        for _ in range(200):
            world = random_world(rng, rng.randint(1, 25))
            assert classify_structure(world).as_dict() == oracle_labels(world)

    def test_translation_invariance(self):
        rng = random.Random(5)
        for _ in range(30):
            world = random_world(rng, rng.randint(1, 10))
            blocks = [(p.x, p.y, p.z, c) for p, c in world.blocks()]
            max_x = max(b[0] for b in blocks)
            max_z = max(b[2] for b in blocks)
            if max_x >= 10 or max_z >= 10:
                continue
            shifted = VoxelWorld.from_blocks([(x + 1, y, z + 1, c) for x, y, z, c in blocks])
            assert classify_structure(world) == classify_structure(shifted)

    def test_flying_cleared_by_support_column(self):
        floater = VoxelWorld.from_blocks([(4, 4, 4, RED)])
        assert classify_structure(floater).flying
        supported = VoxelWorld.from_blocks(
            [(4, 4, 4, RED)] + [(4, y, 4, GREEN) for y in range(4)]
        )
        assert not classify_structure(supported).flying


class TestMatch:
    def test_identity(self, fifteen_block_world):
        report = match(fifteen_block_world, fifteen_block_world)
        assert report.exact and report.translated_match
        assert report.offset == (0, 0)
        assert report.missing == report.extra == 0

    def test_exactness_is_symmetric(self):
        rng = random.Random(9)
        for _ in range(20):
            a = random_world(rng, 10)
            b = random_world(rng, 10)
            assert match(a, b).exact == match(b, a).exact

    def test_pure_translation(self, fifteen_block_world):
        blocks = [(p.x, p.y, p.z, c) for p, c in fifteen_block_world.blocks()]
        shifted = VoxelWorld.from_blocks([(x + 2, y, z + 1, c) for x, y, z, c in blocks])
        report = match(shifted, fifteen_block_world)
        assert not report.exact
        assert report.translated_match
        assert report.offset == (-2, -1)
        assert report.missing == report.extra == 0

    def test_recolored_blocks_counted(self):
        rng = random.Random(31)
        world = random_world(rng, 20)
        corrupted = world.copy()
        changed = 0
        for pos, color in list(world.blocks())[:5]:
            new = BlockColor.RED if color != BlockColor.RED else BlockColor.BLUE
            corrupted.grid[pos.x, pos.y, pos.z] = list(BlockColor).index(new) + 1
            changed += 1
        report = match(corrupted, world)
        assert report.offset == (0, 0)
        assert report.missing == report.extra == changed

    def test_counts_equal_oracle(self):
        rng = random.Random(17)
        for _ in range(15):
            a = random_world(rng, rng.randint(1, 12))
            b = random_world(rng, rng.randint(1, 12))
            key, missing, extra = oracle_best_shift(a, b)
            report = match(a, b)
            assert (report.missing, report.extra) == (missing, extra)
            assert report.offset == (key[2], key[3])
