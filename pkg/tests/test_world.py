import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blocktalk.dataset.synthetic import random_legal_actions
from blocktalk.world import (
    ActionLog,
    AgentState,
    BlockColor,
    Break,
    CellEmpty,
    CellOccupied,
    CorruptLog,
    Direction,
    Jump,
    Move,
    OutOfBounds,
    OutOfReach,
    Place,
    Position,
    Unsupported,
    VoxelWorld,
    WorldRules,
    apply_action,
    apply_diff,
    diff_worlds,
    replay,
    world_digest,
    world_from_json,
    world_to_json,
)

from .conftest import random_world

GREEN = BlockColor.GREEN
RED = BlockColor.RED


def agent_at(x, y, z, facing=Direction.NORTH, jump=False):
    return AgentState(position=Position(x, y, z), facing=facing, jump_pending=jump)


class TestPlace:
    def test_ground_placement_is_supported(self):
        world, agent = VoxelWorld(), AgentState()
        world, agent = apply_action(world, agent, Place(Position(5, 0, 6), GREEN))
        assert world.get(Position(5, 0, 6)) == GREEN
        assert world.block_count() == 1
        assert world.version == 1

    def test_out_of_reach(self):
        world, agent = VoxelWorld(), agent_at(5, 0, 5)
        with pytest.raises(OutOfReach):
            apply_action(world, agent, Place(Position(5, 5, 5), RED))
        assert world.block_count() == 0
        assert world.version == 0

    def test_occupied_cell_rejected(self):
        world, agent = VoxelWorld(), AgentState()
        world, agent = apply_action(world, agent, Place(Position(5, 0, 6), GREEN))
        with pytest.raises(CellOccupied):
            apply_action(world, agent, Place(Position(5, 0, 6), RED))

    def test_agent_cell_rejected(self):
        world, agent = VoxelWorld(), agent_at(5, 0, 5)
        with pytest.raises(CellOccupied):
            apply_action(world, agent, Place(Position(5, 0, 5), GREEN))

    def test_floating_needs_adjacency(self):
        world, agent = VoxelWorld(), agent_at(5, 0, 5)
        with pytest.raises(Unsupported):
            apply_action(world, agent, Place(Position(5, 2, 6), GREEN))
        # but free placement allows it
        rules = WorldRules(free_placement=True)
        world, agent = apply_action(world, agent, Place(Position(5, 2, 6), GREEN), rules)
        assert world.get(Position(5, 2, 6)) == GREEN

    def test_face_adjacent_above_ground(self):
        world, agent = VoxelWorld(), agent_at(5, 0, 5)
        world, agent = apply_action(world, agent, Place(Position(5, 0, 6), GREEN))
        world, agent = apply_action(world, agent, Place(Position(5, 1, 6), RED))
        assert world.get(Position(5, 1, 6)) == RED

    def test_out_of_bounds(self):
        world, agent = VoxelWorld(), AgentState()
        with pytest.raises(OutOfBounds):
            apply_action(world, agent, Place(Position(5, 9, 5), GREEN))


class TestBreak:
    def test_break_and_empty(self):
        world, agent = VoxelWorld(), AgentState()
        world, agent = apply_action(world, agent, Place(Position(5, 0, 6), GREEN))
        world, agent = apply_action(world, agent, Break(Position(5, 0, 6)))
        assert world.block_count() == 0
        assert world.version == 2
        with pytest.raises(CellEmpty):
            apply_action(world, agent, Break(Position(5, 0, 6)))

    def test_break_out_of_reach(self):
        world = VoxelWorld.from_blocks([(10, 0, 10, GREEN)])
        with pytest.raises(OutOfReach):
            apply_action(world, agent_at(5, 0, 5), Break(Position(10, 0, 10)))

    def test_break_under_agent_rejected(self):
        world = VoxelWorld.from_blocks([(5, 0, 6, GREEN)])
        agent = agent_at(5, 1, 6)  # standing on the block
        with pytest.raises(Unsupported):
            apply_action(world, agent, Break(Position(5, 0, 6)))


class TestMoveAndJump:
    def test_move_flat(self):
        world, agent = VoxelWorld(), agent_at(5, 0, 5)
        world, agent = apply_action(world, agent, Move(Direction.EAST))
        assert agent.position == Position(6, 0, 5)
        assert agent.facing == Direction.EAST
        assert world.version == 0  # moves do not touch the world

    def test_move_step_up(self):
        world = VoxelWorld.from_blocks([(5, 0, 4, GREEN)])
        world, agent = apply_action(world, agent_at(5, 0, 5), Move(Direction.NORTH))
        assert agent.position == Position(5, 1, 4)

    def test_move_blocked_step_up(self):
        world = VoxelWorld.from_blocks([(5, 0, 4, GREEN), (5, 1, 4, GREEN)])
        with pytest.raises(CellOccupied):
            apply_action(world, agent_at(5, 0, 5), Move(Direction.NORTH))

    def test_move_unsupported_rejected(self):
        world = VoxelWorld.from_blocks([(5, 0, 5, GREEN)])
        agent = agent_at(5, 1, 5)
        with pytest.raises(Unsupported):
            apply_action(world, agent, Move(Direction.EAST))

    def test_move_off_grid(self):
        world, agent = VoxelWorld(), agent_at(0, 0, 0)
        with pytest.raises(OutOfBounds):
            apply_action(world, agent, Move(Direction.NORTH))

    def test_jump_extends_reach_one_level(self):
        # (5,4,5) is distance 4 from the ground agent, 3 from the lifted origin
        world = VoxelWorld.from_blocks([(4, y, 5, GREEN) for y in range(5)])
        agent = agent_at(5, 0, 5)
        with pytest.raises(OutOfReach):
            apply_action(world, agent, Place(Position(5, 4, 5), RED))
        world, agent = apply_action(world, agent, Jump())
        assert agent.jump_pending
        world, agent = apply_action(world, agent, Place(Position(5, 4, 5), RED))
        assert world.get(Position(5, 4, 5)) == RED
        assert not agent.jump_pending  # consumed


class TestReplayAndLog:
    def test_empty_log_identity(self):
        base = VoxelWorld.from_blocks([(1, 0, 1, GREEN)])
        log = ActionLog(base, AgentState())
        world, agent = replay(log)
        assert world == base
        assert agent == AgentState()

    def test_place_break_inverse(self):
        log = ActionLog(VoxelWorld(), AgentState())
        log.append(Place(Position(5, 0, 6), GREEN, 0))
        log.append(Break(Position(5, 0, 6), 10))
        world, _ = replay(log)
        assert world == VoxelWorld()

    def test_illegal_append_rejected(self):
        log = ActionLog(VoxelWorld(), AgentState())
        with pytest.raises(OutOfReach):
            log.append(Place(Position(10, 0, 10), GREEN))
        assert len(log) == 0

    def test_timestamps_must_not_decrease(self):
        log = ActionLog(VoxelWorld(), AgentState())
        log.append(Place(Position(5, 0, 6), GREEN, 100))
        with pytest.raises(ValueError):
            log.append(Break(Position(5, 0, 6), 50))

    def test_replay_determinism_large(self):
        rng = random.Random(7)
        actions, final, _ = random_legal_actions(VoxelWorld(), AgentState(), 1000, rng)
        log = ActionLog(VoxelWorld(), AgentState())
        for a in actions:
            log.append(a)
        digest_one = world_digest(replay(log)[0])
        digest_two = world_digest(replay(log)[0])
        assert digest_one == digest_two == world_digest(final)

    def test_serialization_bit_exact(self):
        rng = random.Random(3)
        actions, _, _ = random_legal_actions(VoxelWorld(), AgentState(), 120, rng)
        log = ActionLog(VoxelWorld(), AgentState())
        for a in actions:
            log.append(a)
        text = log.to_jsonl()
        parsed = ActionLog.from_jsonl(text)
        assert parsed == log
        assert parsed.to_jsonl() == text

    def test_tampered_log_raises(self):
        log = ActionLog(VoxelWorld(), AgentState())
        log.append(Place(Position(5, 0, 6), GREEN, 5))
        text = log.to_jsonl()
        tampered = text.replace("[5,0,6]", "[5,8,6]")
        with pytest.raises(CorruptLog):
            ActionLog.from_jsonl(tampered)

    def test_world_json_round_trip(self):
        world = random_world(random.Random(11), 40)
        assert world_from_json(world_to_json(world)) == world


class TestProperties:
    @settings(max_examples=30, deadline=None)
    @given(st.integers(min_value=0, max_value=10_000), st.integers(min_value=5, max_value=60))
    def test_block_count_conservation(self, seed, n):
        """Count changes by exactly +-1 per successful place/break, else 0."""
        rng = random.Random(seed)
        world, agent = VoxelWorld(), AgentState()
        actions, _, _ = random_legal_actions(world, agent, n, rng)
        count = 0
        w, a = VoxelWorld(), AgentState()
        for action in actions:
            before = w.block_count()
            w, a = apply_action(w, a, action)
            delta = w.block_count() - before
            if isinstance(action, Place):
                assert delta == 1
                count += 1
            elif isinstance(action, Break):
                assert delta == -1
                count -= 1
            else:
                assert delta == 0
        assert w.block_count() == count

    @settings(max_examples=30, deadline=None)
    @given(st.integers(min_value=0, max_value=10_000))
    def test_failed_actions_are_total_noops(self, seed):
        rng = random.Random(seed)
        actions, world, agent = random_legal_actions(VoxelWorld(), AgentState(), 30, rng)
        grid_before = world.grid.copy()
        version_before = world.version
        illegal = [
            Place(Position(10, 8, 10), GREEN),  # far away
            Place(agent.position, GREEN),
            Break(Position(10, 8, 10)),
            Place(Position(agent.position.x, 8, agent.position.z), GREEN),
        ]
        for action in illegal:
            try:
                apply_action(world, agent, action)
            except Exception:
                pass
        assert (world.grid == grid_before).all()
        assert world.version == version_before

    @settings(max_examples=20, deadline=None)
    @given(st.integers(min_value=0, max_value=10_000))
    def test_diff_matches_brute_force(self, seed):
        rng = random.Random(seed)
        a = random_world(rng, rng.randint(0, 50))
        b = random_world(rng, rng.randint(0, 50))
        diff = diff_worlds(a, b)
        mismatches = sum(
            1
            for x in range(11)
            for y in range(9)
            for z in range(11)
            if a.grid[x, y, z] != b.grid[x, y, z]
        )
        assert len(diff) == mismatches
        assert apply_diff(a, diff) == b
        assert diff_worlds(a, a) == []
