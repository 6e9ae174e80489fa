"""Seeded synthetic corpora for tests and desk-scale training.

Worlds are grown with legal environment actions only, so every generated
snapshot is reachable. Instructions are templated over true slot values
(count, color, arrangement, direction); an ambiguous variant deletes
exactly one slot and attaches a category-matched clarifying question.
The generator also emits its own bookkeeping (planted categories and
expected statistics) so tests can check outputs against what was planted
rather than recomputing through the code under test.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional

from ..verbalize import NUMBER_WORDS, state_line
from ..world import (
    AgentState,
    BlockColor,
    Break,
    Direction,
    Jump,
    Move,
    Place,
    Position,
    VoxelWorld,
    WorldRules,
    action_to_record,
    apply_action,
    world_digest,
)
from .schema import SingleTurnSample

SLOT_CATEGORIES = ("color", "count", "direction", "identity")

QUESTION_TEMPLATES = {
    "color": ("which color blocks?", "what color should they be?"),
    "count": ("how many blocks should be built?", "how many do you want?"),
    "direction": ("where do i place them?", "which direction should i build?"),
    "identity": ("which blocks do you mean?", "which ones should be changed?"),
}

_BUILD_VERBS = ("place", "put", "build", "add")
_MODIFY_VERBS = ("remove", "break", "destroy")
_SHAPES = ("row", "line", "tower", "stack", "square")
_ORDINALS = ("first", "second", "third", "fourth", "leftmost", "rightmost")
_DIRECTIONS = ("north", "south", "east", "west")

# Query topic word -> gold question keyed on an associated (non-identical)
# word, so surface token overlap carries no signal for lexical rankers.
ASSOCIATIONS = {
    "tower": ("tall", "how tall should it be?"),
    "row": ("long", "how long do you want it?"),
    "square": ("wide", "how wide should the sides be?"),
    "arch": ("curved", "how curved should the top be?"),
    "stack": ("high", "how high should i go?"),
    "wall": ("thick", "how thick should it be?"),
    "bridge": ("span", "what should the span cross?"),
    "pyramid": ("steep", "how steep are the sides?"),
    "ring": ("round", "how round should it look?"),
    "cross": ("centered", "should it be centered on the grid?"),
    "staircase": ("climb", "which way should it climb?"),
    "floor": ("cover", "how much ground should it cover?"),
    "frame": ("border", "where should the border sit?"),
    "pillar": ("support", "what should it support?"),
    "roof": ("slope", "which way should the slope face?"),
    "corner": ("angle", "what angle do you want?"),
    "path": ("lead", "where should it lead?"),
    "gate": ("open", "which side should open?"),
    "window": ("gap", "how large should the gap be?"),
    "ledge": ("stick", "how far should it stick out?"),
}


@dataclass(frozen=True)
class SynthConfig:
    n_records: int = 200
    n_worlds: int = 20
    ambiguity_rate: float = 0.13
    world_actions: int = 25
    label_mode: str = "slot"  # "slot" (text signal) or "world_count"
    count_threshold: int = 12  # world_count mode: ambiguous iff blocks > threshold
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 <= self.ambiguity_rate <= 1.0:
            raise ValueError("ambiguity_rate must be in [0, 1]")
        if self.label_mode not in ("slot", "world_count"):
            raise ValueError(f"unknown label_mode {self.label_mode!r}")


@dataclass
class SynthResult:
    worlds: dict[str, VoxelWorld]  # digest -> snapshot
    records: list[SingleTurnSample]
    meta: dict = field(default_factory=dict)


def legal_action_candidates(
    world: VoxelWorld, agent: AgentState, rules: WorldRules = WorldRules()
) -> dict[str, list]:
    """Enumerate currently legal actions, grouped by kind."""
    origin = agent.position
    if agent.jump_pending:
        origin = Position(origin.x, origin.y + 1, origin.z)
    reach = int(rules.reach)
    places: list[Position] = []
    breaks: list[Position] = []
    for dx in range(-reach, reach + 1):
        for dy in range(-reach, reach + 1):
            for dz in range(-reach, reach + 1):
                if dx * dx + dy * dy + dz * dz > rules.reach * rules.reach:
                    continue
                pos = Position(origin.x + dx, origin.y + dy, origin.z + dz)
                if not pos.in_bounds() or pos == agent.position:
                    continue
                if world.is_empty(pos):
                    if rules.free_placement or pos.y == 0 or _any_face_neighbor(world, pos):
                        places.append(pos)
                else:
                    if not (
                        agent.position.y > 0
                        and pos == Position(agent.position.x, agent.position.y - 1, agent.position.z)
                    ):
                        breaks.append(pos)
    moves = []
    for direction in Direction:
        try:
            apply_action(world.copy(), agent, Move(direction), rules)
        except Exception:
            continue
        moves.append(direction)
    return {"place": places, "break": breaks, "move": moves}


def _any_face_neighbor(world: VoxelWorld, pos: Position) -> bool:
    for dx, dy, dz in ((1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)):
        n = Position(pos.x + dx, pos.y + dy, pos.z + dz)
        if n.in_bounds() and not world.is_empty(n):
            return True
    return False


def random_legal_actions(
    world: VoxelWorld,
    agent: AgentState,
    n: int,
    rng: random.Random,
    rules: WorldRules = WorldRules(),
    t0: int = 0,
) -> tuple[list, VoxelWorld, AgentState]:
    """Generate n legal actions, applying them as it goes.

    Returns (actions, final world, final agent); the input world is not
    modified.
    """
    world = world.copy()
    t = t0
    actions = []
    for _ in range(n):
        t += rng.randint(50, 900)
        candidates = legal_action_candidates(world, agent, rules)
        kinds = []
        if candidates["place"]:
            kinds += ["place"] * 11
        if candidates["break"]:
            kinds += ["break"] * 4
        if candidates["move"]:
            kinds += ["move"] * 4
        kinds.append("jump")
        kind = rng.choice(kinds)
        if kind == "place":
            pos = rng.choice(candidates["place"])
            action = Place(pos, rng.choice(list(BlockColor)), t)
        elif kind == "break":
            action = Break(rng.choice(candidates["break"]), t)
        elif kind == "move":
            action = Move(rng.choice(candidates["move"]), t)
        else:
            action = Jump(t)
        world, agent = apply_action(world, agent, action, rules)
        actions.append(action)
    return actions, world, agent


def synth_world(seed: int, n_actions: int = 25) -> VoxelWorld:
    """Grow one world from empty through legal actions only."""
    rng = random.Random(seed)
    actions, world, _ = random_legal_actions(VoxelWorld(), AgentState(), n_actions, rng)
    return world


def synth_generate(config: SynthConfig) -> SynthResult:
    """Produce (worlds, single-turn records) with per-record bookkeeping."""
    rng = random.Random(config.seed)

    worlds: dict[str, VoxelWorld] = {}
    world_list: list[tuple[str, VoxelWorld]] = []
    for w in range(config.n_worlds):
        world = synth_world(seed=config.seed * 100_003 + w, n_actions=config.world_actions)
        digest = world_digest(world)
        worlds[digest] = world
        world_list.append((digest, world))

    n = config.n_records
    expected_ambiguous = round(n * config.ambiguity_rate)
    if config.label_mode == "slot":
        ambiguous_ids = set(rng.sample(range(n), expected_ambiguous))
    else:
        ambiguous_ids = set()  # decided per record by world size

    records: list[SingleTurnSample] = []
    categories: dict[str, str] = {}
    planted_ambiguous: list[str] = []
    for i in range(n):
        rec_id = f"synth-{config.seed}-{i:05d}"
        digest, world = world_list[rng.randrange(len(world_list))]
        if config.label_mode == "slot":
            ambiguous = i in ambiguous_ids
        else:
            ambiguous = world.block_count() > config.count_threshold
        category = rng.choice(SLOT_CATEGORIES) if ambiguous else None

        # In world_count mode the label depends on the referenced world only,
        # so the instruction text must never encode it.
        deleted = category if config.label_mode == "slot" else None
        instruction = _instruction_for(rng, deleted)
        questions: tuple[str, ...] = ()
        if ambiguous:
            questions = (rng.choice(QUESTION_TEMPLATES[category]),)
            planted_ambiguous.append(rec_id)
            categories[rec_id] = category

        agent = AgentState()
        log_actions, _, _ = random_legal_actions(
            world, agent, rng.randint(3, 8), rng, t0=rng.randint(0, 500)
        )
        records.append(
            SingleTurnSample(
                id=rec_id,
                world_ref=digest,
                actions=tuple(action_to_record(a) for a in log_actions),
                instruction=instruction,
                clear=not ambiguous,
                questions=questions,
                worker_id=f"worker-{rng.randrange(8)}",
                agent={"pos": list(agent.position), "facing": agent.facing.value, "jump": False},
            )
        )

    total_q = len(planted_ambiguous)
    meta = {
        "expected_ambiguous": expected_ambiguous if config.label_mode == "slot" else len(planted_ambiguous),
        "planted_ambiguous": planted_ambiguous,
        "categories": categories,
        "expected_stats": {
            "instructions": n,
            "ambiguous": len(planted_ambiguous),
            "clear": n - len(planted_ambiguous),
            "clarifying_questions": total_q,
        },
    }
    return SynthResult(worlds=worlds, records=records, meta=meta)


def _instruction_for(rng: random.Random, deleted_slot: Optional[str]) -> str:
    """A templated instruction; ``deleted_slot`` removes one information slot."""
    count = NUMBER_WORDS[rng.randint(2, 9)]
    color = rng.choice(list(BlockColor)).value
    direction = rng.choice(_DIRECTIONS)
    if deleted_slot == "identity" or (deleted_slot is None and rng.random() < 0.3):
        # modify-style instruction; identity slot is the ordinal descriptor
        verb = rng.choice(_MODIFY_VERBS)
        ordinal = rng.choice(_ORDINALS)
        if deleted_slot == "identity":
            return f"{verb} the {color} block on the {direction} side"
        return f"{verb} the {ordinal} {color} block on the {direction} side"
    verb = rng.choice(_BUILD_VERBS)
    shape = rng.choice(_SHAPES)
    if deleted_slot == "color":
        return f"{verb} {count} blocks in a {shape} to the {direction}"
    if deleted_slot == "count":
        return f"{verb} {color} blocks in a {shape} to the {direction}"
    if deleted_slot == "direction":
        return f"{verb} {count} {color} blocks in a {shape}"
    return f"{verb} {count} {color} blocks in a {shape} to the {direction}"


@dataclass
class RankCorpus:
    pairs: list[tuple[str, str]]  # (query text, gold question id)
    pool_candidates: tuple[tuple[str, str], ...]  # (id, question text)
    worlds: dict[str, VoxelWorld]


def synth_rank_corpus(n_queries: int, seed: int, n_worlds: int = 6) -> RankCorpus:
    """Ranking data whose query/gold correlation is associative, not literal.

    Each query names a topic word; its gold question is phrased with the
    topic's associated word and never repeats the topic itself, so token
    overlap gives a lexical ranker no usable signal while an embedding
    model can learn the pairing.
    """
    rng = random.Random(seed)
    worlds = {}
    for w in range(n_worlds):
        world = synth_world(seed=seed * 7919 + w, n_actions=20)
        worlds[world_digest(world)] = world
    digests = sorted(worlds)

    topics = sorted(ASSOCIATIONS)
    pool = tuple((f"q-{topic}", ASSOCIATIONS[topic][1]) for topic in topics)

    fillers = ("near the middle", "by the edge", "on this side", "over there", "for me")
    pairs = []
    for i in range(n_queries):
        topic = topics[rng.randrange(len(topics))]
        digest = digests[rng.randrange(len(digests))]
        line = state_line(worlds[digest], seed=seed + i)
        verb = rng.choice(_BUILD_VERBS)
        filler = rng.choice(fillers)
        query = f"{line}; instruction: {verb} a {topic} {filler}"
        pairs.append((query, f"q-{topic}"))
    return RankCorpus(pairs=pairs, pool_candidates=pool, worlds=worlds)
