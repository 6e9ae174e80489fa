"""Canonical corpus record types and their invariants.

Corpus files are line-delimited JSON, one record per line. World snapshots
are not inlined; records reference them by content digest and the snapshot
bytes live in an object store directory. Action logs are inlined as the
initial agent state plus the step list, with the starting world referenced
by digest.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

ARCHITECT = "architect"
BUILDER = "builder"

# One-minute build window; exceeding it is reported, not rejected.
BUILD_WINDOW_MS = 60_000


class ParseError(ValueError):
    pass


class SchemaError(ValueError):
    pass


class ValidationError(ValueError):
    pass


@dataclass(frozen=True)
class Turn:
    role: str
    utterance: str
    actions: Optional[tuple[dict, ...]] = None  # serialized action records
    world_ref: Optional[str] = None  # snapshot digest after this turn
    is_question: bool = False

    def __post_init__(self) -> None:
        if self.role not in (ARCHITECT, BUILDER):
            raise ValidationError(f"unknown role {self.role!r}")


@dataclass(frozen=True)
class GameRecord:
    """One multi-turn Architect/Builder game."""

    game_id: str
    target_ref: Optional[str]
    turns: tuple[Turn, ...]
    completed: bool
    duration_minutes: float

    def __post_init__(self) -> None:
        for i, turn in enumerate(self.turns):
            expected = ARCHITECT if i % 2 == 0 else BUILDER
            if turn.role != expected:
                raise ValidationError(
                    f"{self.game_id}: turn {i} must be {expected}, got {turn.role} "
                    "(roles alternate starting with the architect)"
                )
        if self.completed and self.turns and self.turns[-1].role != ARCHITECT:
            raise ValidationError(
                f"{self.game_id}: a completed game must end with the architect's completion mark"
            )
        if self.duration_minutes < 0:
            raise ValidationError(f"{self.game_id}: negative duration")

    def architect_utterances(self) -> list[str]:
        return [t.utterance for t in self.turns if t.role == ARCHITECT and t.utterance]

    def question_utterances(self) -> list[str]:
        return [t.utterance for t in self.turns if t.is_question and t.utterance]


@dataclass(frozen=True)
class SingleTurnSample:
    """One free-build episode: actions, the describing instruction, and its judgment."""

    id: str
    world_ref: str
    actions: tuple[dict, ...]
    instruction: str
    clear: bool
    questions: tuple[str, ...] = ()
    worker_id: Optional[str] = None
    agent: Optional[dict] = None  # initial agent state for the action log

    def __post_init__(self) -> None:
        if not self.instruction.strip():
            raise ValidationError(f"{self.id}: instruction must be nonempty")
        if not self.clear and not self.questions:
            raise ValidationError(
                f"{self.id}: an instruction marked not clear must carry at least one "
                "clarifying question"
            )
        times = [int(a.get("t", 0)) for a in self.actions]
        if any(b < a for a, b in zip(times, times[1:])):
            raise ValidationError(f"{self.id}: action timestamps must be non-decreasing")

    def duration_ms(self) -> int:
        if not self.actions:
            return 0
        times = [int(a.get("t", 0)) for a in self.actions]
        return times[-1] - times[0]

    def over_build_window(self) -> bool:
        return self.duration_ms() > BUILD_WINDOW_MS


@dataclass(frozen=True)
class CorpusStats:
    """Headline corpus numbers; fields not applicable to a kind stay None."""

    structures: Optional[int] = None
    games: Optional[int] = None
    median_duration_minutes: Optional[float] = None
    utterances: Optional[int] = None
    instructions: Optional[int] = None
    clear: Optional[int] = None
    ambiguous: Optional[int] = None
    clarifying_questions: Optional[int] = None
    avg_instruction_words: Optional[float] = None
    avg_question_words: Optional[float] = None

    def as_dict(self) -> dict:
        return {k: v for k, v in self.__dict__.items()}


def turn_to_dict(turn: Turn) -> dict:
    return {
        "role": turn.role,
        "utterance": turn.utterance,
        "actions": list(turn.actions) if turn.actions is not None else None,
        "world_ref": turn.world_ref,
        "is_question": turn.is_question,
    }


def game_to_dict(rec: GameRecord) -> dict:
    return {
        "game_id": rec.game_id,
        "target_ref": rec.target_ref,
        "completed": rec.completed,
        "duration_minutes": rec.duration_minutes,
        "turns": [turn_to_dict(t) for t in rec.turns],
    }


def sample_to_dict(rec: SingleTurnSample) -> dict:
    return {
        "id": rec.id,
        "world_ref": rec.world_ref,
        "actions": list(rec.actions),
        "instruction": rec.instruction,
        "clear": rec.clear,
        "questions": list(rec.questions),
        "worker_id": rec.worker_id,
        "agent": rec.agent,
    }


def _require(raw: dict, key: str) -> object:
    if key not in raw:
        raise SchemaError(f"missing field {key!r}")
    return raw[key]


def game_from_dict(raw: dict) -> GameRecord:
    turns = []
    for t in _require(raw, "turns"):
        turns.append(
            Turn(
                role=str(_require(t, "role")),
                utterance=str(_require(t, "utterance")),
                actions=tuple(t["actions"]) if t.get("actions") is not None else None,
                world_ref=t.get("world_ref"),
                is_question=bool(t.get("is_question", False)),
            )
        )
    return GameRecord(
        game_id=str(_require(raw, "game_id")),
        target_ref=raw.get("target_ref"),
        turns=tuple(turns),
        completed=bool(_require(raw, "completed")),
        duration_minutes=float(_require(raw, "duration_minutes")),
    )


def sample_from_dict(raw: dict) -> SingleTurnSample:
    return SingleTurnSample(
        id=str(_require(raw, "id")),
        world_ref=str(_require(raw, "world_ref")),
        actions=tuple(_require(raw, "actions")),
        instruction=str(_require(raw, "instruction")),
        clear=bool(_require(raw, "clear")),
        questions=tuple(raw.get("questions") or ()),
        worker_id=raw.get("worker_id"),
        agent=raw.get("agent"),
    )


def record_to_json(rec) -> str:
    if isinstance(rec, GameRecord):
        obj = game_to_dict(rec)
    elif isinstance(rec, SingleTurnSample):
        obj = sample_to_dict(rec)
    else:
        raise TypeError(f"not a corpus record: {rec!r}")
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))
