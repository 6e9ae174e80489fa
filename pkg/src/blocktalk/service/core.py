"""Turn-based Architect/Builder session management.

Three session modes share one service:

* multi_turn: awaiting_architect -> (instruction) -> awaiting_builder ->
  (action log or clarifying question) -> awaiting_architect -> ... ->
  (complete mark) -> complete. Completion appends the architect's
  "complete" turn and reports the match against the target structure.
* single_turn_build: awaiting_builder -> (one free-build action log) ->
  awaiting_architect -> (the describing instruction) -> complete.
* single_turn_judge: awaiting_builder -> (judgment: a rebuild log when the
  instruction is clear, otherwise at least one clarifying question) ->
  complete. Judge sessions reference the build session they assess.

Every mutation is serialized per game and guarded by an optimistic version
check: clients echo the version they last saw, and of two racing writers
exactly one succeeds while the other gets StaleVersion (or WrongTurn if
the state already moved on). Accepted action logs are re-validated by
replaying them against the server's current world before anything is
persisted, so every stored log replays cleanly from its recorded base
snapshot.
"""

from __future__ import annotations

import secrets
import threading
import time
from pathlib import Path
from typing import Callable, Optional, Union

from ..dataset.io import clean_reason
from ..dataset.schema import BUILD_WINDOW_MS, GameRecord, SingleTurnSample, Turn
from ..structure import MatchReport, match
from ..world import (
    ActionError,
    ActionLog,
    AgentState,
    Direction,
    Position,
    VoxelWorld,
    WorldRules,
    action_from_record,
    action_to_record,
    world_from_json,
    world_to_json,
)
from .stores import ObjectStore, TablesStore

MULTI_TURN = "multi_turn"
SINGLE_TURN_BUILD = "single_turn_build"
SINGLE_TURN_JUDGE = "single_turn_judge"
MODES = (MULTI_TURN, SINGLE_TURN_BUILD, SINGLE_TURN_JUDGE)

AWAITING_ARCHITECT = "awaiting_architect"
AWAITING_BUILDER = "awaiting_builder"
COMPLETE = "complete"

COMPLETION_MARK = "complete"


class ServiceError(Exception):
    kind = "ServiceError"

    def __init__(self, detail: str = "") -> None:
        super().__init__(detail or self.kind)
        self.detail = detail or self.kind


class UnknownGame(ServiceError):
    kind = "UnknownGame"


class UnknownTarget(ServiceError):
    kind = "UnknownTarget"


class UnknownWorld(ServiceError):
    kind = "UnknownWorld"


class AuthFailure(ServiceError):
    kind = "AuthFailure"


class WrongTurn(ServiceError):
    kind = "WrongTurn"


class StaleVersion(ServiceError):
    kind = "StaleVersion"


class RejectedText(ServiceError):
    kind = "RejectedText"

    def __init__(self, reason: str) -> None:
        super().__init__(f"instruction rejected: {reason}")
        self.reason = reason


class MissingQuestion(ServiceError):
    kind = "MissingQuestion"

    def __init__(self) -> None:
        super().__init__(
            "an instruction judged not clear must be accompanied by at least one clarifying question"
        )


class MissingRebuild(ServiceError):
    kind = "MissingRebuild"

    def __init__(self) -> None:
        super().__init__("a clear judgment must include the rebuild action log")


class IllegalActions(ServiceError):
    kind = "IllegalActions"

    def __init__(self, step: int, detail: str) -> None:
        super().__init__(f"step {step}: {detail}")
        self.step = step


def _now_ms() -> int:
    return time.time_ns() // 1_000_000


class SessionService:
    """All session state machines over a shared Tables/Object store pair."""

    def __init__(
        self,
        data_dir: Union[str, Path],
        rules: WorldRules = WorldRules(),
        min_instruction_words: int = 3,
        clock: Callable[[], int] = _now_ms,
    ) -> None:
        self.objects = ObjectStore(data_dir)
        self.tables = TablesStore(data_dir)
        self.rules = rules
        self.min_instruction_words = min_instruction_words
        self.clock = clock
        self._games_lock = threading.Lock()
        self._game_locks: dict[str, threading.Lock] = {}

    # -- helpers ---------------------------------------------------------

    def _lock_for(self, game_id: str) -> threading.Lock:
        with self._games_lock:
            if game_id not in self._game_locks:
                self._game_locks[game_id] = threading.Lock()
            return self._game_locks[game_id]

    def _load_game(self, game_id: str) -> dict:
        row = self.tables.get_game(game_id)
        if row is None:
            raise UnknownGame(f"no such game {game_id!r}")
        return row

    def _check_version(self, game: dict, expected_version: Optional[int]) -> None:
        if expected_version is not None and expected_version != game["version"]:
            raise StaleVersion(
                f"expected version {expected_version}, game is at {game['version']}"
            )

    def _check_key(self, game: dict, role: str, key: str) -> None:
        if key != game[f"{role}_key"]:
            raise AuthFailure(f"key does not grant the {role} role")

    def _world(self, digest: str) -> VoxelWorld:
        return world_from_json(self.objects.get_text(digest))

    def _agent(self, game: dict) -> AgentState:
        raw = game["agent"]
        return AgentState(
            position=Position(*raw["pos"]),
            facing=Direction(raw["facing"]),
            jump_pending=bool(raw.get("jump", False)),
        )

    @staticmethod
    def _agent_dict(agent: AgentState) -> dict:
        return {
            "pos": list(agent.position),
            "facing": agent.facing.value,
            "jump": agent.jump_pending,
        }

    def register_world(self, world: VoxelWorld) -> str:
        """Store a snapshot so games can reference it as target or seed."""
        return self.objects.put_text(world_to_json(world))

    # -- operations ------------------------------------------------------

    def create_game(
        self,
        mode: str,
        target_id: Optional[str] = None,
        seed_world_id: Optional[str] = None,
    ) -> dict:
        if mode not in MODES:
            raise ValueError(f"unknown mode {mode!r}")

        if mode == MULTI_TURN:
            if target_id is None or not self.objects.has(target_id):
                raise UnknownTarget(f"target world {target_id!r} not found")
            initial_ref = seed_world_id
            if initial_ref is not None and not self.objects.has(initial_ref):
                raise UnknownWorld(f"seed world {initial_ref!r} not found")
            if initial_ref is None:
                initial_ref = self.register_world(VoxelWorld())
            status = AWAITING_ARCHITECT
        elif mode == SINGLE_TURN_BUILD:
            if seed_world_id is None or not self.objects.has(seed_world_id):
                raise UnknownWorld(f"seed world {seed_world_id!r} not found")
            initial_ref = seed_world_id
            status = AWAITING_BUILDER
        else:  # SINGLE_TURN_JUDGE judges a finished build session
            build = self.tables.get_game(target_id) if target_id else None
            if build is None or build["mode"] != SINGLE_TURN_BUILD or build["status"] != COMPLETE:
                raise UnknownTarget(f"{target_id!r} is not a completed build session")
            initial_ref = build["initial_ref"]
            status = AWAITING_BUILDER

        game_id = f"g-{secrets.token_hex(8)}"
        row = {
            "game_id": game_id,
            "mode": mode,
            "status": status,
            "version": 0,
            "turn_index": 0,
            "world_version": 0,
            "architect_key": secrets.token_hex(16),
            "builder_key": secrets.token_hex(16),
            "target_ref": target_id,
            "initial_ref": initial_ref,
            "world_ref": initial_ref,
            "agent": self._agent_dict(AgentState()),
            "warnings": [],
            "created_at": self.clock(),
            "completed_at": None,
        }
        self.tables.upsert_game(row)
        return row

    def get_state(self, game_id: str, role_key: str) -> dict:
        game = self._load_game(game_id)
        if role_key == game["architect_key"]:
            role = "architect"
        elif role_key == game["builder_key"]:
            role = "builder"
        else:
            raise AuthFailure("unknown role key")
        world = self._world(game["world_ref"])
        # target structure is visible to the multi-turn architect only
        target_blocks = None
        if game["mode"] == MULTI_TURN and role == "architect":
            target = self._world(game["target_ref"])
            target_blocks = [[p.x, p.y, p.z, c.value] for p, c in sorted(target.blocks())]
        return {
            "game_id": game_id,
            "mode": game["mode"],
            "status": game["status"],
            "version": game["version"],
            "turn_index": game["turn_index"],
            "world_version": game["world_version"],
            "role": role,
            "world": [[p.x, p.y, p.z, c.value] for p, c in sorted(world.blocks())],
            "agent": game["agent"],
            "target": target_blocks,
            "turns": self.tables.rows("turns", game_id),
            "warnings": game["warnings"],
            "instruction": self._judged_instruction(game) if game["mode"] == SINGLE_TURN_JUDGE else None,
        }

    def _judged_instruction(self, game: dict) -> Optional[str]:
        build_rows = self.tables.rows("instructions", game["target_ref"])
        return build_rows[-1]["text"] if build_rows else None

    def post_instruction(
        self, game_id: str, architect_key: str, text: str, expected_version: Optional[int] = None
    ) -> dict:
        with self._lock_for(game_id):
            game = self._load_game(game_id)
            self._check_version(game, expected_version)
            if game["status"] != AWAITING_ARCHITECT:
                raise WrongTurn(f"status is {game['status']}, not {AWAITING_ARCHITECT}")
            self._check_key(game, "architect", architect_key)
            reason = clean_reason(text, self.min_instruction_words)
            if reason is not None:
                raise RejectedText(reason)

            game["turn_index"] += 1
            turn = {
                "game_id": game_id,
                "turn_index": game["turn_index"],
                "role": "architect",
                "utterance": text,
                "log_ref": None,
                "world_ref": game["world_ref"],
                "is_question": False,
                "t": self.clock(),
            }
            self.tables.insert("turns", turn)
            self.tables.insert(
                "instructions",
                {"game_id": game_id, "turn_index": game["turn_index"], "text": text},
            )
            if game["mode"] == SINGLE_TURN_BUILD:
                game["status"] = COMPLETE
                game["completed_at"] = self.clock()
            else:
                game["status"] = AWAITING_BUILDER
            game["version"] += 1
            self.tables.upsert_game(game)
            return {"turn": turn, "version": game["version"], "status": game["status"]}

    def post_builder_turn(
        self,
        game_id: str,
        builder_key: str,
        question: Optional[str] = None,
        steps: Optional[list[dict]] = None,
        expected_version: Optional[int] = None,
    ) -> dict:
        if (question is None) == (steps is None):
            raise ValueError("builder turn carries either a question or an action log")
        with self._lock_for(game_id):
            game = self._load_game(game_id)
            self._check_version(game, expected_version)
            if game["status"] != AWAITING_BUILDER:
                raise WrongTurn(f"status is {game['status']}, not {AWAITING_BUILDER}")
            self._check_key(game, "builder", builder_key)
            if game["mode"] == SINGLE_TURN_JUDGE:
                raise WrongTurn("judge sessions accept judgments, not builder turns")
            if question is not None and game["mode"] == SINGLE_TURN_BUILD:
                raise WrongTurn("build sessions expect an action log, not a question")

            game["turn_index"] += 1
            if question is not None:
                turn = {
                    "game_id": game_id,
                    "turn_index": game["turn_index"],
                    "role": "builder",
                    "utterance": question,
                    "log_ref": None,
                    "world_ref": game["world_ref"],
                    "is_question": True,
                    "t": self.clock(),
                }
                self.tables.insert("turns", turn)
                self.tables.insert(
                    "questions",
                    {"game_id": game_id, "turn_index": game["turn_index"], "text": question},
                )
            else:
                log, world, agent = self._replayed(game, steps)
                log_ref = self.objects.put_text(log.to_jsonl())
                world_ref = self.objects.put_text(world_to_json(world))
                game["world_ref"] = world_ref
                game["world_version"] += 1
                game["agent"] = self._agent_dict(agent)
                if game["mode"] == SINGLE_TURN_BUILD and log.duration_ms() > BUILD_WINDOW_MS:
                    game["warnings"] = list(game["warnings"]) + [
                        f"build log duration {log.duration_ms()} ms exceeds the one-minute window"
                    ]
                turn = {
                    "game_id": game_id,
                    "turn_index": game["turn_index"],
                    "role": "builder",
                    "utterance": "",
                    "log_ref": log_ref,
                    "world_ref": world_ref,
                    "is_question": False,
                    "t": self.clock(),
                }
                self.tables.insert("turns", turn)

            game["status"] = AWAITING_ARCHITECT
            game["version"] += 1
            self.tables.upsert_game(game)
            return {"turn": turn, "version": game["version"], "status": game["status"]}

    def _replayed(
        self, game: dict, steps: list[dict]
    ) -> tuple[ActionLog, VoxelWorld, AgentState]:
        """Validate steps against the current world; raises IllegalActions."""
        base = self._world(game["world_ref"])
        log = ActionLog(base, self._agent(game), self.rules)
        for i, record in enumerate(steps):
            try:
                log.append(action_from_record(record))
            except ActionError as exc:
                raise IllegalActions(i, f"{type(exc).__name__}: {exc}") from exc
            except (KeyError, ValueError, TypeError) as exc:
                raise IllegalActions(i, f"malformed action record: {exc}") from exc
        world, agent = log.final_state()
        return log, world, agent

    def mark_complete(
        self, game_id: str, architect_key: str, expected_version: Optional[int] = None
    ) -> dict:
        with self._lock_for(game_id):
            game = self._load_game(game_id)
            self._check_version(game, expected_version)
            if game["mode"] != MULTI_TURN:
                raise WrongTurn("only multi-turn games take a completion mark")
            if game["status"] != AWAITING_ARCHITECT:
                raise WrongTurn(f"status is {game['status']}, not {AWAITING_ARCHITECT}")
            self._check_key(game, "architect", architect_key)

            game["turn_index"] += 1
            turn = {
                "game_id": game_id,
                "turn_index": game["turn_index"],
                "role": "architect",
                "utterance": COMPLETION_MARK,
                "log_ref": None,
                "world_ref": game["world_ref"],
                "is_question": False,
                "t": self.clock(),
            }
            self.tables.insert("turns", turn)
            game["status"] = COMPLETE
            game["completed_at"] = self.clock()
            game["version"] += 1
            self.tables.upsert_game(game)

            report = match(self._world(game["world_ref"]), self._world(game["target_ref"]))
            return {
                "version": game["version"],
                "status": game["status"],
                "report": _report_dict(report),
            }

    def submit_single_turn_judgment(
        self,
        game_id: str,
        builder_key: str,
        clear: bool,
        question: Optional[str] = None,
        steps: Optional[list[dict]] = None,
        expected_version: Optional[int] = None,
    ) -> dict:
        with self._lock_for(game_id):
            game = self._load_game(game_id)
            self._check_version(game, expected_version)
            if game["mode"] != SINGLE_TURN_JUDGE:
                raise WrongTurn("only judge sessions accept judgments")
            if game["status"] != AWAITING_BUILDER:
                raise WrongTurn(f"status is {game['status']}, not {AWAITING_BUILDER}")
            self._check_key(game, "builder", builder_key)

            if clear:
                if not steps:
                    raise MissingRebuild()
                log, world, agent = self._replayed(game, steps)
                log_ref = self.objects.put_text(log.to_jsonl())
                world_ref = self.objects.put_text(world_to_json(world))
                game["world_ref"] = world_ref
                game["world_version"] += 1
                game["agent"] = self._agent_dict(agent)
                payload = {"log_ref": log_ref, "world_ref": world_ref, "utterance": ""}
                is_question = False
            else:
                if question is None or not question.strip():
                    raise MissingQuestion()
                payload = {"log_ref": None, "world_ref": game["world_ref"], "utterance": question}
                is_question = True

            game["turn_index"] += 1
            turn = {
                "game_id": game_id,
                "turn_index": game["turn_index"],
                "role": "builder",
                "is_question": is_question,
                "t": self.clock(),
                **payload,
            }
            self.tables.insert("turns", turn)
            if is_question:
                self.tables.insert(
                    "questions",
                    {"game_id": game_id, "turn_index": game["turn_index"], "text": question},
                )
            game["clear_judgment"] = clear
            game["status"] = COMPLETE
            game["completed_at"] = self.clock()
            game["version"] += 1
            self.tables.upsert_game(game)
            return {"version": game["version"], "status": game["status"], "clear": clear}

    # -- export ----------------------------------------------------------

    def export_corpus(self, kind: str) -> list:
        if kind == "multi":
            records = []
            for game in self.tables.all_games():
                if game["mode"] != MULTI_TURN:
                    continue
                records.append(self._game_record(game))
            return records
        if kind == "single":
            records = []
            for game in self.tables.all_games():
                if game["mode"] != SINGLE_TURN_JUDGE or game["status"] != COMPLETE:
                    continue
                rec = self._single_turn_record(game)
                if rec is not None:
                    records.append(rec)
            return records
        raise ValueError(f"kind must be multi or single, got {kind!r}")

    def _game_record(self, game: dict) -> GameRecord:
        turns = []
        for row in self.tables.rows("turns", game["game_id"]):
            actions = None
            if row["log_ref"]:
                log = ActionLog.from_jsonl(self.objects.get_text(row["log_ref"]), self.rules)
                actions = tuple(action_to_record(a) for a in log.steps)
            turns.append(
                Turn(
                    role=row["role"],
                    utterance=row["utterance"],
                    actions=actions,
                    world_ref=row["world_ref"],
                    is_question=row["is_question"],
                )
            )
        end = game["completed_at"] if game["completed_at"] is not None else self.clock()
        return GameRecord(
            game_id=game["game_id"],
            target_ref=game["target_ref"],
            turns=tuple(turns),
            completed=game["status"] == COMPLETE,
            duration_minutes=max(0.0, (end - game["created_at"]) / 60_000.0),
        )

    def _single_turn_record(self, judge: dict) -> Optional[SingleTurnSample]:
        build = self.tables.get_game(judge["target_ref"])
        if build is None:
            return None
        build_turns = self.tables.rows("turns", build["game_id"])
        log_rows = [r for r in build_turns if r["log_ref"]]
        instr_rows = self.tables.rows("instructions", build["game_id"])
        if not log_rows or not instr_rows:
            return None
        log = ActionLog.from_jsonl(self.objects.get_text(log_rows[0]["log_ref"]), self.rules)
        questions = tuple(r["text"] for r in self.tables.rows("questions", judge["game_id"]))
        return SingleTurnSample(
            id=judge["game_id"],
            world_ref=build["initial_ref"],
            actions=tuple(action_to_record(a) for a in log.steps),
            instruction=instr_rows[-1]["text"],
            clear=bool(judge.get("clear_judgment")),
            questions=questions,
            worker_id=None,
            agent=self._agent_dict(log.initial_agent),
        )


def _report_dict(report: MatchReport) -> dict:
    return {
        "exact": report.exact,
        "translated_match": report.translated_match,
        "offset": list(report.offset),
        "missing": report.missing,
        "extra": report.extra,
    }
