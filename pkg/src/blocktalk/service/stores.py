"""Collection-tool persistence: relational rows and content-addressed blobs.

TablesStore holds small relational rows (games, turns, instructions,
questions) in an append-only JSON-lines journal with an in-memory index;
restarting a service replays the journal. ObjectStore holds immutable
blobs (world snapshots, action logs) under their sha256 digest, so a blob
can never change under its address and re-writing identical content is a
no-op.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
from pathlib import Path
from typing import Optional, Union


class ObjectStore:
    def __init__(self, root: Union[str, Path]) -> None:
        self.root = Path(root) / "objects"
        self.root.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def put(self, data: bytes) -> str:
        digest = hashlib.sha256(data).hexdigest()
        path = self.root / digest
        with self._lock:
            if not path.exists():
                tmp = path.with_suffix(".tmp")
                tmp.write_bytes(data)
                os.replace(tmp, path)
        return digest

    def get(self, digest: str) -> bytes:
        path = self.root / digest
        if not path.exists():
            raise KeyError(digest)
        return path.read_bytes()

    def has(self, digest: str) -> bool:
        return (self.root / digest).exists()

    def put_text(self, text: str) -> str:
        return self.put(text.encode("utf-8"))

    def get_text(self, digest: str) -> str:
        return self.get(digest).decode("utf-8")


TABLES = ("games", "turns", "instructions", "questions")


class TablesStore:
    """Append-only journal of table rows with an in-memory index.

    ``games`` rows are upserted by game_id (latest wins on replay); the
    other tables are insert-only and keyed by (game_id, turn_index).
    Inserting into a child table requires the game row to exist, and turn
    indices per game must be gapless.
    """

    def __init__(self, root: Union[str, Path]) -> None:
        self.path = Path(root) / "tables.jsonl"
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self.games: dict[str, dict] = {}
        self.turns: dict[str, list[dict]] = {}
        self.instructions: dict[str, list[dict]] = {}
        self.questions: dict[str, list[dict]] = {}
        if self.path.exists():
            with open(self.path, "r", encoding="utf-8") as fh:
                for line in fh:
                    if line.strip():
                        entry = json.loads(line)
                        self._index(entry["table"], entry["row"])

    def _index(self, table: str, row: dict) -> None:
        if table == "games":
            self.games[row["game_id"]] = row
            return
        rows = getattr(self, table).setdefault(row["game_id"], [])
        rows.append(row)

    def _append(self, table: str, row: dict) -> None:
        with open(self.path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps({"table": table, "row": row}, sort_keys=True))
            fh.write("\n")
            fh.flush()
            os.fsync(fh.fileno())

    def upsert_game(self, row: dict) -> None:
        with self._lock:
            self._append("games", row)
            self.games[row["game_id"]] = dict(row)

    def insert(self, table: str, row: dict) -> None:
        if table not in ("turns", "instructions", "questions"):
            raise ValueError(f"unknown table {table!r}")
        with self._lock:
            game_id = row["game_id"]
            if game_id not in self.games:
                raise KeyError(f"game {game_id!r} does not exist")
            if table == "turns":
                existing = self.turns.get(game_id, [])
                expected = len(existing) + 1
                if row["turn_index"] != expected:
                    raise ValueError(
                        f"turn index {row['turn_index']} leaves a gap (expected {expected})"
                    )
            self._append(table, row)
            self._index(table, dict(row))

    def get_game(self, game_id: str) -> Optional[dict]:
        with self._lock:
            row = self.games.get(game_id)
            return dict(row) if row else None

    def rows(self, table: str, game_id: str) -> list[dict]:
        with self._lock:
            return [dict(r) for r in getattr(self, table).get(game_id, [])]

    def all_games(self) -> list[dict]:
        with self._lock:
            return [dict(r) for r in self.games.values()]
