"""HTTP/1.1 adapter for the session service.

Endpoints (JSON bodies, JSON responses carrying the session version):

    POST /games                      {mode, target_id?, seed_world_id?}
    GET  /games/{id}/state?role_key=KEY
    POST /games/{id}/instruction     {role_key, version, text}
    POST /games/{id}/builder-turn    {role_key, version, question? | steps?}
    POST /games/{id}/complete        {role_key, version}
    POST /games/{id}/judgment        {role_key, version, clear, question?, steps?}
    GET  /export/corpus?kind=multi|single   (JSON lines)

The server is a plain threading HTTP server; all game mutations are
serialized inside SessionService. When a web root is configured, GET
requests outside the API are served from it so the browser client can be
hosted by the same process.
"""

from __future__ import annotations

import json
import re
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Optional
from urllib.parse import parse_qs, urlparse

from ..dataset.schema import ValidationError, record_to_json
from .core import (
    AuthFailure,
    IllegalActions,
    MissingQuestion,
    MissingRebuild,
    RejectedText,
    ServiceError,
    SessionService,
    StaleVersion,
    UnknownGame,
    UnknownTarget,
    UnknownWorld,
    WrongTurn,
)

_STATUS_BY_KIND = {
    UnknownGame.kind: 404,
    UnknownTarget.kind: 404,
    UnknownWorld.kind: 404,
    AuthFailure.kind: 403,
    WrongTurn.kind: 409,
    StaleVersion.kind: 409,
    RejectedText.kind: 422,
    MissingQuestion.kind: 422,
    MissingRebuild.kind: 422,
    IllegalActions.kind: 422,
}

_GAME_ROUTE = re.compile(r"^/games/([^/]+)/(state|instruction|builder-turn|complete|judgment)$")

_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".map": "application/json",
    ".png": "image/png",
    ".svg": "image/svg+xml",
}


def _public_game_view(row: dict, with_keys: bool) -> dict:
    view = {
        "game_id": row["game_id"],
        "mode": row["mode"],
        "status": row["status"],
        "version": row["version"],
        "turn_index": row["turn_index"],
        "world_version": row["world_version"],
        "world_ref": row["world_ref"],
        "target_ref": row["target_ref"],
    }
    if with_keys:
        view["architect_key"] = row["architect_key"]
        view["builder_key"] = row["builder_key"]
    return view


class ServiceHandler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    server_version = "blocktalk"

    @property
    def service(self) -> SessionService:
        return self.server.service  # type: ignore[attr-defined]

    @property
    def web_root(self) -> Optional[Path]:
        return self.server.web_root  # type: ignore[attr-defined]

    def log_message(self, fmt: str, *args) -> None:  # quiet by default
        if getattr(self.server, "verbose", False):
            super().log_message(fmt, *args)

    # -- plumbing ---------------------------------------------------------

    def _send_json(self, status: int, payload: dict) -> None:
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def _send_text(self, status: int, text: str, content_type: str) -> None:
        body = text.encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def _read_body(self) -> dict:
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length) if length else b""
        if not raw:
            return {}
        try:
            data = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ValueError(f"request body is not valid JSON: {exc}")
        if not isinstance(data, dict):
            raise ValueError("request body must be a JSON object")
        return data

    def _handle(self, fn) -> None:
        try:
            fn()
        except ServiceError as exc:
            self._send_json(
                _STATUS_BY_KIND.get(exc.kind, 422), {"error": exc.kind, "detail": exc.detail}
            )
        except ValidationError as exc:
            self._send_json(422, {"error": "ValidationError", "detail": str(exc)})
        except (ValueError, KeyError, TypeError) as exc:
            self._send_json(400, {"error": "BadRequest", "detail": str(exc)})

    # -- verbs -------------------------------------------------------------

    def do_OPTIONS(self) -> None:  # CORS preflight for browser clients
        self.send_response(204)
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.send_header("Content-Length", "0")
        self.end_headers()

    def do_POST(self) -> None:
        self._handle(self._post)

    def do_GET(self) -> None:
        self._handle(self._get)

    def _post(self) -> None:
        url = urlparse(self.path)
        body = self._read_body()
        if url.path == "/games":
            row = self.service.create_game(
                mode=body.get("mode", ""),
                target_id=body.get("target_id"),
                seed_world_id=body.get("seed_world_id"),
            )
            self._send_json(201, _public_game_view(row, with_keys=True))
            return

        m = _GAME_ROUTE.match(url.path)
        if not m:
            self._send_json(404, {"error": "NotFound", "detail": self.path})
            return
        game_id, op = m.group(1), m.group(2)
        key = str(body.get("role_key", ""))
        version = body.get("version")
        version = int(version) if version is not None else None

        if op == "instruction":
            result = self.service.post_instruction(game_id, key, str(body.get("text", "")), version)
        elif op == "builder-turn":
            result = self.service.post_builder_turn(
                game_id, key,
                question=body.get("question"),
                steps=body.get("steps"),
                expected_version=version,
            )
        elif op == "complete":
            result = self.service.mark_complete(game_id, key, version)
        elif op == "judgment":
            result = self.service.submit_single_turn_judgment(
                game_id, key,
                clear=bool(body.get("clear")),
                question=body.get("question"),
                steps=body.get("steps"),
                expected_version=version,
            )
        else:
            self._send_json(405, {"error": "MethodNotAllowed", "detail": op})
            return
        self._send_json(200, result)

    def _get(self) -> None:
        url = urlparse(self.path)
        query = parse_qs(url.query)

        m = _GAME_ROUTE.match(url.path)
        if m and m.group(2) == "state":
            key = (query.get("role_key") or [""])[0]
            self._send_json(200, self.service.get_state(m.group(1), key))
            return
        if url.path == "/export/corpus":
            kind = (query.get("kind") or [""])[0]
            records = self.service.export_corpus(kind)
            lines = "\n".join(record_to_json(rec) for rec in records)
            self._send_text(200, lines + ("\n" if lines else ""), "application/x-ndjson")
            return
        if self.web_root is not None:
            self._serve_static(url.path)
            return
        self._send_json(404, {"error": "NotFound", "detail": self.path})

    def _serve_static(self, path: str) -> None:
        rel = path.lstrip("/") or "index.html"
        target = (self.web_root / rel).resolve()
        if not str(target).startswith(str(self.web_root.resolve())) or not target.is_file():
            self._send_json(404, {"error": "NotFound", "detail": path})
            return
        content_type = _CONTENT_TYPES.get(target.suffix, "application/octet-stream")
        self._send_text(200, target.read_text(encoding="utf-8"), content_type)


def make_server(
    service: SessionService, port: int = 0, web_root: Optional[Path] = None
) -> ThreadingHTTPServer:
    server = ThreadingHTTPServer(("127.0.0.1", port), ServiceHandler)
    server.service = service  # type: ignore[attr-defined]
    server.web_root = Path(web_root) if web_root else None  # type: ignore[attr-defined]
    return server


def serve_forever(service: SessionService, port: int, web_root: Optional[Path] = None) -> None:
    server = make_server(service, port, web_root)
    print(f"listening on http://127.0.0.1:{server.server_address[1]}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.shutdown()


def start_background(
    service: SessionService, port: int = 0, web_root: Optional[Path] = None
) -> tuple[ThreadingHTTPServer, threading.Thread]:
    """Spin the server on a daemon thread; returns (server, thread)."""
    server = make_server(service, port, web_root)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    return server, thread
