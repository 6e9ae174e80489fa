from .core import (
    AWAITING_ARCHITECT,
    AWAITING_BUILDER,
    COMPLETE,
    MULTI_TURN,
    SINGLE_TURN_BUILD,
    SINGLE_TURN_JUDGE,
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
from .http import make_server, serve_forever, start_background
from .stores import ObjectStore, TablesStore

__all__ = [
    "AWAITING_ARCHITECT",
    "AWAITING_BUILDER",
    "AuthFailure",
    "COMPLETE",
    "IllegalActions",
    "MULTI_TURN",
    "MissingQuestion",
    "MissingRebuild",
    "ObjectStore",
    "RejectedText",
    "SINGLE_TURN_BUILD",
    "SINGLE_TURN_JUDGE",
    "ServiceError",
    "SessionService",
    "StaleVersion",
    "TablesStore",
    "UnknownGame",
    "UnknownTarget",
    "UnknownWorld",
    "WrongTurn",
    "make_server",
    "serve_forever",
    "start_background",
]
