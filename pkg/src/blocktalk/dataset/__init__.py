from .io import (
    DUPLICATE,
    NOT_ENGLISH,
    TOO_SHORT,
    CleanReport,
    EmptyCorpus,
    LoadReport,
    clean,
    clean_reason,
    load_corpus,
    looks_english,
    save_corpus,
    stats,
)
from .schema import (
    ARCHITECT,
    BUILDER,
    CorpusStats,
    GameRecord,
    ParseError,
    SchemaError,
    SingleTurnSample,
    Turn,
    ValidationError,
)
from .synthetic import (
    RankCorpus,
    SynthConfig,
    SynthResult,
    random_legal_actions,
    synth_generate,
    synth_rank_corpus,
    synth_world,
)

__all__ = [
    "ARCHITECT",
    "BUILDER",
    "CleanReport",
    "CorpusStats",
    "DUPLICATE",
    "EmptyCorpus",
    "GameRecord",
    "LoadReport",
    "NOT_ENGLISH",
    "ParseError",
    "RankCorpus",
    "SchemaError",
    "SingleTurnSample",
    "SynthConfig",
    "SynthResult",
    "TOO_SHORT",
    "Turn",
    "ValidationError",
    "clean",
    "clean_reason",
    "load_corpus",
    "looks_english",
    "random_legal_actions",
    "save_corpus",
    "stats",
    "synth_generate",
    "synth_rank_corpus",
    "synth_world",
]
