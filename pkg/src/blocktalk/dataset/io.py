"""Corpus loading, cleaning, and summary statistics."""

from __future__ import annotations

import json
import string
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

from .schema import (
    CorpusStats,
    GameRecord,
    ParseError,
    SchemaError,
    SingleTurnSample,
    ValidationError,
    game_from_dict,
    record_to_json,
    sample_from_dict,
)

MIN_INSTRUCTION_WORDS = 3

# Drop reasons are machine readable; clean() reports one per dropped record.
TOO_SHORT = "TooShort"
NOT_ENGLISH = "NotEnglish"
DUPLICATE = "Duplicate"

# 200 common English words; one hit plus a mostly-ASCII character profile
# is the (deliberately cheap) English heuristic.
STOPWORDS: frozenset = frozenset("""
a about above after again against all am an and
any are as at be because been before being below
between both but by can cannot could did do does
doing down during each few for from further had has
have having he her here hers herself him himself his
how i if in into is it its itself just
me more most my myself no nor not now of
off on once only or other ought our ours ourselves
out over own same she should so some such than
that the their theirs them themselves then there these they
this those through to too under until up very was
we were what when where which while who whom why
will with you your yours yourself yourselves would also back
one two three four five first second next last many
much make made get got go going come came see
put place take need want like know think say said
use used right left top bottom side middle front behind
near far high low big small long short new old
good well way even still around away please thanks okay
yes ok it's don't doesn't isn't let lets across along
""".split())

_ASCII_OK = frozenset(string.ascii_letters + string.digits + string.punctuation + " \t")


class EmptyCorpus(ValueError):
    pass


@dataclass
class LoadReport:
    records: list
    skipped: list[tuple[int, str]]  # (line number, reason)


@dataclass
class CleanReport:
    kept: list
    dropped: list[tuple[object, str]]  # (record, reason)


def looks_english(text: str) -> bool:
    stripped = text.strip()
    if not stripped:
        return False
    ok = sum(1 for ch in stripped if ch in _ASCII_OK)
    if ok / len(stripped) < 0.9:
        return False
    words = {w.strip(string.punctuation) for w in stripped.lower().split()}
    return bool(words & STOPWORDS)


def clean_reason(text: str, min_words: int = MIN_INSTRUCTION_WORDS) -> Optional[str]:
    """Why a single instruction text would be dropped, or None if it is fine."""
    if len(text.split()) < min_words:
        return TOO_SHORT
    if not looks_english(text):
        return NOT_ENGLISH
    return None


def load_corpus(
    path: Union[str, Path],
    kind: str,
    mapping: Optional[dict[str, str]] = None,
) -> LoadReport:
    """Load and validate a line-delimited corpus file.

    ``mapping`` renames external field names onto the canonical schema
    ({canonical_name: external_name}), applied at both the record and the
    turn level. Records breaching a type invariant are skipped and
    reported; malformed JSON or missing fields raise.
    """
    if kind not in ("multi", "single"):
        raise ValueError(f"kind must be multi or single, got {kind!r}")
    parse = game_from_dict if kind == "multi" else sample_from_dict

    records: list = []
    skipped: list[tuple[int, str]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"{path}:{lineno}: {exc}") from exc
            if not isinstance(raw, dict):
                raise ParseError(f"{path}:{lineno}: record must be an object")
            raw = _apply_mapping(raw, mapping)
            try:
                records.append(parse(raw))
            except SchemaError as exc:
                raise SchemaError(f"{path}:{lineno}: {exc}") from exc
            except ValidationError as exc:
                skipped.append((lineno, str(exc)))
    return LoadReport(records=records, skipped=skipped)


def save_corpus(path: Union[str, Path], records: Sequence) -> None:
    """Write records as canonical line-delimited JSON (byte-stable)."""
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(record_to_json(rec))
            fh.write("\n")


def _apply_mapping(raw: dict, mapping: Optional[dict[str, str]]) -> dict:
    if not mapping:
        return raw
    out = dict(raw)
    for canonical, external in mapping.items():
        if external in out and canonical not in out:
            out[canonical] = out.pop(external)
    if isinstance(out.get("turns"), list):
        out["turns"] = [_apply_mapping(t, mapping) if isinstance(t, dict) else t for t in out["turns"]]
    return out


def clean(
    records: Sequence[SingleTurnSample], min_words: int = MIN_INSTRUCTION_WORDS
) -> CleanReport:
    """Drop too-short, non-English, and repeated instructions.

    Duplicates are exact instruction repeats by the same worker; without
    worker ids the rule degrades to global exact-duplicate detection.
    """
    kept: list = []
    dropped: list[tuple[object, str]] = []
    seen: set = set()
    for rec in records:
        reason = clean_reason(rec.instruction, min_words)
        if reason is None:
            key = (rec.worker_id, rec.instruction)
            if key in seen:
                reason = DUPLICATE
            else:
                seen.add(key)
        if reason is None:
            kept.append(rec)
        else:
            dropped.append((rec, reason))
    return CleanReport(kept=kept, dropped=dropped)


def stats(records: Sequence) -> CorpusStats:
    """Summary statistics; supports both corpus kinds."""
    if not records:
        raise EmptyCorpus("no records to summarize")
    if isinstance(records[0], GameRecord):
        return _multi_stats(records)
    if isinstance(records[0], SingleTurnSample):
        return _single_stats(records)
    raise TypeError(f"not corpus records: {type(records[0])!r}")


def _word_count(text: str) -> int:
    return len(text.split())


def _avg(values: list[int]) -> Optional[float]:
    if not values:
        return None
    return sum(values) / len(values)


def _lower_median(values: list[float]) -> float:
    ordered = sorted(values)
    return ordered[(len(ordered) - 1) // 2]


def _multi_stats(records: Sequence[GameRecord]) -> CorpusStats:
    instructions = [u for rec in records for u in rec.architect_utterances()]
    questions = [q for rec in records for q in rec.question_utterances()]
    return CorpusStats(
        structures=len({rec.target_ref for rec in records if rec.target_ref is not None}),
        games=len(records),
        median_duration_minutes=_lower_median([rec.duration_minutes for rec in records]),
        utterances=sum(len(rec.turns) for rec in records),
        clarifying_questions=len(questions),
        avg_instruction_words=_avg([_word_count(u) for u in instructions]),
        avg_question_words=_avg([_word_count(q) for q in questions]),
    )


def _single_stats(records: Sequence[SingleTurnSample]) -> CorpusStats:
    clear = sum(1 for rec in records if rec.clear)
    questions = [q for rec in records for q in rec.questions]
    return CorpusStats(
        instructions=len(records),
        clear=clear,
        ambiguous=len(records) - clear,
        clarifying_questions=len(questions),
        avg_instruction_words=_avg([_word_count(rec.instruction) for rec in records]),
        avg_question_words=_avg([_word_count(q) for q in questions]),
    )
