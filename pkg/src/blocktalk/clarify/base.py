"""Shared task records for the clarification pipelines."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..dataset.schema import ValidationError

CLEAR = "clear"
AMBIGUOUS = "ambiguous"


@dataclass(frozen=True)
class LabeledInstruction:
    """An instruction with its world reference and clarity judgment.

    Ambiguous instructions always carry at least one clarifying question;
    that collection rule is enforced at construction.
    """

    id: str
    instruction: str
    world_ref: Optional[str]
    label: str
    questions: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.label not in (CLEAR, AMBIGUOUS):
            raise ValidationError(f"{self.id}: label must be clear or ambiguous, got {self.label!r}")
        if not self.instruction.strip():
            raise ValidationError(f"{self.id}: instruction must be nonempty")
        if self.label == AMBIGUOUS and not self.questions:
            raise ValidationError(
                f"{self.id}: an instruction marked ambiguous must carry at least one clarifying question"
            )

    @property
    def is_ambiguous(self) -> bool:
        return self.label == AMBIGUOUS


@dataclass(frozen=True)
class QuestionPool:
    """Candidate clarifying questions, optionally with the one gold id."""

    candidates: tuple[tuple[str, str], ...]  # (id, text)
    gold: Optional[str] = None

    def __post_init__(self) -> None:
        ids = [qid for qid, _ in self.candidates]
        if len(set(ids)) != len(ids):
            raise ValidationError("question pool ids must be unique")
        if self.gold is not None and self.gold not in set(ids):
            raise ValidationError(f"gold id {self.gold!r} not present in the pool")

    def ids(self) -> list[str]:
        return [qid for qid, _ in self.candidates]

    def text_of(self, qid: str) -> str:
        for cid, text in self.candidates:
            if cid == qid:
                return text
        raise KeyError(qid)
