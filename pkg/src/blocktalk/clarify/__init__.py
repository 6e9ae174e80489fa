from .base import AMBIGUOUS, CLEAR, LabeledInstruction, QuestionPool
from .bm25 import EmptyPool, bm25_rank, bm25_scores
from .dual import DualEncoder, DualEncoderConfig, build_query, train_dual_encoder
from .eda import eda_augment
from .metrics import EmptyInput, LengthMismatch, f1_score, mrr_at_k
from .need import (
    DegenerateData,
    NeedClassifier,
    NeedClassifierConfig,
    evaluate_need,
    train_need_classifier,
)
from .postfilter import color_postfilter, color_words

__all__ = [
    "AMBIGUOUS",
    "CLEAR",
    "DegenerateData",
    "DualEncoder",
    "DualEncoderConfig",
    "EmptyInput",
    "EmptyPool",
    "LabeledInstruction",
    "LengthMismatch",
    "NeedClassifier",
    "NeedClassifierConfig",
    "QuestionPool",
    "bm25_rank",
    "bm25_scores",
    "build_query",
    "color_postfilter",
    "color_words",
    "eda_augment",
    "evaluate_need",
    "f1_score",
    "mrr_at_k",
    "train_dual_encoder",
    "train_need_classifier",
]
