from .encode import DialogueString, Vocab, decode_world_tensor, one_hot_encode
from .model import FusionConfig, FusionModel, NonFiniteLoss, ShapeMismatch

__all__ = [
    "DialogueString",
    "FusionConfig",
    "FusionModel",
    "NonFiniteLoss",
    "ShapeMismatch",
    "Vocab",
    "decode_world_tensor",
    "one_hot_encode",
]
