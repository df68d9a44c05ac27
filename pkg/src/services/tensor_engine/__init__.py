"""Tensor engine: numpy tensors with reverse-mode autodiff, layers, checkpoints."""

from src.services.tensor_engine import functional, ops
from src.services.tensor_engine.checkpoint import load_checkpoint, read_manifest, save_checkpoint
from src.services.tensor_engine.grad_check import grad_check
from src.services.tensor_engine.nn import (
    BatchNorm,
    Conv1d,
    Conv2d,
    Linear,
    Module,
    MultiHeadAttention,
    Parameter,
    ReLU,
    Sequential,
)
from src.services.tensor_engine.tensor import (
    Function,
    Tensor,
    as_tensor,
    get_default_dtype,
    is_grad_enabled,
    no_grad,
    precision,
    set_default_dtype,
)

__all__ = [
    "BatchNorm",
    "Conv1d",
    "Conv2d",
    "Function",
    "Linear",
    "Module",
    "MultiHeadAttention",
    "Parameter",
    "ReLU",
    "Sequential",
    "Tensor",
    "as_tensor",
    "functional",
    "get_default_dtype",
    "grad_check",
    "is_grad_enabled",
    "load_checkpoint",
    "no_grad",
    "ops",
    "precision",
    "read_manifest",
    "save_checkpoint",
    "set_default_dtype",
]
