"""Dense float64 math with reverse-mode gradients, SGD and gradient checks."""

from .autograd import (
    Tensor,
    add,
    concat,
    embedding,
    matmul,
    mul,
    no_grad,
    sigmoid,
    softmax_cross_entropy,
    tanh,
    take,
)
from .functional import cross_entropy, softmax
from .gradcheck import GradCheckReport, grad_check, relative_error
from .optim import DEFAULT_CLIP_NORM, StepDecaySchedule, clip_grad_norm, sgd_step
from .params import ParameterStore, load_checkpoint, save_checkpoint

__all__ = [
    "Tensor", "add", "concat", "embedding", "matmul", "mul", "no_grad", "sigmoid",
    "softmax_cross_entropy", "tanh", "take", "cross_entropy", "softmax",
    "GradCheckReport", "grad_check", "relative_error", "DEFAULT_CLIP_NORM",
    "StepDecaySchedule", "clip_grad_norm", "sgd_step", "ParameterStore",
    "load_checkpoint", "save_checkpoint",
]
