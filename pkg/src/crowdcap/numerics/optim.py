from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal

from ..errors import InvalidConfig

DEFAULT_CLIP_NORM = 5.0


@dataclass(frozen=True)
class StepDecaySchedule:
    """``lr(epoch) = base_lr * factor ** (epoch // period)``."""

    base_lr: float
    factor: float = 1.0
    period: int = 1

    def __post_init__(self):
        if not self.base_lr > 0:
            raise InvalidConfig(f"base_lr must be positive, got {self.base_lr}")
        if not 0 < self.factor <= 1:
            raise InvalidConfig(f"factor must be in (0, 1], got {self.factor}")
        if int(self.period) != self.period or self.period < 1:
            raise InvalidConfig(f"period must be a positive integer, got {self.period}")

    def lr(self, epoch: int) -> float:
        # Evaluated in decimal so e.g. 4e-5 * 0.8**2 gives the double nearest 2.56e-5.
        k = int(epoch) // int(self.period)
        return float(Decimal(repr(self.base_lr)) * Decimal(repr(self.factor)) ** k)


def clip_grad_norm(store, max_norm):
    """Rescale all gradients so their global L2 norm is at most ``max_norm``.

    Returns the norm before clipping.
    """
    norm = store.grad_norm()
    if max_norm is not None and norm > max_norm:
        scale = max_norm / norm
        for p in store.values():
            p.grad *= scale
    return norm


def sgd_step(store, schedule: StepDecaySchedule, epoch: int, clip_norm=DEFAULT_CLIP_NORM):
    """One plain gradient-descent update, then zero the gradients.

    Pass ``clip_norm=None`` to skip clipping.  Returns the learning rate used.
    """
    lr = schedule.lr(epoch)
    if clip_norm is not None:
        clip_grad_norm(store, clip_norm)
    for p in store.values():
        p.data -= lr * p.grad
    store.zero_grads()
    return lr
