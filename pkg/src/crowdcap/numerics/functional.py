"""Plain-array softmax and cross-entropy used for scoring and as oracles."""

import numpy as np

from ..errors import EmptyInput, ShapeMismatch


def softmax(logits):
    """``exp(x_j) / sum_k exp(x_k)`` along the last axis, max-shifted."""
    x = np.asarray(logits, dtype=np.float64)
    if x.size == 0 or x.shape[-1] == 0:
        raise EmptyInput("softmax of an empty vector")
    e = np.exp(x - x.max(axis=-1, keepdims=True))
    return e / e.sum(axis=-1, keepdims=True)


def cross_entropy(predicted, target):
    """Categorical cross-entropy ``-sum_j Z_j log Zhat_j``.

    ``target`` is either a one-hot/probability vector or an integer class id.
    Terms with ``Z_j == 0`` contribute nothing, so a prediction that puts
    mass 1 on the target gives exactly 0.
    """
    p = np.asarray(predicted, dtype=np.float64)
    if np.ndim(target) == 0:
        idx = int(target)
        if not 0 <= idx < p.shape[-1]:
            raise ShapeMismatch(f"class id {idx} out of range for {p.shape[-1]} classes")
        return float(-np.log(p[..., idx]).sum()) + 0.0
    z = np.asarray(target, dtype=np.float64)
    if z.shape != p.shape:
        raise ShapeMismatch(f"predicted {p.shape} vs target {z.shape}")
    mask = z != 0
    return float(-(z[mask] * np.log(p[mask])).sum()) + 0.0
