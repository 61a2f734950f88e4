"""A small reverse-mode differentiation engine over float64 numpy arrays.

Each :class:`Tensor` remembers the tensors it was computed from and a
closure that maps the output gradient to input gradients.  Calling
``backward`` on a scalar walks the graph in reverse topological order.
Gradients reaching leaf tensors are *added* to ``leaf.grad``, so several
backward passes accumulate until the caller zeroes them.
"""

from __future__ import annotations

import contextlib

import numpy as np

from ..errors import ShapeMismatch


_grad_enabled = True


@contextlib.contextmanager
def no_grad():
    """Build no graph inside the block; results are plain constants."""
    global _grad_enabled
    prev, _grad_enabled = _grad_enabled, False
    try:
        yield
    finally:
        _grad_enabled = prev


class Tensor:
    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward", "name")

    def __init__(self, data, requires_grad=False, name=None, _parents=(), _backward=None):
        self.data = np.asarray(data, dtype=np.float64)
        if not _grad_enabled:
            _parents, _backward = (), None
        self.requires_grad = requires_grad or any(p.requires_grad for p in _parents)
        self.grad = np.zeros_like(self.data) if requires_grad and not _parents else None
        self._parents = _parents
        self._backward = _backward
        self.name = name

    @property
    def shape(self):
        return self.data.shape

    @property
    def is_leaf(self):
        return not self._parents

    def __repr__(self):
        label = f" {self.name!r}" if self.name else ""
        return f"Tensor{label}(shape={self.shape})"

    def numpy(self):
        return self.data

    def item(self):
        return float(self.data)

    def zero_grad(self):
        if self.grad is not None:
            self.grad[...] = 0.0

    def backward(self, grad=None):
        if grad is None:
            if self.data.size != 1:
                raise ShapeMismatch("backward() without a seed gradient needs a scalar")
            grad = np.ones_like(self.data)
        grads = {id(self): np.asarray(grad, dtype=np.float64)}
        for node in reversed(_topo_order(self)):
            g = grads.pop(id(node), None)
            if g is None:
                continue
            if node.is_leaf:
                if node.grad is not None:
                    node.grad += g
                continue
            for parent, pg in zip(node._parents, node._backward(g)):
                if pg is None or not parent.requires_grad:
                    continue
                key = id(parent)
                if key in grads:
                    grads[key] = grads[key] + pg
                else:
                    grads[key] = pg

    # arithmetic

    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        return add(self, neg(_lift(other)))

    def __rsub__(self, other):
        return add(_lift(other), neg(self))

    def __neg__(self):
        return neg(self)

    def __mul__(self, other):
        return mul(self, other)

    __rmul__ = __mul__

    def __matmul__(self, other):
        return matmul(self, other)

    def __getitem__(self, index):
        return take(self, index)

    def sum(self):
        return total(self)


def _lift(x):
    return x if isinstance(x, Tensor) else Tensor(x)


def _topo_order(root):
    order, seen = [], set()
    stack = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for p in node._parents:
            if p.requires_grad and id(p) not in seen:
                stack.append((p, False))
    return order


def _unbroadcast(grad, shape):
    """Sum ``grad`` down to ``shape`` after numpy broadcasting."""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, dim in enumerate(shape):
        if dim == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


def add(a, b):
    a, b = _lift(a), _lift(b)
    try:
        out = a.data + b.data
    except ValueError as exc:
        raise ShapeMismatch(str(exc)) from None

    def backward(g):
        return _unbroadcast(g, a.shape), _unbroadcast(g, b.shape)

    return Tensor(out, _parents=(a, b), _backward=backward)


def neg(a):
    return Tensor(-a.data, _parents=(a,), _backward=lambda g: (-g,))


def mul(a, b):
    a, b = _lift(a), _lift(b)
    try:
        out = a.data * b.data
    except ValueError as exc:
        raise ShapeMismatch(str(exc)) from None

    def backward(g):
        return _unbroadcast(g * b.data, a.shape), _unbroadcast(g * a.data, b.shape)

    return Tensor(out, _parents=(a, b), _backward=backward)


def matmul(a, b):
    a, b = _lift(a), _lift(b)
    if a.data.ndim != 2 or b.data.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ShapeMismatch(f"matmul {a.shape} @ {b.shape}")

    def backward(g):
        return g @ b.data.T, a.data.T @ g

    return Tensor(a.data @ b.data, _parents=(a, b), _backward=backward)


def sigmoid(a):
    # split by sign so exp never overflows
    x = a.data
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return Tensor(out, _parents=(a,), _backward=lambda g: (g * out * (1.0 - out),))


def tanh(a):
    out = np.tanh(a.data)
    return Tensor(out, _parents=(a,), _backward=lambda g: (g * (1.0 - out * out),))


def concat(tensors, axis=-1):
    tensors = [_lift(t) for t in tensors]
    try:
        out = np.concatenate([t.data for t in tensors], axis=axis)
    except ValueError as exc:
        raise ShapeMismatch(str(exc)) from None
    bounds = np.cumsum([t.shape[axis] for t in tensors])[:-1]

    def backward(g):
        return tuple(np.split(g, bounds, axis=axis))

    return Tensor(out, _parents=tuple(tensors), _backward=backward)


def take(a, index):
    """Basic-indexing slice (e.g. a gate block ``t[:, 0:h]``)."""
    out = a.data[index]

    def backward(g):
        full = np.zeros_like(a.data)
        full[index] += g
        return (full,)

    return Tensor(out, _parents=(a,), _backward=backward)


def embedding(table, ids):
    """Rows of ``table`` selected by an integer id array."""
    ids = np.asarray(ids, dtype=np.intp)
    if table.data.ndim != 2:
        raise ShapeMismatch("embedding table must be 2-D")
    if ids.size and (ids.min() < 0 or ids.max() >= table.shape[0]):
        raise ShapeMismatch(f"id out of range for table with {table.shape[0]} rows")

    def backward(g):
        full = np.zeros_like(table.data)
        np.add.at(full, ids, g)
        return (full,)

    return Tensor(table.data[ids], _parents=(table,), _backward=backward)


def total(a):
    return Tensor(a.data.sum(), _parents=(a,), _backward=lambda g: (np.broadcast_to(g, a.shape).copy(),))


def log_softmax_rows(x):
    """Row-wise log-softmax of a 2-D array with max subtraction."""
    shifted = x - x.max(axis=-1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))


def softmax_cross_entropy(logits, targets, weights=None):
    """Sum over rows of ``-weight * log softmax(logits)[target]``.

    ``weights`` masks padded positions (0) or scales rows, e.g. ``1/B`` to
    take a batch mean.
    """
    x = logits.data
    if x.ndim != 2:
        raise ShapeMismatch("logits must be (rows, classes)")
    targets = np.asarray(targets, dtype=np.intp)
    if targets.shape != (x.shape[0],):
        raise ShapeMismatch(f"targets {targets.shape} for logits {x.shape}")
    w = np.ones(x.shape[0]) if weights is None else np.asarray(weights, dtype=np.float64)
    logp = log_softmax_rows(x)
    rows = np.arange(x.shape[0])
    loss = -(w * logp[rows, targets]).sum()

    def backward(g):
        probs = np.exp(logp)
        probs[rows, targets] -= 1.0
        return (g * w[:, None] * probs,)

    return Tensor(loss, _parents=(logits,), _backward=backward)
