"""LSTM and GRU cells on top of the autodiff tensors.

Both cells keep their weights as three parameters in a
:class:`~crowdcap.numerics.ParameterStore`:

* ``<prefix>.W``  input weights, shape ``(input_dim, k * hidden_dim)``
* ``<prefix>.U``  recurrent weights, shape ``(hidden_dim, k * hidden_dim)``
* ``<prefix>.b``  biases, shape ``(k * hidden_dim,)``

with ``k = 4`` gate blocks for LSTM in the order (input, forget, candidate,
output) and ``k = 3`` for GRU in the order (update, reset, candidate).
Inputs and states are row-major batches of shape ``(batch, dim)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import EmptyInput, ShapeMismatch
from .numerics import Tensor, sigmoid, tanh

LSTM_GATES = ("input", "forget", "candidate", "output")
GRU_GATES = ("update", "reset", "candidate")
FORGET_BIAS = 1.0


@dataclass
class CellState:
    h: Tensor
    c: Optional[Tensor] = None


def _as_batch(x):
    t = x if isinstance(x, Tensor) else Tensor(x)
    return t[None, :] if t.data.ndim == 1 else t


class _Cell:
    num_gates: int

    def __init__(self, store, prefix, input_dim, hidden_dim):
        self.prefix = prefix
        self.input_dim = input_dim
        self.hidden_dim = hidden_dim
        k = self.num_gates * hidden_dim
        self.W = store.uniform(f"{prefix}.W", (input_dim, k))
        self.U = store.uniform(f"{prefix}.U", (hidden_dim, k), fan_in=hidden_dim)
        self.b = store.uniform(f"{prefix}.b", (k,), fan_in=hidden_dim)

    @property
    def num_params(self):
        return self.W.data.size + self.U.data.size + self.b.data.size

    def initial_state(self, batch=1) -> CellState:
        raise NotImplementedError

    def _check(self, x, state):
        if x.shape[-1] != self.input_dim:
            raise ShapeMismatch(f"{self.prefix}: input dim {x.shape[-1]} != {self.input_dim}")
        if state.h.shape[-1] != self.hidden_dim:
            raise ShapeMismatch(f"{self.prefix}: hidden dim {state.h.shape[-1]} != {self.hidden_dim}")

    def _block(self, t, i):
        h = self.hidden_dim
        return t[:, i * h:(i + 1) * h]


class LSTMCell(_Cell):
    """Standard LSTM without peepholes; forget-gate bias starts at 1."""

    num_gates = 4

    def __init__(self, store, prefix, input_dim, hidden_dim):
        super().__init__(store, prefix, input_dim, hidden_dim)
        self.b.data[hidden_dim:2 * hidden_dim] = FORGET_BIAS

    def initial_state(self, batch=1):
        zeros = np.zeros((batch, self.hidden_dim))
        return CellState(Tensor(zeros), Tensor(zeros.copy()))

    def step(self, x, state: CellState) -> CellState:
        x = _as_batch(x)
        self._check(x, state)
        pre = x @ self.W + state.h @ self.U + self.b
        i = sigmoid(self._block(pre, 0))
        f = sigmoid(self._block(pre, 1))
        g = tanh(self._block(pre, 2))
        o = sigmoid(self._block(pre, 3))
        c = f * state.c + i * g
        return CellState(o * tanh(c), c)


class GRUCell(_Cell):
    """GRU with the reset gate applied to ``U h`` inside the candidate."""

    num_gates = 3

    def initial_state(self, batch=1):
        return CellState(Tensor(np.zeros((batch, self.hidden_dim))))

    def step(self, x, state: CellState) -> CellState:
        x = _as_batch(x)
        self._check(x, state)
        wx = x @ self.W + self.b
        uh = state.h @ self.U
        z = sigmoid(self._block(wx, 0) + self._block(uh, 0))
        r = sigmoid(self._block(wx, 1) + self._block(uh, 1))
        n = tanh(self._block(wx, 2) + r * self._block(uh, 2))
        return CellState((1.0 - z) * n + z * state.h)


CELLS = {"lstm": LSTMCell, "gru": GRUCell}


def make_cell(kind, store, prefix, input_dim, hidden_dim):
    try:
        cls = CELLS[kind.lower()]
    except KeyError:
        raise ValueError(f"unknown cell kind {kind!r}; expected one of {sorted(CELLS)}") from None
    return cls(store, prefix, input_dim, hidden_dim)


def unroll(cell, inputs, initial: CellState) -> list[CellState]:
    """Run ``cell`` over ``inputs`` (a sequence of batches) from ``initial``."""
    if len(inputs) == 0:
        raise EmptyInput("unroll over an empty sequence")
    states = []
    state = initial
    for x in inputs:
        state = cell.step(x, state)
        states.append(state)
    return states
