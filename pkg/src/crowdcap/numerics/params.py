"""Named trainable parameters and the binary checkpoint format.

Checkpoint layout (all integers little-endian uint32)::

    b"CVCP" | version | metadata byte length | metadata (UTF-8 key=value lines)
    | parameter count | per parameter:
        name byte length | name (UTF-8) | rank | dims... | float64 LE values

Parameters are written in insertion order, so a store built the same way
always serializes to the same bytes.
"""

from __future__ import annotations

import io
import struct
from pathlib import Path

import numpy as np

from ..errors import CorruptFile, IoFailure, ShapeMismatch
from .autograd import Tensor

CHECKPOINT_MAGIC = b"CVCP"
CHECKPOINT_VERSION = 1


class ParameterStore:
    """Ordered map of name -> leaf :class:`Tensor` with gradient buffer."""

    def __init__(self, seed=0):
        self.seed = seed
        self.rng = np.random.default_rng(seed)
        self._params: dict[str, Tensor] = {}

    def add(self, name, value):
        if name in self._params:
            raise KeyError(f"duplicate parameter {name!r}")
        t = Tensor(np.array(value, dtype=np.float64), requires_grad=True, name=name)
        self._params[name] = t
        return t

    def uniform(self, name, shape, fan_in=None):
        """Add a parameter drawn from U(-a, a) with ``a = 1/sqrt(fan_in)``."""
        fan_in = shape[0] if fan_in is None else fan_in
        a = 1.0 / np.sqrt(fan_in)
        return self.add(name, self.rng.uniform(-a, a, size=shape))

    def zeros(self, name, shape):
        return self.add(name, np.zeros(shape))

    def __getitem__(self, name) -> Tensor:
        return self._params[name]

    def __contains__(self, name):
        return name in self._params

    def __iter__(self):
        return iter(self._params)

    def __len__(self):
        return len(self._params)

    def items(self):
        return self._params.items()

    def values(self):
        return self._params.values()

    def num_values(self):
        return sum(p.data.size for p in self._params.values())

    def zero_grads(self):
        for p in self._params.values():
            p.grad[...] = 0.0

    def grad_norm(self):
        return float(np.sqrt(sum(float((p.grad ** 2).sum()) for p in self._params.values())))

    def snapshot(self):
        return {k: p.data.copy() for k, p in self._params.items()}

    def load_state(self, state):
        for k, v in state.items():
            p = self._params[k]
            v = np.asarray(v, dtype=np.float64)
            if v.shape != p.data.shape:
                raise ShapeMismatch(f"{k}: checkpoint shape {v.shape} != {p.data.shape}")
            p.data[...] = v


def save_checkpoint(path, state, metadata=None):
    """Write ``state`` (name -> array, ordered) with optional metadata dict."""
    buf = io.BytesIO()
    meta = "".join(f"{k}={v}\n" for k, v in (metadata or {}).items()).encode("utf-8")
    buf.write(CHECKPOINT_MAGIC)
    buf.write(struct.pack("<II", CHECKPOINT_VERSION, len(meta)))
    buf.write(meta)
    buf.write(struct.pack("<I", len(state)))
    for name, value in state.items():
        value = np.asarray(value, dtype=np.float64)
        raw = name.encode("utf-8")
        buf.write(struct.pack("<I", len(raw)))
        buf.write(raw)
        buf.write(struct.pack("<I", value.ndim))
        buf.write(struct.pack(f"<{value.ndim}I", *value.shape))
        buf.write(value.astype("<f8").tobytes(order="C"))
    try:
        Path(path).write_bytes(buf.getvalue())
    except OSError as exc:
        raise IoFailure(str(exc)) from exc


class _Reader:
    def __init__(self, data, path):
        self.data, self.pos, self.path = data, 0, path

    def take(self, n):
        if self.pos + n > len(self.data):
            raise CorruptFile(f"{self.path}: truncated")
        out = self.data[self.pos:self.pos + n]
        self.pos += n
        return out

    def uint(self, count=1):
        vals = struct.unpack(f"<{count}I", self.take(4 * count))
        return vals[0] if count == 1 else vals


def load_checkpoint(path):
    """Return ``(state, metadata)`` from a checkpoint file."""
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise IoFailure(str(exc)) from exc
    r = _Reader(data, path)
    if r.take(4) != CHECKPOINT_MAGIC:
        raise CorruptFile(f"{path}: bad magic")
    version, meta_len = r.uint(2)
    if version != CHECKPOINT_VERSION:
        raise CorruptFile(f"{path}: unsupported version {version}")
    metadata = {}
    for line in r.take(meta_len).decode("utf-8").splitlines():
        key, _, value = line.partition("=")
        metadata[key] = value
    state = {}
    for _ in range(r.uint()):
        name = r.take(r.uint()).decode("utf-8")
        rank = r.uint()
        shape = tuple(r.uint(rank)) if rank > 1 else ((r.uint(),) if rank == 1 else ())
        count = int(np.prod(shape)) if shape else 1
        values = np.frombuffer(r.take(8 * count), dtype="<f8").reshape(shape)
        state[name] = values.astype(np.float64)
    if r.pos != len(data):
        raise CorruptFile(f"{path}: trailing bytes")
    return state, metadata
