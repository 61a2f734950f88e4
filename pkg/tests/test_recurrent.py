import math

import numpy as np
import pytest

from crowdcap.errors import EmptyInput, ShapeMismatch
from crowdcap.numerics import ParameterStore, Tensor, grad_check
from crowdcap.recurrent import CellState, GRUCell, LSTMCell, make_cell, unroll


def zeroed(cell):
    for p in (cell.W, cell.U, cell.b):
        p.data[...] = 0.0
    return cell


def test_lstm_zero_params_zero_state():
    cell = zeroed(LSTMCell(ParameterStore(0), "l", 3, 4))
    out = cell.step(np.random.default_rng(0).standard_normal((1, 3)), cell.initial_state())
    assert not out.h.data.any() and not out.c.data.any()


def test_lstm_zero_params_unit_memory():
    cell = zeroed(LSTMCell(ParameterStore(0), "l", 3, 4))
    state = CellState(Tensor(np.zeros((1, 4))), Tensor(np.ones((1, 4))))
    out = cell.step(np.ones((1, 3)), state)
    np.testing.assert_allclose(out.c.data, 0.5)
    np.testing.assert_allclose(out.h.data, 0.5 * math.tanh(0.5))
    assert out.h.data[0, 0] == pytest.approx(0.23106, abs=5e-6)


def test_gru_zero_params():
    cell = zeroed(GRUCell(ParameterStore(0), "g", 3, 4))
    x = np.random.default_rng(1).standard_normal((1, 3))
    assert not cell.step(x, cell.initial_state()).h.data.any()
    v = np.array([[0.3, -0.7, 0.1, 0.9]])
    np.testing.assert_array_equal(cell.step(x, CellState(Tensor(v))).h.data, 0.5 * v)


@pytest.mark.parametrize("dim", [1, 4, 16])
def test_parameter_counts(dim):
    lstm = LSTMCell(ParameterStore(0), "l", dim, dim)
    gru = GRUCell(ParameterStore(0), "g", dim, dim)
    assert gru.num_params < lstm.num_params
    assert 4 * gru.num_params == 3 * lstm.num_params


def test_forget_bias():
    cell = LSTMCell(ParameterStore(0), "l", 3, 5)
    np.testing.assert_array_equal(cell.b.data[5:10], 1.0)


@pytest.mark.parametrize("kind", ["lstm", "gru"])
def test_hidden_bounded_and_deterministic(kind):
    rng = np.random.default_rng(7)
    cell = make_cell(kind, ParameterStore(3), kind, 6, 8)
    for p in (cell.W, cell.U, cell.b):
        p.data *= 3.0
    xs = [rng.standard_normal((4, 6)) * 2 for _ in range(12)]
    a = unroll(cell, xs, cell.initial_state(4))
    b = unroll(cell, xs, cell.initial_state(4))
    for sa, sb in zip(a, b):
        assert np.all(np.abs(sa.h.data) < 1.0)
        assert sa.h.data.tobytes() == sb.h.data.tobytes()


@pytest.mark.parametrize("kind", ["lstm", "gru"])
def test_single_step_unroll(kind):
    cell = make_cell(kind, ParameterStore(0), kind, 3, 4)
    x = np.random.default_rng(0).standard_normal((2, 3))
    (state,) = unroll(cell, [x], cell.initial_state(2))
    np.testing.assert_array_equal(state.h.data, cell.step(x, cell.initial_state(2)).h.data)


def test_unroll_length():
    cell = make_cell("gru", ParameterStore(0), "g", 3, 4)
    n, m = 16, 5
    states = unroll(cell, [np.zeros((1, 3))] * (n + m), cell.initial_state())
    assert len(states) == n + m


def test_unroll_empty():
    cell = make_cell("gru", ParameterStore(0), "g", 3, 4)
    with pytest.raises(EmptyInput):
        unroll(cell, [], cell.initial_state())


def test_shape_checks():
    cell = make_cell("lstm", ParameterStore(0), "l", 3, 4)
    with pytest.raises(ShapeMismatch):
        cell.step(np.zeros((1, 5)), cell.initial_state())
    with pytest.raises(ValueError):
        make_cell("rnn", ParameterStore(0), "x", 3, 4)


@pytest.mark.parametrize("kind", ["lstm", "gru"])
@pytest.mark.parametrize("length", [1, 5, 8])
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_unroll_gradients(kind, length, seed):
    rng = np.random.default_rng(seed)
    store = ParameterStore(seed)
    cell = make_cell(kind, store, kind, 3, 4)
    xs = [rng.standard_normal((2, 3)) for _ in range(length)]

    def loss():
        states = unroll(cell, xs, cell.initial_state(2))
        return sum((s.h.sum() for s in states), Tensor(0.0))

    assert grad_check(loss, store).max_error < 1e-4


@pytest.mark.parametrize("kind", ["lstm", "gru"])
def test_single_step_gradient(kind):
    store = ParameterStore(11)
    cell = make_cell(kind, store, kind, 3, 4)
    x = np.random.default_rng(11).standard_normal((1, 3))
    assert grad_check(lambda: cell.step(x, cell.initial_state()).h.sum(), store).max_error < 1e-4
