"""Finite-difference verification of every differentiable component."""

from __future__ import annotations

import numpy as np

from .models import LinearClassifier, S2VTConfig, S2VTModel
from .numerics import ParameterStore, Tensor, grad_check, softmax_cross_entropy
from .recurrent import make_cell, unroll

DEFAULT_TOLERANCE = 1e-4
COMPONENTS = ("linear", "softmax_ce", "lstm", "gru", "s2vt_lstm", "s2vt_gru")


def _miswired(t):
    """Identity in the forward pass with a deliberately wrong gradient."""
    return Tensor(t.data, _parents=(t,), _backward=lambda g: (1.5 * g,))


def _linear_case(rng, seed):
    model = LinearClassifier(input_dim=6, seed=seed)
    X = rng.standard_normal((5, 6))
    y = rng.integers(0, 8, size=5)
    return model.store, lambda: model.loss(X, y)


def _softmax_ce_case(rng, seed):
    store = ParameterStore(seed)
    logits = store.add("logits", rng.standard_normal((3, 8)))
    y = rng.integers(0, 8, size=3)
    return store, lambda: softmax_cross_entropy(logits, y)


def _cell_case(kind):
    def build(rng, seed):
        store = ParameterStore(seed)
        cell = make_cell(kind, store, kind, 3, 4)
        xs = [rng.standard_normal((2, 3)) for _ in range(5)]
        w = rng.standard_normal((2, 4))

        def loss():
            states = unroll(cell, xs, cell.initial_state(2))
            h = states[-1].h
            return (h * w).sum() + states[2].h.sum()

        return store, loss

    return build


def _s2vt_case(kind):
    def build(rng, seed):
        config = S2VTConfig(feature_dim=5, hidden_dim=4, embed_dim=3, cell_kind=kind, seed=seed)
        model = S2VTModel(config)
        feats = [rng.standard_normal((4, 5)) for _ in range(2)]
        targets = np.asarray([model.encode_caption("many people walk in"),
                              model.encode_caption("few people run out")])
        return model.store, lambda: model.batch_loss(feats, targets)

    return build


_BUILDERS = {
    "linear": _linear_case,
    "softmax_ce": _softmax_ce_case,
    "lstm": _cell_case("lstm"),
    "gru": _cell_case("gru"),
    "s2vt_lstm": _s2vt_case("lstm"),
    "s2vt_gru": _s2vt_case("gru"),
}


def gradcheck_suite(seeds=range(10), tolerance=DEFAULT_TOLERANCE, step=1e-5,
                    max_coords=100, components=COMPONENTS, inject_fault=None):
    """Worst relative error per component over all ``seeds``.

    ``inject_fault`` names a component whose loss gets a wrong backward rule,
    to confirm the harness notices.
    """
    worst = {}
    for name in components:
        errs = []
        for seed in seeds:
            rng = np.random.default_rng(seed)
            store, loss_fn = _BUILDERS[name](rng, seed)
            if name == inject_fault:
                inner = loss_fn
                loss_fn = lambda inner=inner: _miswired(inner())  # noqa: E731
            report = grad_check(loss_fn, store, step=step, tolerance=tolerance,
                                max_coords=max_coords, seed=seed)
            errs.append(report.max_error)
        worst[name] = max(errs)
    return worst
