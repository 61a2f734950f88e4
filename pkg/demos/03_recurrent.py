"""
LSTM and GRU cells unrolled over a sequence
===========================================
"""

import numpy as np

from crowdcap.numerics import ParameterStore, grad_check
from crowdcap.recurrent import make_cell, unroll

rng = np.random.default_rng(1)
xs = [rng.standard_normal((2, 3)) for _ in range(6)]  # 6 steps, batch of 2

for kind in ("lstm", "gru"):
    store = ParameterStore(seed=0)
    cell = make_cell(kind, store, kind, input_dim=3, hidden_dim=4)
    states = unroll(cell, xs, cell.initial_state(2))
    print(kind, "params:", [name for name, _ in store.items()])
    print("last hidden state\n", states[-1].h.data.round(4))

    # gradients flow back through all six steps
    report = grad_check(lambda: unroll(cell, xs, cell.initial_state(2))[-1].h.sum(), store)
    print(kind, "worst relative error", f"{report.max_error:.2e}")
