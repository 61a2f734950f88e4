"""
Reverse-mode gradients and finite differences
=============================================
"""

import numpy as np

from crowdcap.numerics import ParameterStore, Tensor, grad_check, softmax, softmax_cross_entropy

# a stable softmax: shifting the logits changes nothing
z = np.array([1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0])
print(softmax(z)[0], softmax(z + 1000.0)[0], np.e / (np.e + 7))

# parameters live in a seeded store; losses are built from Tensor ops
store = ParameterStore(seed=0)
W = store.uniform("W", (5, 8))
x = np.random.default_rng(0).standard_normal((3, 5))
y = np.array([0, 3, 7])


def loss():
    return softmax_cross_entropy(Tensor(x) @ W, y)


value = loss()
value.backward()
print("loss", float(value.data), "grad norm", store.grad_norm())

# compare every analytic derivative with a central difference
store.zero_grads()
report = grad_check(loss, store)
print("checked", report.checked, "coordinates, worst relative error", report.max_error)
