"""Central finite-difference check of analytic gradients."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import NonFiniteLoss

DEFAULT_STEP = 1e-5
# Denominator floor. Central differences at h=1e-5 carry ~eps*|f|/h absolute
# rounding noise, so gradients smaller than this are compared absolutely.
GRAD_FLOOR = 1e-5


def relative_error(analytic, numeric, floor=GRAD_FLOOR):
    return abs(analytic - numeric) / max(abs(analytic), abs(numeric), floor)


@dataclass
class GradCheckReport:
    tolerance: float
    errors: dict = field(default_factory=dict)
    checked: dict = field(default_factory=dict)

    @property
    def max_error(self):
        return max(self.errors.values(), default=0.0)

    @property
    def passed(self):
        return self.max_error < self.tolerance

    def worst(self):
        return max(self.errors.items(), key=lambda kv: kv[1], default=(None, 0.0))


def grad_check(loss_fn, store, step=DEFAULT_STEP, tolerance=1e-4, max_coords=None, seed=0):
    """Compare backprop gradients of ``loss_fn()`` with central differences.

    ``loss_fn`` takes no arguments, reads the parameters in ``store`` and
    returns a scalar :class:`Tensor`.  ``max_coords`` caps the total number
    of coordinates probed; they are sampled across parameters in proportion
    to parameter size (at least one per parameter).
    """
    store.zero_grads()
    loss = loss_fn()
    if not np.isfinite(loss.data):
        raise NonFiniteLoss(f"loss is {float(loss.data)}")
    loss.backward()
    analytic = {k: p.grad.copy() for k, p in store.items()}
    store.zero_grads()

    rng = np.random.default_rng(seed)
    total = store.num_values()
    report = GradCheckReport(tolerance=tolerance)
    for name, p in store.items():
        flat = p.data.reshape(-1)
        if max_coords is None or max_coords >= total:
            coords = np.arange(flat.size)
        else:
            k = max(1, int(round(max_coords * flat.size / total)))
            coords = rng.choice(flat.size, size=min(k, flat.size), replace=False)
        worst = 0.0
        for i in coords:
            orig = flat[i]
            flat[i] = orig + step
            f_plus = float(loss_fn().data)
            flat[i] = orig - step
            f_minus = float(loss_fn().data)
            flat[i] = orig
            if not (np.isfinite(f_plus) and np.isfinite(f_minus)):
                raise NonFiniteLoss(f"non-finite loss while perturbing {name}[{i}]")
            numeric = (f_plus - f_minus) / (2 * step)
            worst = max(worst, float(relative_error(analytic[name].reshape(-1)[i], numeric)))
        report.errors[name] = worst
        report.checked[name] = len(coords)
    return report
