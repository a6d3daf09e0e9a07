# SPDX-License-Identifier: BSD-2-Clause

# Copyright (c) 2026 The RigidFlow developers


import numpy as np

from ..exceptions import ArgumentError
from ..flownet import OptimizerState


def adam_step(values, grads, state, lr, beta1=0.9, beta2=0.99, eps=1e-8,
        weight_decay=0.0):
    """ Apply one Adam update to a dict of parameter arrays and return the
    new arrays and the new OptimizerState.  Nothing is modified in place.
    Weight decay is decoupled: each parameter other than a bias (whose name
    ends with '.bias') is shrunk by lr * weight_decay of itself before the
    bias corrected Adam step.
    """

    if state.step < 0:
        raise ArgumentError("the step counter must not be negative")

    step = state.step + 1
    correction1 = 1.0 - beta1 ** step
    correction2 = 1.0 - beta2 ** step

    new_values = {}
    new_state = OptimizerState(step=step)

    for name, value in values.items():
        g = np.asarray(grads.get(name, 0.0), dtype=np.float64)
        if g.ndim != 0 and g.shape != value.shape:
            raise ArgumentError(
                    "the gradient of '{0}' has shape {1} instead of "
                    "{2}".format(name, g.shape, value.shape))

        m = np.asarray(state.m.get(name, 0.0), dtype=np.float64)
        v = np.asarray(state.v.get(name, 0.0), dtype=np.float64)

        m = beta1 * m + (1.0 - beta1) * g
        v = beta2 * v + (1.0 - beta2) * g * g

        theta = np.asarray(value, dtype=np.float64)
        if not name.endswith('.bias'):
            theta = theta - lr * weight_decay * theta

        theta = theta - lr * (m / correction1) / (
                np.sqrt(v / correction2) + eps)

        new_values[name] = theta.astype(value.dtype)
        new_state.m[name] = np.broadcast_to(m, value.shape).astype(np.float32)
        new_state.v[name] = np.broadcast_to(v, value.shape).astype(np.float32)

    return new_values, new_state


def lr_at(epoch, base_lr, decay, period):
    """ Return the learning rate of an epoch of a step decay schedule. """

    if epoch < 0:
        raise ArgumentError("the epoch must not be negative")

    return base_lr * decay ** (epoch // period)
