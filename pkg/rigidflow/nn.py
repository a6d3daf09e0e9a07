# SPDX-License-Identifier: BSD-2-Clause

# Copyright (c) 2026 The RigidFlow developers


import numpy as np

from .tensor import functions as F


# The slope of the leaky ReLU used between the layers of every MLP.
LEAKY_SLOPE = 0.1

# The standard deviation of the initial weights of a layer that projects
# features to a flow, ie. whose weights are named '<prefix>.flow.weight'.
FLOW_WEIGHT_STD = 0.01


def mlp(x, weights, prefix, depth, *, last_activation=True):
    """ Apply a shared MLP of fully connected layers to the last axis of x.
    The weights of layer j are '<prefix>.<j>.weight' and '<prefix>.<j>.bias'.
    """

    for j in range(depth):
        x = F.linear(x, weights['{0}.{1}.weight'.format(prefix, j)],
                weights['{0}.{1}.bias'.format(prefix, j)])

        if last_activation or j < depth - 1:
            x = F.leaky_relu(x, LEAKY_SLOPE)

    return x


def mlp_shapes(prefix, in_channels, widths):
    """ Return a dict of the parameter shapes of an MLP. """

    shapes = {}

    for j, width in enumerate(widths):
        shapes['{0}.{1}.weight'.format(prefix, j)] = (in_channels, width)
        shapes['{0}.{1}.bias'.format(prefix, j)] = (width, )
        in_channels = width

    return shapes


def initial_value(name, shape, rng):
    """ Return the initial value of a parameter.  Weights use He
    initialisation for the leaky ReLU, except that flow projections start
    small, and biases start at zero.
    """

    if name.endswith('.bias'):
        return np.zeros(shape, dtype=np.float32)

    if name.endswith('.flow.weight'):
        std = FLOW_WEIGHT_STD
    else:
        fan_in = shape[0]
        std = np.sqrt(2.0 / ((1.0 + LEAKY_SLOPE ** 2) * fan_in))

    return (rng.normal(size=shape) * std).astype(np.float32)
