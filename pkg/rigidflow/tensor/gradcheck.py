# SPDX-License-Identifier: BSD-2-Clause

# Copyright (c) 2026 The RigidFlow developers


import numpy as np

from ..exceptions import ArgumentError, ContractError
from . import functions as F
from .tensor import Tensor, constant, float64_mode, parameter


def grad_check(f, inputs, eps=1e-5, *, samples=None, seed=0, floor=1e-8):
    """ Compare the analytic gradients of a scalar valued function of some
    tensors with central differences and return the worst relative error.
    The relative error of an element is |a - n| / max(|a|, |n|, floor).  If
    'samples' is given then only that many randomly chosen elements of each
    input are compared.  The check is always done at 64 bit precision.
    """

    if eps <= 0:
        raise ArgumentError("the finite difference step must be positive")

    rng = np.random.default_rng(seed)

    with float64_mode():
        arrays = [np.array(a, dtype=np.float64) for a in inputs]
        leaves = [parameter(a) for a in arrays]

        out = f(*leaves)
        if not isinstance(out, Tensor) or out.shape != ():
            raise ContractError("the checked function must return a scalar")

        out.backward()

        worst = 0.0

        for i, (array, leaf) in enumerate(zip(arrays, leaves)):
            analytic = leaf.grad
            if analytic is None:
                analytic = np.zeros_like(array)

            if samples is None or samples >= array.size:
                positions = range(array.size)
            else:
                positions = rng.choice(array.size, size=samples,
                        replace=False)

            for pos in positions:
                numeric = (_evaluate(f, arrays, i, pos, eps) -
                        _evaluate(f, arrays, i, pos, -eps)) / (2 * eps)
                a = float(analytic.flat[pos])

                error = abs(a - numeric) / max(abs(a), abs(numeric), floor)
                worst = max(worst, error)

    return worst


def _evaluate(f, arrays, i, pos, delta):
    """ Evaluate f with one element of one input perturbed. """

    perturbed = arrays[i].copy()
    perturbed.flat[pos] += delta

    args = [constant(a) for a in arrays]
    args[i] = constant(perturbed)

    return f(*args).item()


def _away_from_zero(rng, shape, margin=0.1):
    """ Return values whose magnitude is at least 'margin'. """

    return rng.choice((-1.0, 1.0), size=shape) * rng.uniform(margin, 1.0,
            size=shape)


def _distinct(rng, shape):
    """ Return values that differ from each other by well over any finite
    difference step.
    """

    values = rng.permutation(int(np.prod(shape))).astype(np.float64) * 0.1
    return values.reshape(shape) + rng.uniform(0.0, 0.01, size=shape)


def _case(op, *factories):
    """ Return a factory of a (function, inputs) pair that checks an
    operation.  The function reduces the output of the operation to a scalar
    through a fixed random projection so that every output element
    contributes a distinct amount.
    """

    def make(rng):
        inputs = [factory(rng) for factory in factories]

        with float64_mode():
            shape = op(*[constant(a) for a in inputs]).shape

        projection = rng.uniform(0.5, 1.5, size=shape)

        def f(*tensors):
            return F.total(F.mul(op(*tensors), constant(projection)))

        return f, inputs

    return make


# The registry of differentiable operations and how to check them.  Each entry
# maps a name to a factory that, given a random generator, returns a scalar
# valued function and its inputs.  Inputs of kinked operations are sampled
# away from the kinks.
OP_CHECKS = {
    'linear': _case(F.linear, lambda r: r.normal(size=(4, 3)),
            lambda r: r.normal(size=(3, 2)), lambda r: r.normal(size=(2, ))),
    'relu': _case(F.relu, lambda r: _away_from_zero(r, (4, 3))),
    'leaky_relu': _case(lambda x: F.leaky_relu(x, 0.1),
            lambda r: _away_from_zero(r, (4, 3))),
    'softmax': _case(F.softmax, lambda r: r.normal(size=(3, 4))),
    'gather': _case(lambda x: F.gather(x, np.array([[0, 2, 2], [1, 0, 3]])),
            lambda r: r.normal(size=(4, 2))),
    'reduce_max': _case(lambda x: F.reduce(x, 'max'),
            lambda r: _distinct(r, (3, 4, 2))),
    'reduce_mean': _case(lambda x: F.reduce(x, 'mean'),
            lambda r: r.normal(size=(3, 4, 2))),
    'concat': _case(lambda a, b: F.concat([a, b]),
            lambda r: r.normal(size=(3, 2)), lambda r: r.normal(size=(3, 1))),
    'add': _case(F.add, lambda r: r.normal(size=(3, 2)),
            lambda r: r.normal(size=(3, 2))),
    'sub': _case(F.sub, lambda r: r.normal(size=(3, 2)),
            lambda r: r.normal(size=(3, 2))),
    'mul': _case(F.mul, lambda r: r.normal(size=(3, 2)),
            lambda r: r.normal(size=(3, 2))),
    'scale': _case(lambda x: F.scale(x, 0.3), lambda r: r.normal(size=(3, 2))),
    'abs': _case(F.absolute, lambda r: _away_from_zero(r, (3, 2))),
    'sum': _case(F.total, lambda r: r.normal(size=(3, 2))),
    'norm': _case(F.norm, lambda r: _away_from_zero(r, (4, 3))),
    'weighted_sum': _case(F.weighted_sum, lambda r: r.normal(size=(3, 4)),
            lambda r: r.normal(size=(3, 4, 2))),
    'channel_mean': _case(F.channel_mean, lambda r: r.normal(size=(3, 4))),
    'expand': _case(lambda x: F.expand(x, 3), lambda r: r.normal(size=(2, 3))),
    'reshape': _case(lambda x: F.reshape(x, (3, 4)),
            lambda r: r.normal(size=(2, 6))),
}


def check_ops(names=None, *, seeds=range(100), eps=1e-5):
    """ Run the gradient check of each registered operation over a number of
    seeds and return a dict of the worst relative error of each operation.
    """

    if names is None:
        names = list(OP_CHECKS)

    report = {}

    for name in names:
        try:
            factory = OP_CHECKS[name]
        except KeyError:
            raise ArgumentError("'{0}' is not a registered operation".format(
                    name))

        worst = 0.0

        for seed in seeds:
            f, inputs = factory(np.random.default_rng(seed))
            worst = max(worst, grad_check(f, inputs, eps))

        report[name] = worst

    return report
