# SPDX-License-Identifier: BSD-2-Clause

# Copyright (c) 2026 The RigidFlow developers


import numpy as np

from ..exceptions import ArgumentError, DimensionError, IndexTableError
from .tensor import Tensor, constant


class Function:
    """ The base class of a differentiable operation.  A sub-class implements
    forward() on numpy arrays and backward() which returns one gradient array
    (or None) per input tensor.
    """

    def __init__(self, *inputs):
        """ Initialise the operation record. """

        self.inputs = inputs

    def forward(self, *arrays, **kwargs):
        """ Return the output array. """

        raise NotImplementedError

    def backward(self, grad):
        """ Return the gradients with respect to the inputs. """

        raise NotImplementedError

    @classmethod
    def apply(cls, *inputs, **kwargs):
        """ Apply the operation to some tensors and return the output tensor.
        """

        inputs = tuple(constant(t) for t in inputs)

        function = cls(*inputs)
        out = function.forward(*(t.data for t in inputs), **kwargs)

        if any(t.requires_grad for t in inputs):
            return Tensor(out, requires_grad=True, creator=function)

        return Tensor(out)


def _check_same_shape(op, a, b):
    """ Check that two arrays have the same shape. """

    if a.shape != b.shape:
        raise DimensionError(
                "{0}: shapes {1} and {2} differ".format(op, a.shape, b.shape))


class Linear(Function):
    """ y = xW + b over the last axis. """

    def forward(self, x, w, b):
        if w.ndim != 2 or x.shape[-1] != w.shape[0] or b.shape != w.shape[1:]:
            raise DimensionError(
                    "linear: input {0}, weight {1} and bias {2} are "
                    "incompatible".format(x.shape, w.shape, b.shape))

        self._x = x
        self._w = w

        return x @ w + b

    def backward(self, grad):
        x = self._x
        w = self._w

        flat_x = x.reshape(-1, w.shape[0])
        flat_grad = grad.reshape(-1, w.shape[1])

        return (grad @ w.T, flat_x.T @ flat_grad, flat_grad.sum(axis=0))


class Activation(Function):
    """ An elementwise ReLU or leaky ReLU. """

    def forward(self, x, slope=0.0):
        self._scale = np.where(x > 0, 1.0, slope).astype(x.dtype)

        return x * self._scale

    def backward(self, grad):
        return (grad * self._scale, )


class Softmax(Function):
    """ A softmax over the last axis stabilised by subtracting the maximum. """

    def forward(self, x):
        if x.ndim == 0 or x.shape[-1] < 1:
            raise DimensionError("softmax needs at least one element")

        e = np.exp(x - x.max(axis=-1, keepdims=True))
        self._y = e / e.sum(axis=-1, keepdims=True)

        return self._y

    def backward(self, grad):
        y = self._y

        return (y * (grad - (grad * y).sum(axis=-1, keepdims=True)), )


class Gather(Function):
    """ out[i, k, :] = features[indices[i, k], :] """

    def forward(self, features, indices):
        if features.ndim != 2:
            raise DimensionError(
                    "gather needs [M, C] features, not {0}".format(
                            features.shape))

        indices = np.asarray(indices)
        if indices.ndim != 2:
            raise DimensionError(
                    "gather needs an [N, K] index table, not {0}".format(
                            indices.shape))

        if indices.size != 0 and (
                indices.min() < 0 or indices.max() >= features.shape[0]):
            raise IndexTableError(
                    "gather: index table refers outside {0} rows".format(
                            features.shape[0]))

        self._indices = indices
        self._rows = features.shape[0]

        return features[indices]

    def backward(self, grad):
        out = np.zeros((self._rows, grad.shape[-1]), dtype=grad.dtype)
        np.add.at(out, self._indices, grad)

        return (out, )


class Reduce(Function):
    """ A max or mean reduction of [N, K, C] over K. """

    def forward(self, x, kind='max'):
        if x.ndim != 3 or x.shape[1] < 1:
            raise DimensionError(
                    "reduce needs [N, K, C] with K >= 1, not {0}".format(
                            x.shape))

        self._shape = x.shape
        self._kind = kind

        if kind == 'max':
            # np.argmax() picks the lowest index on ties.
            self._argmax = np.argmax(x, axis=1)

            return np.take_along_axis(x, self._argmax[:, None, :],
                    axis=1)[:, 0, :]

        if kind == 'mean':
            return x.mean(axis=1)

        raise ArgumentError("unknown reduction '{0}'".format(kind))

    def backward(self, grad):
        n, k, c = self._shape

        if self._kind == 'max':
            out = np.zeros(self._shape, dtype=grad.dtype)
            np.put_along_axis(out, self._argmax[:, None, :], grad[:, None, :],
                    axis=1)

            return (out, )

        return (np.broadcast_to(grad[:, None, :] / k, self._shape).copy(), )


class Concat(Function):
    """ Concatenation over the last axis. """

    def forward(self, *xs):
        lead = xs[0].shape[:-1]

        for x in xs[1:]:
            if x.ndim != xs[0].ndim or x.shape[:-1] != lead:
                raise DimensionError(
                        "concat: shapes {0} are incompatible".format(
                                [x.shape for x in xs]))

        self._splits = np.cumsum([x.shape[-1] for x in xs])[:-1]

        return np.concatenate(xs, axis=-1)

    def backward(self, grad):
        return tuple(np.split(grad, self._splits, axis=-1))


class Add(Function):
    """ Elementwise a + b. """

    def forward(self, a, b):
        _check_same_shape('add', a, b)

        return a + b

    def backward(self, grad):
        return (grad, grad)


class Sub(Function):
    """ Elementwise a - b. """

    def forward(self, a, b):
        _check_same_shape('sub', a, b)

        return a - b

    def backward(self, grad):
        return (grad, -grad)


class Mul(Function):
    """ Elementwise a * b. """

    def forward(self, a, b):
        _check_same_shape('mul', a, b)

        self._a = a
        self._b = b

        return a * b

    def backward(self, grad):
        return (grad * self._b, grad * self._a)


class Scale(Function):
    """ Multiplication by a constant. """

    def forward(self, x, factor=1.0):
        self._factor = factor

        return x * factor

    def backward(self, grad):
        return (grad * self._factor, )


class Abs(Function):
    """ Elementwise |x| with a zero subgradient at 0. """

    def forward(self, x):
        self._sign = np.sign(x)

        return np.abs(x)

    def backward(self, grad):
        return (grad * self._sign, )


class Sum(Function):
    """ The sum of all elements as a scalar. """

    def forward(self, x):
        self._shape = x.shape

        return x.sum()

    def backward(self, grad):
        return (np.full(self._shape, grad, dtype=grad.dtype), )


class Norm(Function):
    """ The Euclidean norm over the last axis with a zero subgradient at 0.
    """

    def forward(self, x):
        self._x = x
        self._y = np.sqrt((x * x).sum(axis=-1))

        return self._y

    def backward(self, grad):
        y = self._y[..., None]
        safe = np.where(y > 0, y, 1.0)

        return (np.where(y > 0, self._x / safe, 0.0) * grad[..., None], )


class WeightedSum(Function):
    """ out[i, :] = sum_k w[i, k] * v[i, k, :] """

    def forward(self, w, v):
        if w.ndim != 2 or v.ndim != 3 or v.shape[:2] != w.shape:
            raise DimensionError(
                    "weighted sum: weights {0} and values {1} are "
                    "incompatible".format(w.shape, v.shape))

        self._w = w
        self._v = v

        return np.einsum('nk,nkc->nc', w, v)

    def backward(self, grad):
        return (np.einsum('nc,nkc->nk', grad, self._v),
                self._w[:, :, None] * grad[:, None, :])


class ChannelMean(Function):
    """ The mean over the last axis. """

    def forward(self, x):
        self._shape = x.shape

        return x.mean(axis=-1)

    def backward(self, grad):
        c = self._shape[-1]

        return (np.broadcast_to(grad[..., None] / c, self._shape).copy(), )


class Expand(Function):
    """ Repeat [N, C] as [N, K, C]. """

    def forward(self, x, k=1):
        if x.ndim != 2:
            raise DimensionError(
                    "expand needs [N, C], not {0}".format(x.shape))

        return np.repeat(x[:, None, :], k, axis=1)

    def backward(self, grad):
        return (grad.sum(axis=1), )


class Reshape(Function):
    """ Reshape without changing the order of the values. """

    def forward(self, x, shape=None):
        self._shape = x.shape

        try:
            return x.reshape(shape)
        except ValueError:
            raise DimensionError(
                    "cannot reshape {0} to {1}".format(x.shape, shape))

    def backward(self, grad):
        return (grad.reshape(self._shape), )


# The functional API.

def linear(x, w, b):
    """ Return xW + b. """

    return Linear.apply(x, w, b)


def activation(x, kind='relu', slope=0.1):
    """ Return relu(x) or leaky_relu(x, slope). """

    if kind == 'relu':
        return Activation.apply(x, slope=0.0)

    if kind == 'leaky_relu':
        return Activation.apply(x, slope=slope)

    raise ArgumentError("unknown activation '{0}'".format(kind))


def relu(x):
    """ Return relu(x). """

    return activation(x, 'relu')


def leaky_relu(x, slope=0.1):
    """ Return leaky_relu(x, slope). """

    return activation(x, 'leaky_relu', slope=slope)


def softmax(x):
    """ Return the softmax over the last axis. """

    return Softmax.apply(x)


def gather(features, indices):
    """ Return the [N, K, C] rows of [M, C] features selected by an [N, K]
    index table.
    """

    return Gather.apply(features, indices=indices)


def reduce(x, kind='max'):
    """ Reduce [N, K, C] over K with 'max' or 'mean'. """

    return Reduce.apply(x, kind=kind)


def concat(xs):
    """ Concatenate tensors over their last axis. """

    if len(xs) == 0:
        raise ArgumentError("concat needs at least one tensor")

    if len(xs) == 1:
        return constant(xs[0])

    return Concat.apply(*xs)


def add(a, b):
    """ Return a + b. """

    return Add.apply(a, b)


def sub(a, b):
    """ Return a - b. """

    return Sub.apply(a, b)


def mul(a, b):
    """ Return a * b. """

    return Mul.apply(a, b)


def scale(x, factor):
    """ Return x * factor where factor is a constant. """

    return Scale.apply(x, factor=float(factor))


def absolute(x):
    """ Return |x|. """

    return Abs.apply(x)


def total(x):
    """ Return the sum of all elements as a scalar tensor. """

    return Sum.apply(x)


def norm(x):
    """ Return the Euclidean norm over the last axis. """

    return Norm.apply(x)


def weighted_sum(w, v):
    """ Return sum_k w[:, k] * v[:, k, :]. """

    return WeightedSum.apply(w, v)


def channel_mean(x):
    """ Return the mean over the last axis. """

    return ChannelMean.apply(x)


def expand(x, k):
    """ Repeat the rows of [N, C] K times as [N, K, C]. """

    return Expand.apply(x, k=int(k))


def reshape(x, shape):
    """ Return x with a new shape. """

    return Reshape.apply(x, shape=tuple(shape))
