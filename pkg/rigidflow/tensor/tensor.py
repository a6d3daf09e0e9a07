# SPDX-License-Identifier: BSD-2-Clause

# Copyright (c) 2026 The RigidFlow developers


from contextlib import contextmanager

import numpy as np

from ..exceptions import ContractError, NumericError


# The dtype of newly created tensors.  Training uses 32 bits, gradient checks
# and verification switch to 64 bits.
_dtype = np.float32


def get_dtype():
    """ Return the dtype used for newly created tensors. """

    return _dtype


def set_dtype(dtype):
    """ Set the dtype used for newly created tensors. """

    global _dtype

    dtype = np.dtype(dtype).type
    if dtype not in (np.float32, np.float64):
        raise ValueError("only float32 and float64 tensors are supported")

    _dtype = dtype


@contextmanager
def float64_mode():
    """ A context manager that creates 64 bit tensors for its duration. """

    saved = get_dtype()
    set_dtype(np.float64)

    try:
        yield
    finally:
        set_dtype(saved)


class Tensor:
    """ A dense array of real values that is a node of a reverse-mode
    computation graph.  The values are immutable once created.
    """

    def __init__(self, data, *, requires_grad=False, creator=None):
        """ Initialise the tensor.  The data is copied and converted to the
        current dtype.
        """

        data = np.array(data, dtype=get_dtype())

        if not np.isfinite(data).all():
            raise NumericError("tensor contains non-finite values",
                    detail=self._describe_creator(creator))

        data.flags.writeable = False

        self._data = data
        self._creator = creator
        self._grad = None
        self.requires_grad = requires_grad

    def __repr__(self):
        """ Return a representation of the tensor. """

        return 'Tensor(shape={0}, requires_grad={1})'.format(self.shape,
                self.requires_grad)

    @property
    def creator(self):
        """ The Function that created the tensor or None if it is a leaf. """

        return self._creator

    @property
    def data(self):
        """ The read-only numpy array of values. """

        return self._data

    @property
    def grad(self):
        """ The gradient array of a leaf after backward() or None. """

        return self._grad

    @property
    def is_leaf(self):
        """ True if the tensor wasn't created by an operation. """

        return self._creator is None

    @property
    def shape(self):
        """ The shape of the tensor. """

        return self._data.shape

    def item(self):
        """ Return the value of a single element tensor as a float. """

        return float(self._data.reshape(-1)[0])

    def numpy(self):
        """ Return a writeable copy of the values. """

        return np.array(self._data)

    def zero_grad(self):
        """ Discard any gradient so that backward() may be called again. """

        self._grad = None

    def backward(self, *, accumulate=False):
        """ Compute the gradient of this scalar with respect to every leaf of
        the graph that requires one.  Calling it again while leaves still hold
        gradients is an error unless 'accumulate' is set.
        """

        if self._data.ndim != 0:
            raise ContractError(
                    "backward() needs a scalar loss, not shape {0}".format(
                            self.shape))

        if not self.requires_grad:
            raise ContractError(
                    "the loss doesn't depend on any tensor requiring a "
                    "gradient")

        grads = {id(self): np.ones_like(self._data)}

        for node in reversed(self._topological_order()):
            grad = grads.pop(id(node), None)
            if grad is None:
                continue

            if node._creator is None:
                if node._grad is None:
                    node._grad = grad
                elif accumulate:
                    node._grad = node._grad + grad
                else:
                    raise ContractError(
                            "a leaf already has a gradient",
                            detail="call zero_grad() or use accumulate=True")

                continue

            input_grads = node._creator.backward(grad)

            for inp, input_grad in zip(node._creator.inputs, input_grads):
                if input_grad is None or not inp.requires_grad:
                    continue

                previous = grads.get(id(inp))
                if previous is not None:
                    input_grad = previous + input_grad

                grads[id(inp)] = input_grad

    def _topological_order(self):
        """ Return the nodes that require a gradient, inputs before outputs.
        """

        order = []
        visited = set()
        stack = [(self, False)]

        while stack:
            node, expanded = stack.pop()

            if expanded:
                order.append(node)
                continue

            if id(node) in visited:
                continue

            visited.add(id(node))
            stack.append((node, True))

            if node._creator is not None:
                for inp in node._creator.inputs:
                    if inp.requires_grad and id(inp) not in visited:
                        stack.append((inp, False))

        return order

    @staticmethod
    def _describe_creator(creator):
        """ Return a description of the operation that created some data. """

        if creator is None:
            return None

        return "produced by {0}".format(type(creator).__name__)


def constant(data):
    """ Return a tensor that doesn't require a gradient. """

    if isinstance(data, Tensor):
        return data

    return Tensor(data)


def parameter(data):
    """ Return a leaf tensor that requires a gradient. """

    return Tensor(data, requires_grad=True)
