# SPDX-License-Identifier: BSD-2-Clause

# Copyright (c) 2026 The RigidFlow developers


from dataclasses import dataclass, field
import hashlib

import numpy as np

from ..exceptions import ArgumentError, NumericError
from ..nn import initial_value
from ..tensor import parameter


@dataclass
class OptimizerState:
    """ The Adam moments of each parameter and the number of steps taken. """

    step: int = 0
    m: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)

    def copy(self):
        """ Return a deep copy of the state. """

        return OptimizerState(step=self.step,
                m={name: a.copy() for name, a in self.m.items()},
                v={name: a.copy() for name, a in self.v.items()})


class ModelParams:
    """ The learnable values of a network, as 32 bit arrays keyed by name,
    and the optimizer state.
    """

    def __init__(self, values, state=None):
        """ Initialise the parameters. """

        self._values = {}

        for name in sorted(values):
            value = np.array(values[name], dtype=np.float32)

            if not np.isfinite(value).all():
                raise NumericError(
                        "parameter '{0}' is not finite".format(name))

            self._values[name] = value

        self.state = OptimizerState() if state is None else state

    @classmethod
    def initial(cls, shapes, seed):
        """ Return freshly initialised parameters for a dict of shapes. """

        rng = np.random.default_rng(seed)

        return cls({name: initial_value(name, shapes[name], rng)
                for name in sorted(shapes)})

    @classmethod
    def zeros(cls, shapes):
        """ Return parameters that are all zero. """

        return cls({name: np.zeros(shape, dtype=np.float32)
                for name, shape in shapes.items()})

    def __contains__(self, name):
        """ Return True if there is a parameter with a name. """

        return name in self._values

    def __getitem__(self, name):
        """ Return the array of a parameter. """

        return self._values[name]

    def __len__(self):
        """ Return the number of parameter arrays. """

        return len(self._values)

    def names(self):
        """ Return the sorted parameter names. """

        return list(self._values)

    def items(self):
        """ Return the (name, array) pairs in name order. """

        return self._values.items()

    def shapes(self):
        """ Return a dict of the parameter shapes. """

        return {name: value.shape for name, value in self._values.items()}

    def count(self):
        """ Return the total number of learnable values. """

        return sum(value.size for value in self._values.values())

    def tensors(self):
        """ Return a dict of new leaf tensors, one per parameter, whose
        gradients are available after a backward pass.
        """

        return {name: parameter(value) for name, value in self._values.items()}

    def updated(self, values, state):
        """ Return new parameters with updated values and optimizer state. """

        if set(values) != set(self._values):
            raise ArgumentError("the updated parameters have different names")

        return ModelParams(values, state)

    def copy(self):
        """ Return a deep copy of the parameters and state. """

        return ModelParams({name: value.copy()
                for name, value in self._values.items()}, self.state.copy())

    def without_state(self):
        """ Return the parameters with a fresh optimizer state. """

        return ModelParams(self._values)

    def digest(self):
        """ Return a SHA-256 hex digest of the parameter values. """

        h = hashlib.sha256()

        for name, value in self._values.items():
            h.update(name.encode())
            h.update(repr(value.shape).encode())
            h.update(np.ascontiguousarray(value, dtype='<f4').tobytes())

        return h.hexdigest()
