# SPDX-License-Identifier: BSD-2-Clause

# Copyright (c) 2026 The RigidFlow developers


# Publish the API.
from .functions import (Function, absolute, activation, add, channel_mean,
        concat, expand, gather, leaky_relu, linear, mul, norm, reduce, relu,
        reshape, scale, softmax, sub, total, weighted_sum)
from .gradcheck import OP_CHECKS, check_ops, grad_check
from .tensor import (Tensor, constant, float64_mode, get_dtype, parameter,
        set_dtype)
