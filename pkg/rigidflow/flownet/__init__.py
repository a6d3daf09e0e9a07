# SPDX-License-Identifier: BSD-2-Clause

# Copyright (c) 2026 The RigidFlow developers


# Publish the API.
from .checkpoint import Checkpoint, read_checkpoint, write_checkpoint
from .config import PRESETS, ModelConfig, preset
from .losses import (LossBreakdown, LossWeights, compute_losses,
        loss_coordinate, loss_deformation, loss_scene_flow, loss_total)
from .metrics import (METRIC_NAMES, FlowMetrics, metrics, point_errors,
        strict_accurate)
from .model import (ForwardResult, LevelState, check_end_to_end,
        estimator_shapes, estimator_step, forward, init_params,
        parameter_shapes, predict)
from .params import ModelParams, OptimizerState
