# SPDX-License-Identifier: BSD-2-Clause

# Copyright (c) 2026 The RigidFlow developers


# Publish the API.
from .ablation import VARIANTS, AblationRow, ablation_table, run_ablation
from .adam import adam_step, lr_at
from .evaluate import EvaluationReport, evaluate, zero_flow_metrics
from .train import EpochRecord, TrainConfig, TrainResult, train
