# SPDX-License-Identifier: BSD-2-Clause

# Copyright (c) 2026 The RigidFlow developers


# Publish the API.
from .ply import (correctness_colors, export_flow_ply, export_ply, read_ply)
from .sample_file import parse_sample, read_dataset, read_sample, write_sample
from .scene import SamplePair, SceneConfig, generate_scene
