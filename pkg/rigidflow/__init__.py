# SPDX-License-Identifier: BSD-2-Clause

# Copyright (c) 2026 The RigidFlow developers


# Publish the API.
from .backbone import PyramidLevel, build_pyramid, extract_features, set_conv
from .cost_volume import CostVolume, cost_volume
from .deform import (DeformationDegree, LocalStructure, deformation_degree,
        deformation_from_flow, local_structure)
from .exceptions import (ArgumentError, ConfigurationError, ContractError,
        DimensionError, FormatError, IndexTableError, NumericError,
        PreconditionError, RigidFlowException, TrainingError)
from .geometry import (FlowField, NeighborTable, PointCloud, RigidMotion,
        apply_rigid, farthest_point_sample, knn, random_rotation, warp)
from .version import RIGIDFLOW_VERSION, RIGIDFLOW_VERSION_STR
from .wsa import (AggregationWeights, UpsampleResult, compute_weights,
        independent_upsample, project_barycentric, run_rigidity_trials,
        verify_rigidity_identity, wsa_upsample)
