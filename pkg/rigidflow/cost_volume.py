# SPDX-License-Identifier: BSD-2-Clause

# Copyright (c) 2026 The RigidFlow developers


from dataclasses import dataclass

import numpy as np

from .exceptions import ArgumentError, ConfigurationError
from .geometry import PointCloud, knn
from .nn import mlp, mlp_shapes
from .tensor import Tensor, constant
from .tensor import functions as F


# The ways in which the offset between a warped source point and a target
# point is presented to the matching MLP.
OFFSET_MODES = ('vector', 'distance')


@dataclass
class CostVolume:
    """ The matching cost features of each warped source point. """

    values: Tensor

    # The softmax weights of the point-to-patch and patch-to-dilated-patch
    # stages.
    patch_weights: Tensor
    dilated_weights: Tensor


def dilated_neighbors(points, k, dilation):
    """ Return the [N, K'] indices of a dilated neighborhood of each point of
    a cloud in the same cloud: every d-th of its d*K nearest points, where K'
    is K unless the cloud is too small.
    """

    candidates = min(k * dilation, len(points))
    table = knn(points, points, candidates)

    return table.indices[:, ::dilation][:, :k]


def cost_volume(warped_points, source_features, target_points, target_features,
        weights, prefix, *, k_patch=16, k_dilated=8, dilation=2,
        offsets='vector'):
    """ Return the patch-to-dilated-patch CostVolume between the points of a
    warped source level (a [N, 3] tensor so that the flow that warped it gets
    a gradient) and a target level.
    """

    if offsets not in OFFSET_MODES:
        raise ConfigurationError(
                "'{0}' is not a cost volume offset mode".format(offsets))

    if k_patch > len(target_points):
        raise ConfigurationError(
                "the cost volume needs {0} target neighbors but the target "
                "level has {1} points".format(k_patch, len(target_points)))

    warped_points = constant(warped_points)
    n = warped_points.shape[0]

    if source_features.shape[0] != n:
        raise ArgumentError(
                "{0} source features for {1} warped points".format(
                        source_features.shape[0], n))

    if dilation < 1:
        raise ConfigurationError("the dilation stride must be at least 1")

    # The neighborhoods are selected from the current values and don't take
    # part in differentiation.
    warped_cloud = PointCloud(warped_points.data)

    # Point to patch: each warped source point against its nearest target
    # points.
    table = knn(warped_cloud, target_points, k_patch)

    target_offsets = F.sub(
            constant(target_points.points[table.indices]),
            F.expand(warped_points, k_patch))

    pair = F.concat([F.expand(source_features, k_patch),
            F.gather(target_features, table.indices),
            _present_offsets(target_offsets, offsets)])
    pair = mlp(pair, weights, prefix + '.pair', 2)

    patch_weights = F.softmax(
            F.channel_mean(
                    mlp(pair, weights, prefix + '.patch_attention', 1,
                            last_activation=False)))

    point_cost = F.weighted_sum(patch_weights, pair)

    # Patch to dilated patch: aggregate the point costs over a dilated
    # neighborhood of each warped source point.
    indices = dilated_neighbors(warped_cloud, k_dilated, dilation)
    k = indices.shape[1]

    neighbor_costs = F.gather(point_cost, indices)
    source_offsets = F.sub(F.gather(warped_points, indices),
            F.expand(warped_points, k))

    logits = F.concat([neighbor_costs,
            _present_offsets(source_offsets, offsets)])

    dilated_weights = F.softmax(
            F.channel_mean(
                    mlp(logits, weights, prefix + '.dilated_attention', 1,
                            last_activation=False)))

    return CostVolume(values=F.weighted_sum(dilated_weights, neighbor_costs),
            patch_weights=patch_weights, dilated_weights=dilated_weights)


def cost_volume_shapes(prefix, feature_channels, cost_channels,
        offsets='vector'):
    """ Return the parameter shapes of a cost volume. """

    offset_channels = 3 if offsets == 'vector' else 1

    shapes = mlp_shapes(prefix + '.pair',
            2 * feature_channels + offset_channels,
            [cost_channels, cost_channels])
    shapes.update(
            mlp_shapes(prefix + '.patch_attention', cost_channels,
                    [cost_channels]))
    shapes.update(
            mlp_shapes(prefix + '.dilated_attention',
                    cost_channels + offset_channels, [cost_channels]))

    return shapes


def _present_offsets(offsets, mode):
    """ Return [N, K, 3] offsets as they are presented to an MLP. """

    if mode == 'vector':
        return offsets

    n, k, _ = offsets.shape

    return F.reshape(F.norm(offsets), (n, k, 1))
