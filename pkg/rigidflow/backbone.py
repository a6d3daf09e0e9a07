# SPDX-License-Identifier: BSD-2-Clause

# Copyright (c) 2026 The RigidFlow developers


from dataclasses import dataclass
from typing import Optional

import numpy as np

from .exceptions import ConfigurationError
from .geometry import PointCloud, farthest_point_sample, knn
from .nn import mlp, mlp_shapes
from .tensor import constant
from .tensor import functions as F


@dataclass
class PyramidLevel:
    """ The points of one level of a pyramid and, once extracted, their
    features.
    """

    level_id: int
    points: PointCloud
    down_indices: Optional[np.ndarray] = None
    features: Optional[object] = None

    def __len__(self):
        """ Return the number of points in the level. """

        return len(self.points)


def level_sizes(n, ratios):
    """ Return the number of points of each level of a pyramid built from n
    points.
    """

    ratios = tuple(ratios)

    if len(ratios) == 0 or ratios[0] != 1:
        raise ConfigurationError("the first pyramid ratio must be 1")

    if any(b >= a for a, b in zip(ratios, ratios[1:])):
        raise ConfigurationError("pyramid ratios must be strictly decreasing")

    sizes = [max(1, int(round(n * r))) for r in ratios]

    if any(b >= a for a, b in zip(sizes, sizes[1:])):
        raise ConfigurationError(
                "{0} points give the degenerate pyramid {1}".format(n,
                        tuple(sizes)))

    return sizes


def build_pyramid(cloud, ratios, *, min_sizes=None, start=0):
    """ Build the levels of a pyramid by repeated farthest point sampling.
    'min_sizes', if given, is the smallest size each level may have to
    satisfy its consumers.
    """

    sizes = level_sizes(len(cloud), ratios)

    if min_sizes is not None:
        for level_id, (size, min_size) in enumerate(zip(sizes, min_sizes)):
            if size < min_size:
                raise ConfigurationError(
                        "level {0} has {1} points but at least {2} are "
                        "needed".format(level_id, size, min_size))

    levels = [PyramidLevel(0, cloud)]

    for level_id, size in enumerate(sizes[1:], start=1):
        parent = levels[-1].points
        indices = farthest_point_sample(parent, size, start=start)

        levels.append(
                PyramidLevel(level_id, parent.subset(indices),
                        down_indices=indices))

    return levels


def set_conv(parent_points, parent_features, child_points, weights, prefix, k,
        depth=2):
    """ Return the features of the child points.  For each child point the K
    nearest parent points are gathered, a shared MLP is applied to the
    relative coordinates concatenated with the parent features and the result
    is max-pooled.
    """

    if k > len(parent_points):
        raise ConfigurationError(
                "set_conv needs {0} neighbors but the parent level has {1} "
                "points".format(k, len(parent_points)))

    table = knn(child_points, parent_points, k)

    offsets = (parent_points.points[table.indices] -
            child_points.points[:, None, :])
    grouped = F.gather(parent_features, table.indices)

    h = F.concat([constant(offsets), grouped])
    h = mlp(h, weights, prefix, depth)

    return F.reduce(h, 'max')


def set_conv_shapes(prefix, in_channels, out_channels, depth=2):
    """ Return the parameter shapes of a set_conv layer. """

    return mlp_shapes(prefix, in_channels + 3, [out_channels] * depth)


def extract_features(levels, weights, neighbors):
    """ Compute the features of each level of a pyramid in place.  The level 0
    input features are the coordinates themselves.
    """

    parent = levels[0].points
    parent_features = constant(parent.points)

    for level, k in zip(levels, neighbors):
        level.features = set_conv(parent, parent_features, level.points,
                weights, 'backbone.l{0}'.format(level.level_id), k)

        parent = level.points
        parent_features = level.features

    return [level.features for level in levels]


def backbone_shapes(channels):
    """ Return the parameter shapes of the feature extractor for a channel
    schedule.
    """

    shapes = {}
    in_channels = 3

    for level_id, out_channels in enumerate(channels):
        shapes.update(
                set_conv_shapes('backbone.l{0}'.format(level_id), in_channels,
                        out_channels))
        in_channels = out_channels

    return shapes
