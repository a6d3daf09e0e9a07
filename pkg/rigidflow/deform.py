# SPDX-License-Identifier: BSD-2-Clause

# Copyright (c) 2026 The RigidFlow developers


from dataclasses import dataclass

import numpy as np

from .exceptions import ArgumentError, ConfigurationError, DimensionError
from .geometry import PointCloud, knn
from .tensor import Tensor, constant
from .tensor import functions as F


# The ways a neighbor's coordinate difference is measured.
DEFORMATION_MODES = ('channel', 'euclidean')

# The number of coordinate channels the differences are normalised by.
_CHANNELS = 3


@dataclass(frozen=True)
class LocalStructure:
    """ The [N, K, C] scaled coordinate differences between each point and its
    neighbors.  C is 3 in 'channel' mode and 1 in 'euclidean' mode.
    """

    delta: Tensor
    indices: np.ndarray
    mode: str


@dataclass(frozen=True)
class DeformationDegree:
    """ The change of local structure between a cloud and its warped image.
    """

    value: Tensor

    @property
    def flattened(self):
        """ The [N, K * C] view consumed by an estimator. """

        n, k, c = self.value.shape

        return F.reshape(self.value, (n, k * c))

    @property
    def channels(self):
        """ The number of channels of the flattened view. """

        _, k, c = self.value.shape

        return k * c


def local_structure(points, indices, mode='channel'):
    """ Return the LocalStructure of some points (a PointCloud, an array or a
    tensor) for an [N, K] neighbor index table into the same points.
    """

    if mode not in DEFORMATION_MODES:
        raise ConfigurationError(
                "'{0}' is not a deformation degree mode".format(mode))

    points = constant(getattr(points, 'points', points))
    indices = np.asarray(indices)

    if indices.ndim != 2 or indices.shape[0] != points.shape[0]:
        raise DimensionError(
                "a table of {0} rows of neighbors is needed, not {1}".format(
                        points.shape[0], indices.shape))

    k = indices.shape[1]
    diff = F.sub(F.gather(points, indices), F.expand(points, k))

    if mode == 'channel':
        delta = F.scale(F.absolute(diff), 1.0 / _CHANNELS)
    else:
        delta = F.reshape(F.scale(F.norm(diff), 1.0 / _CHANNELS),
                (points.shape[0], k, 1))

    return LocalStructure(delta=delta, indices=indices, mode=mode)


def deformation_degree(source_struct, warped_struct):
    """ Return the elementwise absolute difference of two local structures as
    a DeformationDegree.
    """

    if source_struct.delta.shape != warped_struct.delta.shape:
        raise ArgumentError(
                "local structures {0} and {1} differ in shape".format(
                        source_struct.delta.shape, warped_struct.delta.shape))

    return DeformationDegree(
            value=F.absolute(F.sub(source_struct.delta, warped_struct.delta)))


def deformation_from_flow(points, flow, k, *, mode='channel',
        recompute_neighbors=False, indices=None):
    """ Return the DeformationDegree between a PointCloud and the cloud warped
    by a [N, 3] flow.  The neighbors of the warped points are the images of
    the source neighbors unless 'recompute_neighbors' is set, when they are
    searched again in the warped cloud.  Each point is its own nearest
    neighbor.
    """

    if indices is None:
        indices = knn(points, points, k).indices

    warped = F.add(constant(points.points), flow)

    if recompute_neighbors:
        warped_indices = knn(PointCloud(warped.data), PointCloud(warped.data),
                indices.shape[1]).indices
    else:
        warped_indices = indices

    return deformation_degree(local_structure(points, indices, mode),
            local_structure(warped, warped_indices, mode))
