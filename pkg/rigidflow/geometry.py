# SPDX-License-Identifier: BSD-2-Clause

# Copyright (c) 2026 The RigidFlow developers


from dataclasses import dataclass

import numpy as np

from .exceptions import ArgumentError


# The number of query points handled at a time by knn() so that the distance
# matrix stays small.
_KNN_CHUNK = 1024


@dataclass(frozen=True)
class PointCloud:
    """ An array of N 3-vectors, in meters. """

    points: np.ndarray

    def __post_init__(self):
        points = np.asarray(self.points)

        if points.ndim != 2 or points.shape[1] != 3 or points.shape[0] < 1:
            raise ArgumentError(
                    "a point cloud needs an [N, 3] array with N >= 1, not "
                    "{0}".format(points.shape))

        if not np.isfinite(points).all():
            raise ArgumentError("a point cloud must have finite coordinates")

        object.__setattr__(self, 'points', points)

    def __len__(self):
        """ Return the number of points. """

        return self.points.shape[0]

    def subset(self, indices):
        """ Return the cloud made of the points with the given indices. """

        return PointCloud(self.points[np.asarray(indices)])


@dataclass(frozen=True)
class FlowField:
    """ An array of N 3-vector displacements, in meters. """

    vectors: np.ndarray

    def __post_init__(self):
        vectors = np.asarray(self.vectors)

        if vectors.ndim != 2 or vectors.shape[1] != 3:
            raise ArgumentError(
                    "a flow field needs an [N, 3] array, not {0}".format(
                            vectors.shape))

        if not np.isfinite(vectors).all():
            raise ArgumentError("a flow field must be finite")

        object.__setattr__(self, 'vectors', vectors)

    def __len__(self):
        """ Return the number of vectors. """

        return self.vectors.shape[0]


@dataclass(frozen=True)
class RigidMotion:
    """ A rotation R followed by a translation t. """

    R: np.ndarray
    t: np.ndarray

    def __post_init__(self):
        R = np.asarray(self.R, dtype=np.float64)
        t = np.asarray(self.t, dtype=np.float64)

        if R.shape != (3, 3) or t.shape != (3, ):
            raise ArgumentError(
                    "a rigid motion needs a 3x3 R and a 3-vector t")

        orthonormal = np.allclose(R.T @ R, np.eye(3), rtol=0.0, atol=1e-9)

        if not orthonormal or abs(np.linalg.det(R) - 1.0) > 1e-9:
            raise ArgumentError("R is not a rotation matrix")

        object.__setattr__(self, 'R', R)
        object.__setattr__(self, 't', t)

    @classmethod
    def identity(cls):
        """ Return the motion that moves nothing. """

        return cls(np.eye(3), np.zeros(3))

    def flow(self, points):
        """ Return the [N, 3] displacement Rp + t - p of some points. """

        points = np.asarray(points, dtype=np.float64)

        return points @ self.R.T + self.t - points


@dataclass(frozen=True)
class NeighborTable:
    """ For each query point, the indices of its K nearest points in a
    reference cloud and their distances, nearest first.
    """

    indices: np.ndarray
    distances: np.ndarray

    @property
    def k(self):
        """ The number of neighbors of each query point. """

        return self.indices.shape[1]


def farthest_point_sample(cloud, m, start=0):
    """ Return the indices of m points of a cloud chosen greedily so that each
    maximises its distance to those already chosen.  Ties go to the lowest
    index.
    """

    points = cloud.points
    n = len(cloud)

    if not 1 <= m <= n:
        raise ArgumentError(
                "cannot sample {0} points from a cloud of {1}".format(m, n))

    if not 0 <= start < n:
        raise ArgumentError("start index {0} is out of range".format(start))

    selected = np.empty(m, dtype=np.int64)
    selected[0] = start

    min_d2 = _squared_distances(points, points[start])
    min_d2[start] = -1.0

    for i in range(1, m):
        # np.argmax() returns the first (ie. lowest) index of a tie.
        nxt = int(np.argmax(min_d2))
        selected[i] = nxt

        np.minimum(min_d2, _squared_distances(points, points[nxt]), out=min_d2)
        min_d2[selected[:i + 1]] = -1.0

    return selected


def knn(query, reference, k):
    """ Return the exact K nearest neighbors in a reference cloud of each
    point of a query cloud as a NeighborTable.
    """

    q = query.points
    r = reference.points

    if not 1 <= k <= len(reference):
        raise ArgumentError(
                "cannot find {0} neighbors in a cloud of {1} points".format(k,
                        len(reference)))

    indices = np.empty((len(query), k), dtype=np.int64)
    distances = np.empty((len(query), k), dtype=np.float64)

    for begin in range(0, len(query), _KNN_CHUNK):
        end = begin + _KNN_CHUNK

        d2 = _squared_distances(q[begin:end, None, :], r[None, :, :])

        # A stable sort breaks ties by the lower index.
        order = np.argsort(d2, axis=1, kind='stable')[:, :k]

        indices[begin:end] = order
        distances[begin:end] = np.sqrt(np.take_along_axis(d2, order, axis=1))

    return NeighborTable(indices=indices, distances=distances)


def apply_rigid(cloud, motion):
    """ Return a cloud with each point p mapped to Rp + t. """

    if not isinstance(motion, RigidMotion):
        raise ArgumentError("a RigidMotion is required")

    return PointCloud(cloud.points @ motion.R.T + motion.t)


def warp(cloud, flow):
    """ Return a cloud with each point moved by its flow vector. """

    if len(cloud) != len(flow):
        raise ArgumentError(
                "cannot warp {0} points with {1} flow vectors".format(
                        len(cloud), len(flow)))

    return PointCloud(cloud.points + flow.vectors)


def random_rotation(seed):
    """ Return a uniformly distributed rotation as a RigidMotion with no
    translation.
    """

    rng = np.random.default_rng(seed)

    # A normalised Gaussian quaternion is uniform on SO(3).
    q = rng.normal(size=4)
    q /= np.linalg.norm(q)

    return RigidMotion(quaternion_to_matrix(q), np.zeros(3))


def random_motion(rng, max_angle, max_translation):
    """ Return a rotation about a random axis by an angle of at most
    'max_angle' radians followed by a translation whose components are at
    most 'max_translation' meters.
    """

    axis = rng.normal(size=3)
    axis /= np.linalg.norm(axis)
    angle = rng.uniform(0.0, max_angle)

    t = rng.uniform(-max_translation, max_translation, size=3)

    return RigidMotion(axis_angle_to_matrix(axis, angle), t)


def axis_angle_to_matrix(axis, angle):
    """ Return the rotation matrix of a rotation about a unit axis. """

    half = 0.5 * angle

    return quaternion_to_matrix(
            np.concatenate(([np.cos(half)], np.sin(half) * np.asarray(axis))))


def quaternion_to_matrix(q):
    """ Return the rotation matrix of a unit quaternion (w, x, y, z). """

    w, x, y, z = q

    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)]])


def _squared_distances(a, b):
    """ Return the squared Euclidean distances between broadcast points. """

    d = a - b

    return (d * d).sum(axis=-1)
