# SPDX-License-Identifier: BSD-2-Clause

# Copyright (c) 2026 The RigidFlow developers


from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np

from ..exceptions import ArgumentError
from ..geometry import FlowField, PointCloud, RigidMotion, random_motion


# The fewest points an object may be sampled with.
MIN_OBJECT_POINTS = 4

# The label of background points.
BACKGROUND = 0


@dataclass(frozen=True)
class SceneConfig:
    """ The parameters of a synthetic scene of rigidly moving objects above a
    background plane.  Lengths are in meters and angles in radians.
    """

    num_points: int = 512
    num_objects: int = 3

    # The largest dimension of an object.
    object_extent: float = 1.0

    # The side of the square background plane.
    scene_extent: float = 4.0

    max_rotation: float = 0.3
    max_translation: float = 0.3

    background_fraction: float = 0.25

    # If set the background also moves, as it does for a moving sensor.
    background_motion: bool = False

    jitter: float = 0.0

    # If set the target points are an independent sampling of the moved
    # surfaces rather than the moved source points.
    resample_target: bool = False

    seed: int = 0

    def __post_init__(self):
        for name in ('object_extent', 'scene_extent', 'max_rotation',
                'max_translation', 'jitter'):
            if getattr(self, name) < 0:
                raise ArgumentError(
                        "'{0}' must not be negative".format(name))

        if not 0.0 <= self.background_fraction <= 1.0:
            raise ArgumentError("'background_fraction' must be in [0, 1]")

        if self.num_points < 1 or self.num_objects < 0:
            raise ArgumentError(
                    "a scene needs points and a non-negative number of "
                    "objects")

        if self.num_objects == 0 and self.background_fraction < 1.0:
            raise ArgumentError(
                    "a scene without objects must be all background")

        if (self.num_objects > 0 and
                self.object_points < self.num_objects * MIN_OBJECT_POINTS):
            raise ArgumentError(
                    "{0} points are too few for {1} objects".format(
                            self.object_points, self.num_objects),
                    detail="each object needs at least {0}".format(
                            MIN_OBJECT_POINTS))

    @property
    def background_points(self):
        """ The number of background points. """

        if self.num_objects == 0:
            return self.num_points

        return int(round(self.num_points * self.background_fraction))

    @property
    def object_points(self):
        """ The number of points shared by the objects. """

        return self.num_points - self.background_points


@dataclass(frozen=True)
class SamplePair:
    """ A source cloud, a target cloud, the ground truth flow of the source
    points and the object each source point belongs to (0 for the
    background).  'motions' maps a label to its RigidMotion and is only known
    for generated scenes.
    """

    P: PointCloud
    Q: PointCloud
    flow: FlowField
    labels: np.ndarray
    motions: Optional[Dict[int, RigidMotion]] = None

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.uint16)

        if len(self.flow) != len(self.P) or labels.shape != (len(self.P), ):
            raise ArgumentError(
                    "the flow and labels must have one row per source point")

        object.__setattr__(self, 'labels', labels)


@dataclass(frozen=True)
class _Shape:
    """ The surface of an object. """

    kind: str
    center: np.ndarray
    half_sizes: np.ndarray

    def sample(self, rng, n):
        """ Return n points on the surface. """

        if self.kind == 'box':
            return self.center + _box_surface(rng, self.half_sizes, n)

        return self.center + _ellipsoid_surface(rng, self.half_sizes, n)


def _box_surface(rng, half, n):
    """ Return n points uniformly distributed on the faces of a box. """

    hx, hy, hz = half
    areas = np.array([hy * hz, hy * hz, hx * hz, hx * hz, hx * hy, hx * hy])
    faces = rng.choice(6, size=n, p=areas / areas.sum())

    points = rng.uniform(-1.0, 1.0, size=(n, 3)) * half

    axis = faces // 2
    sign = np.where(faces % 2 == 0, -1.0, 1.0)
    points[np.arange(n), axis] = sign * half[axis]

    return points


def _ellipsoid_surface(rng, half, n):
    """ Return n points on the surface of an ellipsoid. """

    directions = rng.normal(size=(n, 3))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)

    return directions * half


def _about_centroid(motion, centroid):
    """ Return the motion that rotates about a centroid instead of the
    origin.
    """

    return RigidMotion(motion.R, centroid - motion.R @ centroid + motion.t)


def generate_scene(config):
    """ Return a SamplePair generated deterministically from a SceneConfig.
    Every object (and, if configured, the background) moves rigidly about its
    centroid so that the ground truth flow of its points is exact.
    """

    rng = np.random.default_rng(config.seed)

    counts = {}
    shapes = {}

    half_plane = config.scene_extent / 2

    if config.background_points > 0:
        counts[BACKGROUND] = config.background_points
        shapes[BACKGROUND] = None

    if config.num_objects > 0:
        per_object, extra = divmod(config.object_points, config.num_objects)

        for j in range(config.num_objects):
            label = j + 1
            counts[label] = per_object + (1 if j < extra else 0)

            half_sizes = rng.uniform(0.5, 1.0,
                    size=3) * config.object_extent / 2

            center = np.array([
                *rng.uniform(-0.7 * half_plane, 0.7 * half_plane, size=2),
                half_sizes[2] + rng.uniform(0.0, 0.5)])

            shapes[label] = _Shape(kind='box' if j % 2 == 0 else 'ellipsoid',
                    center=center, half_sizes=half_sizes)

    motions = {}
    parts_p = []
    parts_q = []
    parts_labels = []

    for label, count in counts.items():
        shape = shapes[label]

        if shape is None:
            points = np.zeros((count, 3))
            points[:, :2] = rng.uniform(-half_plane, half_plane,
                    size=(count, 2))
        else:
            points = shape.sample(rng, count)

        if label == BACKGROUND and not config.background_motion:
            motion = RigidMotion.identity()
        else:
            motion = _about_centroid(
                    random_motion(rng, config.max_rotation,
                            config.max_translation),
                    points.mean(axis=0))

        motions[label] = motion

        if config.resample_target:
            if shape is None:
                moved = np.zeros((count, 3))
                moved[:, :2] = rng.uniform(-half_plane, half_plane,
                        size=(count, 2))
            else:
                moved = shape.sample(rng, count)
        else:
            moved = points

        parts_p.append(points)
        parts_q.append(moved @ motion.R.T + motion.t)
        parts_labels.append(np.full(count, label, dtype=np.uint16))

    P = np.concatenate(parts_p)
    Q = np.concatenate(parts_q)
    labels = np.concatenate(parts_labels)

    flow = np.empty_like(P)
    for label, motion in motions.items():
        mask = labels == label
        flow[mask] = motion.flow(P[mask])

    # The jitter is applied after the flow so that the flow remains the exact
    # motion of the underlying surface.
    if config.jitter > 0:
        P = P + rng.normal(scale=config.jitter, size=P.shape)

    return SamplePair(P=PointCloud(P), Q=PointCloud(Q), flow=FlowField(flow),
            labels=labels, motions=motions)
