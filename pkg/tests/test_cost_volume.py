# SPDX-License-Identifier: BSD-2-Clause

# Copyright (c) 2026 The RigidFlow developers


import numpy as np
import pytest

from rigidflow.cost_volume import (cost_volume, cost_volume_shapes,
        dilated_neighbors)
from rigidflow.exceptions import ConfigurationError
from rigidflow.flownet import ModelParams
from rigidflow.geometry import PointCloud, knn, random_motion
from rigidflow.tensor import constant, float64_mode, parameter
from rigidflow.tensor import functions as F


@pytest.fixture
def clouds(rng):
    """ A source cloud with features and a target cloud with features. """

    source = PointCloud(rng.uniform(-1.0, 1.0, size=(24, 3)))
    target = PointCloud(source.points + rng.normal(scale=0.05,
            size=(24, 3)))

    return (source, constant(rng.normal(size=(24, 5))), target,
            constant(rng.normal(size=(24, 5))))


def weights_for(offsets='vector', zero=False):
    """ Return the weights of a cost volume with 5 feature and 6 cost
    channels.
    """

    shapes = cost_volume_shapes('cv', 5, 6, offsets)

    if zero:
        return dict(ModelParams.zeros(shapes).items())

    return dict(ModelParams.initial(shapes, 3).items())


def test_shapes(clouds):
    source, source_features, target, target_features = clouds

    cv = cost_volume(source.points, source_features, target, target_features,
            weights_for(), 'cv', k_patch=8, k_dilated=4, dilation=2)

    assert cv.values.shape == (24, 6)
    assert cv.patch_weights.shape == (24, 8)
    assert cv.dilated_weights.shape == (24, 4)


def test_weights_are_convex(clouds):
    source, source_features, target, target_features = clouds

    cv = cost_volume(source.points, source_features, target, target_features,
            weights_for(), 'cv', k_patch=8, k_dilated=4, dilation=2)

    for w in (cv.patch_weights.data, cv.dilated_weights.data):
        assert (w >= 0).all()
        np.testing.assert_allclose(w.sum(axis=1), 1.0, rtol=1e-5)


def test_zero_weights_give_zero_cost(clouds):
    source, source_features, target, target_features = clouds

    cv = cost_volume(source.points, source_features, target, target_features,
            weights_for(zero=True), 'cv', k_patch=8, k_dilated=4,
            dilation=2)

    np.testing.assert_array_equal(cv.values.data, 0.0)
    np.testing.assert_allclose(cv.patch_weights.data, 1 / 8, rtol=1e-6)


def test_distance_offsets(clouds):
    source, source_features, target, target_features = clouds

    shapes = cost_volume_shapes('cv', 5, 6, 'distance')
    assert shapes['cv.pair.0.weight'] == (11, 6)

    cv = cost_volume(source.points, source_features, target, target_features,
            weights_for('distance'), 'cv', k_patch=8, k_dilated=4,
            dilation=2, offsets='distance')

    assert cv.values.shape == (24, 6)


def test_warped_points_get_a_gradient(clouds):
    source, source_features, target, target_features = clouds

    warped = parameter(source.points)

    cv = cost_volume(warped, source_features, target, target_features,
            weights_for(), 'cv', k_patch=8, k_dilated=4, dilation=2)
    F.total(cv.values).backward()

    assert warped.grad is not None
    assert warped.grad.shape == (24, 3)
    assert np.abs(warped.grad).sum() > 0


def test_dilated_neighbors(rng):
    cloud = PointCloud(rng.uniform(-1.0, 1.0, size=(30, 3)))

    indices = dilated_neighbors(cloud, 4, 2)
    nearest = knn(cloud, cloud, 8).indices

    assert indices.shape == (30, 4)
    np.testing.assert_array_equal(indices, nearest[:, ::2])
    assert indices[:, 0].tolist() == list(range(30))


def test_dilated_neighbors_of_a_small_cloud(rng):
    cloud = PointCloud(rng.uniform(-1.0, 1.0, size=(5, 3)))

    assert dilated_neighbors(cloud, 4, 2).shape == (5, 3)


def test_bad_offset_mode(clouds):
    source, source_features, target, target_features = clouds

    with pytest.raises(ConfigurationError):
        cost_volume(source.points, source_features, target, target_features,
                weights_for(), 'cv', offsets='angle')


def test_too_few_target_points(clouds):
    source, source_features, target, target_features = clouds

    with pytest.raises(ConfigurationError):
        cost_volume(source.points, source_features, target, target_features,
                weights_for(), 'cv', k_patch=25)


# =============================================================================
# Invariance
# =============================================================================

class TestInvariance:

    @staticmethod
    def cost(source, target, features, offsets):
        """ Return the cost values of a source against a target at 64 bits.
        """

        with float64_mode():
            cv = cost_volume(source, constant(features[0]),
                    PointCloud(target), constant(features[1]),
                    weights_for(offsets), 'cv', k_patch=8, k_dilated=4,
                    dilation=2, offsets=offsets)

            return np.array(cv.values.data)

    @pytest.fixture
    def scene(self, rng):
        """ Source and target points and their features. """

        source = rng.uniform(-1.0, 1.0, size=(24, 3))
        target = source + rng.normal(scale=0.05, size=(24, 3))
        features = (rng.normal(size=(24, 5)), rng.normal(size=(24, 5)))

        return source, target, features

    def test_distance_offsets_and_rigid_motion(self, rng, scene):
        source, target, features = scene
        motion = random_motion(rng, np.pi, 2.0)

        moved = self.cost(source @ motion.R.T + motion.t,
                target @ motion.R.T + motion.t, features, 'distance')

        np.testing.assert_allclose(moved,
                self.cost(source, target, features, 'distance'), rtol=0.0,
                atol=1e-9)

    def test_vector_offsets_and_translation(self, scene):
        source, target, features = scene
        t = np.array([3.0, -1.5, 0.25])

        np.testing.assert_allclose(
                self.cost(source + t, target + t, features, 'vector'),
                self.cost(source, target, features, 'vector'), rtol=0.0,
                atol=1e-9)

    def test_symmetric_cloud(self, rng):
        half = rng.uniform((0.1, -1.0, -1.0), (1.0, 1.0, 1.0), size=(12, 3))
        mirror = half * np.array([-1.0, 1.0, 1.0])
        points = np.concatenate([half, mirror])

        half_features = rng.normal(size=(12, 5))
        features = np.concatenate([half_features, half_features])

        # The clouds are identical and the flow is zero.
        cost = self.cost(points, points, (features, features), 'distance')

        np.testing.assert_allclose(cost[:12], cost[12:], rtol=0.0,
                atol=1e-9)
