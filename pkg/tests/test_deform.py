# SPDX-License-Identifier: BSD-2-Clause

# Copyright (c) 2026 The RigidFlow developers


import numpy as np
import pytest

from rigidflow.deform import (deformation_degree, deformation_from_flow,
        local_structure)
from rigidflow.exceptions import (ArgumentError, ConfigurationError,
        DimensionError, IndexTableError)
from rigidflow.geometry import PointCloud, knn, random_rotation
from rigidflow.tensor import constant, float64_mode, parameter
from rigidflow.tensor import functions as F


def test_local_structure_example():
    points = np.array([[0.0, 0.0, 0.0], [3.0, 0.0, -6.0]])

    structure = local_structure(points, np.array([[0, 1], [1, 0]]))

    np.testing.assert_allclose(structure.delta.data[0, 1], [1.0, 0.0, 2.0])
    np.testing.assert_allclose(structure.delta.data[0, 0], [0.0, 0.0, 0.0])


def test_euclidean_local_structure():
    points = np.array([[0.0, 0.0, 0.0], [3.0, 4.0, 0.0]])

    structure = local_structure(points, np.array([[0, 1], [1, 0]]),
            'euclidean')

    assert structure.delta.shape == (2, 2, 1)
    np.testing.assert_allclose(structure.delta.data[0, 1], [5.0 / 3.0],
            rtol=1e-6)


def test_zero_flow(cloud):
    dd = deformation_from_flow(cloud, constant(np.zeros((32, 3))), 6)

    assert dd.value.shape == (32, 6, 3)
    np.testing.assert_array_equal(dd.value.data, 0.0)


def test_translation(cloud):
    flow = constant(np.tile([0.3, -1.2, 0.7], (32, 1)))

    dd = deformation_from_flow(cloud, flow, 6)

    np.testing.assert_allclose(dd.value.data, 0.0, atol=2e-6)


def test_shifted_cloud(cloud, rng):
    flow = rng.normal(scale=0.2, size=(32, 3))
    shifted = PointCloud(cloud.points + np.array([5.0, -2.0, 0.5]))

    with float64_mode():
        dd = deformation_from_flow(cloud, constant(flow), 6)
        dd_shifted = deformation_from_flow(shifted, constant(flow), 6)

        np.testing.assert_allclose(dd_shifted.value.data, dd.value.data,
                rtol=0.0, atol=1e-12)


def test_doubling(cloud):
    indices = knn(cloud, cloud, 6).indices

    with float64_mode():
        dd = deformation_from_flow(cloud, constant(cloud.points), 6,
                indices=indices)
        source = local_structure(cloud, indices)

        np.testing.assert_allclose(dd.value.data, source.delta.data,
                atol=1e-12)


def test_euclidean_mode_ignores_rotation(cloud):
    motion = random_rotation(5)

    with float64_mode():
        dd = deformation_from_flow(cloud, constant(motion.flow(cloud.points)),
                6, mode='euclidean')

        np.testing.assert_allclose(dd.value.data, 0.0, atol=1e-12)


def test_channel_mode_sees_rotation(cloud):
    motion = random_rotation(5)

    with float64_mode():
        dd = deformation_from_flow(cloud, constant(motion.flow(cloud.points)),
                6)

    assert dd.value.data.max() > 1e-3


def test_recomputed_neighbors_without_motion(cloud):
    flow = constant(np.zeros((32, 3)))

    dd = deformation_from_flow(cloud, flow, 6, recompute_neighbors=True)

    np.testing.assert_array_equal(dd.value.data, 0.0)


def test_flattened(cloud):
    dd = deformation_from_flow(cloud, constant(np.zeros((32, 3))), 4)

    assert dd.flattened.shape == (32, 12)
    assert dd.channels == 12


def test_bad_table(cloud):
    with pytest.raises(DimensionError):
        local_structure(cloud, np.zeros((31, 4), dtype=np.int64))

    with pytest.raises(IndexTableError):
        local_structure(cloud, np.full((32, 4), 32))


def test_bad_mode(cloud):
    with pytest.raises(ConfigurationError):
        local_structure(cloud, knn(cloud, cloud, 4).indices, 'manhattan')


def test_mismatched_structures(cloud):
    a = local_structure(cloud, knn(cloud, cloud, 4).indices)
    b = local_structure(cloud, knn(cloud, cloud, 5).indices)

    with pytest.raises(ArgumentError):
        deformation_degree(a, b)


def test_gradient_flows_to_the_flow(cloud, rng):
    flow = parameter(rng.normal(scale=0.1, size=(32, 3)))

    F.total(deformation_from_flow(cloud, flow, 6).flattened).backward()

    assert flow.grad is not None
    assert np.abs(flow.grad).sum() > 0
