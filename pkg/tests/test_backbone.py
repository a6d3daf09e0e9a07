# SPDX-License-Identifier: BSD-2-Clause

# Copyright (c) 2026 The RigidFlow developers


import numpy as np
import pytest

from rigidflow.backbone import (backbone_shapes, build_pyramid,
        extract_features, level_sizes, set_conv, set_conv_shapes)
from rigidflow.exceptions import ConfigurationError
from rigidflow.flownet import ModelParams
from rigidflow.geometry import PointCloud, knn
from rigidflow.nn import mlp
from rigidflow.tensor import constant
from rigidflow.tensor import functions as F


DESK_RATIOS = (1.0, 1 / 4, 1 / 16, 1 / 32, 1 / 128)


def test_desk_level_sizes():
    assert level_sizes(512, DESK_RATIOS) == [512, 128, 32, 16, 4]


def test_first_ratio_must_be_one():
    with pytest.raises(ConfigurationError):
        level_sizes(512, (0.5, 0.25))


def test_ratios_must_decrease():
    with pytest.raises(ConfigurationError):
        level_sizes(512, (1.0, 0.5, 0.5))


def test_degenerate_pyramid():
    with pytest.raises(ConfigurationError):
        level_sizes(4, (1.0, 0.5, 0.4))


def test_pyramid_levels_are_nested(rng):
    cloud = PointCloud(rng.uniform(-1.0, 1.0, size=(64, 3)))

    levels = build_pyramid(cloud, (1.0, 1 / 4, 1 / 16))

    assert [len(level) for level in levels] == [64, 16, 4]
    assert levels[0].down_indices is None

    for parent, child in zip(levels, levels[1:]):
        np.testing.assert_array_equal(child.points.points,
                parent.points.points[child.down_indices])


def test_pyramid_minimum_sizes(rng):
    cloud = PointCloud(rng.uniform(-1.0, 1.0, size=(64, 3)))

    with pytest.raises(ConfigurationError):
        build_pyramid(cloud, (1.0, 1 / 16), min_sizes=(8, 8))


def test_set_conv_shape_and_translation_invariance(rng):
    parent = PointCloud(rng.uniform(-1.0, 1.0, size=(20, 3)))
    child = parent.subset(np.arange(5))
    features = constant(rng.normal(size=(20, 4)))

    weights = ModelParams.initial(set_conv_shapes('conv', 4, 6), 0)
    weights = dict(weights.items())

    out = set_conv(parent, features, child, weights, 'conv', 8)
    assert out.shape == (5, 6)

    shift = np.array([10.0, -3.0, 2.0])
    moved = set_conv(PointCloud(parent.points + shift), features,
            PointCloud(child.points + shift), weights, 'conv', 8)

    np.testing.assert_allclose(moved.data, out.data, atol=1e-4)


def test_set_conv_ignores_the_order_of_neighbors(rng):
    parent = PointCloud(rng.uniform(-1.0, 1.0, size=(20, 3)))
    child = parent.subset(np.arange(5))
    features = rng.normal(size=(20, 4))

    weights = dict(ModelParams.initial(set_conv_shapes('conv', 4, 6),
            0).items())

    out = set_conv(parent, constant(features), child, weights, 'conv', 8)

    # The neighbors of each child point in a shuffled order.
    indices = knn(child, parent, 8).indices[:, rng.permutation(8)]
    offsets = parent.points[indices] - child.points[:, None, :]
    h = F.concat([constant(offsets),
            F.gather(constant(features), indices)])
    shuffled = F.reduce(mlp(h, weights, 'conv', 2), 'max')

    np.testing.assert_allclose(shuffled.data, out.data, rtol=1e-5,
            atol=1e-6)

    # The parent points in a shuffled order.
    order = rng.permutation(20)
    reordered = set_conv(parent.subset(order), constant(features[order]),
            child, weights, 'conv', 8)

    np.testing.assert_allclose(reordered.data, out.data, rtol=1e-5,
            atol=1e-6)


def test_set_conv_needs_enough_neighbors(rng):
    parent = PointCloud(rng.uniform(-1.0, 1.0, size=(4, 3)))
    weights = dict(ModelParams.initial(set_conv_shapes('conv', 3, 2),
            0).items())

    with pytest.raises(ConfigurationError):
        set_conv(parent, constant(parent.points), parent, weights, 'conv', 5)


def test_backbone_shapes():
    shapes = backbone_shapes((8, 16))

    assert shapes['backbone.l0.0.weight'] == (6, 8)
    assert shapes['backbone.l0.1.weight'] == (8, 8)
    assert shapes['backbone.l1.0.weight'] == (11, 16)
    assert shapes['backbone.l1.1.bias'] == (16, )


def test_extract_features(rng):
    cloud = PointCloud(rng.uniform(-1.0, 1.0, size=(32, 3)))
    levels = build_pyramid(cloud, (1.0, 1 / 4))
    weights = dict(ModelParams.initial(backbone_shapes((8, 16)), 0).items())

    features = extract_features(levels, weights, (4, 4))

    assert [f.shape for f in features] == [(32, 8), (8, 16)]
    assert levels[1].features is features[1]
