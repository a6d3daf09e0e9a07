# SPDX-License-Identifier: BSD-2-Clause

# Copyright (c) 2026 The RigidFlow developers


import numpy as np
import pytest

from rigidflow.deform import deformation_from_flow, local_structure
from rigidflow.exceptions import ArgumentError
from rigidflow.flownet import (LossWeights, loss_coordinate, loss_deformation,
        loss_scene_flow, loss_total)
from rigidflow.geometry import knn
from rigidflow.tensor import constant, float64_mode


# =============================================================================
# Scene flow loss
# =============================================================================

def test_exact_flow_has_no_loss(rng):
    flows = [rng.normal(size=(8, 3)), rng.normal(size=(2, 3))]

    assert loss_scene_flow(flows, flows, (0.02, 0.04)).item() == 0.0


def test_single_point_error():
    loss = loss_scene_flow([np.array([[3.0, 4.0, 0.0]])], [np.zeros((1, 3))],
            (1.0, ))

    assert loss.item() == pytest.approx(5.0)


def test_doubling_gamma_doubles_the_loss(rng):
    flows = [rng.normal(size=(8, 3)), rng.normal(size=(2, 3))]
    gt = [np.zeros((8, 3)), np.zeros((2, 3))]

    single = loss_scene_flow(flows, gt, (0.5, 0.25)).item()
    double = loss_scene_flow(flows, gt, (1.0, 0.5)).item()

    assert double == pytest.approx(2 * single, rel=1e-6)


def test_level_mismatch():
    with pytest.raises(ArgumentError):
        loss_scene_flow([np.zeros((1, 3))], [np.zeros((1, 3))] * 2, (1.0, ))

    with pytest.raises(ArgumentError):
        loss_scene_flow([np.zeros((1, 3))], [np.zeros((1, 3))], (1.0, 1.0))


# =============================================================================
# Coordinate loss
# =============================================================================

def test_coordinate_offset():
    loss = loss_coordinate([np.array([[1.0, 2.0, 3.3]])],
            [np.array([[1.0, 2.0, 3.0]])], (0.16, ))

    assert loss.item() == pytest.approx(0.048, rel=1e-5)


def test_coordinate_levels_without_aggregation():
    loss = loss_coordinate([np.zeros((1, 3)), None],
            [np.array([[0.0, 0.0, 1.0]]), np.zeros((1, 3))], (1.0, 1.0))

    assert loss.item() == pytest.approx(1.0)

    assert loss_coordinate([None, None], [np.zeros((1, 3))] * 2,
            (1.0, 1.0)) is None


# =============================================================================
# Deformation loss
# =============================================================================

def test_zero_flow_has_no_deformation(cloud):
    dd = deformation_from_flow(cloud, constant(np.zeros((32, 3))), 4)

    assert loss_deformation([dd], (1.0, )).item() == 0.0


def test_translation_has_no_deformation(cloud):
    dd = deformation_from_flow(cloud,
            constant(np.tile([0.2, 0.1, -0.4], (32, 1))), 4)

    assert loss_deformation([dd], (1.0, )).item() < 1e-4


def test_doubling_deformation(cloud):
    indices = knn(cloud, cloud, 4).indices

    with float64_mode():
        dd = deformation_from_flow(cloud, constant(cloud.points), 4,
                indices=indices)
        delta = local_structure(cloud, indices).delta.data

        expected = 0.08 * np.linalg.norm(delta.reshape(32, -1), axis=1).sum()

        assert loss_deformation([dd], (0.08, )).item() == pytest.approx(
                expected, rel=1e-12)


def test_deformation_levels_without_degrees():
    assert loss_deformation([None, None], (1.0, 1.0)) is None


# =============================================================================
# The total loss
# =============================================================================

def test_total():
    weights = LossWeights(alpha_s=1.0, alpha_p=1.0, alpha_dd=1.0)

    assert loss_total(1.0, 2.0, 3.0, weights).item() == pytest.approx(6.0)
    assert loss_total(0.0, 0.0, 0.0, weights).item() == 0.0


def test_total_with_absent_terms():
    weights = LossWeights(alpha_s=2.0, alpha_p=1.0, alpha_dd=1.0)

    assert loss_total(1.5, None, None, weights).item() == pytest.approx(3.0)


def test_total_reduces_to_scene_flow():
    weights = LossWeights(alpha_s=0.5, alpha_p=0.0, alpha_dd=0.0)

    assert loss_total(4.0, 7.0, 9.0, weights).item() == pytest.approx(2.0)


def test_total_needs_the_scene_flow_loss():
    with pytest.raises(ArgumentError):
        loss_total(None, 1.0, 1.0, LossWeights())


def test_negative_weights():
    with pytest.raises(ArgumentError):
        LossWeights(alpha_p=-0.1)

    with pytest.raises(ArgumentError):
        LossWeights(gamma=(0.02, -0.04))


def test_level_weights():
    weights = LossWeights()

    assert weights.gamma == (0.02, 0.04, 0.08, 0.16, 0.16)
    assert weights.level_weights(2) == (0.02, 0.04)

    with pytest.raises(ArgumentError):
        weights.level_weights(6)
