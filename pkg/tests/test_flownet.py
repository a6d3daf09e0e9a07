# SPDX-License-Identifier: BSD-2-Clause

# Copyright (c) 2026 The RigidFlow developers


from dataclasses import replace

import numpy as np
import pytest

from rigidflow.exceptions import (ArgumentError, ConfigurationError,
        NumericError)
from rigidflow.flownet import (PRESETS, LossWeights, ModelConfig, ModelParams,
        compute_losses, estimator_shapes, estimator_step, forward,
        init_params, parameter_shapes, predict, preset)
from rigidflow.geometry import PointCloud
from rigidflow.tensor import constant
from rigidflow.tensor import functions as F


@pytest.fixture
def pair(rng):
    """ A source cloud, a target cloud and the ground truth flow. """

    P = PointCloud(rng.uniform(-1.0, 1.0, size=(32, 3)))
    gt = rng.uniform(-0.1, 0.1, size=(32, 3))

    return P, PointCloud(P.points + gt), gt


# =============================================================================
# Configurations
# =============================================================================

class TestModelConfig:

    def test_desk_level_sizes(self):
        assert PRESETS['desk'].level_sizes() == [512, 128, 32, 16, 4]

    def test_neighborhoods_are_clamped(self):
        desk = PRESETS['desk']

        assert desk.patch_k(4) == 4
        assert desk.patch_k(0) == 16
        assert desk.upsample_k(3) == 4
        assert desk.backbone_k(4) == 16
        assert desk.deform_channels(0) == 24

    def test_euclidean_deformation_channels(self):
        euclidean = PRESETS['desk'].variant(dd_mode='euclidean')
        assert euclidean.deform_channels(0) == 8

    def test_preset_overrides(self):
        config = preset('small', use_wsa=False)

        assert config.preset == 'small'
        assert not config.use_wsa
        assert config.levels == 3

    def test_unknown_preset(self):
        with pytest.raises(ConfigurationError):
            preset('huge')

    def test_channels_per_level(self):
        with pytest.raises(ConfigurationError):
            ModelConfig(channels=(8, 16))

    def test_bad_modes(self):
        with pytest.raises(ConfigurationError):
            ModelConfig(dd_mode='manhattan')

        with pytest.raises(ConfigurationError):
            ModelConfig(cost_offsets='angle')

    def test_non_positive_sizes(self):
        with pytest.raises(ConfigurationError):
            PRESETS['tiny'].variant(k_patch=0)

    def test_dict_round_trip(self):
        config = preset('small', dd_mode='euclidean')

        assert ModelConfig.from_dict(config.as_dict()) == config

    def test_unknown_dict_key(self):
        d = PRESETS['tiny'].as_dict()
        d['layers'] = 3

        with pytest.raises(ConfigurationError):
            ModelConfig.from_dict(d)


# =============================================================================
# Parameters
# =============================================================================

class TestParams:

    def test_initial_values(self, tiny):
        params = init_params(tiny, 0)

        assert params.shapes() == {name: tuple(shape)
                for name, shape in parameter_shapes(tiny).items()}
        assert params.names() == sorted(params.names())

        for name, value in params.items():
            assert value.dtype == np.float32

            if name.endswith('.bias'):
                assert not value.any()

            if name.endswith('.flow.weight'):
                assert np.abs(value).max() < 0.1

    def test_seeded(self, tiny):
        assert init_params(tiny, 3).digest() == init_params(tiny, 3).digest()
        assert init_params(tiny, 3).digest() != init_params(tiny, 4).digest()

    def test_non_finite(self):
        with pytest.raises(NumericError):
            ModelParams({'w': np.array([1.0, np.inf])})

    def test_updated_names(self, tiny):
        params = init_params(tiny, 0)

        with pytest.raises(ArgumentError):
            params.updated({'w': np.zeros(1)}, params.state)

    def test_copy_is_deep(self, tiny):
        params = init_params(tiny, 0)
        copy = params.copy()

        copy[params.names()[0]][...] = 1.0

        assert copy.digest() != params.digest()

    def test_wsa_parameters(self, tiny):
        shapes = parameter_shapes(tiny)

        assert 'upsample.l0.0.weight' in shapes
        assert not any(name.startswith('up_flow.') for name in shapes)

    def test_independent_upsampling_parameters(self, tiny):
        shapes = parameter_shapes(tiny.variant(use_wsa=False))

        assert 'up_feat.l0.0.weight' in shapes
        assert 'up_flow.l0.0.weight' in shapes
        assert not any(name.startswith('upsample.') for name in shapes)

    def test_dense_skip_growth(self, tiny):
        dense = parameter_shapes(tiny)
        plain = parameter_shapes(tiny.variant(dense_skips=False))

        # channels + cost channels + estimator channels + flow + deformation
        in_channels = [8 + 8 + 8 + 3 + 4 * 3, 16 + 8 + 8 + 3 + 4 * 3]

        assert dense['estimator.l0.dense.0.weight'] == (in_channels[0], 8)
        assert dense['estimator.l0.dense.1.weight'] == (in_channels[0] + 8, 8)
        assert dense['estimator.l0.dense.2.weight'] == (in_channels[0] + 16, 8)
        assert plain['estimator.l0.dense.1.weight'] == (8, 8)
        assert plain['estimator.l0.dense.2.weight'] == (8, 8)

        def count(shapes):
            return sum(int(np.prod(s)) for s in shapes.values())

        # Layers 1 and 2 of each level also see the earlier outputs.
        growth = sum(c * 8 + (c + 8) * 8 for c in in_channels)
        assert count(dense) - count(plain) == growth


# =============================================================================
# The estimator
# =============================================================================

class TestEstimator:

    def test_zero_parameters_give_zero_flow(self, rng):
        shapes = estimator_shapes('est', 10, (6, 6))
        weights = dict(ModelParams.zeros(shapes).items())

        feats, flow = estimator_step(constant(rng.normal(size=(5, 2))),
                constant(rng.normal(size=(5, 2))), None,
                constant(rng.normal(size=(5, 3))),
                constant(rng.normal(size=(5, 3))), weights, 'est')

        assert feats.shape == (5, 6)
        assert flow.shape == (5, 3)
        np.testing.assert_array_equal(flow.data, 0.0)

    def test_channel_mismatch(self, rng):
        weights = dict(ModelParams.initial(estimator_shapes('est', 11, (6, )),
                0).items())

        with pytest.raises(ConfigurationError):
            estimator_step(constant(np.ones((5, 2))),
                    constant(np.ones((5, 2))), None,
                    constant(np.ones((5, 3))), constant(np.ones((5, 3))),
                    weights, 'est')


# =============================================================================
# Forward passes
# =============================================================================

class TestForward:

    def test_levels(self, tiny, pair):
        P, Q, _ = pair

        result = forward(tiny, init_params(tiny, 0).tensors(), P, Q)

        assert [state.level_id for state in result.levels] == [0, 1]
        assert [state.flow.shape for state in result.levels] == [(32, 3),
                (8, 3)]
        assert result.levels[1].coords_up is None
        assert result.levels[1].upsample is None
        assert result.levels[0].coords_up.shape == (32, 3)
        assert result.levels[0].dd.value.shape == (32, 4, 3)
        assert result.levels[0].dd_pred is not None

    def test_desk_level_sizes(self, rng):
        desk = PRESETS['desk']
        P = PointCloud(rng.uniform(-1.0, 1.0, size=(512, 3)))
        Q = PointCloud(P.points + 0.05)

        result = forward(desk, init_params(desk, 0).tensors(), P, Q)

        assert [len(state.flow.data) for state in result.levels] == [512,
                128, 32, 16, 4]

    def test_zero_parameters_give_zero_flow(self, tiny, pair):
        P, Q, _ = pair

        params = ModelParams.zeros(parameter_shapes(tiny))

        np.testing.assert_array_equal(predict(tiny, params, P, Q).vectors,
                0.0)

    def test_flow_refines_the_upsampled_flow(self, tiny, pair):
        P, Q, _ = pair

        result = forward(tiny, init_params(tiny, 0).tensors(), P, Q)
        finest, coarsest = result.levels

        np.testing.assert_allclose(finest.flow.data,
                finest.upsample.flow_up.data + finest.residual.data,
                rtol=1e-6, atol=1e-7)
        np.testing.assert_array_equal(coarsest.flow.data,
                coarsest.residual.data)

    def test_zero_flow_head_keeps_the_upsampled_flow(self, tiny, pair):
        P, Q, _ = pair

        values = dict(init_params(tiny, 0).items())
        for name in ('estimator.l0.flow.weight', 'estimator.l0.flow.bias'):
            values[name] = np.zeros_like(values[name])

        result = forward(tiny, ModelParams(values).tensors(), P, Q)
        finest = result.levels[0]

        assert np.abs(result.levels[1].flow.data).max() > 0.0
        np.testing.assert_array_equal(finest.flow.data,
                finest.upsample.flow_up.data)

    def test_coarse_estimator_gets_the_fine_loss(self, tiny, pair):
        P, Q, gt = pair
        weights = init_params(tiny, 0).tensors()

        result = forward(tiny, weights, P, Q)
        finest = result.source_values(gt)[0]
        loss = F.total(F.norm(F.sub(result.levels[0].flow, constant(finest))))
        loss.backward()

        assert np.abs(weights['estimator.l1.flow.bias'].grad).max() > 0.0

    def test_deterministic(self, tiny, pair):
        P, Q, _ = pair
        params = init_params(tiny, 1)

        np.testing.assert_array_equal(predict(tiny, params, P, Q).vectors,
                predict(tiny, params, P, Q).vectors)

    def test_prediction_has_no_graph(self, tiny, pair):
        P, Q, _ = pair
        params = ModelParams.zeros(parameter_shapes(tiny))

        result = forward(tiny, {name: constant(value)
                for name, value in params.items()}, P, Q)

        assert not result.levels[0].flow.requires_grad

    def test_too_few_points(self, tiny, rng):
        P = PointCloud(rng.uniform(-1.0, 1.0, size=(12, 3)))

        with pytest.raises(ConfigurationError):
            predict(tiny, init_params(tiny, 0), P, P)

    def test_ground_truth_is_downsampled(self, tiny, pair):
        P, Q, gt = pair

        result = forward(tiny, init_params(tiny, 0).tensors(), P, Q)
        per_level = result.source_values(gt)

        np.testing.assert_array_equal(per_level[1],
                gt[result.source[1].down_indices])

        with pytest.raises(ArgumentError):
            result.source_values(gt[:10])


# =============================================================================
# Losses through a forward pass
# =============================================================================

class TestComputeLosses:

    def test_all_terms(self, tiny, pair):
        P, Q, gt = pair
        params = init_params(tiny, 0)
        weights = params.tensors()

        losses = compute_losses(forward(tiny, weights, P, Q), gt,
                LossWeights())

        assert losses.coordinate is not None
        assert losses.deformation is not None
        assert np.isfinite(losses.total.item())

        losses.total.backward()

        assert all(weights[name].grad is not None
                for name in weights if name.startswith('estimator.l0.'))

    def test_without_wsa(self, tiny, pair):
        P, Q, gt = pair
        config = tiny.variant(use_wsa=False)

        result = forward(config, init_params(config, 0).tensors(), P, Q)
        losses = compute_losses(result, gt, LossWeights())

        assert all(state.coords_up is None for state in result.levels)
        assert losses.coordinate is None

    def test_without_deformation_degree(self, tiny, pair):
        P, Q, gt = pair
        config = tiny.variant(use_dd=False)

        result = forward(config, init_params(config, 0).tensors(), P, Q)
        losses = compute_losses(result, gt, LossWeights())

        assert all(state.dd is None for state in result.levels)
        assert losses.deformation is None

    def test_total_combines_the_terms(self, tiny, pair):
        P, Q, gt = pair

        weights = LossWeights(alpha_s=1.0, alpha_p=0.5, alpha_dd=0.25)
        losses = compute_losses(
                forward(tiny, init_params(tiny, 0).tensors(), P, Q), gt,
                weights)

        expected = (losses.scene_flow.item() + 0.5 * losses.coordinate.item() +
                0.25 * losses.deformation.item())

        assert losses.total.item() == pytest.approx(expected, rel=1e-5)

    def test_too_few_level_weights(self, tiny, pair):
        P, Q, gt = pair

        with pytest.raises(ArgumentError):
            compute_losses(
                    forward(tiny, init_params(tiny, 0).tensors(), P, Q), gt,
                    LossWeights(gamma=(1.0, )))


def test_euclidean_and_distance_variants(tiny, pair):
    P, Q, gt = pair
    config = replace(tiny, dd_mode='euclidean', cost_offsets='distance',
            dd_recompute_neighbors=True)

    result = forward(config, init_params(config, 0).tensors(), P, Q)

    assert result.levels[0].dd.value.shape == (32, 4, 1)
    assert np.isfinite(compute_losses(result, gt, LossWeights()).total.item())
