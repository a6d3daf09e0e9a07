# SPDX-License-Identifier: BSD-2-Clause

# Copyright (c) 2026 The RigidFlow developers


from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from ..backbone import (PyramidLevel, backbone_shapes, build_pyramid,
        extract_features)
from ..cost_volume import CostVolume, cost_volume, cost_volume_shapes
from ..deform import DeformationDegree, deformation_from_flow
from ..exceptions import ArgumentError, ConfigurationError
from ..geometry import FlowField, PointCloud, knn
from ..nn import LEAKY_SLOPE
from ..tensor import Tensor, constant, float64_mode, get_dtype, grad_check
from ..tensor import functions as F
from ..wsa import (UpsampleResult, compute_weights, compute_weights_shapes,
        independent_upsample, wsa_upsample)
from .config import PRESETS
from .losses import LossWeights, compute_losses
from .params import ModelParams


@dataclass
class LevelState:
    """ What the network computes at one level of the pyramid. """

    level_id: int

    # The flow of the level's source points: the upsampled flow of the next
    # coarser level (zero at the coarsest level) plus the estimator's
    # residual.
    flow: Tensor

    est_feats: Tensor

    # The coordinates aggregated by the upsampling from the next coarser
    # level.  It is None at the coarsest level and when upsampling doesn't
    # aggregate coordinates.
    coords_up: Optional[Tensor]

    cost: CostVolume

    # The deformation degree of the upsampled flow (an estimator input) and
    # of the level's own predicted flow (used by the loss).  Both are None if
    # the network doesn't use deformation degrees.
    dd: Optional[DeformationDegree]
    dd_pred: Optional[DeformationDegree]

    upsample: Optional[UpsampleResult] = None

    # The refinement the estimator added to the upsampled flow.
    residual: Optional[Tensor] = None

    def flow_field(self):
        """ Return the predicted flow as a FlowField. """

        return FlowField(np.array(self.flow.data, dtype=np.float64))


@dataclass
class ForwardResult:
    """ The pyramids of a forward pass and the state of each level, finest
    first.
    """

    source: List[PyramidLevel]
    target: List[PyramidLevel]
    levels: List[LevelState]

    def flow(self):
        """ Return the predicted flow of the finest level. """

        return self.levels[0].flow_field()

    def source_values(self, values):
        """ Return per point values of the finest source level (eg. the
        ground truth flow) downsampled to every level through the indices
        used to build the pyramid.
        """

        values = np.asarray(getattr(values, 'vectors', values))

        if values.shape[0] != len(self.source[0]):
            raise ArgumentError(
                    "{0} values for {1} points".format(values.shape[0],
                            len(self.source[0])))

        per_level = [values]

        for level in self.source[1:]:
            per_level.append(per_level[-1][level.down_indices])

        return per_level


def estimator_shapes(prefix, in_channels, widths, dense_skips=True):
    """ Return the parameter shapes of an estimator. """

    shapes = {}
    layer_in = in_channels

    for j, width in enumerate(widths):
        shapes['{0}.dense.{1}.weight'.format(prefix, j)] = (layer_in, width)
        shapes['{0}.dense.{1}.bias'.format(prefix, j)] = (width, )

        layer_in = layer_in + width if dense_skips else width

    shapes[prefix + '.flow.weight'] = (widths[-1], 3)
    shapes[prefix + '.flow.bias'] = (3, )

    return shapes


def estimator_step(point_feats, cost, dd, up_feats, up_flow, weights, prefix,
        *, dense_skips=True):
    """ Return the estimator features and the flow of a level.  The inputs
    are concatenated and passed through a block of fully connected layers,
    each of which (with dense skips) sees the block input and the outputs of
    all the previous layers.  The flow is a linear projection of the output
    of the last layer and is the residual that refines the upsampled flow.
    """

    inputs = [point_feats, getattr(cost, 'values', cost)]
    if dd is not None:
        inputs.append(dd.flattened)
    inputs.extend([up_feats, up_flow])

    x = F.concat([constant(i) for i in inputs])

    first = weights.get(prefix + '.dense.0.weight')
    if first is None or first.shape[0] != x.shape[-1]:
        raise ConfigurationError(
                "the estimator '{0}' expects {1} input channels but {2} were "
                "given".format(prefix,
                        None if first is None else first.shape[0],
                        x.shape[-1]))

    block = [x]
    h = x
    j = 0

    while prefix + '.dense.{0}.weight'.format(j) in weights:
        h = F.leaky_relu(
                F.linear(F.concat(block) if dense_skips else h,
                        weights['{0}.dense.{1}.weight'.format(prefix, j)],
                        weights['{0}.dense.{1}.bias'.format(prefix, j)]),
                LEAKY_SLOPE)
        block.append(h)
        j += 1

    flow = F.linear(h, weights[prefix + '.flow.weight'],
            weights[prefix + '.flow.bias'])

    return h, flow


def parameter_shapes(config):
    """ Return a dict of the shapes of every learnable parameter of a network
    configuration.
    """

    shapes = backbone_shapes(config.channels)
    est = config.estimator_channels

    for l in range(config.levels):
        shapes.update(
                cost_volume_shapes('cost.l{0}'.format(l), config.channels[l],
                        config.cost_channels[l], config.cost_offsets))

        in_channels = config.channels[l] + config.cost_channels[l] + est + 3
        if config.use_dd:
            in_channels += config.deform_channels(l)

        shapes.update(
                estimator_shapes('estimator.l{0}'.format(l), in_channels,
                        config.estimator_widths, config.dense_skips))

        if l < config.levels - 1:
            if config.use_wsa:
                prefixes = ['upsample.l{0}'.format(l)]
            else:
                prefixes = ['up_feat.l{0}'.format(l),
                        'up_flow.l{0}'.format(l)]

            for prefix in prefixes:
                shapes.update(
                        compute_weights_shapes(prefix, est,
                                config.weight_hidden))

    return shapes


def init_params(config, seed):
    """ Return freshly initialised ModelParams for a configuration. """

    return ModelParams.initial(parameter_shapes(config), seed)


def forward(config, weights, P, Q):
    """ Run the network on a source and a target PointCloud and return the
    ForwardResult.  'weights' is a dict of tensors keyed by parameter name.
    Estimation starts at the coarsest level, each finer level upsamples the
    coarser estimate, warps its source points with it and adds the residual
    predicted by its estimator.
    """

    min_sizes = config.min_level_sizes()

    source = build_pyramid(P, config.ratios, min_sizes=min_sizes)
    target = build_pyramid(Q, config.ratios, min_sizes=min_sizes)

    neighbors = [config.backbone_k(l) for l in range(config.levels)]
    extract_features(source, weights, neighbors)
    extract_features(target, weights, neighbors)

    coarsest = config.levels - 1
    states = [None] * config.levels

    for l in range(coarsest, -1, -1):
        src = source[l]
        tgt = target[l]
        n = len(src)

        if l == coarsest:
            upsample = None
            coords_up = None
            up_feats = constant(np.zeros((n, config.estimator_channels),
                    dtype=get_dtype()))
            up_flow = constant(np.zeros((n, 3), dtype=get_dtype()))
        else:
            upsample = _upsample(config, weights, l, src, source[l + 1],
                    states[l + 1])
            coords_up = upsample.coords_up
            up_feats = upsample.feats_up
            up_flow = upsample.flow_up

        warped = F.add(constant(src.points.points), up_flow)

        cost = cost_volume(warped, src.features, tgt.points, tgt.features,
                weights, 'cost.l{0}'.format(l), k_patch=config.patch_k(l),
                k_dilated=config.k_dilated, dilation=config.dilation,
                offsets=config.cost_offsets)

        if config.use_dd:
            k = config.deform_k(l)
            indices = knn(src.points, src.points, k).indices

            dd = deformation_from_flow(src.points, up_flow, k,
                    mode=config.dd_mode,
                    recompute_neighbors=config.dd_recompute_neighbors,
                    indices=indices)
        else:
            dd = None

        est_feats, residual = estimator_step(src.features, cost, dd,
                up_feats, up_flow, weights, 'estimator.l{0}'.format(l),
                dense_skips=config.dense_skips)

        flow = F.add(up_flow, residual)

        if config.use_dd:
            dd_pred = deformation_from_flow(src.points, flow, k,
                    mode=config.dd_mode,
                    recompute_neighbors=config.dd_recompute_neighbors,
                    indices=indices)
        else:
            dd_pred = None

        states[l] = LevelState(level_id=l, flow=flow, est_feats=est_feats,
                coords_up=coords_up, cost=cost, dd=dd, dd_pred=dd_pred,
                upsample=upsample, residual=residual)

    return ForwardResult(source=source, target=target, levels=states)


def _upsample(config, weights, l, fine, coarse, coarse_state):
    """ Upsample the estimate of a coarse level to the next finer level. """

    k = config.upsample_k(l)
    table = knn(fine.points, coarse.points, k)

    if config.use_wsa:
        alpha = compute_weights(fine.points, coarse.points,
                coarse_state.est_feats, table, weights,
                'upsample.l{0}'.format(l), k)

        return wsa_upsample(alpha, coarse.points, coarse_state.est_feats,
                coarse_state.flow)

    feature_weights = compute_weights(fine.points, coarse.points,
            coarse_state.est_feats, table, weights, 'up_feat.l{0}'.format(l),
            k)
    flow_weights = compute_weights(fine.points, coarse.points,
            coarse_state.est_feats, table, weights, 'up_flow.l{0}'.format(l),
            k)

    return independent_upsample(feature_weights, flow_weights,
            coarse_state.est_feats, coarse_state.flow)


def predict(config, params, P, Q):
    """ Return the finest level flow predicted for a pair of clouds as a
    FlowField.
    """

    weights = {name: constant(value) for name, value in params.items()}

    return forward(config, weights, P, Q).flow()


def check_end_to_end(config=None, *, seed=0, samples=2, eps=1e-6):
    """ Compare the analytic gradient of the total loss of a small network
    with central differences and return the worst relative error.  A few
    randomly chosen elements of every parameter are checked.
    """

    if config is None:
        config = PRESETS['tiny']

    rng = np.random.default_rng(seed)
    n = config.num_points

    P = PointCloud(rng.uniform(-1.0, 1.0, size=(n, 3)))
    gt = rng.uniform(-0.2, 0.2, size=(n, 3))
    Q = PointCloud(P.points + gt + rng.normal(scale=0.01, size=(n, 3)))

    shapes = parameter_shapes(config)
    names = sorted(shapes)
    params = ModelParams.initial(shapes, seed)

    # Non-zero biases keep the leaky ReLUs away from their kinks.
    inputs = []
    for name in names:
        value = params[name].astype(np.float64)

        if name.endswith('.bias'):
            value = value + 0.05 * rng.normal(size=value.shape)

        inputs.append(value)

    loss_weights = LossWeights()

    def loss(*tensors):
        result = forward(config, dict(zip(names, tensors)), P, Q)

        return compute_losses(result, gt, loss_weights).total

    with float64_mode():
        return grad_check(loss, inputs, eps, samples=samples, seed=seed,
                floor=1e-6)
