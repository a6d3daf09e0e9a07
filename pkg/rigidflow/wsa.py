# SPDX-License-Identifier: BSD-2-Clause

# Copyright (c) 2026 The RigidFlow developers


from dataclasses import dataclass
from typing import Optional

import numpy as np

from .exceptions import ArgumentError, PreconditionError
from .geometry import RigidMotion, random_motion
from .nn import mlp, mlp_shapes
from .tensor import Tensor, constant
from .tensor import functions as F


@dataclass(frozen=True)
class AggregationWeights:
    """ One row of K convex weights per fine point over its K coarse
    neighbors, and the neighbor indices they refer to.
    """

    alpha: Tensor
    indices: np.ndarray

    def __post_init__(self):
        if self.alpha.shape != self.indices.shape:
            raise ArgumentError(
                    "weights {0} don't match the neighbor table {1}".format(
                            self.alpha.shape, self.indices.shape))


@dataclass(frozen=True)
class UpsampleResult:
    """ The coordinates, estimator features and flow of the fine points
    aggregated from a coarse level.  'weights' is the single set of weights
    that produced all three, 'coords_up' is None for independent upsampling.
    """

    coords_up: Optional[Tensor]
    feats_up: Tensor
    flow_up: Tensor
    weights: AggregationWeights


def compute_weights(fine_points, coarse_points, coarse_est_feats,
        neighbor_table, weights, prefix, k, depth=2):
    """ Return the AggregationWeights of the fine points of level l-1 over
    their coarse neighbors in level l.  A shared MLP is applied to the
    relative offset of each neighbor concatenated with its estimator feature,
    averaged over channels to a logit and normalised with a softmax over the
    neighbors.
    """

    indices = neighbor_table.indices

    if indices.shape != (len(fine_points), k):
        raise ArgumentError(
                "expected a neighbor table of {0} rows of {1} neighbors, not "
                "{2}".format(len(fine_points), k, indices.shape))

    offsets = coarse_points.points[indices] - fine_points.points[:, None, :]

    h = F.concat([constant(offsets), F.gather(coarse_est_feats, indices)])
    logits = F.channel_mean(mlp(h, weights, prefix, depth,
            last_activation=False))

    return AggregationWeights(alpha=F.softmax(logits), indices=indices)


def compute_weights_shapes(prefix, est_channels, hidden, depth=2):
    """ Return the parameter shapes of the weight network. """

    return mlp_shapes(prefix, est_channels + 3, [hidden] * depth)


def wsa_upsample(weights, coarse_points, coarse_est_feats, coarse_flow):
    """ Aggregate the coarse coordinates, estimator features and flow with the
    same weights and return the UpsampleResult.
    """

    coarse_points = constant(_points_of(coarse_points))
    coarse_flow = constant(coarse_flow)

    rows = coarse_points.shape[0]
    if coarse_est_feats.shape[0] != rows or coarse_flow.shape != (rows, 3):
        raise ArgumentError(
                "coarse points {0}, features {1} and flow {2} are "
                "incompatible".format(coarse_points.shape,
                        coarse_est_feats.shape, coarse_flow.shape))

    return UpsampleResult(
            coords_up=_aggregate(weights, coarse_points),
            feats_up=_aggregate(weights, coarse_est_feats),
            flow_up=_aggregate(weights, coarse_flow),
            weights=weights)


def independent_upsample(feature_weights, flow_weights, coarse_est_feats,
        coarse_flow):
    """ Aggregate the coarse estimator features and flow with separately
    learned weights and no coordinate aggregation.  The result's 'weights' are
    those used for the flow.
    """

    return UpsampleResult(coords_up=None,
            feats_up=_aggregate(feature_weights, coarse_est_feats),
            flow_up=_aggregate(flow_weights, constant(coarse_flow)),
            weights=flow_weights)


def _aggregate(weights, values):
    """ Return the convex combination of the neighbor rows of some values. """

    return F.weighted_sum(weights.alpha, F.gather(values, weights.indices))


def _points_of(points):
    """ Return the array of a PointCloud or of an array. """

    return getattr(points, 'points', points)


def verify_rigidity_identity(motion, neighbors, center, weights):
    """ Return |sum_k a_k s_k - s_center| where s = (R - I)p + t is the flow
    of a rigid motion.  The weights must sum to 1.  If they also reproduce the
    center (sum_k a_k p_k = center) the residual vanishes.
    """

    neighbors = np.asarray(neighbors, dtype=np.float64)
    center = np.asarray(center, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)

    if (neighbors.ndim != 2 or neighbors.shape[1] != 3 or
            weights.shape != (neighbors.shape[0], )):
        raise ArgumentError("expected K neighbors and K weights")

    if abs(weights.sum() - 1.0) > 1e-9:
        raise PreconditionError(
                "the weights sum to {0!r}, not 1".format(weights.sum()))

    flows = motion.flow(neighbors)
    center_flow = motion.flow(center[None, :])[0]

    return float(np.linalg.norm(weights @ flows - center_flow))


def project_barycentric(weights, neighbors, target, *, toward=None):
    """ Return the weights nearest to the given ones (in the least squares
    sense) that sum to 1 and reproduce 'target' as the weighted sum of the
    neighbors.  The weights are affine rather than convex and some may be
    negative.  'toward' may be convex weights that also reproduce the target,
    in which case the result is moved toward them only as far as is needed
    to make every weight non-negative.
    """

    neighbors = np.asarray(neighbors, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)

    A = np.vstack((neighbors.T, np.ones(len(neighbors))))
    b = np.concatenate((np.asarray(target, dtype=np.float64), [1.0]))

    correction = A.T @ np.linalg.solve(A @ A.T, A @ weights - b)
    projected = weights - correction

    if toward is None:
        return projected

    toward = np.asarray(toward, dtype=np.float64)

    if toward.shape != projected.shape or (toward < 0).any():
        raise ArgumentError("'toward' must be K non-negative weights")

    negative = projected < 0

    if not negative.any():
        return projected

    # Any point between two solutions is also a solution.
    fraction = np.min(
            toward[negative] / (toward[negative] - projected[negative]))

    # Rounding may leave the limiting weights just below zero.
    return np.maximum(toward + fraction * (projected - toward), 0.0)


@dataclass(frozen=True)
class RigidityTrial:
    """ The outcome of one rigidity identity trial. """

    motion: RigidMotion

    # The aggregation weights of the trial.
    weights: np.ndarray

    residual: float

    # The residual expected from any violation of the barycentric condition,
    # |(R - I)e|.
    expected: float


def run_rigidity_trials(trials, seed, *, violation=0.0, k=8):
    """ Run randomised rigidity identity trials and return the list of
    RigidityTrial.  Each trial draws a rigid motion, K neighbors, a center in
    their convex hull and weights that reproduce the center displaced by a
    random vector of length 'violation'.  Without a violation the weights
    are convex.
    """

    if trials < 1:
        raise ArgumentError("at least one trial is needed")

    rng = np.random.default_rng(seed)
    results = []

    for _ in range(trials):
        motion = random_motion(rng, np.pi, 10.0)

        neighbors = rng.uniform(-1.0, 1.0, size=(k, 3))
        hull_weights = rng.dirichlet(np.ones(k))
        center = hull_weights @ neighbors

        e = rng.normal(size=3)
        e *= violation / np.linalg.norm(e)

        alpha = project_barycentric(rng.dirichlet(np.ones(k)), neighbors,
                center + e, toward=None if violation else hull_weights)

        results.append(
                RigidityTrial(motion=motion, weights=alpha,
                        residual=verify_rigidity_identity(motion, neighbors,
                                center, alpha),
                        expected=float(
                                np.linalg.norm((motion.R - np.eye(3)) @ e))))

    return results
