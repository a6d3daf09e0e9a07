# SPDX-License-Identifier: BSD-2-Clause

# Copyright (c) 2026 The RigidFlow developers


from dataclasses import dataclass
from typing import Optional, Tuple

from ..exceptions import ArgumentError
from ..tensor import Tensor, constant
from ..tensor import functions as F


@dataclass(frozen=True)
class LossWeights:
    """ The weight of each pyramid level (finest first) and of each loss
    term.
    """

    gamma: Tuple[float, ...] = (0.02, 0.04, 0.08, 0.16, 0.16)
    alpha_s: float = 1.0
    alpha_p: float = 0.3
    alpha_dd: float = 0.3

    def __post_init__(self):
        object.__setattr__(self, 'gamma', tuple(float(g) for g in self.gamma))

        alphas = (self.alpha_s, self.alpha_p, self.alpha_dd)

        if any(w < 0 for w in self.gamma + alphas):
            raise ArgumentError("loss weights must not be negative")

    def level_weights(self, levels):
        """ Return the weights of the finest 'levels' levels. """

        if levels > len(self.gamma):
            raise ArgumentError(
                    "{0} level weights are given for {1} levels".format(
                            len(self.gamma), levels))

        return self.gamma[:levels]


@dataclass(frozen=True)
class LossBreakdown:
    """ The loss terms of a sample.  A term that the network variant doesn't
    produce is None.
    """

    scene_flow: Tensor
    coordinate: Optional[Tensor]
    deformation: Optional[Tensor]
    total: Tensor


def _per_level(values, gamma, term):
    """ Return the gamma weighted sum over levels of a per level scalar term
    or None if no level contributes.
    """

    if len(values) != len(gamma):
        raise ArgumentError(
                "{0} levels were given but there are {1} level weights".format(
                        len(values), len(gamma)))

    loss = None

    for value, g in zip(values, gamma):
        if value is None:
            continue

        level_loss = F.scale(term(value), g)
        loss = level_loss if loss is None else F.add(loss, level_loss)

    return loss


def _sum_of_distances(a, b):
    """ Return the sum over points of the distance between two [N, 3] values.
    """

    a = constant(a)
    b = constant(b)

    if a.shape != b.shape:
        raise ArgumentError(
                "cannot compare values of shape {0} and {1}".format(a.shape,
                        b.shape))

    return F.total(F.norm(F.sub(a, b)))


def loss_scene_flow(flows, gt_flows, gamma):
    """ Return the multi-scale scene flow loss: the gamma weighted sum over
    levels of the summed end point errors.
    """

    if len(flows) != len(gt_flows):
        raise ArgumentError(
                "{0} predicted levels but {1} ground truth levels".format(
                        len(flows), len(gt_flows)))

    return _per_level(list(zip(flows, gt_flows)), gamma,
            lambda pair: _sum_of_distances(*pair))


def loss_coordinate(coords_up, true_coords, gamma):
    """ Return the coordinate loss: the gamma weighted sum over levels of the
    distances between the aggregated coordinates and the actual points.
    Levels without aggregated coordinates are skipped and None is returned
    if there are none at all.
    """

    if len(coords_up) != len(true_coords):
        raise ArgumentError(
                "{0} aggregated levels but {1} coordinate levels".format(
                        len(coords_up), len(true_coords)))

    pairs = [None if c is None else (c, p)
            for c, p in zip(coords_up, true_coords)]

    return _per_level(pairs, gamma, lambda pair: _sum_of_distances(*pair))


def loss_deformation(degrees, gamma):
    """ Return the deformation loss: the gamma weighted sum over levels of the
    norms of the flattened deformation degree of each point.  Levels without a
    deformation degree are skipped and None is returned if there are none at
    all.
    """

    return _per_level(list(degrees), gamma,
            lambda dd: F.total(F.norm(dd.flattened)))


def loss_total(ls, lp, ldd, weights):
    """ Return alpha_S * L_S + alpha_P * L_P + alpha_DD * L_DD as a scalar
    tensor.  The terms may be tensors, numbers or None (for an absent term).
    """

    if ls is None:
        raise ArgumentError("the scene flow loss is required")

    total = None

    for term, alpha in ((ls, weights.alpha_s), (lp, weights.alpha_p),
            (ldd, weights.alpha_dd)):
        if term is None:
            continue

        weighted = F.scale(constant(term), alpha)
        total = weighted if total is None else F.add(total, weighted)

    return total


def compute_losses(result, gt_flow, weights):
    """ Return the LossBreakdown of a forward pass given the ground truth flow
    of the finest level.
    """

    gamma = weights.level_weights(len(result.levels))

    gt_flows = result.source_values(gt_flow)

    ls = loss_scene_flow([state.flow for state in result.levels], gt_flows,
            gamma)
    lp = loss_coordinate([state.coords_up for state in result.levels],
            [level.points.points for level in result.source], gamma)
    ldd = loss_deformation([state.dd_pred for state in result.levels], gamma)

    return LossBreakdown(scene_flow=ls, coordinate=lp, deformation=ldd,
            total=loss_total(ls, lp, ldd, weights))
