# SPDX-License-Identifier: BSD-2-Clause

# Copyright (c) 2026 The RigidFlow developers


from dataclasses import astuple, dataclass, fields

import numpy as np

from ..exceptions import ArgumentError


# The names of the metrics in the order they are reported.
METRIC_NAMES = ('EPE3D', 'Acc3DS', 'Acc3DR', 'Outliers3D')


@dataclass(frozen=True)
class FlowMetrics:
    """ The end point error (in meters) of a predicted flow and the fractions
    of accurate points and of outliers.
    """

    epe3d: float
    acc3d_strict: float
    acc3d_relax: float
    outliers3d: float

    def as_tuple(self):
        """ Return the metrics in reporting order. """

        return astuple(self)

    def format_row(self):
        """ Return the metrics formatted as a table row. """

        return ' '.join('{0:.4f}'.format(v) for v in self.as_tuple())

    @classmethod
    def mean(cls, rows):
        """ Return the mean of a non-empty sequence of metrics. """

        rows = list(rows)
        if not rows:
            raise ArgumentError("there are no metrics to average")

        return cls(*(float(np.mean([getattr(r, f.name) for r in rows]))
                for f in fields(cls)))


def point_errors(pred, gt):
    """ Return the per point end point errors and relative errors of a
    predicted flow.  The relative error of a point whose true flow is zero is
    0 if the prediction is exact and infinite otherwise.
    """

    pred = np.asarray(getattr(pred, 'vectors', pred), dtype=np.float64)
    gt = np.asarray(getattr(gt, 'vectors', gt), dtype=np.float64)

    if pred.shape != gt.shape:
        raise ArgumentError(
                "the predicted flow {0} and the ground truth {1} don't "
                "match".format(pred.shape, gt.shape))

    epe = np.linalg.norm(pred - gt, axis=-1)
    gt_norm = np.linalg.norm(gt, axis=-1)

    with np.errstate(divide='ignore', invalid='ignore'):
        rel = np.where(gt_norm > 0, epe / np.where(gt_norm > 0, gt_norm, 1.0),
                np.where(epe > 0, np.inf, 0.0))

    return epe, rel


def strict_accurate(pred, gt):
    """ Return the boolean mask of the points that pass the strict accuracy
    test.
    """

    epe, rel = point_errors(pred, gt)

    return (epe < 0.05) | (rel < 0.05)


def metrics(pred, gt):
    """ Return the FlowMetrics of a predicted flow. """

    epe, rel = point_errors(pred, gt)

    if epe.size == 0:
        raise ArgumentError("metrics need at least one point")

    return FlowMetrics(epe3d=float(epe.mean()),
            acc3d_strict=float(((epe < 0.05) | (rel < 0.05)).mean()),
            acc3d_relax=float(((epe < 0.1) | (rel < 0.1)).mean()),
            outliers3d=float(((epe > 0.3) | (rel > 0.1)).mean()))
