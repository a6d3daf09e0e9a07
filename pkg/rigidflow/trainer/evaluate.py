# SPDX-License-Identifier: BSD-2-Clause

# Copyright (c) 2026 The RigidFlow developers


from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from ..flownet import METRIC_NAMES, FlowMetrics, metrics, predict
from ..verbose import verbose


@dataclass
class EvaluationReport:
    """ The metrics of each sample of a dataset and their mean, which is None
    for an empty dataset.
    """

    rows: List[Tuple[str, FlowMetrics]]
    mean: Optional[FlowMetrics]

    def table(self, per_sample=False):
        """ Return the lines of the metric table. """

        lines = [' '.join(METRIC_NAMES)]

        if per_sample:
            lines.extend('{0} {1}'.format(row.format_row(), name)
                    for name, row in self.rows)

        if self.mean is not None:
            lines.append(self.mean.format_row())

        return lines


def _named(samples):
    """ Return (name, sample) pairs for samples that may not be named. """

    named = []

    for i, item in enumerate(samples):
        if isinstance(item, tuple):
            named.append(item)
        else:
            named.append(('sample {0}'.format(i), item))

    return named


def _report(rows):
    """ Return the EvaluationReport of some per sample rows. """

    return EvaluationReport(rows=rows,
            mean=FlowMetrics.mean(row for _, row in rows) if rows else None)


def evaluate(config, params, samples):
    """ Evaluate the finest level flow of a network on some samples (either
    SamplePair or (name, SamplePair)) and return the EvaluationReport.  The
    parameters are not changed.
    """

    rows = []

    for name, sample in _named(samples):
        verbose("Evaluating {0}".format(name))

        pred = predict(config, params, sample.P, sample.Q)
        rows.append((name, metrics(pred, sample.flow)))

    return _report(rows)


def zero_flow_metrics(samples):
    """ Return the EvaluationReport of predicting no motion at all. """

    rows = []

    for name, sample in _named(samples):
        zero = np.zeros_like(sample.flow.vectors)
        rows.append((name, metrics(zero, sample.flow)))

    return _report(rows)
