# SPDX-License-Identifier: BSD-2-Clause

# Copyright (c) 2026 The RigidFlow developers


from dataclasses import dataclass, replace
import os
from typing import List

from ..datagen import read_dataset
from ..exceptions import ArgumentError
from ..flownet import METRIC_NAMES
from ..verbose import timed
from .evaluate import EvaluationReport, evaluate
from .train import EpochRecord, train


# The network variants compared by an ablation, as (use_dd, use_wsa), in
# reporting order.  'MN' is the main network with independent upsampling and
# no deformation degree.
VARIANTS = {
    'MN': (False, False),
    'MN+DD': (True, False),
    'MN+WSA': (False, True),
    'MN+DD+WSA': (True, True),
}


@dataclass
class AblationRow:
    """ The result of training and evaluating one variant. """

    variant: str
    report: EvaluationReport
    history: List[EpochRecord]


def run_ablation(config, variants=None, *, train_samples=None,
        eval_samples=None):
    """ Train each variant of the configured network with the same recipe
    and seed, evaluate it and return the list of AblationRow.
    """

    if variants is None:
        variants = list(VARIANTS)

    if len(variants) < 2:
        raise ArgumentError("an ablation needs at least two variants")

    unknown = [v for v in variants if v not in VARIANTS]
    if unknown:
        raise ArgumentError(
                "unknown variants: {0}".format(', '.join(unknown)),
                detail="use one of {0}".format(', '.join(VARIANTS)))

    if train_samples is None:
        train_samples = [s for _, s in read_dataset(config.data)]

    if eval_samples is None:
        if config.validation_data:
            eval_samples = read_dataset(config.validation_data)
        else:
            eval_samples = train_samples

    rows = []

    for variant in variants:
        use_dd, use_wsa = VARIANTS[variant]

        out_dir = config.out_dir
        if out_dir is not None:
            out_dir = os.path.join(out_dir, variant.replace('+', '_'))

        variant_config = replace(config, out_dir=out_dir,
                model=config.model.variant(use_dd=use_dd, use_wsa=use_wsa))

        with timed("Training {0}".format(variant)):
            result = train(variant_config, train_samples)

        rows.append(
                AblationRow(variant=variant,
                        report=evaluate(variant_config.model, result.params,
                                eval_samples),
                        history=result.history))

    return rows


def ablation_table(rows):
    """ Return the lines of the comparison table of an ablation. """

    lines = ['{0:<10} {1}'.format('variant', ' '.join(METRIC_NAMES))]

    for row in rows:
        mean = row.report.mean
        values = 'n/a' if mean is None else mean.format_row()
        lines.append('{0:<10} {1}'.format(row.variant, values))

    return lines
