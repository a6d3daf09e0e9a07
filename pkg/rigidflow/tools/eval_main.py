# SPDX-License-Identifier: BSD-2-Clause

# Copyright (c) 2026 The RigidFlow developers


from argparse import ArgumentParser

from sipbuild import handle_exception

from ..datagen import read_dataset
from ..flownet import read_checkpoint
from ..trainer import evaluate
from ..verbose import set_verbose
from ..version import RIGIDFLOW_VERSION_STR


def main(argv=None):
    """ Evaluate a trained network. """

    # Parse the command line.
    parser = ArgumentParser(
            description="Print the EPE3D, Acc3DS, Acc3DR and Outliers3D "
                    "metrics of a trained network on some samples.")

    parser.add_argument('-V', '--version', action='version',
            version=RIGIDFLOW_VERSION_STR)

    parser.add_argument('--verbose', default=False, action='store_true',
            help="enable verbose progress messages")

    parser.add_argument('--ckpt', metavar='FILE', required=True,
            help="the checkpoint FILE of the network")

    parser.add_argument('--data', metavar='PATH', default=[],
            action='append', required=True,
            help="evaluate the sample file or directory PATH")

    parser.add_argument('--per-sample', default=False, action='store_true',
            help="also print the metrics of each sample")

    args = parser.parse_args(argv)

    try:
        set_verbose(args.verbose)

        checkpoint = read_checkpoint(args.ckpt)
        report = evaluate(checkpoint.config, checkpoint.params,
                read_dataset(args.data))

        for line in report.table(per_sample=args.per_sample):
            print(line)
    except Exception as e:
        handle_exception(e)

    return 0
