# SPDX-License-Identifier: BSD-2-Clause

# Copyright (c) 2026 The RigidFlow developers


from argparse import ArgumentParser
from dataclasses import replace

from sipbuild import handle_exception

from ..config import load_config
from ..trainer import VARIANTS, ablation_table, run_ablation
from ..verbose import is_verbose, set_verbose
from ..version import RIGIDFLOW_VERSION_STR


def main(argv=None):
    """ Compare the network with and without its components. """

    # Parse the command line.
    parser = ArgumentParser(
            description="Train and evaluate the network with and without "
                    "the deformation degree and weight-sharing aggregation.")

    parser.add_argument('-V', '--version', action='version',
            version=RIGIDFLOW_VERSION_STR)

    parser.add_argument('--verbose', default=False, action='store_true',
            help="enable verbose progress messages")

    parser.add_argument('--config', metavar='FILE', required=True,
            help="the configuration FILE of the training recipe")

    parser.add_argument('--out', metavar='DIR',
            help="write the checkpoints and log of each variant to a "
                    "sub-directory of DIR")

    parser.add_argument('--variant', metavar='NAME', default=[],
            action='append', choices=list(VARIANTS),
            help="compare the NAME variant [default: all variants]")

    args = parser.parse_args(argv)

    try:
        set_verbose(args.verbose)

        config = load_config(args.config).train
        if args.out is not None:
            config = replace(config, out_dir=args.out)

        rows = run_ablation(config, args.variant or None)

        if is_verbose():
            for row in rows:
                for record in row.history:
                    print('{0}\t{1}'.format(row.variant, record.log_line()))

        for line in ablation_table(rows):
            print(line)
    except Exception as e:
        handle_exception(e)

    return 0
