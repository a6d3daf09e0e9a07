# SPDX-License-Identifier: BSD-2-Clause

# Copyright (c) 2026 The RigidFlow developers


from argparse import ArgumentParser
from dataclasses import replace
import os

from sipbuild import handle_exception

from ..config import load_config
from ..trainer import train
from ..verbose import set_verbose
from ..version import RIGIDFLOW_VERSION_STR


def main(argv=None):
    """ Train a scene flow network. """

    # Parse the command line.
    parser = ArgumentParser(
            description="Train a scene flow network on synthetic samples.")

    parser.add_argument('-V', '--version', action='version',
            version=RIGIDFLOW_VERSION_STR)

    parser.add_argument('--verbose', default=False, action='store_true',
            help="enable verbose progress messages")

    parser.add_argument('--config', metavar='FILE',
            help="the configuration FILE")

    parser.add_argument('--data', metavar='PATH', default=[],
            action='append',
            help="train with the sample file or directory PATH instead of "
                    "the configured data")

    parser.add_argument('--out', metavar='DIR', required=True,
            help="the DIR the checkpoints and the log are written to")

    parser.add_argument('--init-checkpoint', metavar='FILE',
            help="start from the parameters of the checkpoint FILE")

    parser.add_argument('--resume', metavar='FILE',
            help="continue the run saved in the checkpoint FILE")

    parser.add_argument('--seed', type=int, metavar='SEED',
            help="the SEED of initialisation and shuffling [default: the "
                    "configured seed]")

    args = parser.parse_args(argv)

    try:
        set_verbose(args.verbose)

        config = load_config(args.config).train

        changes = {'out_dir': args.out}

        if args.data:
            changes['data'] = tuple(os.path.abspath(p) for p in args.data)

        if args.init_checkpoint is not None:
            changes['init_checkpoint'] = args.init_checkpoint

        if args.resume is not None:
            changes['resume_checkpoint'] = args.resume

        if args.seed is not None:
            changes['seed'] = args.seed

        result = train(replace(config, **changes))

        for record in result.history:
            print(record.log_line())
    except Exception as e:
        handle_exception(e)

    return 0
