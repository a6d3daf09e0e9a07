# SPDX-License-Identifier: BSD-2-Clause

# Copyright (c) 2026 The RigidFlow developers


from argparse import ArgumentParser

from sipbuild import handle_exception

from ..flownet import PRESETS, check_end_to_end
from ..tensor import check_ops
from ..verbose import set_verbose, timed
from ..version import RIGIDFLOW_VERSION_STR


# The largest acceptable relative errors.
OP_TOLERANCE = 1e-4
END_TO_END_TOLERANCE = 1e-3


def main(argv=None):
    """ Check the gradients of every differentiable operation. """

    # Parse the command line.
    parser = ArgumentParser(
            description="Compare analytic gradients with finite differences "
                    "for each differentiable operation and for a complete "
                    "network.")

    parser.add_argument('-V', '--version', action='version',
            version=RIGIDFLOW_VERSION_STR)

    parser.add_argument('--verbose', default=False, action='store_true',
            help="enable verbose progress messages")

    parser.add_argument('--preset', choices=sorted(PRESETS), default='tiny',
            help="the network checked end to end [default: tiny]")

    parser.add_argument('--seeds', type=int, default=20, metavar='N',
            help="check each operation with N random inputs [default: 20]")

    args = parser.parse_args(argv)

    try:
        set_verbose(args.verbose)

        with timed("Checking the operations"):
            report = check_ops(seeds=range(args.seeds))

        passed = True

        for name, error in report.items():
            ok = error < OP_TOLERANCE
            passed = passed and ok
            print("{0:<14} {1:.3e} {2}".format(name, error,
                    'ok' if ok else 'FAIL'))

        with timed("Checking the {0} network".format(args.preset)):
            error = check_end_to_end(PRESETS[args.preset])

        ok = error < END_TO_END_TOLERANCE
        passed = passed and ok
        print("{0:<14} {1:.3e} {2}".format('end-to-end', error,
                'ok' if ok else 'FAIL'))
    except Exception as e:
        handle_exception(e)

    return 0 if passed else 1
