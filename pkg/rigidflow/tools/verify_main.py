# SPDX-License-Identifier: BSD-2-Clause

# Copyright (c) 2026 The RigidFlow developers


from argparse import ArgumentParser

from sipbuild import handle_exception

from ..verbose import set_verbose, timed
from ..version import RIGIDFLOW_VERSION_STR
from ..wsa import run_rigidity_trials


# The largest residual of an exact identity.
TOLERANCE = 1e-10


def main(argv=None):
    """ Verify the rigidity identity of weight-sharing aggregation. """

    # Parse the command line.
    parser = ArgumentParser(
            description="Check numerically that aggregating the flow of a "
                    "rigid motion with weights that reproduce the center "
                    "point yields the flow of the center point.")

    parser.add_argument('-V', '--version', action='version',
            version=RIGIDFLOW_VERSION_STR)

    parser.add_argument('--verbose', default=False, action='store_true',
            help="enable verbose progress messages")

    parser.add_argument('--trials', type=int, default=10000, metavar='N',
            help="the number N of random trials [default: 10000]")

    parser.add_argument('--seed', type=int, default=0, metavar='SEED',
            help="the SEED of the trials [default: 0]")

    parser.add_argument('--violate-barycentric', type=float, metavar='E',
            help="displace the point reproduced by the weights by a random "
                    "vector of length E")

    args = parser.parse_args(argv)

    if args.trials < 1:
        parser.error("--trials must be at least 1")

    try:
        set_verbose(args.verbose)

        violation = args.violate_barycentric or 0.0

        with timed("Running {0} trials".format(args.trials)):
            trials = run_rigidity_trials(args.trials, args.seed,
                    violation=violation)

        max_residual = max(t.residual for t in trials)
        print("max residual: {0:.3e}".format(max_residual))

        if violation:
            deviation = max(abs(t.residual - t.expected) for t in trials)
            print("max deviation from |(R - I)e|: {0:.3e}".format(deviation))

        passed = max_residual < TOLERANCE
        print("PASS" if passed else "FAIL")
    except Exception as e:
        handle_exception(e)

    return 0 if passed else 1
