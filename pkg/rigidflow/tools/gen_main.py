# SPDX-License-Identifier: BSD-2-Clause

# Copyright (c) 2026 The RigidFlow developers


from argparse import ArgumentParser
from dataclasses import replace
import os

from sipbuild import handle_exception

from ..config import load_config
from ..datagen import generate_scene, write_sample
from ..files import atomic_write, ensure_directory
from ..verbose import set_verbose, verbose
from ..version import RIGIDFLOW_VERSION_STR


# The name of the file listing the generated samples.
MANIFEST_NAME = 'manifest.tsv'


def generate(scene, out_dir, count, seed):
    """ Generate a number of scenes as sample files, each with its own seed,
    and a manifest of the file names and seeds.  Return the paths of the
    sample files.
    """

    out_dir = ensure_directory(out_dir)
    paths = []
    rows = []

    for i in range(count):
        scene_seed = seed + i
        name = 'sample_{0:06d}.wsaf'.format(i)
        path = os.path.join(out_dir, name)

        verbose("Generating {0}".format(name))

        write_sample(generate_scene(replace(scene, seed=scene_seed)), path)

        paths.append(path)
        rows.append('{0}\t{1}\n'.format(name, scene_seed))

    with atomic_write(os.path.join(out_dir, MANIFEST_NAME), 'w') as f:
        f.writelines(rows)

    return paths


def main(argv=None):
    """ Generate synthetic scene flow samples. """

    # Parse the command line.
    parser = ArgumentParser(
            description="Generate synthetic scenes of rigidly moving objects "
                    "with exact ground truth scene flow.")

    parser.add_argument('-V', '--version', action='version',
            version=RIGIDFLOW_VERSION_STR)

    parser.add_argument('--verbose', default=False, action='store_true',
            help="enable verbose progress messages")

    parser.add_argument('--config', metavar='FILE',
            help="the configuration FILE whose [scene] section is used")

    parser.add_argument('--out-dir', metavar='DIR', required=True,
            help="the DIR the samples are written to")

    parser.add_argument('--count', type=int, default=1, metavar='N',
            help="the number N of samples to generate [default: 1]")

    parser.add_argument('--seed', type=int, metavar='SEED',
            help="the SEED of the first sample, incremented for each "
                    "sample [default: the configured seed]")

    args = parser.parse_args(argv)

    if args.count < 0:
        parser.error("--count must not be negative")

    try:
        set_verbose(args.verbose)

        scene = load_config(args.config).scene
        seed = scene.seed if args.seed is None else args.seed

        generate(scene, args.out_dir, args.count, seed)
    except Exception as e:
        handle_exception(e)

    return 0
