# SPDX-License-Identifier: BSD-2-Clause

# Copyright (c) 2026 The RigidFlow developers


from argparse import ArgumentParser

import numpy as np
from sipbuild import handle_exception

from ..datagen import (SamplePair, export_flow_ply, read_ply, read_sample,
        write_sample)
from ..exceptions import ArgumentError
from ..flownet import METRIC_NAMES, metrics, predict, read_checkpoint
from ..geometry import PointCloud
from ..verbose import set_verbose, verbose
from ..version import RIGIDFLOW_VERSION_STR


def _read_cloud(path):
    """ Return the sample of a sample file or None and the cloud of a PLY
    file or None.
    """

    if path.endswith('.wsaf'):
        return read_sample(path), None

    if path.endswith('.ply'):
        points, _ = read_ply(path)
        return None, PointCloud(points)

    raise ArgumentError(
            "'{0}' is neither a sample (.wsaf) nor a PLY (.ply) file".format(
                    path))


def infer(config, params, src, tgt=None):
    """ Return the source cloud, the target cloud, the labels and the ground
    truth flow (None if it isn't known) for the given files and the flow
    predicted for them.  The source cloud is taken from 'src'.  The target is
    taken from 'tgt' (the source cloud of a sample file) or, if it is
    omitted, from the sample file 'src' in which case its ground truth is
    known.
    """

    src_sample, src_cloud = _read_cloud(src)

    if src_sample is not None:
        P = src_sample.P
        labels = src_sample.labels
    else:
        P = src_cloud
        labels = np.zeros(len(P), dtype=np.uint16)

    gt = None

    if tgt is None:
        if src_sample is None:
            raise ArgumentError(
                    "a target is required when the source is a PLY file")

        Q = src_sample.Q
        gt = src_sample.flow
    else:
        tgt_sample, tgt_cloud = _read_cloud(tgt)
        Q = tgt_cloud if tgt_sample is None else tgt_sample.P

    verbose("Predicting the flow of {0} points".format(len(P)))

    return P, Q, labels, gt, predict(config, params, P, Q)


def main(argv=None):
    """ Predict the scene flow between two clouds. """

    # Parse the command line.
    parser = ArgumentParser(
            description="Predict the scene flow between a source and a "
                    "target point cloud.")

    parser.add_argument('-V', '--version', action='version',
            version=RIGIDFLOW_VERSION_STR)

    parser.add_argument('--verbose', default=False, action='store_true',
            help="enable verbose progress messages")

    parser.add_argument('--ckpt', metavar='FILE', required=True,
            help="the checkpoint FILE of the network")

    parser.add_argument('--src', metavar='FILE', required=True,
            help="the source sample (.wsaf) or point cloud (.ply) FILE")

    parser.add_argument('--tgt', metavar='FILE',
            help="the target sample (.wsaf) or point cloud (.ply) FILE "
                    "[default: the target of the source sample]")

    parser.add_argument('--out-flow', metavar='FILE', required=True,
            help="write the clouds and the predicted flow to the sample "
                    "FILE")

    parser.add_argument('--out-ply', metavar='FILE',
            help="write the source and the warped points to the colored PLY "
                    "FILE")

    args = parser.parse_args(argv)

    try:
        set_verbose(args.verbose)

        checkpoint = read_checkpoint(args.ckpt)

        P, Q, labels, gt, pred = infer(checkpoint.config, checkpoint.params,
                args.src, args.tgt)

        write_sample(SamplePair(P=P, Q=Q, flow=pred, labels=labels),
                args.out_flow)

        if args.out_ply is not None:
            export_flow_ply(P, pred, args.out_ply, gt=gt)

        if gt is not None:
            print(' '.join(METRIC_NAMES))
            print(metrics(pred, gt).format_row())
    except Exception as e:
        handle_exception(e)

    return 0
