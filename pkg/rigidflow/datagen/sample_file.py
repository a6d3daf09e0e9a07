# SPDX-License-Identifier: BSD-2-Clause

# Copyright (c) 2026 The RigidFlow developers


import glob
import os
import struct

import numpy as np

from ..exceptions import FormatError, RigidFlowException
from ..files import atomic_write
from ..geometry import FlowField, PointCloud
from .scene import SamplePair


# The magic bytes that start a sample file.
MAGIC = b'WSAF'

# The version of the layout written.
FORMAT_VERSION = 1

_HEADER = struct.Struct('<4sIII')


def write_sample(sample, path):
    """ Write a SamplePair to a file.  Coordinates and flow are stored as 32
    bit floats.
    """

    with atomic_write(path) as f:
        f.write(_HEADER.pack(MAGIC, FORMAT_VERSION, len(sample.P),
                len(sample.Q)))

        for array in (sample.P.points, sample.Q.points, sample.flow.vectors):
            f.write(np.ascontiguousarray(array, dtype='<f4').tobytes())

        f.write(np.ascontiguousarray(sample.labels, dtype='<u2').tobytes())


def read_sample(path):
    """ Read a SamplePair from a file written by write_sample(). """

    try:
        with open(path, 'rb') as f:
            data = f.read()
    except OSError as e:
        raise RigidFlowException("Unable to read sample '{0}'".format(path),
                detail=e.strerror)

    return parse_sample(data, name=path)


def parse_sample(data, name='sample'):
    """ Return the SamplePair encoded in some bytes. """

    if len(data) < 4:
        raise FormatError("'{0}' is too short to be a sample".format(name),
                offset=0)

    magic = data[:4]
    if magic != MAGIC:
        raise FormatError(
                "'{0}' has the magic bytes {1!r} instead of {2!r}".format(
                        name, magic, MAGIC),
                offset=0)

    if len(data) < _HEADER.size:
        raise FormatError("'{0}' is truncated in the header".format(name),
                offset=len(data))

    _, version, n1, n2 = _HEADER.unpack_from(data)

    if version != FORMAT_VERSION:
        raise FormatError(
                "'{0}' has the unsupported format version {1}".format(name,
                        version),
                offset=4)

    if n1 < 1 or n2 < 1:
        raise FormatError("'{0}' has an empty point cloud".format(name),
                offset=8 if n1 < 1 else 12)

    offset = _HEADER.size
    arrays = []

    for section, count, dtype in (('P', 3 * n1, '<f4'), ('Q', 3 * n2, '<f4'),
            ('flow', 3 * n1, '<f4'), ('labels', n1, '<u2')):
        end = offset + count * np.dtype(dtype).itemsize

        if end > len(data):
            raise FormatError(
                    "'{0}' is truncated in section '{1}'".format(name,
                            section),
                    offset=offset)

        arrays.append(np.frombuffer(data, dtype=dtype, count=count,
                offset=offset))
        offset = end

    if offset != len(data):
        raise FormatError(
                "'{0}' has {1} unexpected trailing bytes".format(name,
                        len(data) - offset),
                offset=offset)

    P, Q, flow, labels = arrays

    try:
        return SamplePair(P=PointCloud(P.astype(np.float32).reshape(n1, 3)),
                Q=PointCloud(Q.astype(np.float32).reshape(n2, 3)),
                flow=FlowField(flow.astype(np.float32).reshape(n1, 3)),
                labels=labels.astype(np.uint16))
    except RigidFlowException as e:
        raise FormatError("'{0}' contains invalid values".format(name),
                offset=_HEADER.size, detail=str(e))


def read_dataset(paths):
    """ Return the (path, SamplePair) of each sample of a dataset.  A path may
    be a sample file or a directory whose sample files are read in name
    order.
    """

    files = []

    for path in paths:
        if os.path.isdir(path):
            files.extend(sorted(glob.glob(os.path.join(path, '*.wsaf'))))
        else:
            files.append(path)

    return [(path, read_sample(path)) for path in files]
