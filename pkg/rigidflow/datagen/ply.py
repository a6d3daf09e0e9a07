# SPDX-License-Identifier: BSD-2-Clause

# Copyright (c) 2026 The RigidFlow developers


import numpy as np

from ..exceptions import ArgumentError, FormatError, RigidFlowException
from ..files import atomic_write
from ..flownet.metrics import strict_accurate
from ..geometry import PointCloud


SOURCE_COLOR = (0, 0, 255)
CORRECT_COLOR = (0, 255, 0)
WRONG_COLOR = (255, 0, 0)
UNKNOWN_COLOR = (255, 255, 255)

_PROPERTIES = ('x', 'y', 'z', 'red', 'green', 'blue')


def export_ply(cloud, colors, path):
    """ Write a PointCloud with per point RGB colors as an ASCII PLY file. """

    points = np.asarray(getattr(cloud, 'points', cloud), dtype=np.float64)
    colors = np.asarray(colors)

    if colors.shape != (len(points), 3):
        raise ArgumentError(
                "{0} colors were given for {1} points".format(
                        colors.shape[0] if colors.ndim else 0, len(points)))

    if colors.min(initial=0) < 0 or colors.max(initial=0) > 255:
        raise ArgumentError("colors must be in the range 0 to 255")

    with atomic_write(path, 'w') as f:
        f.write('ply\n')
        f.write('format ascii 1.0\n')
        f.write('element vertex {0}\n'.format(len(points)))

        for name in _PROPERTIES[:3]:
            f.write('property float {0}\n'.format(name))

        for name in _PROPERTIES[3:]:
            f.write('property uchar {0}\n'.format(name))

        f.write('end_header\n')

        for (x, y, z), (r, g, b) in zip(points, colors.astype(np.uint8)):
            f.write('{0:.9g} {1:.9g} {2:.9g} {3} {4} {5}\n'.format(x, y, z, r,
                    g, b))


def read_ply(path):
    """ Read an ASCII PLY file written by export_ply() and return the points
    and their colors.
    """

    try:
        with open(path, 'rb') as f:
            data = f.read()
    except OSError as e:
        raise RigidFlowException("Unable to read '{0}'".format(path),
                detail=e.strerror)

    lines = data.split(b'\n')
    offset = 0
    count = None
    properties = []

    for nr, line in enumerate(lines):
        words = line.decode('ascii', errors='replace').split()
        line_offset = offset
        offset += len(line) + 1

        if nr == 0:
            if words != ['ply']:
                raise FormatError("'{0}' is not a PLY file".format(path),
                        offset=0)
        elif words[:1] == ['format']:
            if words[1:2] != ['ascii']:
                raise FormatError(
                        "'{0}' is not an ASCII PLY file".format(path),
                        offset=line_offset)
        elif words[:2] == ['element', 'vertex']:
            try:
                count = int(words[2]) if len(words) == 3 else -1
            except ValueError:
                count = -1

            if count < 0:
                raise FormatError(
                        "'{0}' has an invalid vertex count".format(path),
                        offset=line_offset)
        elif words[:1] == ['property']:
            properties.append(words[-1])
        elif words == ['end_header']:
            break
        elif words[:1] != ['comment']:
            raise FormatError(
                    "'{0}' has an unexpected header line".format(path),
                    offset=line_offset)
    else:
        raise FormatError("'{0}' has no end of header".format(path),
                offset=len(data))

    if count is None or tuple(properties) != _PROPERTIES:
        raise FormatError(
                "'{0}' doesn't contain colored vertices".format(path),
                offset=0)

    body = lines[nr + 1:nr + 1 + count]
    if len(body) < count or (count > 0 and body[-1].strip() == b''):
        raise FormatError("'{0}' is truncated".format(path), offset=len(data))

    try:
        values = np.array([line.split() for line in body],
                dtype=np.float64).reshape(count, len(_PROPERTIES))
    except ValueError:
        raise FormatError("'{0}' has an invalid vertex".format(path),
                offset=offset)

    return values[:, :3], values[:, 3:].astype(np.uint8)


def correctness_colors(pred, gt):
    """ Return the colors of warped points: green where the prediction passes
    the strict accuracy test and red elsewhere.
    """

    mask = strict_accurate(pred, gt)

    return np.where(mask[:, None], CORRECT_COLOR, WRONG_COLOR).astype(np.uint8)


def export_flow_ply(source, pred, path, gt=None):
    """ Export the source points in blue together with the source points
    warped by a predicted flow.  The warped points are colored by correctness
    if the ground truth is known and white otherwise.
    """

    points = np.asarray(getattr(source, 'points', source), dtype=np.float64)
    pred = np.asarray(getattr(pred, 'vectors', pred), dtype=np.float64)

    if gt is None:
        warped_colors = np.tile(UNKNOWN_COLOR, (len(points), 1))
    else:
        warped_colors = correctness_colors(pred, gt)

    source_colors = np.tile(SOURCE_COLOR, (len(points), 1))

    export_ply(PointCloud(np.concatenate((points, points + pred))),
            np.concatenate((source_colors, warped_colors)), path)
