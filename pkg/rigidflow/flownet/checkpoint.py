# SPDX-License-Identifier: BSD-2-Clause

# Copyright (c) 2026 The RigidFlow developers


from dataclasses import dataclass
import json
import struct

import numpy as np
from packaging.version import InvalidVersion, Version

from ..exceptions import FormatError, RigidFlowException
from ..files import atomic_write
from ..version import RIGIDFLOW_VERSION_STR
from .config import ModelConfig
from .model import parameter_shapes
from .params import ModelParams, OptimizerState


# The magic bytes that start a checkpoint.
MAGIC = b'RFCK'

# The version of the layout written.
FORMAT_VERSION = 1

_HEADER = struct.Struct('<4sII')


@dataclass
class Checkpoint:
    """ The contents of a checkpoint file. """

    config: ModelConfig
    params: ModelParams
    epoch: int
    producer: str


def write_checkpoint(path, config, params, epoch):
    """ Write the parameters and optimizer state of a network after a number
    of epochs of training.
    """

    entries = []
    blobs = []
    offset = 0

    def add(kind, name, array):
        nonlocal offset

        data = np.ascontiguousarray(array, dtype='<f4').tobytes()
        entries.append({'kind': kind, 'name': name,
                'shape': list(array.shape), 'offset': offset})
        blobs.append(data)
        offset += len(data)

    state = params.state

    # The optimizer state follows all the parameters.
    for name, value in params.items():
        add('param', name, value)

    for kind, moments in (('m', state.m), ('v', state.v)):
        for name in params.names():
            if name in moments:
                add(kind, name, moments[name])

    manifest = json.dumps({
        'producer': RIGIDFLOW_VERSION_STR,
        'config': config.as_dict(),
        'epoch': int(epoch),
        'step': int(state.step),
        'entries': entries,
    }, sort_keys=True).encode('utf-8')

    with atomic_write(path) as f:
        f.write(_HEADER.pack(MAGIC, FORMAT_VERSION, len(manifest)))
        f.write(manifest)

        for data in blobs:
            f.write(data)


def read_checkpoint(path):
    """ Read a checkpoint file and return a Checkpoint. """

    try:
        with open(path, 'rb') as f:
            data = f.read()
    except OSError as e:
        raise RigidFlowException(
                "Unable to read checkpoint '{0}'".format(path),
                detail=e.strerror)

    if len(data) < _HEADER.size:
        raise FormatError("'{0}' is truncated in the header".format(path),
                offset=len(data))

    magic, version, manifest_len = _HEADER.unpack_from(data)

    if magic != MAGIC:
        raise FormatError(
                "'{0}' has the magic bytes {1!r} instead of {2!r}".format(
                        path, magic, MAGIC),
                offset=0)

    if version != FORMAT_VERSION:
        raise FormatError(
                "'{0}' has the unsupported format version {1}".format(path,
                        version),
                offset=4)

    blob_start = _HEADER.size + manifest_len

    if len(data) < blob_start:
        raise FormatError("'{0}' is truncated in the manifest".format(path),
                offset=len(data))

    try:
        manifest = json.loads(data[_HEADER.size:blob_start].decode('utf-8'))
        producer = manifest['producer']
        config = ModelConfig.from_dict(manifest['config'])
        epoch = int(manifest['epoch'])
        step = int(manifest['step'])
        entries = manifest['entries']
    except (ValueError, KeyError, TypeError, RigidFlowException) as e:
        raise FormatError("'{0}' has an invalid manifest".format(path),
                offset=_HEADER.size, detail=str(e))

    _check_producer(path, producer)

    values = {}
    state = OptimizerState(step=step)
    arrays = {'param': values, 'm': state.m, 'v': state.v}

    for entry in entries:
        try:
            target = arrays[entry['kind']]
            name = entry['name']
            shape = tuple(int(d) for d in entry['shape'])
            start = blob_start + int(entry['offset'])
        except (KeyError, TypeError, ValueError) as e:
            raise FormatError(
                    "'{0}' has an invalid manifest entry".format(path),
                    offset=_HEADER.size, detail=str(e))

        end = start + 4 * int(np.prod(shape, dtype=np.int64))

        if end > len(data):
            raise FormatError(
                    "'{0}' is truncated in '{1}'".format(path, name),
                    offset=len(data))

        array = np.frombuffer(data, dtype='<f4', count=(end - start) // 4,
                offset=start).astype(np.float32).reshape(shape)

        target[name] = array

    complete = state.m.keys() == state.v.keys() == values.keys()

    if (state.m or state.v) and not complete:
        raise FormatError("'{0}' has incomplete optimizer state".format(path),
                offset=_HEADER.size)

    expected = parameter_shapes(config)
    found = {name: value.shape for name, value in values.items()}

    if found != {name: tuple(shape) for name, shape in expected.items()}:
        raise FormatError(
                "'{0}' doesn't contain the parameters of its network".format(
                        path),
                offset=_HEADER.size)

    return Checkpoint(config=config, params=ModelParams(values, state),
            epoch=epoch, producer=producer)


def _check_producer(path, producer):
    """ Check that a checkpoint wasn't written by an incompatible release. """

    try:
        written_by = Version(producer)
        reading_with = Version(RIGIDFLOW_VERSION_STR)
    except InvalidVersion:
        raise FormatError(
                "'{0}' has the invalid producer version '{1}'".format(path,
                        producer),
                offset=_HEADER.size)

    if written_by.major > reading_with.major:
        raise FormatError(
                "'{0}' was written by RigidFlow v{1} which is newer than "
                "v{2}".format(path, producer, RIGIDFLOW_VERSION_STR),
                offset=_HEADER.size)
