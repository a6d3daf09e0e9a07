# SPDX-License-Identifier: BSD-2-Clause

# Copyright (c) 2026 The RigidFlow developers


from contextlib import contextmanager
import os
import tempfile

from .exceptions import RigidFlowException


@contextmanager
def atomic_write(path, mode='wb'):
    """ A context manager that yields a file object for writing.  The data is
    written to a temporary file in the same directory which replaces 'path'
    only if the block completes, so a partial file is never left behind.
    """

    path = os.path.abspath(path)
    dir_name = os.path.dirname(path)

    try:
        fd, tmp_path = tempfile.mkstemp(dir=dir_name,
                prefix='.' + os.path.basename(path) + '.', suffix='.tmp')
    except OSError as e:
        raise RigidFlowException(
                "Unable to write to '{0}'".format(dir_name),
                detail=e.strerror)

    try:
        with os.fdopen(fd, mode) as f:
            yield f

        os.replace(tmp_path, path)
    except BaseException:
        try:
            os.remove(tmp_path)
        except OSError:
            pass

        raise


def ensure_directory(dir_name):
    """ Make sure a directory exists and return its absolute path. """

    dir_name = os.path.abspath(dir_name)

    try:
        os.makedirs(dir_name, exist_ok=True)
    except OSError as e:
        raise RigidFlowException(
                "Unable to create directory '{0}'".format(dir_name),
                detail=e.strerror)

    return dir_name
