# SPDX-License-Identifier: BSD-2-Clause

# Copyright (c) 2026 The RigidFlow developers


from contextlib import contextmanager
import sys
import time


# Set if verbose progress messages are enabled.
_verbose = False


def is_verbose():
    """ Return True if verbose progress messages are enabled. """

    return _verbose


def set_verbose(verbose):
    """ Enable or disable verbose progress messages. """

    global _verbose
    _verbose = verbose


def verbose(message):
    """ Display a verbose progress message on stderr. """

    if _verbose:
        if message[-1] != '.':
            message += '...'

        print(message, file=sys.stderr, flush=True)


@contextmanager
def timed(message):
    """ A context manager that announces a long running step and, when it
    completes, how long it took.
    """

    verbose(message)
    start = time.perf_counter()

    yield

    verbose("{0} took {1:.2f}s.".format(message,
            time.perf_counter() - start))
