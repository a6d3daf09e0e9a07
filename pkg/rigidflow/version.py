# SPDX-License-Identifier: BSD-2-Clause

# Copyright (c) 2026 The RigidFlow developers


from packaging.version import Version

try:
    from ._version import version
except ImportError:
    # A source tree that hasn't been built.
    version = '0.0.0.dev0'


# Convert the setuptools_scm generated version number to our names and
# formats.  Development versions may have fewer than three numeric parts.

_release = Version(version)

RIGIDFLOW_VERSION_STR = version
RIGIDFLOW_VERSION = ((_release.major << 16) + (_release.minor << 8) +
        _release.micro)
