# SPDX-License-Identifier: BSD-2-Clause

# Copyright (c) 2026 The RigidFlow developers


from dataclasses import replace

import numpy as np
import pytest

from rigidflow.datagen import SceneConfig, generate_scene, write_sample
from rigidflow.flownet import PRESETS
from rigidflow.geometry import PointCloud
from rigidflow.tensor import get_dtype, set_dtype
from rigidflow.verbose import set_verbose


# The scenes the tiny network is trained and evaluated with.
TINY_SCENE = SceneConfig(num_points=32, num_objects=2, object_extent=1.0,
        scene_extent=3.0, max_rotation=0.2, max_translation=0.2)


@pytest.fixture(autouse=True)
def restore_globals():
    """ Restore the module level settings a test may change. """

    dtype = get_dtype()

    yield

    set_dtype(dtype)
    set_verbose(False)


@pytest.fixture
def rng():
    """ A seeded random generator. """

    return np.random.default_rng(1234)


@pytest.fixture
def tiny():
    """ The smallest network configuration. """

    return PRESETS['tiny']


@pytest.fixture
def cloud(rng):
    """ A random cloud of 32 points. """

    return PointCloud(rng.uniform(-1.0, 1.0, size=(32, 3)))


def make_samples(count, seed=0, scene=TINY_SCENE):
    """ Return a number of generated scenes. """

    return [generate_scene(replace(scene, seed=seed + i))
            for i in range(count)]


@pytest.fixture
def samples():
    """ Four small generated scenes. """

    return make_samples(4)


@pytest.fixture
def sample_dir(tmp_path, samples):
    """ A directory of sample files. """

    data = tmp_path / 'data'
    data.mkdir()

    for i, sample in enumerate(samples):
        write_sample(sample, str(data / 'sample_{0:06d}.wsaf'.format(i)))

    return data


@pytest.fixture
def scene_factory():
    """ A function that returns a number of generated scenes. """

    return make_samples
