# SPDX-License-Identifier: BSD-2-Clause

# Copyright (c) 2026 The RigidFlow developers


from dataclasses import asdict, dataclass, fields, replace
from typing import Tuple

from ..backbone import level_sizes
from ..cost_volume import OFFSET_MODES
from ..deform import DEFORMATION_MODES
from ..exceptions import ConfigurationError


@dataclass(frozen=True)
class ModelConfig:
    """ The architecture of a network.  The K values are upper bounds: each
    level uses min(K, number of reference points) computed from the nominal
    number of points.
    """

    # The name of the preset the configuration was derived from.
    preset: str = 'desk'

    # The nominal number of points of each input cloud.
    num_points: int = 512

    # The fraction of the input points kept at each level, finest first.
    ratios: Tuple[float, ...] = (1.0, 1 / 4, 1 / 16, 1 / 32, 1 / 128)

    # The feature channels of each backbone level.
    channels: Tuple[int, ...] = (32, 64, 96, 128, 160)

    # The cost channels of each level.
    cost_channels: Tuple[int, ...] = (32, 64, 64, 96, 96)

    # The widths of the estimator's dense block.
    estimator_widths: Tuple[int, ...] = (64, 48, 32)

    # The hidden width of the upsampling weight networks.
    weight_hidden: int = 32

    k_backbone: int = 16
    k_patch: int = 16
    k_dilated: int = 8
    dilation: int = 2
    k_upsample: int = 8
    k_deform: int = 8

    use_wsa: bool = True
    use_dd: bool = True
    dense_skips: bool = True
    dd_mode: str = 'channel'
    dd_recompute_neighbors: bool = False
    cost_offsets: str = 'vector'

    def __post_init__(self):
        """ Normalise and validate the configuration. """

        for name in ('ratios', 'channels', 'cost_channels',
                'estimator_widths'):
            object.__setattr__(self, name, tuple(getattr(self, name)))

        levels = len(self.ratios)

        if len(self.channels) != levels or len(self.cost_channels) != levels:
            raise ConfigurationError(
                    "there must be channels and cost channels for each of "
                    "the {0} levels".format(levels))

        if len(self.estimator_widths) < 1:
            raise ConfigurationError("the estimator needs at least one layer")

        positive = list(self.channels + self.cost_channels +
                self.estimator_widths)
        positive.extend([self.weight_hidden, self.k_backbone, self.k_patch,
                self.k_dilated, self.dilation, self.k_upsample,
                self.k_deform])

        if any(v < 1 for v in positive):
            raise ConfigurationError(
                    "channel counts and neighborhood sizes must be positive")

        if self.dd_mode not in DEFORMATION_MODES:
            raise ConfigurationError(
                    "dd-mode must be one of {0}".format(
                            ', '.join(DEFORMATION_MODES)))

        if self.cost_offsets not in OFFSET_MODES:
            raise ConfigurationError(
                    "cost-offsets must be one of {0}".format(
                            ', '.join(OFFSET_MODES)))

        # This validates the ratios.
        level_sizes(self.num_points, self.ratios)

    @property
    def levels(self):
        """ The number of pyramid levels. """

        return len(self.ratios)

    @property
    def estimator_channels(self):
        """ The number of channels of the estimator features. """

        return self.estimator_widths[-1]

    def level_sizes(self):
        """ Return the nominal number of points of each level. """

        return level_sizes(self.num_points, self.ratios)

    def backbone_k(self, level_id):
        """ Return the set_conv neighborhood size of a level. """

        sizes = self.level_sizes()

        return min(self.k_backbone, sizes[max(level_id - 1, 0)])

    def patch_k(self, level_id):
        """ Return the cost volume target neighborhood size of a level. """

        return min(self.k_patch, self.level_sizes()[level_id])

    def upsample_k(self, level_id):
        """ Return the number of coarse neighbors the points of a level are
        aggregated from.
        """

        return min(self.k_upsample, self.level_sizes()[level_id + 1])

    def deform_k(self, level_id):
        """ Return the deformation degree neighborhood size of a level. """

        return min(self.k_deform, self.level_sizes()[level_id])

    def deform_channels(self, level_id):
        """ Return the number of deformation degree channels of a level. """

        per_neighbor = 3 if self.dd_mode == 'channel' else 1

        return self.deform_k(level_id) * per_neighbor

    def min_level_sizes(self):
        """ Return the smallest number of points each level of an input
        pyramid may have.
        """

        levels = self.levels
        mins = [self.patch_k(l) for l in range(levels)]

        for l in range(levels):
            mins[max(l - 1, 0)] = max(mins[max(l - 1, 0)], self.backbone_k(l))

            if self.use_dd:
                mins[l] = max(mins[l], self.deform_k(l))

            if l < levels - 1:
                mins[l + 1] = max(mins[l + 1], self.upsample_k(l))

        return mins

    def as_dict(self):
        """ Return the configuration as a JSON compatible dict. """

        d = asdict(self)

        for name, value in d.items():
            if isinstance(value, tuple):
                d[name] = list(value)

        return d

    @classmethod
    def from_dict(cls, d):
        """ Return a configuration from a dict created by as_dict(). """

        names = {f.name for f in fields(cls)}
        unknown = sorted(set(d) - names)

        if unknown:
            raise ConfigurationError(
                    "unknown model options: {0}".format(', '.join(unknown)))

        return cls(**d)

    def variant(self, **changes):
        """ Return a copy of the configuration with some values changed. """

        return replace(self, **changes)


PRESETS = {
    'tiny': ModelConfig(preset='tiny', num_points=32, ratios=(1.0, 1 / 4),
            channels=(8, 16), cost_channels=(8, 8),
            estimator_widths=(8, 8, 8), weight_hidden=8, k_backbone=4,
            k_patch=4, k_dilated=4, dilation=2, k_upsample=4, k_deform=4),

    'small': ModelConfig(preset='small', num_points=64,
            ratios=(1.0, 1 / 4, 1 / 16), channels=(8, 16, 32),
            cost_channels=(8, 16, 16), estimator_widths=(16, 16, 16),
            weight_hidden=8, k_backbone=8, k_patch=8, k_dilated=4,
            dilation=2, k_upsample=4, k_deform=8),

    'desk': ModelConfig(),
}


def preset(name, **overrides):
    """ Return the ModelConfig of a named preset with optional overrides. """

    try:
        config = PRESETS[name]
    except KeyError:
        raise ConfigurationError(
                "'{0}' is not a model preset".format(name),
                detail="use one of {0}".format(', '.join(sorted(PRESETS))))

    return replace(config, preset=name, **overrides)
