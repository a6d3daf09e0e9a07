# SPDX-License-Identifier: BSD-2-Clause

# Copyright (c) 2026 The RigidFlow developers


from dataclasses import dataclass, field
import os
import sys

from sipbuild import Option

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .datagen import SceneConfig
from .exceptions import ConfigurationError, RigidFlowException
from .flownet import LossWeights, ModelConfig, preset
from .trainer import TrainConfig


class ConfigOption(Option):
    """ Encapsulate an option of a configuration file.  The name of the
    option in a file is the option's user name.
    """

    def __init__(self, name, *, element_type=None, path=False, **kwargs):
        """ Initialise the option.  'element_type' is the type of each
        element of a list option.  If 'path' is set then values are paths
        relative to the directory containing the configuration file.
        """

        super().__init__(name, **kwargs)

        self.element_type = element_type
        self.path = path

    def convert(self, value, section, base_dir):
        """ Return a TOML value converted to the option's type. """

        context = "'{0}' in [{1}]".format(self.user_name, section)

        if self.option_type is list:
            if not isinstance(value, list):
                raise ConfigurationError(
                        "{0} must be a list".format(context))

            value = tuple(self._convert_scalar(v, self.element_type, context)
                    for v in value)

            if self.path:
                value = tuple(os.path.join(base_dir, v) for v in value)
        else:
            value = self._convert_scalar(value, self.option_type, context)

            if self.path:
                value = os.path.join(base_dir, value)

        if self.choices is not None and value not in self.choices:
            raise ConfigurationError(
                    "{0} must be one of {1}".format(context,
                            ', '.join(repr(c) for c in self.choices)))

        return value

    @staticmethod
    def _convert_scalar(value, option_type, context):
        """ Return a scalar value converted to a type. """

        # A bool is an int as far as isinstance() is concerned.
        if option_type is bool:
            ok = isinstance(value, bool)
        elif option_type is int:
            ok = isinstance(value, int) and not isinstance(value, bool)
        elif option_type is float:
            ok = (isinstance(value, (int, float)) and
                    not isinstance(value, bool))
        else:
            ok = isinstance(value, option_type)

        if not ok:
            raise ConfigurationError(
                    "{0} must be of type {1}, not {2}".format(context,
                            option_type.__name__, type(value).__name__))

        return option_type(value)


SCENE_OPTIONS = (
    ConfigOption('num_points', option_type=int,
            default=SceneConfig.num_points,
            help="the number of points of each cloud"),
    ConfigOption('num_objects', option_type=int,
            default=SceneConfig.num_objects,
            help="the number of moving objects"),
    ConfigOption('object_extent', option_type=float,
            default=SceneConfig.object_extent,
            help="the largest dimension of an object in meters"),
    ConfigOption('scene_extent', option_type=float,
            default=SceneConfig.scene_extent,
            help="the side of the background plane in meters"),
    ConfigOption('max_rotation', option_type=float,
            default=SceneConfig.max_rotation,
            help="the largest rotation of an object in radians"),
    ConfigOption('max_translation', option_type=float,
            default=SceneConfig.max_translation,
            help="the largest translation component of an object in meters"),
    ConfigOption('background_fraction', option_type=float,
            default=SceneConfig.background_fraction,
            help="the fraction of the points on the background plane"),
    ConfigOption('background_motion', option_type=bool,
            default=SceneConfig.background_motion,
            help="move the background as a moving sensor would"),
    ConfigOption('jitter', option_type=float, default=SceneConfig.jitter,
            help="the standard deviation of the source point noise in "
                    "meters"),
    ConfigOption('resample_target', option_type=bool,
            default=SceneConfig.resample_target,
            help="sample the target surfaces independently of the source"),
    ConfigOption('seed', option_type=int, default=SceneConfig.seed,
            help="the seed of the first scene"),
)

# The defaults of the model options are those of the default preset.  An
# option that is not given takes the value of the chosen preset.
MODEL_OPTIONS = (
    ConfigOption('preset', choices=('tiny', 'small', 'desk'),
            default=ModelConfig.preset,
            help="the preset the other model options override"),
    ConfigOption('num_points', option_type=int,
            default=ModelConfig.num_points,
            help="the nominal number of input points"),
    ConfigOption('ratios', option_type=list, element_type=float,
            default=ModelConfig.ratios,
            help="the fraction of the points kept at each level"),
    ConfigOption('channels', option_type=list, element_type=int,
            default=ModelConfig.channels,
            help="the feature channels of each level"),
    ConfigOption('cost_channels', option_type=list, element_type=int,
            default=ModelConfig.cost_channels,
            help="the cost volume channels of each level"),
    ConfigOption('estimator_widths', option_type=list, element_type=int,
            default=ModelConfig.estimator_widths,
            help="the widths of the estimator layers"),
    ConfigOption('weight_hidden', option_type=int,
            default=ModelConfig.weight_hidden,
            help="the hidden width of the upsampling weight networks"),
    ConfigOption('k_backbone', option_type=int,
            default=ModelConfig.k_backbone,
            help="the set_conv neighborhood size"),
    ConfigOption('k_patch', option_type=int, default=ModelConfig.k_patch,
            help="the cost volume target neighborhood size"),
    ConfigOption('k_dilated', option_type=int,
            default=ModelConfig.k_dilated,
            help="the cost volume dilated neighborhood size"),
    ConfigOption('dilation', option_type=int, default=ModelConfig.dilation,
            help="the cost volume dilation stride"),
    ConfigOption('k_upsample', option_type=int,
            default=ModelConfig.k_upsample,
            help="the number of coarse points a point is upsampled from"),
    ConfigOption('k_deform', option_type=int, default=ModelConfig.k_deform,
            help="the deformation degree neighborhood size"),
    ConfigOption('use_wsa', option_type=bool, default=ModelConfig.use_wsa,
            help="share the upsampling weights between coordinates, "
                    "features and flow"),
    ConfigOption('use_dd', option_type=bool, default=ModelConfig.use_dd,
            help="use the deformation degree"),
    ConfigOption('dense_skips', option_type=bool,
            default=ModelConfig.dense_skips,
            help="feed every estimator layer all the previous outputs"),
    ConfigOption('dd_mode', choices=('channel', 'euclidean'),
            default=ModelConfig.dd_mode,
            help="how neighbor coordinate differences are measured"),
    ConfigOption('dd_recompute_neighbors', option_type=bool,
            default=ModelConfig.dd_recompute_neighbors,
            help="search the neighbors of the warped points again"),
    ConfigOption('cost_offsets', choices=('vector', 'distance'),
            default=ModelConfig.cost_offsets,
            help="how offsets are presented to the cost volume"),
)

TRAIN_OPTIONS = (
    ConfigOption('data', option_type=list, element_type=str, path=True,
            default=TrainConfig.data,
            help="the sample files or directories to train with"),
    ConfigOption('validation_data', option_type=list, element_type=str,
            path=True, default=TrainConfig.validation_data,
            help="the sample files or directories to evaluate with"),
    ConfigOption('epochs', option_type=int, default=TrainConfig.epochs,
            help="the number of epochs"),
    ConfigOption('batch_size', option_type=int,
            default=TrainConfig.batch_size,
            help="the number of samples in a batch"),
    ConfigOption('learning_rate', option_type=float,
            default=TrainConfig.learning_rate,
            help="the learning rate of the first epoch"),
    ConfigOption('decay', option_type=float, default=TrainConfig.decay,
            help="the learning rate decay factor"),
    ConfigOption('decay_period', option_type=int,
            default=TrainConfig.decay_period,
            help="the number of epochs between learning rate decays"),
    ConfigOption('beta1', option_type=float, default=TrainConfig.beta1,
            help="the Adam first moment decay"),
    ConfigOption('beta2', option_type=float, default=TrainConfig.beta2,
            help="the Adam second moment decay"),
    ConfigOption('eps', option_type=float, default=TrainConfig.eps,
            help="the Adam denominator offset"),
    ConfigOption('weight_decay', option_type=float,
            default=TrainConfig.weight_decay,
            help="the decoupled weight decay of the weight matrices"),
    ConfigOption('seed', option_type=int, default=TrainConfig.seed,
            help="the seed of initialisation and shuffling"),
    ConfigOption('checkpoint_interval', option_type=int,
            default=TrainConfig.checkpoint_interval,
            help="the number of epochs between checkpoints"),
    ConfigOption('init_checkpoint', path=True,
            default=TrainConfig.init_checkpoint,
            help="a checkpoint to take the initial parameters from"),
    ConfigOption('resume_checkpoint', path=True,
            default=TrainConfig.resume_checkpoint,
            help="a checkpoint of the run to continue from"),
)

LOSS_OPTIONS = (
    ConfigOption('gamma', option_type=list, element_type=float,
            default=LossWeights.gamma,
            help="the weight of each level, finest first"),
    ConfigOption('alpha_s', option_type=float, default=LossWeights.alpha_s,
            help="the weight of the scene flow loss"),
    ConfigOption('alpha_p', option_type=float, default=LossWeights.alpha_p,
            help="the weight of the coordinate loss"),
    ConfigOption('alpha_dd', option_type=float,
            default=LossWeights.alpha_dd,
            help="the weight of the deformation loss"),
)

SECTIONS = {
    'scene': SCENE_OPTIONS,
    'model': MODEL_OPTIONS,
    'train': TRAIN_OPTIONS,
    'loss': LOSS_OPTIONS,
}


@dataclass(frozen=True)
class RigidFlowConfig:
    """ The contents of a configuration file.  The training configuration
    includes the model and loss configurations.
    """

    scene: SceneConfig = field(default_factory=SceneConfig)
    train: TrainConfig = field(default_factory=TrainConfig)

    @property
    def model(self):
        """ The network configuration. """

        return self.train.model

    @property
    def loss(self):
        """ The loss weights. """

        return self.train.loss


def parse_config(document, base_dir='.'):
    """ Return a RigidFlowConfig from a dict parsed from a configuration file.
    Relative paths are interpreted relative to 'base_dir'.
    """

    unknown = sorted(set(document) - set(SECTIONS))
    if unknown:
        raise ConfigurationError(
                "unknown configuration sections: {0}".format(
                        ', '.join('[{0}]'.format(s) for s in unknown)))

    values = {}

    for section, options in SECTIONS.items():
        table = document.get(section, {})

        if not isinstance(table, dict):
            raise ConfigurationError(
                    "[{0}] must be a section".format(section))

        by_user_name = {option.user_name: option for option in options}

        section_values = {}

        for user_name, value in table.items():
            try:
                option = by_user_name[user_name]
            except KeyError:
                raise ConfigurationError(
                        "'{0}' is not an option of [{1}]".format(user_name,
                                section))

            section_values[option.name] = option.convert(value, section,
                    base_dir)

        values[section] = section_values

    def with_defaults(section):
        section_values = {option.name: option.default
                for option in SECTIONS[section]}
        section_values.update(values[section])

        return section_values

    try:
        # The model options that aren't given are those of the preset.
        model_values = dict(values['model'])
        preset_name = model_values.pop('preset', MODEL_OPTIONS[0].default)
        model = preset(preset_name, **model_values)

        return RigidFlowConfig(scene=SceneConfig(**with_defaults('scene')),
                train=TrainConfig(model=model,
                        loss=LossWeights(**with_defaults('loss')),
                        **with_defaults('train')))
    except ConfigurationError:
        raise
    except RigidFlowException as e:
        raise ConfigurationError("the configuration is invalid",
                detail=str(e))


def load_config(path):
    """ Load a TOML configuration file and return a RigidFlowConfig.  The
    defaults are used if 'path' is None.
    """

    if path is None:
        return RigidFlowConfig()

    try:
        with open(path, 'rb') as f:
            document = tomllib.load(f)
    except OSError as e:
        raise ConfigurationError(
                "unable to read the configuration file '{0}'".format(path),
                detail=e.strerror)
    except tomllib.TOMLDecodeError as e:
        raise ConfigurationError(
                "'{0}' is not a valid configuration file".format(path),
                detail=str(e))

    return parse_config(document, os.path.dirname(os.path.abspath(path)))
