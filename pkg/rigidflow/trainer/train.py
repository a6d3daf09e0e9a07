# SPDX-License-Identifier: BSD-2-Clause

# Copyright (c) 2026 The RigidFlow developers


from dataclasses import dataclass, field, replace
import os
from typing import List, Optional, Tuple

import numpy as np

from ..datagen import read_dataset
from ..exceptions import (ConfigurationError, NumericError, RigidFlowException,
        TrainingError)
from ..files import atomic_write, ensure_directory
from ..flownet import (LossWeights, ModelConfig, ModelParams, compute_losses,
        forward, init_params, metrics, read_checkpoint, write_checkpoint)
from ..verbose import verbose
from .adam import adam_step, lr_at


# The name of the training log written to the output directory.
LOG_NAME = 'train.log'

# The name of the checkpoint written at the end of training.
FINAL_CHECKPOINT = 'final.rfck'


@dataclass(frozen=True)
class TrainConfig:
    """ The recipe of a training run. """

    # The sample files or directories of sample files to train with.
    data: Tuple[str, ...] = ()

    # The samples the ablation runner evaluates with.  The training samples
    # are used if there are none.
    validation_data: Tuple[str, ...] = ()

    # The directory checkpoints and the log are written to.  Nothing is
    # written if it is None.
    out_dir: Optional[str] = None

    epochs: int = 200
    batch_size: int = 4
    learning_rate: float = 0.001
    decay: float = 0.7
    decay_period: int = 20
    beta1: float = 0.9
    beta2: float = 0.99
    eps: float = 1e-8
    weight_decay: float = 1e-4

    loss: LossWeights = field(default_factory=LossWeights)
    model: ModelConfig = field(default_factory=ModelConfig)

    seed: int = 0

    # Write a checkpoint every so many epochs (0 for only the final one).
    checkpoint_interval: int = 10

    # A checkpoint whose parameters (but not optimizer state) training starts
    # from, eg. the result of a pre-training run.
    init_checkpoint: Optional[str] = None

    # A checkpoint of this run to continue from.
    resume_checkpoint: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, 'data', tuple(self.data))
        object.__setattr__(self, 'validation_data',
                tuple(self.validation_data))

        if self.learning_rate <= 0:
            raise ConfigurationError("the learning rate must be positive")

        if not 0 < self.decay <= 1:
            raise ConfigurationError("the decay must be in (0, 1]")

        if not (0 < self.beta1 < 1 and 0 < self.beta2 < 1):
            raise ConfigurationError("the Adam betas must be in (0, 1)")

        if (self.epochs < 0 or self.batch_size < 1 or
                self.decay_period < 1 or self.checkpoint_interval < 0):
            raise ConfigurationError(
                    "epochs and the checkpoint interval must not be "
                    "negative, the batch size and decay period must be "
                    "positive")

        if self.weight_decay < 0 or self.eps <= 0:
            raise ConfigurationError(
                    "the weight decay must not be negative and eps must be "
                    "positive")

    def lr_at(self, epoch):
        """ Return the learning rate of a (0 based) epoch. """

        return lr_at(epoch, self.learning_rate, self.decay, self.decay_period)


@dataclass(frozen=True)
class EpochRecord:
    """ The means over an epoch's samples of the loss terms, the end point
    error and the aggregated coordinate residual of the finest level.  Terms
    the network doesn't produce are None.
    """

    epoch: int
    lr: float
    scene_flow: float
    coordinate: Optional[float]
    deformation: Optional[float]
    total: float
    epe3d: float
    coordinate_residual: Optional[float]

    def log_line(self):
        """ Return the tab separated log line of the record. """

        def fmt(value):
            return 'n/a' if value is None else '{0:.6g}'.format(value)

        return '\t'.join([str(self.epoch), fmt(self.lr), fmt(self.scene_flow),
                fmt(self.coordinate), fmt(self.deformation), fmt(self.total),
                fmt(self.epe3d)])


@dataclass
class TrainResult:
    """ The outcome of training. """

    params: ModelParams
    history: List[EpochRecord]


def train(config, samples=None):
    """ Train a network and return the TrainResult.  'samples' is a sequence
    of SamplePair and, if omitted, is read from the configured data.
    """

    if samples is None:
        samples = [sample for _, sample in read_dataset(config.data)]

    samples = list(samples)

    if config.epochs > 0 and not samples:
        raise ConfigurationError("there are no training samples")

    params, start_epoch = _initial_params(config)
    history = []

    log_lines = []
    if config.out_dir is not None:
        ensure_directory(config.out_dir)

        if config.resume_checkpoint is not None:
            log_lines = _read_log(config.out_dir)[:start_epoch]

    for epoch in range(start_epoch, config.epochs):
        params, record = _train_epoch(config, params, samples, epoch)
        history.append(record)

        verbose("Epoch {0}: loss {1:.6g}, EPE3D {2:.4f}".format(record.epoch,
                record.total, record.epe3d))

        if config.out_dir is not None:
            log_lines.append(record.log_line())
            _write_log(config.out_dir, log_lines)

            interval = config.checkpoint_interval

            if interval and record.epoch % interval == 0:
                write_checkpoint(
                        os.path.join(config.out_dir,
                                'epoch_{0:04d}.rfck'.format(record.epoch)),
                        config.model, params, record.epoch)

    if config.out_dir is not None:
        write_checkpoint(os.path.join(config.out_dir, FINAL_CHECKPOINT),
                config.model, params, max(config.epochs, start_epoch))

        if not log_lines:
            _write_log(config.out_dir, log_lines)

    return TrainResult(params=params, history=history)


def _initial_params(config):
    """ Return the parameters training starts with and the epoch it starts
    at.
    """

    if config.resume_checkpoint is not None:
        checkpoint = read_checkpoint(config.resume_checkpoint)
        _check_model(config, checkpoint, config.resume_checkpoint)

        return checkpoint.params, checkpoint.epoch

    if config.init_checkpoint is not None:
        checkpoint = read_checkpoint(config.init_checkpoint)
        _check_model(config, checkpoint, config.init_checkpoint)

        return checkpoint.params.without_state(), 0

    return init_params(config.model, config.seed), 0


def _check_model(config, checkpoint, path):
    """ Check that a checkpoint holds the configured network. """

    if replace(checkpoint.config, preset=config.model.preset) != config.model:
        raise ConfigurationError(
                "'{0}' contains a different network to the one "
                "configured".format(path))


def _train_epoch(config, params, samples, epoch):
    """ Train for one epoch and return the updated parameters and the
    EpochRecord.
    """

    lr = config.lr_at(epoch)
    order = np.random.default_rng([config.seed, epoch]).permutation(
            len(samples))

    sums = {'scene_flow': 0.0, 'coordinate': 0.0, 'deformation': 0.0,
            'total': 0.0, 'epe3d': 0.0, 'coordinate_residual': 0.0}
    present = {'coordinate': False, 'deformation': False,
            'coordinate_residual': False}

    for batch_nr, begin in enumerate(range(0, len(order), config.batch_size)):
        batch = order[begin:begin + config.batch_size]
        batch_id = 'epoch {0} batch {1}'.format(epoch + 1, batch_nr)

        grads = {name: np.zeros(value.shape) for name, value in params.items()}

        for sample_nr in batch:
            sample = samples[sample_nr]

            try:
                weights = params.tensors()
                result = forward(config.model, weights, sample.P, sample.Q)
                losses = compute_losses(result, sample.flow, config.loss)
                losses.total.backward()
            except NumericError as e:
                raise TrainingError("the loss is not finite",
                        batch_id=batch_id, detail=str(e))

            for name, tensor in weights.items():
                if tensor.grad is not None:
                    grads[name] += tensor.grad

            sums['scene_flow'] += losses.scene_flow.item()
            sums['total'] += losses.total.item()
            sums['epe3d'] += metrics(result.flow(), sample.flow).epe3d

            if losses.coordinate is not None:
                sums['coordinate'] += losses.coordinate.item()
                present['coordinate'] = True

            if losses.deformation is not None:
                sums['deformation'] += losses.deformation.item()
                present['deformation'] = True

            finest = result.levels[0]
            if finest.coords_up is not None:
                residual = np.linalg.norm(
                        finest.coords_up.data - result.source[0].points.points,
                        axis=1)
                sums['coordinate_residual'] += float(residual.mean())
                present['coordinate_residual'] = True

        grads = {name: g / len(batch) for name, g in grads.items()}

        if not all(np.isfinite(g).all() for g in grads.values()):
            raise TrainingError("the gradient is not finite",
                    batch_id=batch_id)

        values, state = adam_step(dict(params.items()), grads, params.state,
                lr, config.beta1, config.beta2, config.eps,
                config.weight_decay)

        try:
            params = params.updated(values, state)
        except RigidFlowException as e:
            raise TrainingError("the parameters are no longer finite",
                    batch_id=batch_id, detail=str(e))

    n = len(samples)

    def mean(name):
        if name in present and not present[name]:
            return None

        return sums[name] / n

    return params, EpochRecord(epoch=epoch + 1, lr=lr,
            scene_flow=mean('scene_flow'), coordinate=mean('coordinate'),
            deformation=mean('deformation'), total=mean('total'),
            epe3d=mean('epe3d'),
            coordinate_residual=mean('coordinate_residual'))


def _read_log(out_dir):
    """ Return the lines of an existing training log. """

    try:
        with open(os.path.join(out_dir, LOG_NAME)) as f:
            return f.read().splitlines()
    except FileNotFoundError:
        return []


def _write_log(out_dir, lines):
    """ Write the training log. """

    with atomic_write(os.path.join(out_dir, LOG_NAME), 'w') as f:
        for line in lines:
            f.write(line + '\n')
