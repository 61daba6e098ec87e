"""The session root: configuration, Adam optimizer, and the epoch loop with its
prediction / validation / training phases.

run_epoch delegates to execute_epoch, a pure function over copies of the
session state; the step machine reuses the same function, so stepping through
an epoch and running it atomically are bit-identical by construction.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, asdict

import numpy as np

from . import data as seqdata
from .cells import (
    LSTM,
    MAX_LAYERS,
    VANILLA,
    forward_sequence,
    free_run,
    init_parameter_set,
    zeros_like_params,
)
from .grads import CROSS_ENTROPY, MSE, batch_gradients, clip_gradients, sequence_loss
from .mathkernel import RngStream, derive_seed

FUNCTION_TASKS = set(seqdata.FUNCTION_KINDS)
TEXT_TASKS = set(seqdata.TEXT_KINDS)
ALL_TASKS = FUNCTION_TASKS | TEXT_TASKS

CELL_KINDS = (VANILLA, LSTM)

GRADIENT_CLIP_NORM = 5.0


class ConfigError(ValueError):
    """Invalid configuration; message names the violated field."""


class SessionDiverged(RuntimeError):
    """Training produced a non-finite loss; reset the session to continue."""


@dataclass
class NetworkConfig:
    cell_kind: str = LSTM
    layer_count: int = 1
    hidden: int = 16
    task: str = "sine"
    window: int = seqdata.DEFAULT_WINDOW
    horizon: int = seqdata.DEFAULT_HORIZON
    noise_amp: float = 0.0
    learning_rate: float = 0.01
    batch_size: int = 8
    batches_per_epoch: int = 10
    seed: int = 0
    init_scheme: str = "glorot-uniform"
    forget_bias: float = 2.0

    def validate(self):
        if self.cell_kind not in CELL_KINDS:
            raise ConfigError(f"cell_kind must be one of {CELL_KINDS}, got {self.cell_kind!r}")
        if not 1 <= self.layer_count <= MAX_LAYERS:
            raise ConfigError(f"layer_count must be in 1..{MAX_LAYERS}, got {self.layer_count}")
        if not 1 <= self.hidden <= 64:
            raise ConfigError(f"hidden must be in 1..64, got {self.hidden}")
        if self.task not in ALL_TASKS:
            raise ConfigError(f"task must be one of {sorted(ALL_TASKS)}, got {self.task!r}")
        if self.window < 1:
            raise ConfigError(f"window must be >= 1, got {self.window}")
        if self.horizon < 1:
            raise ConfigError(f"horizon must be >= 1, got {self.horizon}")
        if not 0.0 <= self.noise_amp <= 1.0:
            raise ConfigError(f"noise_amp must be in [0, 1], got {self.noise_amp}")
        if not 1e-5 <= self.learning_rate <= 1.0:
            raise ConfigError(f"learning_rate must be in [1e-5, 1], got {self.learning_rate}")
        if not 1 <= self.batch_size <= 64:
            raise ConfigError(f"batch_size must be in 1..64, got {self.batch_size}")
        if self.batches_per_epoch < 1:
            raise ConfigError(f"batches_per_epoch must be >= 1, got {self.batches_per_epoch}")

    @property
    def is_text(self):
        return self.task in TEXT_TASKS

    @property
    def loss_kind(self):
        return CROSS_ENTROPY if self.is_text else MSE

    def io_dims(self):
        if self.is_text:
            n = len(seqdata.get_corpus(self.task).alphabet)
            return n, n
        return 1, 1

    def to_dict(self):
        return asdict(self)


@dataclass
class OptimizerState:
    """Adam with bias correction; moment trees mirror the parameter tree."""

    kind: str = "adam"
    step_count: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    first_moment: object = None
    second_moment: object = None

    def copy(self):
        return OptimizerState(
            kind=self.kind,
            step_count=self.step_count,
            beta1=self.beta1,
            beta2=self.beta2,
            eps=self.eps,
            first_moment=self.first_moment.copy(),
            second_moment=self.second_moment.copy(),
        )


def optimizer_step(params, grads, opt, learning_rate):
    """One Adam update in place over the whole parameter tree."""
    opt.step_count += 1
    t = opt.step_count
    c1 = 1.0 - opt.beta1**t
    c2 = 1.0 - opt.beta2**t
    for p, g, m, v in zip(
        params.arrays(), grads.arrays(), opt.first_moment.arrays(), opt.second_moment.arrays()
    ):
        m *= opt.beta1
        m += (1.0 - opt.beta1) * g
        v *= opt.beta2
        v += (1.0 - opt.beta2) * g * g
        p -= learning_rate * (m / c1) / (np.sqrt(v / c2) + opt.eps)
    return params, opt


@dataclass
class EpochReport:
    epoch: int
    mean_train_loss: float
    validation_loss: float
    validation_prediction: list
    wall_time: float  # milliseconds
    diverged: bool = False


@dataclass
class EpochDetail:
    """Traces of one epoch's representative flows, for the step machine/UI."""

    prediction_trace: object = None
    prediction_values: list = field(default_factory=list)
    validation_trace: object = None
    validation_loss: float = 0.0
    train_trace: object = None
    train_sample_loss: float = 0.0
    grad_norms: np.ndarray = None  # [layers, timesteps] of the viz sample


@dataclass
class EpochOutcome:
    params: object
    opt: object
    rng: object
    report: EpochReport
    detail: EpochDetail
    diverged: bool


def _function_sample(config, rng):
    """One fresh sequence with random phase; returns (inputs, targets) with
    teacher forcing: the horizon's true values are fed as inputs too."""
    period = seqdata.PERIODS[config.task]
    x0 = rng.uniform(0.0, period)
    seq = seqdata.generate_sequence(
        config.task, x0, config.window + config.horizon, seqdata.DEFAULT_DX,
        config.noise_amp, rng,
    )
    return _teacher_forced(seq.values, config.window, config.horizon)


def _teacher_forced(values, window, horizon):
    inputs = [np.array([v]) for v in values[: window + horizon - 1]]
    targets = [np.array([v]) for v in values[window : window + horizon]]
    return inputs, targets


class TrainingSession:
    """Single mutable root of one training run. One logical writer mutates it;
    snapshots handed to other threads are deep copies."""

    def __init__(self, config, generation=0):
        config.validate()
        self.config = config
        self.generation = generation
        self._initialize()

    @classmethod
    def create(cls, config):
        return cls(config)

    def _initialize(self):
        cfg = self.config
        self.rng = RngStream(derive_seed(cfg.seed, self.generation))
        in_dim, out_dim = cfg.io_dims()
        self.params = init_parameter_set(
            cfg.cell_kind, cfg.layer_count, in_dim, cfg.hidden, out_dim, self.rng,
            cfg.forget_bias,
        )
        self.opt = OptimizerState(
            first_moment=zeros_like_params(self.params),
            second_moment=zeros_like_params(self.params),
        )
        self.epoch = 0
        self.phase = "prediction"
        self.loss_history = []
        self.diverged = False
        self.last_validation = None
        self.last_grad_norms = None
        self._setup_data()

    def _setup_data(self):
        """Held-out validation fixture (noise-free, stable across epochs) and,
        for text tasks, the training pool with the fixture excluded."""
        cfg = self.config
        if cfg.is_text:
            corpus = seqdata.get_corpus(cfg.task)
            self.corpus = corpus
            window = min(cfg.window, len(corpus.text) - 1)
            pool = seqdata.text_windows(corpus, window)
            val_idx = self.rng.randint(len(pool))
            inp, tgt = pool[val_idx]
            self.validation_sample = (inp, [tgt])
            self.text_pool = pool[:val_idx] + pool[val_idx + 1 :]
            self.validation_values = None
        else:
            self.corpus = None
            self.text_pool = None
            period = seqdata.PERIODS[cfg.task]
            x0 = self.rng.uniform(0.0, period)
            seq = seqdata.generate_sequence(
                cfg.task, x0, cfg.window + cfg.horizon, seqdata.DEFAULT_DX, 0.0, self.rng
            )
            self.validation_values = seq.values
            self.validation_xs = seq.xs
            self.validation_sample = _teacher_forced(seq.values, cfg.window, cfg.horizon)

    # -- epoch execution ---------------------------------------------------

    def execute_epoch(self):
        """Run one epoch on copies of the mutable state; the session itself is
        untouched. Callers apply the outcome (run_epoch: atomically; the step
        machine: at its weight-update and epoch-done milestones)."""
        cfg = self.config
        params = self.params.copy()
        opt = self.opt.copy()
        rng = self.rng.clone()
        detail = EpochDetail()
        diverged = False

        # prediction phase: teacher-forced inside the window, free-running after
        if cfg.is_text:
            inputs, _ = self.validation_sample
            preds, pred_trace = free_run(
                params, inputs, 1, alphabet_size=len(self.corpus.alphabet)
            )
        else:
            window_inputs = [np.array([v]) for v in self.validation_values[: cfg.window]]
            preds, pred_trace = free_run(params, window_inputs, cfg.horizon)
        detail.prediction_trace = pred_trace
        detail.prediction_values = [p.copy() for p in preds]

        # validation phase: loss on the held-out fixture
        val_inputs, val_targets = self.validation_sample
        val_trace = forward_sequence(params, val_inputs)
        val_loss = sequence_loss(val_trace, params, cfg.loss_kind, val_targets)
        detail.validation_trace = val_trace
        detail.validation_loss = val_loss
        if not np.isfinite(val_loss):
            diverged = True

        # training phase
        losses = []
        if not diverged:
            for b in range(cfg.batches_per_epoch):
                if cfg.is_text:
                    batch = seqdata.sample_batch(self.text_pool, cfg.batch_size, rng)
                    batch = [(inp, [tgt]) for inp, tgt in batch]
                else:
                    batch = [_function_sample(cfg, rng) for _ in range(cfg.batch_size)]
                if b == 0:
                    viz_inputs, viz_targets = batch[0]
                    viz_trace = forward_sequence(params, viz_inputs)
                    detail.train_trace = viz_trace
                    detail.train_sample_loss = sequence_loss(
                        viz_trace, params, cfg.loss_kind, viz_targets
                    )
                grads, mean_loss, norms = batch_gradients(params, batch, cfg.loss_kind)
                if b == 0:
                    # norms of the viz sample, recomputed so they match batch[0]
                    from .grads import backward

                    _, viz_norms = backward(viz_trace, params, cfg.loss_kind, viz_targets)
                    detail.grad_norms = viz_norms
                if not np.isfinite(mean_loss) or not all(
                    np.all(np.isfinite(a)) for a in grads.arrays()
                ):
                    diverged = True
                    break
                losses.append(mean_loss)
                clip_gradients(grads, GRADIENT_CLIP_NORM)
                optimizer_step(params, grads, opt, cfg.learning_rate)

        report = EpochReport(
            epoch=self.epoch + 1,
            mean_train_loss=float(np.mean(losses)) if losses else float("nan"),
            validation_loss=val_loss,
            validation_prediction=[float(p[0]) if len(p) == 1 else p.tolist() for p in preds],
            wall_time=0.0,
            diverged=diverged,
        )
        return EpochOutcome(
            params=params, opt=opt, rng=rng, report=report, detail=detail, diverged=diverged
        )

    def apply_weights(self, outcome):
        self.params = outcome.params
        self.opt = outcome.opt
        self.rng = outcome.rng

    def apply_bookkeeping(self, outcome):
        if outcome.diverged:
            self.diverged = True
        else:
            self.epoch += 1
            self.loss_history.append(
                (self.epoch, outcome.report.mean_train_loss, outcome.report.validation_loss)
            )
        self.last_validation = self._validation_view(outcome.detail)
        self.last_grad_norms = (
            outcome.detail.grad_norms.tolist() if outcome.detail.grad_norms is not None else None
        )
        self.phase = "prediction"

    def _validation_view(self, detail):
        cfg = self.config
        if cfg.is_text:
            inputs, targets = self.validation_sample
            alphabet = self.corpus.alphabet
            pred_idx = int(np.argmax(detail.prediction_values[0]))
            return {
                "input": [alphabet[int(np.argmax(v))] for v in inputs],
                "target": alphabet[int(np.argmax(targets[0]))],
                "prediction": alphabet[pred_idx],
                "error": [detail.validation_loss],
            }
        preds = [float(p[0]) for p in detail.prediction_values]
        targets = self.validation_values[cfg.window :].tolist()
        return {
            "xs": self.validation_xs.tolist(),
            "input": self.validation_values[: cfg.window].tolist(),
            "target": targets,
            "prediction": preds,
            "error": [abs(p - t) for p, t in zip(preds, targets)],
        }

    def run_epoch(self):
        if self.diverged:
            raise SessionDiverged("session diverged; reset to continue")
        start = time.perf_counter()
        outcome = self.execute_epoch()
        if not outcome.diverged:
            self.apply_weights(outcome)
        self.apply_bookkeeping(outcome)
        outcome.report.wall_time = (time.perf_counter() - start) * 1000.0
        return outcome.report

    # -- steering ----------------------------------------------------------

    _HYPERPARAM_RANGES = {
        "learning_rate": (1e-5, 1.0),
        "batch_size": (1, 64),
        "noise_amp": (0.0, 1.0),
    }

    def set_hyperparam(self, name, value):
        """Takes effect from the next epoch's batches; never resets training."""
        if name not in self._HYPERPARAM_RANGES:
            raise ConfigError(f"unknown hyperparameter {name!r}")
        lo, hi = self._HYPERPARAM_RANGES[name]
        if name == "batch_size":
            value = int(value)
        else:
            value = float(value)
        if not lo <= value <= hi:
            raise ConfigError(f"{name} must be in [{lo}, {hi}], got {value}")
        setattr(self.config, name, value)

    def edit_architecture(self, action, at=None, value=None):
        """Structural change; always reinitializes from a fresh seed derivation,
        resets the epoch counter and clears history."""
        cfg = self.config
        if action == "add_layer":
            if cfg.layer_count >= MAX_LAYERS:
                raise ConfigError(f"cannot exceed {MAX_LAYERS} layers")
            cfg.layer_count += 1
        elif action == "remove_layer":
            if cfg.layer_count <= 1:
                raise ConfigError("cannot remove the last layer")
            cfg.layer_count -= 1
        elif action == "set_cell_kind":
            if value not in CELL_KINDS:
                raise ConfigError(f"cell_kind must be one of {CELL_KINDS}, got {value!r}")
            cfg.cell_kind = value
        elif action == "set_task":
            if value not in ALL_TASKS:
                raise ConfigError(f"task must be one of {sorted(ALL_TASKS)}, got {value!r}")
            cfg.task = value
        else:
            raise ConfigError(f"unknown architecture action {action!r}")
        self.generation += 1
        self._initialize()

    def reset(self):
        """Rewind to the state create() would produce for the current config."""
        self.generation = 0
        self._initialize()
