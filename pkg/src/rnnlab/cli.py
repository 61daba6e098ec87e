"""Command-line interface: headless training, gradient checks, plan dumps,
benchmarking, and launching the interactive service."""

from __future__ import annotations

import json
import sys
import time

import click
import numpy as np

from .grads import grad_check
from .mathkernel import RngStream
from .stepper import compile_epoch_plan
from .training import ConfigError, NetworkConfig, TrainingSession


def _config_options(fn):
    opts = [
        click.option("--task", default="sine", show_default=True,
                     type=click.Choice(["sine", "sawtooth", "square", "composite", "abab", "lorem"])),
        click.option("--cell", default="lstm", show_default=True,
                     type=click.Choice(["vanilla", "lstm"])),
        click.option("--layers", default=1, show_default=True, type=int),
        click.option("--hidden", default=16, show_default=True, type=int),
        click.option("--window", default=25, show_default=True, type=int),
        click.option("--horizon", default=5, show_default=True, type=int),
        click.option("--lr", default=0.01, show_default=True, type=float),
        click.option("--batch", default=8, show_default=True, type=int),
        click.option("--noise", default=0.0, show_default=True, type=float),
        click.option("--seed", default=0, show_default=True, type=int),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


def _build_config(task, cell, layers, hidden, window, horizon, lr, batch, noise, seed):
    return NetworkConfig(
        cell_kind=cell, layer_count=layers, hidden=hidden, task=task,
        window=window, horizon=horizon, noise_amp=noise, learning_rate=lr,
        batch_size=batch, seed=seed,
    )


@click.group()
def main():
    """Stepwise-observable RNN/LSTM training engine."""


@main.command()
@_config_options
@click.option("--epochs", default=50, show_default=True, type=int)
def train(epochs, **cfg_kw):
    """Train headless for N epochs; prints per-epoch losses as CSV."""
    try:
        session = TrainingSession.create(_build_config(**cfg_kw))
    except ConfigError as exc:
        raise click.ClickException(str(exc))
    click.echo("epoch,train_loss,validation_loss")
    for _ in range(epochs):
        report = session.run_epoch()
        click.echo(f"{report.epoch},{report.mean_train_loss!r},{report.validation_loss!r}")
        if report.diverged:
            click.echo("diverged", err=True)
            sys.exit(2)


@main.command()
@_config_options
@click.option("--epsilon", default=1e-5, show_default=True, type=float)
def gradcheck(epsilon, **cfg_kw):
    """Compare analytic gradients against central finite differences."""
    config = _build_config(**cfg_kw)
    session = TrainingSession.create(config)
    rng = RngStream(config.seed + 1)
    from .training import _function_sample

    if config.is_text:
        from .data import sample_batch

        batch = [(inp, [tgt]) for inp, tgt in sample_batch(session.text_pool, 2, rng)]
    else:
        batch = [_function_sample(config, rng) for _ in range(2)]
    err = grad_check(session.params, batch, config.loss_kind, epsilon=epsilon)
    click.echo(f"max relative error: {err:.3e}")
    if err >= 1e-4:
        sys.exit(1)


@main.command("dump-plan")
@_config_options
@click.option("--payloads/--no-payloads", default=False, show_default=True)
@click.option("--out", type=click.Path(writable=True), default=None,
              help="write NDJSON here instead of stdout")
def dump_plan(payloads, out, **cfg_kw):
    """Write one epoch's micro-step event stream as line-delimited JSON."""
    session = TrainingSession.create(_build_config(**cfg_kw))
    plan = compile_epoch_plan(session)
    stream = open(out, "w") if out else sys.stdout
    try:
        for rec in plan.records(include_payloads=payloads):
            stream.write(json.dumps(rec) + "\n")
    finally:
        if out:
            stream.close()


@main.command()
@_config_options
@click.option("--epochs", default=5, show_default=True, type=int)
def bench(epochs, **cfg_kw):
    """Measure epoch wall time for the given config."""
    session = TrainingSession.create(_build_config(**cfg_kw))
    times = []
    for _ in range(epochs):
        report = session.run_epoch()
        times.append(report.wall_time)
    click.echo(f"epochs: {epochs}")
    click.echo(f"mean epoch time: {np.mean(times):.1f} ms")
    click.echo(f"max epoch time: {np.max(times):.1f} ms")


@main.command()
@_config_options
@click.option("--port", default=8000, show_default=True, type=int)
@click.option("--host", default="127.0.0.1", show_default=True)
def serve(port, host, **cfg_kw):
    """Run the interactive service (WebSocket protocol + UI bundle)."""
    import uvicorn

    from .service.app import create_app

    config = _build_config(**cfg_kw)
    app = create_app(session_defaults=config.to_dict())
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
