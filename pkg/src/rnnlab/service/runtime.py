"""Per-connection session runtime: applies protocol commands to a training
session and produces self-contained snapshots."""

from __future__ import annotations

import uuid

from ..stepper import Pacer, StepPlan, advance, advance_to_end, compile_epoch_plan, jump_to_phase
from ..training import ConfigError, NetworkConfig, SessionDiverged, TrainingSession
from .protocol import (
    CellIntermediates,
    CommandBody,
    ErrorBody,
    SnapshotBody,
    StepEventModel,
    ViewModel,
)


class CommandError(Exception):
    pass


class SessionRuntime:
    def __init__(self, config=None):
        self.session = TrainingSession.create(config or NetworkConfig())
        self.session_id = uuid.uuid4().hex
        self.view = ViewModel(mode="overview")
        self.pacer = Pacer(1.0)
        self.plan = None
        self.current_event = None

    # -- plan handling -----------------------------------------------------

    def _ensure_plan(self):
        if self.session.diverged:
            raise CommandError("session diverged; reset to continue")
        if self.plan is None or self.plan.finished:
            self.plan = compile_epoch_plan(self.session)
            self.current_event = None
        return self.plan

    def advance_one(self):
        plan = self._ensure_plan()
        self.current_event = advance(plan, self.session)
        return self.current_event

    def finish_epoch(self):
        plan = self._ensure_plan()
        self.current_event = advance_to_end(plan, self.session)
        self.plan = None
        return self.current_event

    # -- commands ----------------------------------------------------------

    def handle(self, body: dict):
        """Apply one command; returns the snapshots to emit. Raises
        CommandError on anything invalid, leaving the session unchanged."""
        try:
            cmd = CommandBody(**body)
        except Exception as exc:
            raise CommandError(f"malformed command body: {exc}") from exc
        handler = getattr(self, f"_cmd_{cmd.cmd}", None)
        if handler is None:
            raise CommandError(f"unknown command {cmd.cmd!r}")
        try:
            return handler(cmd)
        except (ConfigError, SessionDiverged, ValueError) as exc:
            raise CommandError(str(exc)) from exc

    def _cmd_play(self, cmd):
        import time

        self.pacer.play(time.monotonic())
        return [self.snapshot()]

    def _cmd_pause(self, cmd):
        self.pacer.pause()
        return [self.snapshot()]

    def _cmd_step(self, cmd):
        if self.view.mode == "cell":
            self.advance_one()
        else:
            self.finish_epoch()
        return [self.snapshot()]

    def _cmd_jump_phase(self, cmd):
        if cmd.phase is None:
            raise CommandError("jump_phase requires a phase")
        plan = self._ensure_plan()
        try:
            jump_to_phase(plan, self.session, cmd.phase)
        except ValueError:
            # rewinding past a weight update: restart from a fresh plan
            self.plan = compile_epoch_plan(self.session)
            jump_to_phase(self.plan, self.session, cmd.phase)
        self.current_event = None
        return [self.snapshot()]

    def _cmd_reset(self, cmd):
        self.session.reset()
        self.plan = None
        self.current_event = None
        return [self.snapshot()]

    def _cmd_set_param(self, cmd):
        if cmd.name is None:
            raise CommandError("set_param requires a name")
        self.session.set_hyperparam(cmd.name, cmd.value)
        self.plan = None  # next epoch picks up the new value
        self.current_event = None
        return [self.snapshot()]

    def _cmd_edit_arch(self, cmd):
        if cmd.action is None:
            raise CommandError("edit_arch requires an action")
        self.session.edit_architecture(cmd.action, at=cmd.at, value=cmd.value)
        self.plan = None
        self.current_event = None
        return [self.snapshot()]

    def _cmd_select_task(self, cmd):
        if cmd.task is None:
            raise CommandError("select_task requires a task")
        self.session.edit_architecture("set_task", value=cmd.task)
        self.plan = None
        self.current_event = None
        return [self.snapshot()]

    def _cmd_set_view(self, cmd):
        if cmd.mode not in ("overview", "cell"):
            raise CommandError(f"unknown view mode {cmd.mode!r}")
        layer = None
        if cmd.mode == "cell":
            layer = cmd.layer if cmd.layer is not None else 0
            if not 0 <= layer < self.session.config.layer_count:
                raise CommandError(f"layer {layer} out of range")
        self.view = ViewModel(mode=cmd.mode, layer=layer)
        return [self.snapshot()]

    def _cmd_set_pace(self, cmd):
        if cmd.rate is None or cmd.rate <= 0:
            raise CommandError("set_pace requires a positive rate")
        self.pacer.set_rate(cmd.rate)
        return [self.snapshot()]

    # -- snapshots ---------------------------------------------------------

    def _cell_intermediates(self):
        ev = self.current_event
        if ev is None or ev.layer is None or ev.t is None:
            return None
        plan = self.plan
        trace = None
        if plan is not None:
            detail = plan.outcome.detail
            trace = {
                "prediction": detail.prediction_trace,
                "validation": detail.validation_trace,
                "training": detail.train_trace,
            }.get(ev.phase)
        focus = self.view.layer if self.view.mode == "cell" and self.view.layer is not None else ev.layer
        if trace is None or focus >= trace.n_layers or ev.t > trace.n_steps:
            return None
        step = trace.steps[focus][ev.t - 1]
        return CellIntermediates(
            layer=focus,
            t=ev.t,
            input_gate=None if step.i is None else step.i.tolist(),
            forget_gate=None if step.f is None else step.f.tolist(),
            output_gate=None if step.o is None else step.o.tolist(),
            candidate=None if step.g is None else step.g.tolist(),
            cell_state=None if step.c is None else step.c.tolist(),
            activation=step.a.tolist(),
        )

    def snapshot(self):
        """Deep, self-contained copy of all observable state."""
        s = self.session
        ev = self.current_event
        step_model = None
        if ev is not None:
            step_model = StepEventModel(**ev.record(include_payload=True))
        return SnapshotBody(
            session_id=self.session_id,
            epoch=s.epoch,
            phase=s.phase,
            view=self.view.model_copy(),
            config=s.config.to_dict(),
            loss_history=[list(entry) for entry in s.loss_history],
            validation=s.last_validation,
            current_step=step_model,
            cell=self._cell_intermediates(),
            grad_norms=s.last_grad_norms,
            diverged=s.diverged,
        )
