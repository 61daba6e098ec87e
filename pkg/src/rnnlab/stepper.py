"""Compiles one epoch into an ordered plan of micro-steps and executes it
incrementally, decoupling computation from visualization.

The plan is built from the same execute_epoch call that run_epoch uses, so
advancing a plan to its end leaves the session bit-identical to running the
epoch atomically. Session state changes only at the weights_updated and
epoch_done milestones."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

PHASES = ("prediction", "validation", "training")

FORWARD_DETAILS = (
    "layer_input",
    "gate_activations",
    "cell_state_update",
    "output_activation",
)


@dataclass
class StepEvent:
    index: int
    phase: str
    detail: str
    layer: int | None = None
    t: int | None = None  # 1-based timestep
    payload: object = None

    def record(self, include_payload=False):
        rec = {"index": self.index, "phase": self.phase, "detail": self.detail}
        if self.layer is not None:
            rec["layer"] = self.layer
        if self.t is not None:
            rec["t"] = self.t
        if include_payload:
            rec["payload"] = _jsonable(self.payload)
        return rec


def _jsonable(payload):
    if isinstance(payload, np.ndarray):
        return payload.tolist()
    if isinstance(payload, dict):
        return {k: _jsonable(v) for k, v in payload.items()}
    if isinstance(payload, (np.floating, np.integer)):
        return payload.item()
    return payload


@dataclass
class StepPlan:
    events: list
    outcome: object
    cursor: int = 0
    weights_applied: bool = False

    def __len__(self):
        return len(self.events)

    @property
    def finished(self):
        return self.cursor >= len(self.events)

    def records(self, include_payloads=False):
        for ev in self.events:
            yield ev.record(include_payloads)


def _forward_events(events, phase, trace):
    for t in range(trace.n_steps):
        for l in range(trace.n_layers):
            step = trace.steps[l][t]
            payloads = {
                "layer_input": step.x,
                "gate_activations": None
                if step.i is None
                else {"input_gate": step.i, "forget_gate": step.f, "output_gate": step.o},
                "cell_state_update": {"candidate": step.g, "cell_state": step.c}
                if step.c is not None
                else None,
                "output_activation": step.a,
            }
            for detail in FORWARD_DETAILS:
                events.append(
                    StepEvent(
                        index=len(events),
                        phase=phase,
                        detail=detail,
                        layer=l,
                        t=t + 1,
                        payload=payloads[detail],
                    )
                )


def compile_epoch_plan(session):
    """Eagerly execute the epoch on copies of the session state and lay out the
    micro-step event sequence; payloads equal direct execution exactly."""
    from .training import SessionDiverged

    if session.diverged:
        raise SessionDiverged("session diverged; reset to continue")
    outcome = session.execute_epoch()
    detail = outcome.detail
    events = []
    _forward_events(events, "prediction", detail.prediction_trace)
    _forward_events(events, "validation", detail.validation_trace)
    events.append(
        StepEvent(len(events), "validation", "loss_computed", payload=detail.validation_loss)
    )
    if detail.train_trace is not None:
        _forward_events(events, "training", detail.train_trace)
        events.append(
            StepEvent(len(events), "training", "loss_computed", payload=detail.train_sample_loss)
        )
        tr = detail.train_trace
        for t in range(tr.n_steps, 0, -1):
            for l in range(tr.n_layers - 1, -1, -1):
                norm = (
                    float(detail.grad_norms[l][t - 1])
                    if detail.grad_norms is not None
                    else None
                )
                events.append(
                    StepEvent(len(events), "training", "backward_step", layer=l, t=t, payload=norm)
                )
    events.append(StepEvent(len(events), "training", "weights_updated"))
    events.append(StepEvent(len(events), "training", "epoch_done"))
    return StepPlan(events=events, outcome=outcome)


def advance(plan, session):
    """Execute the next micro-step; session state mutates only at the
    weights_updated and epoch_done milestones."""
    if plan.finished:
        raise ValueError("plan already finished")
    event = plan.events[plan.cursor]
    plan.cursor += 1
    if event.detail == "weights_updated":
        if not plan.outcome.diverged:
            session.apply_weights(plan.outcome)
        plan.weights_applied = True
        session.phase = event.phase
    elif event.detail == "epoch_done":
        session.apply_bookkeeping(plan.outcome)
    else:
        session.phase = event.phase
    return event


def advance_to_end(plan, session):
    last = None
    while not plan.finished:
        last = advance(plan, session)
    return last


def jump_to_phase(plan, session, phase):
    """Silently execute up to the first event of the requested phase. A
    backward jump rewinds the plan to its start first, which is safe because no
    session mutation happens before weights_updated."""
    if phase not in PHASES:
        raise ValueError(f"unknown phase {phase!r}")
    target = next(
        (i for i in range(plan.cursor, len(plan.events)) if plan.events[i].phase == phase),
        None,
    )
    if target is None:
        # phase lies behind the cursor: rewind, then jump forward
        if plan.weights_applied:
            raise ValueError("cannot rewind past a weight update; reset the session")
        plan.cursor = 0
        target = next((i for i, ev in enumerate(plan.events) if ev.phase == phase), None)
        if target is None:
            raise ValueError(f"phase {phase!r} not present in plan")
    while plan.cursor < target:
        advance(plan, session)
    session.phase = phase
    return plan.cursor


class Pacer:
    """Step budget clock for play mode: at rate r, due() hands out steps at r
    per second; changing the rate or pausing never skips or duplicates steps."""

    def __init__(self, rate=1.0):
        if rate <= 0:
            raise ValueError(f"rate must be positive, got {rate}")
        self.rate = rate
        self.playing = False
        self._last = None
        self._carry = 0.0

    def set_rate(self, rate):
        if rate <= 0:
            raise ValueError(f"rate must be positive, got {rate}")
        self.rate = rate

    def play(self, now):
        self.playing = True
        self._last = now

    def pause(self):
        self.playing = False
        self._last = None
        self._carry = 0.0

    def due(self, now):
        if not self.playing:
            return 0
        if self._last is None:
            self._last = now
            return 0
        self._carry += (now - self._last) * self.rate
        self._last = now
        steps = int(self._carry)
        self._carry -= steps
        return steps
