import json

import numpy as np
import pytest

from conftest import small_config

from rnnlab.stepper import (
    FORWARD_DETAILS,
    Pacer,
    advance,
    advance_to_end,
    compile_epoch_plan,
    jump_to_phase,
)
from rnnlab.training import TrainingSession


def plan_for(**kw):
    session = TrainingSession.create(small_config(**kw))
    return session, compile_epoch_plan(session)


def training_events(plan):
    return [e for e in plan.events if e.phase == "training"]


class TestPlanGrammar:
    def test_first_event(self):
        _, plan = plan_for(seed=1)
        ev = plan.events[0]
        assert (ev.detail, ev.layer, ev.t) == ("layer_input", 0, 1)

    def test_forward_detail_count_1x2(self):
        # trace length 2: window 2, horizon 1 -> 4 details x 2 timesteps
        _, plan = plan_for(seed=1, window=2, horizon=1)
        fwd = [e for e in training_events(plan) if e.detail in FORWARD_DETAILS]
        assert len(fwd) == 8

    def test_forward_and_backward_counts_2x3(self):
        _, plan = plan_for(seed=1, window=3, horizon=1, layer_count=2)
        fwd = [e for e in training_events(plan) if e.detail in FORWARD_DETAILS]
        back = [e for e in training_events(plan) if e.detail == "backward_step"]
        assert len(fwd) == 24
        assert len(back) == 6

    def test_indices_dense(self):
        _, plan = plan_for(seed=1)
        assert [e.index for e in plan.events] == list(range(len(plan)))

    def test_forward_detail_order_per_cell(self):
        _, plan = plan_for(seed=1)
        seen = {}
        for e in plan.events:
            if e.detail in FORWARD_DETAILS:
                key = (e.phase, e.layer, e.t)
                seen.setdefault(key, []).append(e.detail)
        assert all(v == list(FORWARD_DETAILS) for v in seen.values())

    def test_backward_reverse_time(self):
        _, plan = plan_for(seed=1, layer_count=2)
        ts = [e.t for e in training_events(plan) if e.detail == "backward_step"]
        assert ts == sorted(ts, reverse=True)
        assert ts[0] == max(ts) and ts[-1] == 1

    def test_single_weights_updated_then_done(self):
        _, plan = plan_for(seed=1)
        tail = [e.detail for e in plan.events[-2:]]
        assert tail == ["weights_updated", "epoch_done"]
        assert sum(1 for e in plan.events if e.detail == "weights_updated") == 1

    def test_phase_order(self):
        _, plan = plan_for(seed=1)
        phases = [e.phase for e in plan.events]
        # prediction block, then validation, then training, never interleaved
        boundaries = [p for i, p in enumerate(phases) if i == 0 or phases[i - 1] != p]
        assert boundaries == ["prediction", "validation", "training"]


class TestAdvance:
    def test_session_untouched_before_weight_update(self):
        session, plan = plan_for(seed=2)
        before = session.params.to_bytes()
        while plan.events[plan.cursor].detail != "weights_updated":
            advance(plan, session)
        assert session.params.to_bytes() == before
        advance(plan, session)  # weights_updated
        assert session.params.to_bytes() != before
        assert session.epoch == 0
        advance(plan, session)  # epoch_done
        assert session.epoch == 1

    def test_advance_past_end_rejected(self):
        session, plan = plan_for(seed=2)
        advance_to_end(plan, session)
        with pytest.raises(ValueError):
            advance(plan, session)

    def test_replay_equivalence(self):
        a = TrainingSession.create(small_config(seed=3))
        b = TrainingSession.create(small_config(seed=3))
        a.run_epoch()
        advance_to_end(compile_epoch_plan(b), b)
        assert a.params.to_bytes() == b.params.to_bytes()
        assert a.opt.first_moment.to_bytes() == b.opt.first_moment.to_bytes()
        assert a.opt.second_moment.to_bytes() == b.opt.second_moment.to_bytes()
        assert a.opt.step_count == b.opt.step_count
        assert a.loss_history == b.loss_history
        assert a.rng.state_bytes() == b.rng.state_bytes()

    def test_payloads_match_trace(self):
        session, plan = plan_for(seed=4)
        detail = plan.outcome.detail
        for e in plan.events:
            if e.phase == "training" and e.detail == "output_activation":
                step = detail.train_trace.steps[e.layer][e.t - 1]
                assert np.array_equal(e.payload, step.a)


class TestJump:
    def test_jump_to_training_from_start(self):
        session, plan = plan_for(seed=5)
        cursor = jump_to_phase(plan, session, "training")
        assert plan.events[cursor].phase == "training"
        assert plan.events[cursor - 1].phase == "validation"
        assert session.phase == "training"

    def test_jump_to_current_phase_noop(self):
        session, plan = plan_for(seed=5)
        advance(plan, session)
        before = plan.cursor
        jump_to_phase(plan, session, "prediction")
        assert plan.cursor == before or plan.cursor == 0

    def test_jump_then_finish_equals_advance_all(self):
        a = TrainingSession.create(small_config(seed=6))
        b = TrainingSession.create(small_config(seed=6))
        pa = compile_epoch_plan(a)
        jump_to_phase(pa, a, "training")
        advance_to_end(pa, a)
        advance_to_end(compile_epoch_plan(b), b)
        assert a.params.to_bytes() == b.params.to_bytes()
        assert a.loss_history == b.loss_history

    def test_backward_jump_via_rewind(self):
        session, plan = plan_for(seed=5)
        jump_to_phase(plan, session, "training")
        cursor = jump_to_phase(plan, session, "prediction")
        assert cursor == 0


class TestPacer:
    def test_rate_accounting(self):
        p = Pacer(2.0)
        p.play(0.0)
        assert p.due(3.0) == 6

    def test_paused_frozen(self):
        p = Pacer(2.0)
        assert p.due(10.0) == 0

    def test_rate_change_preserves_budget(self):
        p = Pacer(1.0)
        p.play(0.0)
        assert p.due(0.5) == 0  # 0.5 steps carried
        p.set_rate(2.0)
        assert p.due(1.0) == 1  # 0.5 + 0.5*2 = 1.5 -> 1, carry 0.5
        assert p.due(1.25) == 1  # 0.5 + 0.25*2 = 1.0

    def test_invalid_rate(self):
        with pytest.raises(ValueError):
            Pacer(0.0)


class TestDump:
    def test_records_are_jsonable(self):
        _, plan = plan_for(seed=7)
        lines = [json.dumps(rec) for rec in plan.records(include_payloads=True)]
        assert len(lines) == len(plan)
        first = json.loads(lines[0])
        assert first["detail"] == "layer_input" and first["index"] == 0

    def test_payloads_omitted_by_default(self):
        _, plan = plan_for(seed=7)
        rec = next(iter(plan.records()))
        assert "payload" not in rec
