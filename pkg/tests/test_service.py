import json

import pytest
from fastapi.testclient import TestClient

from rnnlab.service.app import create_app
from rnnlab.service.runtime import CommandError, SessionRuntime
from rnnlab.training import NetworkConfig, TrainingSession

SMALL = dict(window=6, horizon=2, hidden=4, batch_size=2, batches_per_epoch=2, seed=1)


@pytest.fixture
def client():
    return TestClient(create_app(session_defaults=SMALL))


def command(ws, seq, **body):
    ws.send_json({"type": "command", "seq": seq, "body": body})
    return ws.receive_json()


class TestHandshake:
    def test_hello(self, client):
        with client.websocket_connect("/ws") as ws:
            hello = ws.receive_json()
            assert hello["type"] == "hello"
            assert hello["body"]["protocol_version"] == "1"
            assert hello["body"]["default_config"]["window"] == 6

    def test_sessions_isolated(self, client):
        with client.websocket_connect("/ws") as a, client.websocket_connect("/ws") as b:
            a.receive_json()
            b.receive_json()
            snap = command(a, 1, cmd="step")
            assert snap["body"]["epoch"] == 1
            snap_b = command(b, 1, cmd="set_view", mode="overview")
            assert snap_b["body"]["epoch"] == 0

    def test_malformed_command_keeps_connection(self, client):
        with client.websocket_connect("/ws") as ws:
            ws.receive_json()
            ws.send_text("this is not json")
            err = ws.receive_json()
            assert err["type"] == "error"
            snap = command(ws, 1, cmd="step")
            assert snap["type"] == "snapshot"

    def test_unknown_command_is_error_envelope(self, client):
        with client.websocket_connect("/ws") as ws:
            ws.receive_json()
            err = command(ws, 1, cmd="explode")
            assert err["type"] == "error"
            assert "explode" in err["body"]["message"]

    def test_sequence_numbers_increase(self, client):
        with client.websocket_connect("/ws") as ws:
            msgs = [ws.receive_json()]
            for i in range(3):
                msgs.append(command(ws, i + 1, cmd="step"))
            seqs = [m["seq"] for m in msgs]
            assert seqs == sorted(seqs) and len(set(seqs)) == len(seqs)


class TestCommands:
    def test_step_three_epochs(self, client):
        with client.websocket_connect("/ws") as ws:
            ws.receive_json()
            epochs = [command(ws, i + 1, cmd="step")["body"]["epoch"] for i in range(3)]
            assert epochs == [1, 2, 3]

    def test_cell_mode_substep_order(self, client):
        with client.websocket_connect("/ws") as ws:
            ws.receive_json()
            command(ws, 1, cmd="set_view", mode="cell", layer=0)
            labels = [
                command(ws, 2 + i, cmd="step")["body"]["current_step"]["detail"]
                for i in range(4)
            ]
            assert labels == [
                "layer_input",
                "gate_activations",
                "cell_state_update",
                "output_activation",
            ]

    def test_cell_snapshot_carries_intermediates(self, client):
        with client.websocket_connect("/ws") as ws:
            ws.receive_json()
            command(ws, 1, cmd="set_view", mode="cell", layer=0)
            snap = command(ws, 2, cmd="step")
            cell = snap["body"]["cell"]
            assert cell["layer"] == 0 and cell["t"] == 1
            assert len(cell["activation"]) == 4

    def test_reset(self, client):
        with client.websocket_connect("/ws") as ws:
            ws.receive_json()
            command(ws, 1, cmd="step")
            snap = command(ws, 2, cmd="reset")
            assert snap["body"]["epoch"] == 0
            assert snap["body"]["loss_history"] == []

    def test_jump_phase(self, client):
        with client.websocket_connect("/ws") as ws:
            ws.receive_json()
            snap = command(ws, 1, cmd="jump_phase", phase="training")
            assert snap["body"]["phase"] == "training"

    def test_set_param_rejected_out_of_range(self, client):
        with client.websocket_connect("/ws") as ws:
            ws.receive_json()
            err = command(ws, 1, cmd="set_param", name="batch_size", value=0)
            assert err["type"] == "error"
            snap = command(ws, 2, cmd="set_view", mode="overview")
            assert snap["body"]["config"]["batch_size"] == 2

    def test_edit_arch_resets_history(self, client):
        with client.websocket_connect("/ws") as ws:
            ws.receive_json()
            command(ws, 1, cmd="step")
            snap = command(ws, 2, cmd="edit_arch", action="add_layer")
            assert snap["body"]["config"]["layer_count"] == 2
            assert snap["body"]["epoch"] == 0 and snap["body"]["loss_history"] == []

    def test_select_task(self, client):
        with client.websocket_connect("/ws") as ws:
            ws.receive_json()
            snap = command(ws, 1, cmd="select_task", task="abab")
            assert snap["body"]["config"]["task"] == "abab"

    def test_set_pace_positive_only(self, client):
        with client.websocket_connect("/ws") as ws:
            ws.receive_json()
            assert command(ws, 1, cmd="set_pace", rate=2.0)["type"] == "snapshot"
            assert command(ws, 2, cmd="set_pace", rate=-1)["type"] == "error"

    def test_idempotent_commands(self, client):
        with client.websocket_connect("/ws") as ws:
            ws.receive_json()
            a = command(ws, 1, cmd="pause")["body"]
            b = command(ws, 2, cmd="pause")["body"]
            assert a == b
            a = command(ws, 3, cmd="reset")["body"]
            b = command(ws, 4, cmd="reset")["body"]
            assert a == b
            a = command(ws, 5, cmd="set_view", mode="overview")["body"]
            b = command(ws, 6, cmd="set_view", mode="overview")["body"]
            assert a == b


class TestSnapshot:
    def test_round_trip_bytes(self):
        runtime = SessionRuntime(NetworkConfig(**SMALL))
        runtime.finish_epoch()
        snap = runtime.snapshot()
        s1 = json.dumps(snap.model_dump())
        s2 = json.dumps(json.loads(s1))
        assert s1 == s2

    def test_fresh_session_snapshot(self):
        runtime = SessionRuntime(NetworkConfig(**SMALL))
        snap = runtime.snapshot()
        assert snap.epoch == 0 and snap.phase == "prediction"
        assert snap.loss_history == []

    def test_three_epoch_history(self):
        runtime = SessionRuntime(NetworkConfig(**SMALL))
        for _ in range(3):
            runtime.finish_epoch()
        snap = runtime.snapshot()
        assert [row[0] for row in snap.loss_history] == [1, 2, 3]

    def test_validation_plot_data(self):
        runtime = SessionRuntime(NetworkConfig(**SMALL))
        runtime.finish_epoch()
        snap = runtime.snapshot()
        v = snap.validation
        assert len(v["input"]) == 6
        assert len(v["target"]) == 2 and len(v["prediction"]) == 2
        assert len(v["error"]) == 2

    def test_step_on_diverged_session_is_error(self):
        runtime = SessionRuntime(NetworkConfig(**SMALL))
        runtime.session.diverged = True
        with pytest.raises(CommandError):
            runtime.handle({"cmd": "step"})


class TestHeadlessEquivalence:
    def test_protocol_history_matches_direct_training(self, client):
        direct = TrainingSession.create(NetworkConfig(**SMALL))
        expected = []
        for _ in range(4):
            r = direct.run_epoch()
            expected.append([r.epoch, r.mean_train_loss, r.validation_loss])
        with client.websocket_connect("/ws") as ws:
            ws.receive_json()
            for i in range(4):
                snap = command(ws, i + 1, cmd="step")
            assert snap["body"]["loss_history"] == expected
