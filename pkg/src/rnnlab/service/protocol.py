"""Wire protocol models: JSON envelopes exchanged over the WebSocket.

One UTF-8 JSON document per message, {"type": ..., "seq": n, "body": {...}};
sequence numbers increase strictly per direction per connection."""

from __future__ import annotations

from typing import Any, Literal, Optional

from pydantic import BaseModel, Field

PROTOCOL_VERSION = "1"

COMMANDS = (
    "play",
    "pause",
    "step",
    "jump_phase",
    "reset",
    "set_param",
    "edit_arch",
    "select_task",
    "set_view",
    "set_pace",
)


class Envelope(BaseModel):
    type: Literal["command", "snapshot", "error", "hello"]
    seq: int
    body: dict


class CommandBody(BaseModel):
    cmd: str
    phase: Optional[str] = None
    name: Optional[str] = None
    value: Optional[Any] = None
    action: Optional[str] = None
    at: Optional[int] = None
    task: Optional[str] = None
    mode: Optional[str] = None
    layer: Optional[int] = None
    rate: Optional[float] = None


class ViewModel(BaseModel):
    mode: Literal["overview", "cell"]
    layer: Optional[int] = None


class StepEventModel(BaseModel):
    index: int
    phase: str
    detail: str
    layer: Optional[int] = None
    t: Optional[int] = None
    payload: Optional[Any] = None


class CellIntermediates(BaseModel):
    """Gate/candidate/state values of the focused layer at the current step."""

    layer: int
    t: int
    input_gate: Optional[list] = None
    forget_gate: Optional[list] = None
    output_gate: Optional[list] = None
    candidate: Optional[list] = None
    cell_state: Optional[list] = None
    activation: Optional[list] = None


class SnapshotBody(BaseModel):
    session_id: str
    epoch: int
    phase: str
    view: ViewModel
    config: dict
    loss_history: list
    validation: Optional[dict] = None
    current_step: Optional[StepEventModel] = None
    cell: Optional[CellIntermediates] = None
    grad_norms: Optional[list] = None
    diverged: bool = False


class HelloBody(BaseModel):
    protocol_version: str = PROTOCOL_VERSION
    session_id: str
    default_config: dict


class ErrorBody(BaseModel):
    message: str
    command: Optional[str] = None
