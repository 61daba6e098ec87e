"""FastAPI service: one isolated training session per WebSocket connection,
plus static serving of the built UI bundle."""

from __future__ import annotations

import asyncio
import json
import time
from pathlib import Path

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from ..training import NetworkConfig
from .protocol import PROTOCOL_VERSION, ErrorBody, HelloBody
from .runtime import CommandError, SessionRuntime

DEFAULT_UI_DIR = Path(__file__).resolve().parents[3] / "frontend" / "dist"


def create_app(session_defaults=None, ui_dir=None):
    app = FastAPI(title="rnnlab")
    defaults = session_defaults or {}

    @app.get("/healthz")
    def healthz():
        return {"status": "ok", "protocol_version": PROTOCOL_VERSION}

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket):
        await ws.accept()
        runtime = SessionRuntime(NetworkConfig(**defaults))
        lock = asyncio.Lock()
        seq = 0

        async def send(type_, body):
            nonlocal seq
            seq += 1
            await ws.send_text(
                json.dumps({"type": type_, "seq": seq, "body": body}, allow_nan=False)
            )

        await send(
            "hello",
            HelloBody(
                session_id=runtime.session_id,
                default_config=runtime.session.config.to_dict(),
            ).model_dump(),
        )

        async def play_loop():
            # drives plan advancement while playing; snapshots per micro-step in
            # cell mode, per phase boundary in overview mode
            prev_phase = None
            while True:
                await asyncio.sleep(0.05)
                async with lock:
                    n = runtime.pacer.due(time.monotonic())
                    for _ in range(n):
                        try:
                            event = runtime.advance_one()
                        except CommandError:
                            runtime.pacer.pause()
                            break
                        boundary = event.phase != prev_phase or event.detail == "epoch_done"
                        prev_phase = event.phase
                        if runtime.view.mode == "cell" or boundary:
                            await send("snapshot", runtime.snapshot().model_dump())

        player = asyncio.create_task(play_loop())
        try:
            while True:
                raw = await ws.receive_text()
                try:
                    msg = json.loads(raw)
                except json.JSONDecodeError as exc:
                    await send("error", ErrorBody(message=f"invalid JSON: {exc}").model_dump())
                    continue
                if not isinstance(msg, dict) or msg.get("type") != "command":
                    await send(
                        "error",
                        ErrorBody(message="expected a command envelope").model_dump(),
                    )
                    continue
                body = msg.get("body") or {}
                async with lock:
                    try:
                        snapshots = runtime.handle(body)
                    except CommandError as exc:
                        await send(
                            "error",
                            ErrorBody(message=str(exc), command=body.get("cmd")).model_dump(),
                        )
                        continue
                    for snap in snapshots:
                        await send("snapshot", snap.model_dump())
        except WebSocketDisconnect:
            pass
        finally:
            player.cancel()

    bundle = Path(ui_dir) if ui_dir else DEFAULT_UI_DIR
    if bundle.is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(bundle), html=True), name="ui")

    return app
