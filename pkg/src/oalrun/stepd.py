"""Local stepping service: session control plus event streaming.

One fused model is served to one client at a time.  Requests and replies
are single-line JSON frames; trace events are pushed as separate
``{"event": ...}`` frames using exactly the batch trace serialization, so
a full start+continue run streams byte-identical lines to the trace file
the CLI would write for the same inputs.

Reply ordering: `start` acknowledges first and then pushes the session
prologue events; `step`/`continue` push the events they caused and reply
afterwards as the acknowledgement.  `continue` is interruptible only at
command boundaries, and only over the WebSocket transport (stdio is
strictly sequential).
"""

from __future__ import annotations

import asyncio
import json
import re
import sys
from typing import List, Optional, Tuple

from .ingest import FusedModel, model_to_dict
from .runtime import (
    DEFAULT_STEP_BUDGET,
    ExecSession,
    StartError,
    run_to_completion,
    start_session,
    step_command,
)
from .snapshot import snapshot_to_dict
from .trace import serialize_event
from .values import from_tagged

_ENTRY_RE = re.compile(r"([A-Za-z_][A-Za-z0-9_]*)\.([A-Za-z_][A-Za-z0-9_]*)\Z")


def _reply(req_id, ok: bool, data=None, error=None) -> str:
    obj = {"id": req_id, "ok": ok}
    if ok:
        if data is not None:
            obj["data"] = data
    else:
        obj["error"] = error
    return json.dumps(obj, separators=(",", ":"))


def _error_reply(req_id, kind: str, message: str) -> str:
    return _reply(req_id, False, error={"kind": kind, "message": message})


def event_frame(event) -> str:
    """Wrap one serialized trace event as a push frame.

    Built by string concatenation so the embedded event bytes are exactly
    the batch trace line.
    """
    return '{"event":' + serialize_event(event) + "}"


class StepServer:
    """Transport-independent command dispatcher for one client."""

    def __init__(self, fused: FusedModel, step_budget: int = DEFAULT_STEP_BUDGET):
        self.fused = fused
        self.step_budget = step_budget
        self.session: Optional[ExecSession] = None
        self._cursor = 0  # events already pushed

    # -- helpers -------------------------------------------------------------

    def _drain_events(self) -> List[str]:
        if self.session is None:
            return []
        fresh = self.session.events[self._cursor :]
        self._cursor = len(self.session.events)
        return [event_frame(e) for e in fresh]

    def _session_live(self) -> bool:
        return self.session is not None and self.session.status in (
            "ready",
            "running",
            "paused",
        )

    # -- commands ------------------------------------------------------------

    def handle(self, raw: str) -> Tuple[str, List[str], bool]:
        """Dispatch one request line.

        Returns (reply frame, event frames, keep_running).  `continue` is
        executed to completion here; transports needing interruptible
        continues drive step_once themselves.
        """
        try:
            req = json.loads(raw)
        except json.JSONDecodeError as err:
            return _error_reply(None, "malformed-command", str(err)), [], True
        if not isinstance(req, dict) or "cmd" not in req:
            return (
                _error_reply(
                    req.get("id") if isinstance(req, dict) else None,
                    "malformed-command",
                    "request must be an object with a cmd field",
                ),
                [],
                True,
            )
        req_id = req.get("id")
        cmd = req.get("cmd")

        if cmd == "start":
            return (*self.cmd_start(req_id, req), True)
        if cmd == "step":
            return (*self.cmd_step(req_id), True)
        if cmd == "continue":
            reply, events = self.cmd_continue(req_id)
            return reply, events, True
        if cmd == "pause":
            # Between commands there is nothing to pause; the WebSocket
            # transport intercepts pause during an active continue.
            if self.session is None:
                return _error_reply(req_id, "no-session", "no active session"), [], True
            if self.session.status == "running":
                self.session.status = "paused"
            return _reply(req_id, True, {"outcome": self.session.status}), [], True
        if cmd == "state":
            if self.session is None:
                return _error_reply(req_id, "no-session", "no active session"), [], True
            return (
                _reply(req_id, True, snapshot_to_dict(self.session.snapshot())),
                [],
                True,
            )
        if cmd == "model":
            data = model_to_dict(self.fused.model)
            data["entryPoints"] = [
                f"{cls}.{meth}" for cls, meth in self.fused.callable_entries()
            ]
            return _reply(req_id, True, data), [], True
        if cmd == "stop":
            self.session = None
            self._cursor = 0
            return _reply(req_id, True, {"outcome": "stopped"}), [], True
        return (
            _error_reply(req_id, "malformed-command", f"unknown command {cmd!r}"),
            [],
            True,
        )

    def cmd_start(self, req_id, req: dict) -> Tuple[str, List[str]]:
        if self._session_live():
            return (
                _error_reply(req_id, "session-already-active", "stop the session first"),
                [],
            )
        entry = req.get("entry")
        if not isinstance(entry, str) or not _ENTRY_RE.match(entry):
            return (
                _error_reply(
                    req_id, "malformed-command", "start needs entry: \"Class.Method\""
                ),
                [],
            )
        raw_args = req.get("args", [])
        if not isinstance(raw_args, list):
            return (
                _error_reply(req_id, "malformed-command", "args must be an array"),
                [],
            )
        try:
            args = [from_tagged(a) for a in raw_args]
        except ValueError as err:
            return _error_reply(req_id, "malformed-command", str(err)), []
        cls, meth = entry.split(".")
        try:
            self.session = start_session(
                self.fused, (cls, meth), args, step_budget=self.step_budget
            )
        except StartError as err:
            self.session = None
            return _error_reply(req_id, "bad-entry", str(err)), []
        self._cursor = 0
        return _reply(req_id, True, {"outcome": "started"}), self._drain_events()

    def cmd_step(self, req_id) -> Tuple[str, List[str]]:
        if self.session is None:
            return _error_reply(req_id, "no-session", "no active session"), []
        if not self._session_live():
            return _reply(req_id, True, {"outcome": self.session.status}), []
        outcome = step_command(self.session)
        events = self._drain_events()
        return _reply(req_id, True, {"outcome": outcome.kind}), events

    def step_once(self) -> Tuple[str, List[str]]:
        """One command for transports driving continue themselves."""
        outcome = step_command(self.session)
        return outcome.kind, self._drain_events()

    def cmd_continue(self, req_id) -> Tuple[str, List[str]]:
        if self.session is None:
            return _error_reply(req_id, "no-session", "no active session"), []
        if not self._session_live():
            return _reply(req_id, True, {"outcome": self.session.status}), []
        run_to_completion(self.session)
        events = self._drain_events()
        return _reply(req_id, True, {"outcome": self.session.status}), events


def serve_stdio(fused: FusedModel, infile=None, outfile=None) -> int:
    """Newline-delimited JSON over stdin/stdout; used by scripted drivers."""
    infile = infile if infile is not None else sys.stdin
    outfile = outfile if outfile is not None else sys.stdout
    server = StepServer(fused)
    for line in infile:
        line = line.strip()
        if not line:
            continue
        reply, events, keep = server.handle(line)
        if json.loads(reply).get("ok") and '"outcome":"started"' in reply:
            # start acknowledges before its prologue events
            outfile.write(reply + "\n")
            for frame in events:
                outfile.write(frame + "\n")
        else:
            for frame in events:
                outfile.write(frame + "\n")
            outfile.write(reply + "\n")
        outfile.flush()
        if not keep:
            break
    return 0


async def _ws_handler(websocket, fused: FusedModel, active: set):
    if active:
        await websocket.send(
            _error_reply(None, "busy", "another client is connected")
        )
        await websocket.close()
        return
    active.add(websocket)
    server = StepServer(fused)
    inbox: asyncio.Queue = asyncio.Queue()

    async def reader():
        try:
            async for message in websocket:
                await inbox.put(message)
        except Exception:
            pass
        await inbox.put(None)

    reader_task = asyncio.create_task(reader())
    try:
        while True:
            raw = await inbox.get()
            if raw is None:
                break
            req = _safe_parse(raw)
            if req is not None and req.get("cmd") == "continue" and server._session_live():
                req_id = req.get("id")
                outcome = None
                deferred_stop = None
                while server._session_live():
                    kind, events = server.step_once()
                    for frame in events:
                        await websocket.send(frame)
                    if kind != "progressed":
                        break
                    # pause/stop may interject at command boundaries
                    try:
                        queued = inbox.get_nowait()
                    except asyncio.QueueEmpty:
                        continue
                    if queued is None:
                        await inbox.put(None)
                        break
                    qreq = _safe_parse(queued)
                    qcmd = qreq.get("cmd") if qreq else None
                    if qcmd == "pause":
                        server.session.status = "paused"
                        await websocket.send(
                            _reply(qreq.get("id"), True, {"outcome": "paused"})
                        )
                        outcome = "paused"
                        break
                    if qcmd == "stop":
                        outcome = "stopped"
                        deferred_stop = queued
                        break
                    await inbox.put(queued)  # defer anything else
                if outcome is None:
                    outcome = server.session.status if server.session else "stopped"
                await websocket.send(_reply(req_id, True, {"outcome": outcome}))
                if deferred_stop is not None:
                    reply, _, _ = server.handle(deferred_stop)
                    await websocket.send(reply)
                continue
            reply, events, _ = server.handle(raw)
            if '"outcome":"started"' in reply:
                await websocket.send(reply)
                for frame in events:
                    await websocket.send(frame)
            else:
                for frame in events:
                    await websocket.send(frame)
                await websocket.send(reply)
    finally:
        reader_task.cancel()
        active.discard(websocket)


def _safe_parse(raw) -> Optional[dict]:
    try:
        obj = json.loads(raw)
    except (TypeError, json.JSONDecodeError):
        return None
    return obj if isinstance(obj, dict) else None


async def serve_ws_async(fused: FusedModel, host: str, port: int):
    import websockets

    active: set = set()

    async def handler(websocket):
        await _ws_handler(websocket, fused, active)

    async with websockets.serve(handler, host, port):
        await asyncio.Future()  # run until cancelled


def serve(fused: FusedModel, port: int = 8765, host: str = "127.0.0.1", stdio: bool = False) -> int:
    """Run the stepping service until interrupted (or EOF in stdio mode)."""
    if stdio:
        return serve_stdio(fused)
    asyncio.run(serve_ws_async(fused, host, port))
    return 0
