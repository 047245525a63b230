"""Animation event vocabulary, JSONL serialization and trace verification.

Every observable step of an execution becomes one event; the stream is
both the animation feed and a replayable record: folding the state-change
events over an empty state reproduces the object heap at any point.
Serialization is deterministic — fixed key order (seq, type, payload keys
alphabetically), shortest-round-trip reals — so traces can be diffed and
golden-tested byte for byte.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Tuple

from .model import ClassModel, all_attributes
from .snapshot import Snapshot, SnapshotInstance
from .values import VOID, Value, default_for_type, from_tagged, to_tagged

EVENT_TYPES = (
    "run_started",
    "command",
    "method_call",
    "method_return",
    "instance_created",
    "instance_deleted",
    "attribute_set",
    "link_created",
    "link_removed",
    "error",
    "run_finished",
)

#: Event types that mutate or observe runtime state (everything but
#: run_started/run_finished/command/error).
STATE_CHANGE_TYPES = (
    "method_call",
    "method_return",
    "instance_created",
    "instance_deleted",
    "attribute_set",
    "link_created",
    "link_removed",
)

#: State-change events permitted before the first command: session start
#: creates the entry receiver and opens the entry call before any command
#: of the body has run.
PROLOGUE_TYPES = ("instance_created", "method_call")

_REQUIRED_KEYS = {
    "run_started": ("args", "entry"),
    "command": ("class", "col_end", "col_start", "line", "method"),
    "method_call": ("callee_id", "caller_id", "class", "method", "static"),
    "method_return": ("value",),
    "instance_created": ("class", "id"),
    "instance_deleted": ("cascaded", "id"),
    "attribute_set": ("attr", "id", "value"),
    "link_created": ("a", "b", "multiplicity_warning", "rel"),
    "link_removed": ("a", "b", "rel"),
    "error": ("kind", "line", "message"),
    "run_finished": ("status",),
}


@dataclass(frozen=True)
class TraceEvent:
    seq: int
    type: str
    payload: Dict[str, object] = field(default_factory=dict)

    def get(self, key: str, default=None):
        return self.payload.get(key, default)


def make_event(seq: int, type_: str, **payload) -> TraceEvent:
    if type_ not in EVENT_TYPES:
        raise ValueError(f"unknown event type {type_!r}")
    return TraceEvent(seq, type_, payload)


def serialize_event(e: TraceEvent) -> str:
    """Render one event as a single JSONL line (no trailing newline)."""
    obj = {"seq": e.seq, "type": e.type}
    for key in sorted(e.payload):
        obj[key] = e.payload[key]
    return json.dumps(obj, separators=(",", ":"))


def serialize_trace(events: Iterable[TraceEvent]) -> str:
    """Full trace file content: one event per line, trailing newline."""
    return "".join(serialize_event(e) + "\n" for e in events)


def parse_event_line(line: str) -> TraceEvent:
    obj = json.loads(line)
    if not isinstance(obj, dict) or "seq" not in obj or "type" not in obj:
        raise ValueError(f"not a trace event: {line!r}")
    payload = {k: v for k, v in obj.items() if k not in ("seq", "type")}
    return TraceEvent(obj["seq"], obj["type"], payload)


def parse_trace(text: str) -> List[TraceEvent]:
    return [parse_event_line(line) for line in text.splitlines() if line.strip()]


@dataclass(frozen=True)
class Violation:
    seq: int
    reason: str

    def __str__(self) -> str:
        return f"event {self.seq}: {self.reason}"


def check_trace(events: List[TraceEvent]) -> List[Violation]:
    """Verify trace well-formedness; an empty result means well-formed.

    Checks sequence contiguity, start/finish framing, balanced
    call/return nesting, instance liveness for every referenced id, and
    that state changes only happen under an executing command (allowing
    the session-start prologue of instance_created/method_call).
    """
    out: List[Violation] = []
    if not events:
        return [Violation(0, "empty trace")]

    for i, e in enumerate(events):
        if e.seq != i + 1:
            out.append(Violation(e.seq, f"sequence gap: expected {i + 1}"))
        if e.type not in EVENT_TYPES:
            out.append(Violation(e.seq, f"unknown event type {e.type!r}"))
            continue
        missing = [k for k in _REQUIRED_KEYS[e.type] if k not in e.payload]
        if missing:
            out.append(Violation(e.seq, f"{e.type} missing field(s) {missing}"))

    if events[0].type != "run_started":
        out.append(Violation(events[0].seq, "first event must be run_started"))
    last = events[-1]
    if last.type not in ("run_finished", "error"):
        out.append(Violation(last.seq, "last event must be run_finished or error"))

    depth = 0
    live: Dict[int, bool] = {}
    seen_command = False

    def check_live(e: TraceEvent, key: str):
        ident = e.get(key)
        if ident is None:
            return
        if not isinstance(ident, int) or isinstance(ident, bool):
            out.append(Violation(e.seq, f"{e.type}.{key} must be an instance id"))
            return
        if ident not in live:
            out.append(Violation(e.seq, f"unknown instance {ident}"))
        elif not live[ident]:
            out.append(Violation(e.seq, f"instance {ident} already deleted"))

    for i, e in enumerate(events):
        if e.type == "run_started" and i != 0:
            out.append(Violation(e.seq, "run_started not at start"))
        if e.type in ("run_finished", "error") and i != len(events) - 1:
            out.append(Violation(e.seq, f"{e.type} before end of trace"))

        if e.type == "command":
            seen_command = True
        elif e.type in STATE_CHANGE_TYPES and not seen_command:
            if e.type not in PROLOGUE_TYPES:
                out.append(
                    Violation(e.seq, f"{e.type} before any command event")
                )

        if e.type == "method_call":
            depth += 1
            check_live(e, "caller_id")
            check_live(e, "callee_id")
        elif e.type == "method_return":
            if depth == 0:
                out.append(Violation(e.seq, "unbalanced method_return"))
            else:
                depth -= 1
        elif e.type == "instance_created":
            ident = e.get("id")
            if isinstance(ident, int) and not isinstance(ident, bool):
                if ident in live:
                    out.append(Violation(e.seq, f"instance id {ident} reused"))
                live[ident] = True
        elif e.type == "instance_deleted":
            check_live(e, "id")
            ident = e.get("id")
            if isinstance(ident, int) and live.get(ident):
                live[ident] = False
        elif e.type == "attribute_set":
            check_live(e, "id")
        elif e.type in ("link_created", "link_removed"):
            check_live(e, "a")
            check_live(e, "b")

    if depth > 0 and last.type == "run_finished":
        out.append(Violation(last.seq, f"{depth} unclosed method_call(s)"))
    return out


def replay(model: ClassModel, events: Iterable[TraceEvent]) -> Snapshot:
    """Fold the state-change events over an empty state.

    This is the independent oracle for the interpreter: its snapshots must
    match the replayed state at every step, and it is also exactly what a
    rendering client does with the stream.
    """
    instances: Dict[int, SnapshotInstance] = {}
    links: List[Tuple[str, int, int]] = []
    status = "running"
    return_value: Value = VOID

    for e in events:
        if e.type == "instance_created":
            cls = e.get("class")
            attrs = {
                a.name: default_for_type(a.type) for a in all_attributes(model, cls)
            }
            instances[e.get("id")] = SnapshotInstance(e.get("id"), cls, attrs)
        elif e.type == "instance_deleted":
            instances.pop(e.get("id"), None)
        elif e.type == "attribute_set":
            inst = instances.get(e.get("id"))
            if inst is not None:
                inst.attrs[e.get("attr")] = from_tagged(e.get("value"))
        elif e.type == "link_created":
            triple = (e.get("rel"), e.get("a"), e.get("b"))
            if triple not in links:
                links.append(triple)
        elif e.type == "link_removed":
            triple = (e.get("rel"), e.get("a"), e.get("b"))
            if triple in links:
                links.remove(triple)
        elif e.type == "method_return":
            return_value = from_tagged(e.get("value"))
        elif e.type == "run_finished":
            status = e.get("status", "finished")
        elif e.type == "error":
            status = "failed"
            return_value = VOID

    if status == "failed":
        return_value = VOID
    return Snapshot(
        instances=list(instances.values()),
        links=links,
        status=status,
        return_value=return_value,
    )
