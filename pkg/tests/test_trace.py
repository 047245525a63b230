import json

from hypothesis import given, settings
from hypothesis import strategies as st

from oalrun.runtime import run_to_completion, start_session
from oalrun.snapshot import snapshot_to_json
from oalrun.trace import (
    TraceEvent,
    check_trace,
    make_event,
    parse_event_line,
    parse_trace,
    replay,
    serialize_event,
    serialize_trace,
)
from oalrun.values import Handle, InstanceSet, to_tagged


def test_serialize_instance_created_key_order():
    e = make_event(2, "instance_created", **{"class": "Ranger", "id": 1})
    assert serialize_event(e) == '{"seq":2,"type":"instance_created","class":"Ranger","id":1}'


def test_serialize_string_escaping():
    e = make_event(5, "attribute_set", attr="s", id=1, value=to_tagged('a"b'))
    line = serialize_event(e)
    assert '"value":{"t":"str","v":"a\\"b"}' in line


def test_serialize_void_return():
    e = make_event(9, "method_return", value=None)
    assert serialize_event(e) == '{"seq":9,"type":"method_return","value":null}'


def test_serialize_real_shortest_form():
    e = make_event(1, "method_return", value=to_tagged(1.5))
    assert '"v":1.5' in serialize_event(e)
    e = make_event(1, "method_return", value=to_tagged(0.1))
    assert '"v":0.1' in serialize_event(e)


def test_payload_keys_alphabetical():
    e = make_event(
        3,
        "command",
        line=4,
        col_start=0,
        col_end=9,
        method="Run",
        **{"class": "Main"},
    )
    obj = json.loads(serialize_event(e))
    assert list(obj.keys()) == ["seq", "type", "class", "col_end", "col_start", "line", "method"]


def _minimal_trace():
    return [
        make_event(1, "run_started", args=[], entry="Main.Run"),
        make_event(
            2, "command", **{"class": "Main"}, col_end=7, col_start=0, line=1, method="Run"
        ),
        make_event(3, "run_finished", status="finished"),
    ]


def test_check_minimal_valid_trace():
    assert check_trace(_minimal_trace()) == []


def test_check_unbalanced_return():
    events = [
        make_event(1, "run_started", args=[], entry="M.R"),
        make_event(2, "command", **{"class": "M"}, col_end=1, col_start=0, line=1, method="R"),
        make_event(3, "method_return", value=None),
        make_event(4, "run_finished", status="finished"),
    ]
    assert any("unbalanced" in v.reason for v in check_trace(events))


def test_check_unknown_instance():
    events = [
        make_event(1, "run_started", args=[], entry="M.R"),
        make_event(2, "command", **{"class": "M"}, col_end=1, col_start=0, line=1, method="R"),
        make_event(3, "attribute_set", attr="x", id=7, value=to_tagged(1)),
        make_event(4, "run_finished", status="finished"),
    ]
    assert any("unknown instance 7" in v.reason for v in check_trace(events))


def test_check_sequence_gap():
    events = _minimal_trace()
    events[2] = make_event(9, "run_finished", status="finished")
    assert any("sequence gap" in v.reason for v in check_trace(events))


def test_check_framing():
    events = _minimal_trace()[:2]
    assert any("run_finished or error" in v.reason for v in check_trace(events))
    events = _minimal_trace()[1:]
    assert any("run_started" in v.reason for v in check_trace(events))


def test_check_use_after_delete():
    events = [
        make_event(1, "run_started", args=[], entry="M.R"),
        make_event(2, "command", **{"class": "M"}, col_end=1, col_start=0, line=1, method="R"),
        make_event(3, "instance_created", **{"class": "A", "id": 1}),
        make_event(4, "instance_deleted", cascaded=False, id=1),
        make_event(5, "attribute_set", attr="x", id=1, value=to_tagged(1)),
        make_event(6, "run_finished", status="finished"),
    ]
    assert any("already deleted" in v.reason for v in check_trace(events))


def test_check_state_change_before_command():
    events = [
        make_event(1, "run_started", args=[], entry="M.R"),
        make_event(2, "instance_created", **{"class": "A", "id": 1}),
        make_event(3, "method_call", callee_id=1, caller_id=None, **{"class": "A"}, method="R", static=False),
        make_event(4, "link_created", a=1, b=1, multiplicity_warning=False, rel="R1"),
        make_event(5, "command", **{"class": "A"}, col_end=1, col_start=0, line=1, method="R"),
        make_event(6, "method_return", value=None),
        make_event(7, "run_finished", status="finished"),
    ]
    violations = check_trace(events)
    # prologue instance_created/method_call are fine; the link_created is not
    assert len(violations) == 1
    assert "link_created before any command" in violations[0].reason


def test_check_error_terminated_trace_allows_open_calls():
    events = [
        make_event(1, "run_started", args=[], entry="M.R"),
        make_event(2, "method_call", callee_id=None, caller_id=None, **{"class": "M"}, method="R", static=True),
        make_event(3, "command", **{"class": "M"}, col_end=1, col_start=0, line=1, method="R"),
        make_event(4, "error", kind="division-by-zero", line=1, message="division by zero"),
    ]
    assert check_trace(events) == []


_values = st.one_of(
    st.integers(min_value=-(10**12), max_value=10**12),
    st.floats(allow_nan=False, allow_infinity=False),
    st.text(max_size=20),
    st.booleans(),
    st.one_of(st.none(), st.integers(min_value=1, max_value=99)).map(Handle),
    st.lists(st.integers(min_value=1, max_value=99), max_size=5).map(InstanceSet),
)

_events = st.one_of(
    st.tuples(st.integers(1, 9), _values).map(
        lambda t: make_event(t[0], "attribute_set", attr="x", id=3, value=to_tagged(t[1]))
    ),
    _values.map(lambda v: make_event(1, "method_return", value=to_tagged(v))),
    st.tuples(st.text(max_size=10), st.integers(0, 99)).map(
        lambda t: make_event(
            4, "command", **{"class": t[0]}, col_end=t[1], col_start=0, line=1, method="m"
        )
    ),
    st.booleans().map(
        lambda b: make_event(2, "link_created", a=1, b=2, multiplicity_warning=b, rel="R1")
    ),
)


@given(_events)
@settings(max_examples=300, deadline=None)
def test_serialize_parse_lossless(event):
    line = serialize_event(event)
    back = parse_event_line(line)
    assert back == event
    assert serialize_event(back) == line


def test_runtime_traces_pass_check(corpus_fixture):
    name, fused, entry, meta = corpus_fixture
    session = start_session(fused, entry, [])
    run_to_completion(session)
    assert check_trace(session.events) == [], name


def test_replay_reproduces_final_snapshot(corpus_fixture):
    name, fused, entry, meta = corpus_fixture
    session = start_session(fused, entry, [])
    snapshot = run_to_completion(session)
    replayed = replay(fused.model, session.events)
    assert snapshot_to_json(replayed) == snapshot_to_json(snapshot), name


def test_serialize_trace_round_trips(corpus_fixture):
    name, fused, entry, meta = corpus_fixture
    session = start_session(fused, entry, [])
    run_to_completion(session)
    text = serialize_trace(session.events)
    assert not text.endswith("\n\n") and text.endswith("\n")
    assert parse_trace(text) == session.events
