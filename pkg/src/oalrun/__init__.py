"""Executable class models: fuse a class diagram with action-language
method bodies, interpret them over a live object graph, stream animation
traces, serve interactive stepping, and generate equivalent Python."""

__version__ = "0.1.0"

from .ingest import (  # noqa: F401
    FusedModel,
    MethodBundle,
    fuse,
    import_xmi,
    load_method_bundle,
    load_model_json,
    save_model_json,
)
from .model import (  # noqa: F401
    ClassModel,
    default_attribute_value,
    resolve_method,
    validate_model,
)
from .runtime import (  # noqa: F401
    ExecSession,
    run_to_completion,
    start_session,
    step_command,
)
from .snapshot import Snapshot, snapshot_to_json  # noqa: F401
from .trace import check_trace, replay, serialize_event, serialize_trace  # noqa: F401
from .codegen import generate_program, sanitize_identifier, topo_order_classes  # noqa: F401
