"""Command-line entry point.

Subcommands: validate, import-xmi, run, gen, serve, report.  Standard
output carries only machine-readable results (the final snapshot JSON);
diagnostics and progress go to standard error.  Exit codes: 0 success,
1 validation/runtime failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path
from typing import List, Optional, Tuple

from .codegen import GenError, generate_program
from .ingest import (
    FuseFailure,
    FusedModel,
    IngestError,
    fuse,
    import_xmi,
    load_method_bundle,
    load_model_json,
    save_model_json,
)
from .runtime import DEFAULT_STEP_BUDGET, StartError, run_to_completion, start_session
from .snapshot import snapshot_to_json
from .stepd import serve
from .trace import serialize_trace
from .values import from_tagged

_ENTRY_RE = re.compile(r"([A-Za-z_][A-Za-z0-9_]*)\.([A-Za-z_][A-Za-z0-9_]*)\Z")


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return 1


def _parse_entry(spec: str) -> Tuple[str, str]:
    mo = _ENTRY_RE.match(spec)
    if not mo:
        raise ValueError(f"entry must look like Class.Method, got {spec!r}")
    return mo.group(1), mo.group(2)


def _load_model(path: Path, warnings: Optional[List[str]] = None):
    """Model files are sniffed: .xmi extension or XML content imports as
    XMI, anything else parses as model JSON."""
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".xmi" or text.lstrip().startswith("<"):
        return import_xmi(text, warnings)
    return load_model_json(text)


def _load_fused(model_path: str, methods_path: str) -> FusedModel:
    warnings: List[str] = []
    model = _load_model(Path(model_path), warnings)
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    bundle = load_method_bundle(Path(methods_path).read_text(encoding="utf-8"))
    fused = fuse(model, bundle)
    return fused


def _parse_args_json(raw: Optional[str]):
    if raw is None:
        return []
    doc = json.loads(raw)
    if not isinstance(doc, list):
        raise ValueError("--args must be a JSON array of tagged values")
    return [from_tagged(v) for v in doc]


def cmd_validate(ns) -> int:
    status = 0
    try:
        fused = _load_fused(ns.model, ns.methods)
    except FuseFailure as err:
        for cls, meth, diag in err.fused.parse_diagnostics:
            print(f"{cls}.{meth}: {diag}", file=sys.stderr)
        return _fail(str(err))
    except IngestError as err:
        if hasattr(err, "diagnostics"):
            for diag in err.diagnostics:
                print(str(diag), file=sys.stderr)
        return _fail(str(err))
    for cls, meth, diag in fused.parse_diagnostics:
        print(f"{cls}.{meth}: {diag}", file=sys.stderr)
        if diag.severity == "error":
            status = 1
    for cls, meth in fused.unbound:
        print(
            f"warning: {cls}.{meth} does not match any model method", file=sys.stderr
        )
    return status


def cmd_import_xmi(ns) -> int:
    warnings: List[str] = []
    try:
        model = import_xmi(Path(ns.input).read_text(encoding="utf-8"), warnings)
    except IngestError as err:
        return _fail(str(err))
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    Path(ns.output).write_text(save_model_json(model), encoding="utf-8")
    return 0


def _run_session(ns):
    fused = _load_fused(ns.model, ns.methods)
    entry = _parse_entry(ns.entry)
    args = _parse_args_json(ns.args)
    budget = ns.max_steps if ns.max_steps is not None else DEFAULT_STEP_BUDGET
    session = start_session(fused, entry, args, step_budget=budget)
    snapshot = run_to_completion(session)
    return fused, session, snapshot


def cmd_run(ns) -> int:
    try:
        _, session, snapshot = _run_session(ns)
    except (IngestError, StartError, ValueError, OSError) as err:
        return _fail(str(err))
    if ns.trace:
        Path(ns.trace).write_text(serialize_trace(session.events), encoding="utf-8")
    print(snapshot_to_json(snapshot))
    if snapshot.status != "finished":
        last = session.events[-1]
        print(
            f"error: run failed: {last.get('kind')}: {last.get('message')}",
            file=sys.stderr,
        )
        return 1
    return 0


def cmd_gen(ns) -> int:
    try:
        fused = _load_fused(ns.model, ns.methods)
        entry = _parse_entry(ns.entry) if ns.entry else None
        unit = generate_program(fused, entry)
    except (IngestError, GenError, ValueError, OSError) as err:
        return _fail(str(err))
    Path(ns.output).write_text(unit.source, encoding="utf-8")
    return 0


def cmd_serve(ns) -> int:
    try:
        fused = _load_fused(ns.model, ns.methods)
    except (IngestError, OSError) as err:
        return _fail(str(err))
    try:
        return serve(fused, port=ns.port, stdio=ns.stdio)
    except KeyboardInterrupt:
        return 0
    except BrokenPipeError:
        return 0  # downstream consumer closed; normal in pipelines
    except OSError as err:
        return _fail(f"cannot start service: {err}")


def cmd_report(ns) -> int:
    from . import report

    try:
        fused, session, snapshot = _run_session(ns)
    except (IngestError, StartError, ValueError, OSError) as err:
        return _fail(str(err))
    outdir = Path(ns.output)
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "trace.jsonl").write_text(
        serialize_trace(session.events), encoding="utf-8"
    )
    (outdir / "snapshot.json").write_text(
        snapshot_to_json(snapshot) + "\n", encoding="utf-8"
    )
    report.render_class_diagram(fused.model, outdir / "class_diagram.png")
    report.render_object_diagram(
        fused.model, snapshot, outdir / "object_diagram.png"
    )
    print(snapshot_to_json(snapshot))
    return 0 if snapshot.status == "finished" else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oalrun",
        description="Execute, trace, step and transpile class models scripted "
        "with an object action language.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a model and its method bundle")
    p.add_argument("model")
    p.add_argument("methods")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("import-xmi", help="convert an XMI 2.1 export to model JSON")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_import_xmi)

    p = sub.add_parser("run", help="execute an entry method to completion")
    p.add_argument("--model", required=True)
    p.add_argument("--methods", required=True)
    p.add_argument("--entry", required=True, help="Class.Method")
    p.add_argument("--args", help="JSON array of tagged argument values")
    p.add_argument("--trace", help="write the JSONL event trace to this file")
    p.add_argument("--max-steps", type=int, default=None)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("gen", help="generate the equivalent single-file Python program")
    p.add_argument("--model", required=True)
    p.add_argument("--methods", required=True)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--entry", help="Class.Method invoked by the main guard")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("serve", help="run the interactive stepping service")
    p.add_argument("--model", required=True)
    p.add_argument("--methods", required=True)
    p.add_argument("--port", type=int, default=8765)
    p.add_argument("--stdio", action="store_true", help="serve over stdin/stdout")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser(
        "report",
        help="run an entry and render trace, snapshot and diagram figures",
    )
    p.add_argument("--model", required=True)
    p.add_argument("--methods", required=True)
    p.add_argument("--entry", required=True, help="Class.Method")
    p.add_argument("--args", help="JSON array of tagged argument values")
    p.add_argument("--max-steps", type=int, default=None)
    p.add_argument("-o", "--output", required=True, help="output directory")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    return ns.func(ns)


if __name__ == "__main__":
    sys.exit(main())
