"""Canonical runtime-state snapshots.

A snapshot is the byte-comparable serialization of the object heap and
link store: instances sorted by id with attributes sorted by name, links
sorted by (relation number, a, b).  The generated Python programs embed a
dump routine that prints exactly this format, which is what makes
interpreter-vs-generated differential testing a byte comparison.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

from .values import VOID, Value, to_tagged


@dataclass
class SnapshotInstance:
    id: int
    cls: str
    attrs: Dict[str, Value] = field(default_factory=dict)


@dataclass
class Snapshot:
    instances: List[SnapshotInstance] = field(default_factory=list)
    links: List[Tuple[str, int, int]] = field(default_factory=list)
    status: str = "finished"
    return_value: Value = VOID


def link_sort_key(link: Tuple[str, int, int]):
    rel, a, b = link
    return (int(rel[1:]), a, b)


def snapshot_to_dict(s: Snapshot) -> dict:
    return {
        "instances": [
            {
                "id": inst.id,
                "class": inst.cls,
                "attrs": {k: to_tagged(inst.attrs[k]) for k in sorted(inst.attrs)},
            }
            for inst in sorted(s.instances, key=lambda i: i.id)
        ],
        "links": [
            {"rel": rel, "a": a, "b": b}
            for rel, a, b in sorted(s.links, key=link_sort_key)
        ],
        "status": s.status,
        "return_value": to_tagged(s.return_value),
    }


def snapshot_to_json(s: Snapshot) -> str:
    """One-line canonical JSON; identical inputs yield identical bytes."""
    return json.dumps(snapshot_to_dict(s), separators=(",", ":"))
