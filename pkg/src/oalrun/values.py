"""Runtime value model shared by the interpreter, trace and code generator.

Values are represented with native Python types where they line up
(``int``, ``float``, ``bool``, ``str``) plus two wrapper types:

* :class:`Handle` — a reference to an object instance by id, or the null
  handle (``Handle(None)``).  The id may be stale (instance deleted); the
  interpreter raises on dereference, not on mere possession.
* :class:`InstanceSet` — an immutable, duplicate-free, ascending-sorted
  collection of instance ids, produced by ``select many``.

``VOID`` is the absence of a value (a method that returned nothing).  It is
not a first-class value: storing or operating on it is a type error in the
interpreter, and it serializes as JSON ``null``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Optional, Tuple


@dataclass(frozen=True)
class Handle:
    """Reference to an object instance, or the null handle when id is None."""

    id: Optional[int]

    def is_null(self) -> bool:
        return self.id is None


NULL_HANDLE = Handle(None)


class InstanceSet:
    """Duplicate-free set of instance ids, kept sorted ascending."""

    __slots__ = ("ids",)

    def __init__(self, ids=()):
        self.ids: Tuple[int, ...] = tuple(sorted(set(ids)))

    def __len__(self) -> int:
        return len(self.ids)

    def __iter__(self):
        return iter(self.ids)

    def __eq__(self, other) -> bool:
        return isinstance(other, InstanceSet) and self.ids == other.ids

    def __hash__(self) -> int:
        return hash(self.ids)

    def __repr__(self) -> str:
        return f"InstanceSet({list(self.ids)})"


class _Void:
    """Singleton marker for 'no value returned'."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "VOID"


VOID = _Void()

#: Primitive type names accepted in attribute/parameter declarations.
PRIMITIVE_TYPES = ("Integer", "Real", "Boolean", "String")

Value = Any  # int | float | bool | str | Handle | InstanceSet


def is_value(v) -> bool:
    return isinstance(v, (bool, int, float, str, Handle, InstanceSet))


def default_for_type(type_name: str) -> Value:
    """Default a freshly created attribute of the given declared type.

    Integer -> 0, Real -> 0.0, Boolean -> False, String -> "", any class
    type (instance handle) -> the null handle.
    """
    if type_name == "Integer":
        return 0
    if type_name == "Real":
        return 0.0
    if type_name == "Boolean":
        return False
    if type_name == "String":
        return ""
    return NULL_HANDLE


def type_name_of(v: Value) -> str:
    """Human-readable kind name used in runtime error messages."""
    if isinstance(v, bool):
        return "Boolean"
    if isinstance(v, int):
        return "Integer"
    if isinstance(v, float):
        return "Real"
    if isinstance(v, str):
        return "String"
    if isinstance(v, Handle):
        return "InstanceHandle"
    if isinstance(v, InstanceSet):
        return "InstanceSet"
    if v is VOID:
        return "Void"
    return type(v).__name__


def to_tagged(v: Value):
    """Encode a value as its tagged JSON form.

    ``{"t":"int","v":3}``, ``{"t":"real","v":1.5}``, ``{"t":"str","v":"x"}``,
    ``{"t":"bool","v":true}``, ``{"t":"handle","v":4|null}``,
    ``{"t":"set","v":[1,2]}``.  VOID maps to plain ``None`` (JSON null).
    """
    if v is VOID:
        return None
    if isinstance(v, bool):
        return {"t": "bool", "v": v}
    if isinstance(v, int):
        return {"t": "int", "v": v}
    if isinstance(v, float):
        return {"t": "real", "v": v}
    if isinstance(v, str):
        return {"t": "str", "v": v}
    if isinstance(v, Handle):
        return {"t": "handle", "v": v.id}
    if isinstance(v, InstanceSet):
        return {"t": "set", "v": list(v.ids)}
    raise TypeError(f"not a runtime value: {v!r}")


def from_tagged(obj) -> Value:
    """Decode the tagged JSON form back into a runtime value.

    ``None`` decodes to VOID (the inverse of :func:`to_tagged`).
    Raises ValueError on malformed input.
    """
    if obj is None:
        return VOID
    if not isinstance(obj, dict) or "t" not in obj or "v" not in obj:
        raise ValueError(f"malformed tagged value: {obj!r}")
    tag, raw = obj["t"], obj["v"]
    if tag == "bool":
        if not isinstance(raw, bool):
            raise ValueError(f"bool value expected: {raw!r}")
        return raw
    if tag == "int":
        if not isinstance(raw, int) or isinstance(raw, bool):
            raise ValueError(f"int value expected: {raw!r}")
        return raw
    if tag == "real":
        if isinstance(raw, bool) or not isinstance(raw, (int, float)):
            raise ValueError(f"real value expected: {raw!r}")
        return float(raw)
    if tag == "str":
        if not isinstance(raw, str):
            raise ValueError(f"str value expected: {raw!r}")
        return raw
    if tag == "handle":
        if raw is not None and (not isinstance(raw, int) or isinstance(raw, bool)):
            raise ValueError(f"handle value expected: {raw!r}")
        return Handle(raw)
    if tag == "set":
        if not isinstance(raw, list) or not all(
            isinstance(i, int) and not isinstance(i, bool) for i in raw
        ):
            raise ValueError(f"set value expected: {raw!r}")
        return InstanceSet(raw)
    raise ValueError(f"unknown value tag: {tag!r}")
