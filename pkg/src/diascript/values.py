"""Runtime value model and lexical environments.

Values are plain Python objects: float, str, bool, None, list, plus the
classes below. Object field iteration follows insertion order so repeated
executions of the same program are structurally identical.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Callable

from .source import format_number

if TYPE_CHECKING:
    from .nodes import Node


class DslObject:
    """Ordered string-to-value map; the assignment target of scope functions."""

    __slots__ = ("fields",)

    def __init__(self, fields: dict | None = None):
        self.fields: dict[str, object] = dict(fields or {})

    def set_field(self, name: str, value: object) -> None:
        self.fields[name] = value

    def get_field(self, name: str) -> object:
        return self.fields.get(name)

    def __repr__(self) -> str:
        return f"DslObject({self.fields!r})"


@dataclass(frozen=True)
class ScriptFunction:
    """User function: parameter list (None = implicit ``it``), body, closure."""

    params: tuple[str, ...] | None
    body: tuple["Node", ...]
    env: "Environment"
    name: str = "<function>"


@dataclass(frozen=True)
class NativeFunction:
    name: str
    fn: Callable


class Environment:
    """Binding frame with lexical parent and optional assignment target.

    Lookup walks the parent chain. Assignment rebinds the nearest frame that
    already defines the name; otherwise it writes a field of the nearest
    assignment target on the chain; otherwise it defines locally.
    """

    __slots__ = ("bindings", "parent", "assign_target")

    def __init__(self, parent: "Environment | None" = None, assign_target: DslObject | None = None):
        self.bindings: dict[str, object] = {}
        self.parent = parent
        self.assign_target = assign_target

    def lookup(self, name: str):
        env = self
        while env is not None:
            if name in env.bindings:
                return True, env.bindings[name]
            env = env.parent
        return False, None

    def define(self, name: str, value: object) -> None:
        self.bindings[name] = value

    def defines_locally(self, name: str) -> bool:
        return name in self.bindings

    def assign(self, name: str, value: object) -> None:
        env = self
        while env is not None:
            if name in env.bindings:
                env.bindings[name] = value
                return
            env = env.parent
        env = self
        while env is not None:
            if env.assign_target is not None:
                env.assign_target.set_field(name, value)
                return
            env = env.parent
        self.bindings[name] = value


def type_name(value: object) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "boolean"
    if isinstance(value, float):
        return "number"
    if isinstance(value, str):
        return "string"
    if isinstance(value, list):
        return "list"
    if isinstance(value, DslObject):
        return "object"
    if isinstance(value, (ScriptFunction, NativeFunction)):
        return "function"
    return type(value).__name__


def to_display_string(value: object) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format_number(value)
    if isinstance(value, str):
        return value
    if isinstance(value, list):
        return "[" + ", ".join(to_display_string(v) for v in value) + "]"
    if isinstance(value, DslObject):
        inner = ", ".join(f"{k} = {to_display_string(v)}" for k, v in value.fields.items())
        return "{" + inner + "}"
    if isinstance(value, (ScriptFunction, NativeFunction)):
        return f"<function {getattr(value, 'name', '?')}>"
    return str(value)


def values_equal(a: object, b: object) -> bool:
    """Structural equality: deep for lists and objects, identity for the rest."""
    if isinstance(a, bool) or isinstance(b, bool):
        return a is b
    if isinstance(a, float) and isinstance(b, float):
        return a == b
    if isinstance(a, str) and isinstance(b, str):
        return a == b
    if a is None or b is None:
        return a is b
    if isinstance(a, list) and isinstance(b, list):
        return len(a) == len(b) and all(values_equal(x, y) for x, y in zip(a, b))
    if isinstance(a, DslObject) and isinstance(b, DslObject):
        if list(a.fields) != list(b.fields):
            return False
        return all(values_equal(v, b.fields[k]) for k, v in a.fields.items())
    return a is b
