"""Syntax tree with byte spans on every node.

Every node records the exact source range it was parsed from, so graphical
interactions can be translated into local text edits. Parent spans always
contain child spans, and re-parsing the text of any expression node yields a
structurally identical node.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .source import Span


@dataclass(frozen=True)
class Node:
    span: Span

    @property
    def children(self) -> tuple[Node, ...]:
        return ()


@dataclass(frozen=True)
class NumberLit(Node):
    value: float


@dataclass(frozen=True)
class StringLit(Node):
    value: str


@dataclass(frozen=True)
class BoolLit(Node):
    value: bool


@dataclass(frozen=True)
class NullLit(Node):
    pass


@dataclass(frozen=True)
class Ident(Node):
    name: str


@dataclass(frozen=True)
class Assign(Node):
    """``target = value``; also used for named call arguments."""

    target: Node  # Ident or FieldAccess
    value: Node

    @property
    def children(self) -> tuple[Node, ...]:
        return (self.target, self.value)


@dataclass(frozen=True)
class Call(Node):
    """Call with positional args; named args appear as Assign(Ident, value)."""

    callee: Node
    args: tuple[Node, ...] = ()

    @property
    def children(self) -> tuple[Node, ...]:
        return (self.callee, *self.args)


@dataclass(frozen=True)
class InfixCall(Node):
    op: str
    left: Node
    right: Node

    @property
    def children(self) -> tuple[Node, ...]:
        return (self.left, self.right)


@dataclass(frozen=True)
class FunctionLit(Node):
    """``{ body }`` or ``{ (a, b) -> body }``.

    params is None for the implicit-``it`` form.
    """

    params: tuple[str, ...] | None
    body: tuple[Node, ...] = ()

    @property
    def children(self) -> tuple[Node, ...]:
        return self.body


@dataclass(frozen=True)
class ListLit(Node):
    items: tuple[Node, ...] = ()

    @property
    def children(self) -> tuple[Node, ...]:
        return self.items


@dataclass(frozen=True)
class FieldAccess(Node):
    obj: Node
    name: str

    @property
    def children(self) -> tuple[Node, ...]:
        return (self.obj,)


@dataclass(frozen=True)
class Program(Node):
    statements: tuple[Node, ...] = field(default=())

    @property
    def children(self) -> tuple[Node, ...]:
        return self.statements


def node_at(root: Node, offset: int) -> list[Node]:
    """Path from root to the deepest node whose span contains ``offset``.

    Sibling spans never overlap, so the walk is unambiguous. When no child
    contains the offset (whitespace between statements), the path ends at the
    current node; at minimum the root is returned.
    """
    path = [root]
    current = root
    while True:
        nxt = None
        for child in current.children:
            if child.span.contains(offset):
                nxt = child
                break
        if nxt is None:
            return path
        path.append(nxt)
        current = nxt


def walk(node: Node):
    """Pre-order traversal."""
    yield node
    for child in node.children:
        yield from walk(child)


def structurally_equal(a: Node, b: Node) -> bool:
    """Equality ignoring spans (used by segment re-parsability checks)."""
    if type(a) is not type(b):
        return False
    if isinstance(a, NumberLit):
        return a.value == b.value
    if isinstance(a, StringLit):
        return a.value == b.value
    if isinstance(a, BoolLit):
        return a.value == b.value
    if isinstance(a, Ident):
        return a.name == b.name
    if isinstance(a, InfixCall) and a.op != b.op:
        return False
    if isinstance(a, FieldAccess) and a.name != b.name:
        return False
    if isinstance(a, FunctionLit) and a.params != b.params:
        return False
    ac, bc = a.children, b.children
    if len(ac) != len(bc):
        return False
    return all(structurally_equal(x, y) for x, y in zip(ac, bc))
