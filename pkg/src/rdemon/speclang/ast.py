"""AST for the stream-specification language.

A specification is a flat list of input streams, output streams, and
triggers.  Expressions are a small tree: literals, stream references,
arithmetic/comparison/boolean operators, sliding-window aggregations,
default fallbacks, and conditionals.

Nodes are frozen dataclasses, so structural equality and hashing come for
free; the typechecker keys per-node metadata by value, which is safe
because structurally identical expressions always carry identical types.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass


class ValueType(enum.Enum):
    FLOAT64 = "Float64"
    BOOL = "Bool"

    def __str__(self) -> str:
        return self.value


class BinOp(enum.Enum):
    ADD = "+"
    SUB = "-"
    MUL = "*"
    DIV = "/"
    LT = "<"
    LE = "<="
    GT = ">"
    GE = ">="
    EQ = "=="
    NE = "!="
    AND = "∧"
    OR = "∨"

    @property
    def is_arithmetic(self) -> bool:
        return self in (BinOp.ADD, BinOp.SUB, BinOp.MUL, BinOp.DIV)

    @property
    def is_comparison(self) -> bool:
        return self in (BinOp.LT, BinOp.LE, BinOp.GT, BinOp.GE)

    @property
    def is_equality(self) -> bool:
        return self in (BinOp.EQ, BinOp.NE)

    @property
    def is_logical(self) -> bool:
        return self in (BinOp.AND, BinOp.OR)


class UnOp(enum.Enum):
    NEG = "-"
    NOT = "!"


class AggKind(enum.Enum):
    AVG = "avg"
    SUM = "sum"
    COUNT = "count"
    MIN = "min"
    MAX = "max"
    INTEGRAL = "integral"
    PCTL = "pctl"


@dataclass(frozen=True)
class AggFunc:
    """Aggregation function tag; ``percentile`` is set for pctl only."""

    kind: AggKind
    percentile: float | None = None

    def __str__(self) -> str:
        if self.kind is AggKind.PCTL:
            return f"pctl({fmt_num(self.percentile)})"
        return self.kind.value


class Expr:
    """Base class for expression nodes."""

    __slots__ = ()


@dataclass(frozen=True)
class Literal(Expr):
    value: float | bool

    @property
    def type(self) -> ValueType:
        return ValueType.BOOL if isinstance(self.value, bool) else ValueType.FLOAT64


@dataclass(frozen=True)
class StreamRef(Expr):
    name: str


@dataclass(frozen=True)
class Unary(Expr):
    op: UnOp
    operand: Expr


@dataclass(frozen=True)
class Binary(Expr):
    op: BinOp
    left: Expr
    right: Expr


@dataclass(frozen=True)
class WindowExpr(Expr):
    """``target.aggregate(over: duration, using: func)``"""

    target: Expr
    duration_s: float
    func: AggFunc


@dataclass(frozen=True)
class Default(Expr):
    """``operand.defaults(to: fallback)``"""

    operand: Expr
    fallback: Expr


@dataclass(frozen=True)
class IfThenElse(Expr):
    cond: Expr
    then: Expr
    orelse: Expr


@dataclass(frozen=True)
class InputDecl:
    name: str
    ty: ValueType


@dataclass(frozen=True)
class OutputDecl:
    name: str
    body: Expr
    ty: ValueType | None = None
    rate_hz: float | None = None
    filter: Expr | None = None


@dataclass(frozen=True)
class TriggerDecl:
    condition: Expr
    message: str | None = None


@dataclass(frozen=True)
class Specification:
    inputs: tuple[InputDecl, ...] = ()
    outputs: tuple[OutputDecl, ...] = ()
    triggers: tuple[TriggerDecl, ...] = ()

    def stream_names(self) -> list[str]:
        return [d.name for d in self.inputs] + [d.name for d in self.outputs]

    def input_map(self) -> dict[str, InputDecl]:
        return {d.name: d for d in self.inputs}

    def output_map(self) -> dict[str, OutputDecl]:
        return {d.name: d for d in self.outputs}


def fmt_num(x: float) -> str:
    """Format a float the way specification text writes it (``7200``, ``0.136``)."""
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def walk(expr: Expr):
    """Yield every node of an expression tree, preorder."""
    yield expr
    if isinstance(expr, Unary):
        yield from walk(expr.operand)
    elif isinstance(expr, Binary):
        yield from walk(expr.left)
        yield from walk(expr.right)
    elif isinstance(expr, WindowExpr):
        yield from walk(expr.target)
    elif isinstance(expr, Default):
        yield from walk(expr.operand)
        yield from walk(expr.fallback)
    elif isinstance(expr, IfThenElse):
        yield from walk(expr.cond)
        yield from walk(expr.then)
        yield from walk(expr.orelse)


def referenced_streams(expr: Expr) -> set[str]:
    """All stream names appearing anywhere in ``expr`` (window targets included)."""
    return {n.name for n in walk(expr) if isinstance(n, StreamRef)}


__all__ = [
    "AggFunc",
    "AggKind",
    "Binary",
    "BinOp",
    "Default",
    "Expr",
    "IfThenElse",
    "InputDecl",
    "Literal",
    "OutputDecl",
    "Specification",
    "StreamRef",
    "TriggerDecl",
    "Unary",
    "UnOp",
    "ValueType",
    "WindowExpr",
    "fmt_num",
    "referenced_streams",
    "walk",
]
