"""Parser and typechecker for the stream-specification language."""

from .ast import (
    AggFunc,
    AggKind,
    Binary,
    BinOp,
    Default,
    Expr,
    IfThenElse,
    InputDecl,
    Literal,
    OutputDecl,
    Specification,
    StreamRef,
    TriggerDecl,
    Unary,
    UnOp,
    ValueType,
    WindowExpr,
)
from .errors import (
    CyclicDependencyError,
    ParseError,
    SpecError,
    SpecTypeError,
    UntimedWindowError,
)
from .parser import parse
from .printer import print_expr, print_spec
from .typecheck import StreamInfo, TypedSpecification, WindowBinding, typecheck

__all__ = [
    "AggFunc",
    "AggKind",
    "Binary",
    "BinOp",
    "CyclicDependencyError",
    "Default",
    "Expr",
    "IfThenElse",
    "InputDecl",
    "Literal",
    "OutputDecl",
    "ParseError",
    "Specification",
    "SpecError",
    "SpecTypeError",
    "StreamInfo",
    "StreamRef",
    "TriggerDecl",
    "TypedSpecification",
    "Unary",
    "UnOp",
    "UntimedWindowError",
    "ValueType",
    "WindowBinding",
    "WindowExpr",
    "parse",
    "print_expr",
    "print_spec",
    "typecheck",
]
