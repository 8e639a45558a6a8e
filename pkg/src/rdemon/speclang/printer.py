"""Pretty-printer producing source text that re-parses to the same AST."""

from __future__ import annotations

from .ast import (
    Binary,
    BinOp,
    Default,
    Expr,
    IfThenElse,
    Literal,
    OutputDecl,
    Specification,
    StreamRef,
    TriggerDecl,
    Unary,
    WindowExpr,
    fmt_num,
)

# precedence levels, loosest binding first
_LEVEL = {
    BinOp.OR: 1,
    BinOp.AND: 2,
    BinOp.LT: 3,
    BinOp.LE: 3,
    BinOp.GT: 3,
    BinOp.GE: 3,
    BinOp.EQ: 3,
    BinOp.NE: 3,
    BinOp.ADD: 4,
    BinOp.SUB: 4,
    BinOp.MUL: 5,
    BinOp.DIV: 5,
}
_UNARY_LEVEL = 6
_POSTFIX_LEVEL = 7


def print_expr(expr: Expr, parent_level: int = 0) -> str:
    if isinstance(expr, Literal):
        if isinstance(expr.value, bool):
            return "true" if expr.value else "false"
        return fmt_num(expr.value)
    if isinstance(expr, StreamRef):
        return expr.name
    if isinstance(expr, Unary):
        text = expr.op.value + print_expr(expr.operand, _UNARY_LEVEL)
        return _wrap(text, _UNARY_LEVEL, parent_level)
    if isinstance(expr, Binary):
        level = _LEVEL[expr.op]
        # comparisons are non-associative: parenthesize comparison children
        left_level = level if not expr.op.is_comparison else level + 1
        text = (
            f"{print_expr(expr.left, left_level)} {expr.op.value} "
            f"{print_expr(expr.right, level + 1)}"
        )
        return _wrap(text, level, parent_level)
    if isinstance(expr, WindowExpr):
        text = (
            f"{print_expr(expr.target, _POSTFIX_LEVEL)}"
            f".aggregate(over: {fmt_num(expr.duration_s)}, using: {expr.func})"
        )
        return _wrap(text, _POSTFIX_LEVEL, parent_level)
    if isinstance(expr, Default):
        text = (
            f"{print_expr(expr.operand, _POSTFIX_LEVEL)}"
            f".defaults(to: {print_expr(expr.fallback)})"
        )
        return _wrap(text, _POSTFIX_LEVEL, parent_level)
    if isinstance(expr, IfThenElse):
        text = (
            f"if {print_expr(expr.cond)} then {print_expr(expr.then)} "
            f"else {print_expr(expr.orelse)}"
        )
        # if/then/else swallows everything to its right; always parenthesize
        # unless it stands alone
        return f"({text})" if parent_level > 0 else text
    raise TypeError(f"not an expression node: {expr!r}")


def _wrap(text: str, level: int, parent_level: int) -> str:
    return f"({text})" if level < parent_level else text


def print_output(decl: OutputDecl) -> str:
    parts = [f"output {decl.name}"]
    if decl.ty is not None:
        parts.append(f": {decl.ty}")
    if decl.rate_hz is not None:
        parts.append(f"@{fmt_num(decl.rate_hz)}Hz")
    if decl.filter is not None:
        parts.append(f"filter: {print_expr(decl.filter)}")
    parts.append(f":= {print_expr(decl.body)}")
    return " ".join(parts)


def print_trigger(decl: TriggerDecl) -> str:
    text = f"trigger {print_expr(decl.condition)}"
    if decl.message is not None:
        escaped = decl.message.replace("\\", "\\\\").replace('"', '\\"')
        text += f' "{escaped}"'
    return text


def print_spec(spec: Specification) -> str:
    lines = [f"input {d.name}: {d.ty}" for d in spec.inputs]
    lines += [print_output(d) for d in spec.outputs]
    lines += [print_trigger(d) for d in spec.triggers]
    return "\n".join(lines) + ("\n" if lines else "")
