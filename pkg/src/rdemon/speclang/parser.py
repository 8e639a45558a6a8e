"""Recursive-descent parser for specification source text.

Grammar (see docs/grammar.ebnf for the shipped EBNF):

    spec    := (input | output | trigger)*
    input   := "input" ident ("," ident)* ":" type
    output  := "output" ident (":" type)? ("@" number "Hz")?
               ("filter" ":" expr)? ":=" expr
    trigger := "trigger" expr (string)?

Expression precedence, lowest to highest: ``∨``, ``∧``, comparisons
(non-associative), ``+ -``, ``* /``, unary ``- !``, postfix
``.aggregate(over: D, using: F)`` / ``.defaults(to: e)``, atoms.

Besides syntax, ``parse`` rejects duplicate stream names and references
to undeclared streams, reporting the offending source position.
"""

from __future__ import annotations

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
from .errors import ParseError
from .lexer import Token, tokenize

_DURATION_UNITS = {"s": 1.0, "sec": 1.0, "min": 60.0, "h": 3600.0}

_CMP_OPS = {
    "LT": BinOp.LT,
    "LE": BinOp.LE,
    "GT": BinOp.GT,
    "GE": BinOp.GE,
    "EQ": BinOp.EQ,
    "NE": BinOp.NE,
}


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0
        # (name, line, col) of every declaration and every reference,
        # for the post-parse resolution check
        self.decl_sites: list[tuple[str, int, int]] = []
        self.ref_sites: list[tuple[str, int, int]] = []

    # -- token access --------------------------------------------------

    def _peek(self) -> Token:
        return self.tokens[self.pos]

    def _advance(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def _match(self, ttype: str) -> Token | None:
        if self._peek().type == ttype:
            return self._advance()
        return None

    def _expect(self, *ttypes: str) -> Token:
        tok = self._peek()
        if tok.type in ttypes:
            return self._advance()
        shown = tok.value if tok.type != "EOF" else "end of input"
        raise ParseError(f"unexpected {shown!r}", tok.line, tok.col, expected=ttypes)

    # -- declarations --------------------------------------------------

    def parse_spec(self) -> Specification:
        inputs: list[InputDecl] = []
        outputs: list[OutputDecl] = []
        triggers: list[TriggerDecl] = []
        while True:
            tok = self._peek()
            if tok.type == "EOF":
                break
            if tok.type == "input":
                inputs.extend(self._parse_input())
            elif tok.type == "output":
                outputs.append(self._parse_output())
            elif tok.type == "trigger":
                triggers.append(self._parse_trigger())
            else:
                raise ParseError(
                    f"unexpected {tok.value!r}", tok.line, tok.col,
                    expected=("input", "output", "trigger"),
                )
        spec = Specification(tuple(inputs), tuple(outputs), tuple(triggers))
        self._resolve(spec)
        return spec

    def _parse_input(self) -> list[InputDecl]:
        self._expect("input")
        names = [self._ident_decl()]
        while self._match("COMMA"):
            names.append(self._ident_decl())
        self._expect("COLON")
        ty = self._parse_type()
        return [InputDecl(name, ty) for name in names]

    def _parse_output(self) -> OutputDecl:
        self._expect("output")
        name = self._ident_decl()
        ty = None
        if self._match("COLON"):
            ty = self._parse_type()
        rate = None
        if self._match("AT"):
            num = self._expect("NUMBER")
            unit = self._expect("IDENT")
            if unit.value != "Hz":
                raise ParseError(
                    f"unknown rate unit {unit.value!r}", unit.line, unit.col,
                    expected=("Hz",),
                )
            rate = float(num.value)
            if rate <= 0:
                raise ParseError("rate must be positive", num.line, num.col)
        filt = None
        if self._peek().type == "filter":
            self._advance()
            self._expect("COLON")
            filt = self._parse_expr()
        self._expect("ASSIGN")
        body = self._parse_expr()
        return OutputDecl(name, body, ty=ty, rate_hz=rate, filter=filt)

    def _parse_trigger(self) -> TriggerDecl:
        self._expect("trigger")
        cond = self._parse_expr()
        message = None
        if self._peek().type == "STRING":
            message = self._advance().value
        return TriggerDecl(cond, message)

    def _parse_type(self) -> ValueType:
        tok = self._expect("Float64", "Bool")
        return ValueType.FLOAT64 if tok.type == "Float64" else ValueType.BOOL

    def _ident_decl(self) -> str:
        tok = self._expect("IDENT")
        self.decl_sites.append((tok.value, tok.line, tok.col))
        return tok.value

    # -- expressions ---------------------------------------------------

    def _parse_expr(self) -> Expr:
        return self._parse_or()

    def _parse_or(self) -> Expr:
        left = self._parse_and()
        while self._match("OR"):
            left = Binary(BinOp.OR, left, self._parse_and())
        return left

    def _parse_and(self) -> Expr:
        left = self._parse_cmp()
        while self._match("AND"):
            left = Binary(BinOp.AND, left, self._parse_cmp())
        return left

    def _parse_cmp(self) -> Expr:
        left = self._parse_add()
        op = _CMP_OPS.get(self._peek().type)
        if op is not None:
            self._advance()
            return Binary(op, left, self._parse_add())
        return left

    def _parse_add(self) -> Expr:
        left = self._parse_mul()
        while True:
            if self._match("PLUS"):
                left = Binary(BinOp.ADD, left, self._parse_mul())
            elif self._match("MINUS"):
                left = Binary(BinOp.SUB, left, self._parse_mul())
            else:
                return left

    def _parse_mul(self) -> Expr:
        left = self._parse_unary()
        while True:
            if self._match("STAR"):
                left = Binary(BinOp.MUL, left, self._parse_unary())
            elif self._match("SLASH"):
                left = Binary(BinOp.DIV, left, self._parse_unary())
            else:
                return left

    def _parse_unary(self) -> Expr:
        if self._match("MINUS"):
            return Unary(UnOp.NEG, self._parse_unary())
        if self._match("BANG"):
            return Unary(UnOp.NOT, self._parse_unary())
        return self._parse_postfix()

    def _parse_postfix(self) -> Expr:
        expr = self._parse_atom()
        while self._peek().type == "DOT":
            self._advance()
            method = self._expect("IDENT")
            if method.value == "aggregate":
                expr = self._parse_aggregate(expr)
            elif method.value == "defaults":
                expr = self._parse_defaults(expr)
            else:
                raise ParseError(
                    f"unknown method {method.value!r}", method.line, method.col,
                    expected=("aggregate", "defaults"),
                )
        return expr

    def _parse_aggregate(self, target: Expr) -> Expr:
        self._expect("LPAREN")
        self._keyword_arg("over")
        duration = self._parse_duration()
        self._expect("COMMA")
        self._keyword_arg("using")
        func = self._parse_agg_func()
        self._expect("RPAREN")
        return WindowExpr(target, duration, func)

    def _parse_defaults(self, operand: Expr) -> Expr:
        self._expect("LPAREN")
        self._keyword_arg("to")
        fallback = self._parse_expr()
        self._expect("RPAREN")
        return Default(operand, fallback)

    def _keyword_arg(self, word: str) -> None:
        tok = self._expect("IDENT")
        if tok.value != word:
            raise ParseError(
                f"unexpected argument label {tok.value!r}", tok.line, tok.col,
                expected=(word,),
            )
        self._expect("COLON")

    def _parse_duration(self) -> float:
        sign = 1.0
        if self._match("MINUS"):
            sign = -1.0
        num = self._expect("NUMBER")
        seconds = sign * float(num.value)
        if self._peek().type == "IDENT" and self._peek().value in _DURATION_UNITS:
            seconds *= _DURATION_UNITS[self._advance().value]
        if seconds <= 0:
            raise ParseError("window duration must be positive", num.line, num.col)
        return seconds

    def _parse_agg_func(self) -> AggFunc:
        tok = self._expect("IDENT")
        name = tok.value
        if name == "pctl":
            self._expect("LPAREN")
            p_tok = self._expect("NUMBER")
            self._expect("RPAREN")
            p = float(p_tok.value)
            if not 0.0 < p < 100.0:
                raise ParseError(
                    "percentile must lie strictly between 0 and 100",
                    p_tok.line, p_tok.col,
                )
            return AggFunc(AggKind.PCTL, p)
        try:
            return AggFunc(AggKind(name))
        except ValueError:
            raise ParseError(
                f"unknown aggregation {name!r}", tok.line, tok.col,
                expected=tuple(k.value for k in AggKind),
            ) from None

    def _parse_atom(self) -> Expr:
        tok = self._peek()
        if tok.type == "NUMBER":
            self._advance()
            return Literal(float(tok.value))
        if tok.type == "true":
            self._advance()
            return Literal(True)
        if tok.type == "false":
            self._advance()
            return Literal(False)
        if tok.type == "IDENT":
            self._advance()
            self.ref_sites.append((tok.value, tok.line, tok.col))
            return StreamRef(tok.value)
        if tok.type == "LPAREN":
            self._advance()
            expr = self._parse_expr()
            self._expect("RPAREN")
            return expr
        if tok.type == "if":
            self._advance()
            cond = self._parse_expr()
            self._expect("then")
            then = self._parse_expr()
            self._expect("else")
            orelse = self._parse_expr()
            return IfThenElse(cond, then, orelse)
        shown = tok.value if tok.type != "EOF" else "end of input"
        raise ParseError(
            f"unexpected {shown!r}", tok.line, tok.col,
            expected=("number", "identifier", "(", "if", "true", "false"),
        )

    # -- resolution ----------------------------------------------------

    def _resolve(self, spec: Specification) -> None:
        seen: dict[str, tuple[int, int]] = {}
        for name, line, col in self.decl_sites:
            if name in seen:
                raise ParseError(f"duplicate stream name {name!r}", line, col)
            seen[name] = (line, col)
        for name, line, col in self.ref_sites:
            if name not in seen:
                raise ParseError(f"undeclared stream {name!r}", line, col)


def parse(text: str) -> Specification:
    """Parse specification source into an AST.

    Raises :class:`ParseError` on syntax errors, duplicate stream names,
    and references to undeclared streams.
    """
    return _Parser(tokenize(text)).parse_spec()
