"""Typechecker: types every node, orders streams into evaluation layers,
and registers sliding-window buffers.

Cycle rules: references that are neither window targets nor wrapped by a
``.defaults`` are *hard* dependencies and must form an acyclic graph.
Window and default references participate in layer ordering where that is
possible without a cycle; inside a cycle they are broken, meaning the
window (or default) observes only values from earlier instants.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .ast import (
    AggKind,
    Binary,
    Default,
    Expr,
    IfThenElse,
    InputDecl,
    Literal,
    OutputDecl,
    Specification,
    StreamRef,
    Unary,
    UnOp,
    ValueType,
    WindowExpr,
    referenced_streams,
)
from .errors import CyclicDependencyError, SpecTypeError, UntimedWindowError


@dataclass(frozen=True)
class WindowBinding:
    """One shared sample buffer: every ``target.aggregate(over: d, ...)``
    with the same target and duration reads the same buffer."""

    buffer_id: int
    target: str
    duration_s: float


@dataclass
class StreamInfo:
    name: str
    ty: ValueType
    rate_hz: float | None
    filter: Expr | None
    body: Expr
    layer: int
    hard_deps: frozenset[str]
    all_deps: frozenset[str]

    @property
    def periodic(self) -> bool:
        return self.rate_hz is not None


@dataclass
class TypedSpecification:
    spec: Specification
    stream_types: dict[str, ValueType]
    outputs: dict[str, StreamInfo]
    layers: list[list[str]] = field(default_factory=list)
    windows: list[WindowBinding] = field(default_factory=list)
    window_ids: dict[WindowExpr, int] = field(default_factory=dict)
    trigger_refs: list[frozenset[str]] = field(default_factory=list)

    @property
    def inputs(self) -> dict[str, InputDecl]:
        return self.spec.input_map()

    def input_type(self, name: str) -> ValueType | None:
        decl = self.spec.input_map().get(name)
        return decl.ty if decl else None


class _Checker:
    def __init__(self, spec: Specification):
        self.spec = spec
        self.inputs = spec.input_map()
        self.outputs = spec.output_map()
        self.types: dict[str, ValueType] = {}
        self.window_key_to_id: dict[tuple[str, float], int] = {}
        self.windows: list[WindowBinding] = []
        self.window_ids: dict[WindowExpr, int] = {}
        self._absentable: dict[str, bool] = {}

    # -- entry ----------------------------------------------------------

    def run(self) -> TypedSpecification:
        self._check_names()
        hard, full = self._dependencies()
        hard_graph = self._output_graph(hard)
        full_graph = self._output_graph(full)
        self._check_hard_acyclic(hard_graph)
        self._infer_stream_types()
        layers_by_name = self._assign_layers(hard_graph, full_graph)

        infos: dict[str, StreamInfo] = {}
        for decl in self.spec.outputs:
            self._check_output(decl)
            infos[decl.name] = StreamInfo(
                name=decl.name,
                ty=self.types[decl.name],
                rate_hz=decl.rate_hz,
                filter=decl.filter,
                body=decl.body,
                layer=layers_by_name[decl.name],
                hard_deps=frozenset(hard[decl.name]),
                all_deps=frozenset(full[decl.name]),
            )

        trigger_refs = []
        for i, trig in enumerate(self.spec.triggers):
            if any(isinstance(n, WindowExpr) for n in _walk(trig.condition)):
                raise UntimedWindowError(
                    f"trigger {i}: sliding windows are not allowed in trigger "
                    "conditions (triggers carry no rate annotation)"
                )
            ty = self._type_of(trig.condition, f"trigger {i}")
            if ty is not ValueType.BOOL:
                raise SpecTypeError(f"trigger {i}: condition must be Bool, got {ty}")
            trigger_refs.append(frozenset(referenced_streams(trig.condition)))

        n_layers = max(layers_by_name.values(), default=0)
        layers = [
            [d.name for d in self.spec.outputs if layers_by_name[d.name] == k]
            for k in range(1, n_layers + 1)
        ]
        return TypedSpecification(
            spec=self.spec,
            stream_types=dict(self.types),
            outputs=infos,
            layers=layers,
            windows=self.windows,
            window_ids=self.window_ids,
            trigger_refs=trigger_refs,
        )

    # -- names and stream types -----------------------------------------

    def _check_names(self) -> None:
        seen: set[str] = set()
        for name in self.spec.stream_names():
            if name in seen:
                raise SpecTypeError(f"duplicate stream name {name!r}")
            seen.add(name)
        for decl in self.spec.outputs:
            exprs = [decl.body] + ([decl.filter] if decl.filter is not None else [])
            for expr in exprs:
                for ref in referenced_streams(expr):
                    if ref not in seen:
                        raise SpecTypeError(
                            f"output {decl.name!r}: undeclared stream {ref!r}"
                        )
        for i, trig in enumerate(self.spec.triggers):
            for ref in referenced_streams(trig.condition):
                if ref not in seen:
                    raise SpecTypeError(f"trigger {i}: undeclared stream {ref!r}")

    def _infer_stream_types(self) -> None:
        for decl in self.spec.inputs:
            self.types[decl.name] = decl.ty
        for decl in self.spec.outputs:
            if decl.ty is not None:
                self.types[decl.name] = decl.ty
        pending = [d for d in self.spec.outputs if d.ty is None]
        while pending:
            progressed = False
            still: list[OutputDecl] = []
            for decl in pending:
                if referenced_streams(decl.body) <= self.types.keys():
                    self.types[decl.name] = self._type_of(
                        decl.body, f"output {decl.name!r}"
                    )
                    progressed = True
                else:
                    still.append(decl)
            if not progressed:
                names = ", ".join(d.name for d in still)
                raise SpecTypeError(
                    f"cannot infer types for recursive streams without type "
                    f"annotations: {names}"
                )
            pending = still

    # -- per-output checks ------------------------------------------------

    def _check_output(self, decl: OutputDecl) -> None:
        where = f"output {decl.name!r}"
        if decl.rate_hz is not None and decl.rate_hz <= 0:
            raise SpecTypeError(f"{where}: rate must be positive")
        body_ty = self._type_of(decl.body, where)
        if body_ty is not self.types[decl.name]:
            raise SpecTypeError(
                f"{where}: declared {self.types[decl.name]} but body has "
                f"type {body_ty}"
            )
        if decl.filter is not None:
            filter_ty = self._type_of(decl.filter, where + " filter")
            if filter_ty is not ValueType.BOOL:
                raise SpecTypeError(f"{where}: filter must be Bool, got {filter_ty}")
        has_window = any(
            isinstance(n, WindowExpr)
            for e in ([decl.body] + ([decl.filter] if decl.filter else []))
            for n in _walk(e)
        )
        if has_window and decl.rate_hz is None:
            raise UntimedWindowError(
                f"{where}: sliding windows require a rate annotation "
                "(windows are evaluated only on a periodic grid)"
            )

    # -- expression typing -------------------------------------------------

    def _type_of(self, expr: Expr, where: str) -> ValueType:
        if isinstance(expr, Literal):
            return expr.type
        if isinstance(expr, StreamRef):
            return self.types[expr.name]
        if isinstance(expr, Unary):
            ty = self._type_of(expr.operand, where)
            want = ValueType.FLOAT64 if expr.op is UnOp.NEG else ValueType.BOOL
            if ty is not want:
                raise SpecTypeError(f"{where}: operand of {expr.op.value!r} must be {want}")
            return want
        if isinstance(expr, Binary):
            lt = self._type_of(expr.left, where)
            rt = self._type_of(expr.right, where)
            op = expr.op
            if op.is_arithmetic:
                self._want(lt, rt, ValueType.FLOAT64, where, op.value)
                return ValueType.FLOAT64
            if op.is_comparison:
                self._want(lt, rt, ValueType.FLOAT64, where, op.value)
                return ValueType.BOOL
            if op.is_equality:
                if lt is not rt:
                    raise SpecTypeError(
                        f"{where}: {op.value!r} compares {lt} with {rt}"
                    )
                return ValueType.BOOL
            self._want(lt, rt, ValueType.BOOL, where, op.value)
            return ValueType.BOOL
        if isinstance(expr, WindowExpr):
            return self._type_of_window(expr, where)
        if isinstance(expr, Default):
            op_ty = self._type_of(expr.operand, where)
            if not _is_constant(expr.fallback):
                raise SpecTypeError(f"{where}: default fallback must be a constant")
            fb_ty = self._type_of(expr.fallback, where)
            if op_ty is not fb_ty:
                raise SpecTypeError(
                    f"{where}: default fallback has type {fb_ty}, expected {op_ty}"
                )
            if not self._expr_absentable(expr.operand):
                raise SpecTypeError(
                    f"{where}: .defaults(to:) wraps an expression that can "
                    "never be absent"
                )
            return op_ty
        if isinstance(expr, IfThenElse):
            if self._type_of(expr.cond, where) is not ValueType.BOOL:
                raise SpecTypeError(f"{where}: if-condition must be Bool")
            t1 = self._type_of(expr.then, where)
            t2 = self._type_of(expr.orelse, where)
            if t1 is not t2:
                raise SpecTypeError(f"{where}: if-branches differ: {t1} vs {t2}")
            return t1
        raise SpecTypeError(f"{where}: not an expression: {expr!r}")

    def _type_of_window(self, expr: WindowExpr, where: str) -> ValueType:
        if not isinstance(expr.target, StreamRef):
            raise SpecTypeError(
                f"{where}: window aggregation must target a stream reference"
            )
        if expr.duration_s <= 0:
            raise SpecTypeError(f"{where}: window duration must be positive")
        func = expr.func
        if func.kind is AggKind.PCTL and not (
            func.percentile is not None and 0.0 < func.percentile < 100.0
        ):
            raise SpecTypeError(
                f"{where}: percentile must lie strictly between 0 and 100"
            )
        target_ty = self.types[expr.target.name]
        if func.kind is not AggKind.COUNT and target_ty is not ValueType.FLOAT64:
            raise SpecTypeError(
                f"{where}: {func.kind.value} requires a Float64 stream, "
                f"{expr.target.name!r} is {target_ty}"
            )
        key = (expr.target.name, expr.duration_s)
        if key not in self.window_key_to_id:
            self.window_key_to_id[key] = len(self.windows)
            self.windows.append(WindowBinding(len(self.windows), key[0], key[1]))
        self.window_ids[expr] = self.window_key_to_id[key]
        return ValueType.FLOAT64

    @staticmethod
    def _want(lt: ValueType, rt: ValueType, want: ValueType, where: str, op: str) -> None:
        if lt is not want or rt is not want:
            raise SpecTypeError(f"{where}: {op!r} requires {want} operands")

    # -- absence analysis --------------------------------------------------

    def _expr_absentable(self, expr: Expr) -> bool:
        """Can this expression be absent at an evaluation instant?

        Windows may cover an empty interval; references to inputs may
        precede any sample; references to filtered streams miss instants
        where the filter was false.  Defaults stop absence.
        """
        if isinstance(expr, Literal):
            return False
        if isinstance(expr, StreamRef):
            return self._stream_absentable(expr.name)
        if isinstance(expr, WindowExpr):
            return True
        if isinstance(expr, Default):
            return False
        if isinstance(expr, Unary):
            return self._expr_absentable(expr.operand)
        if isinstance(expr, Binary):
            # division may be absent on a zero divisor even when both
            # operands are present
            if expr.op.value == "/":
                return True
            return self._expr_absentable(expr.left) or self._expr_absentable(expr.right)
        if isinstance(expr, IfThenElse):
            return (
                self._expr_absentable(expr.cond)
                or self._expr_absentable(expr.then)
                or self._expr_absentable(expr.orelse)
            )
        return True

    def _stream_absentable(self, name: str) -> bool:
        if name in self._absentable:
            return self._absentable[name]
        if name in self.inputs:
            result = True
        else:
            decl = self.outputs[name]
            if decl.filter is not None:
                result = True
            else:
                # guard against recursion through broken cycles: assume
                # absentable while computing
                self._absentable[name] = True
                result = self._expr_absentable(decl.body)
        self._absentable[name] = result
        return result

    # -- dependencies and layers --------------------------------------------

    def _dependencies(self) -> tuple[dict[str, set[str]], dict[str, set[str]]]:
        """Per output: hard and full reference sets (inputs included)."""
        hard: dict[str, set[str]] = {}
        full: dict[str, set[str]] = {}
        for decl in self.spec.outputs:
            h: set[str] = set()
            f: set[str] = set()
            exprs = [decl.body] + ([decl.filter] if decl.filter is not None else [])
            for expr in exprs:
                _collect_refs(expr, soft=False, hard=h, full=f)
            hard[decl.name] = h
            full[decl.name] = f
        return hard, full

    def _output_graph(self, deps: dict[str, set[str]]) -> dict[str, set[str]]:
        return {name: {r for r in refs if r in self.outputs} for name, refs in deps.items()}

    def _check_hard_acyclic(self, hard: dict[str, set[str]]) -> None:
        WHITE, GRAY, BLACK = 0, 1, 2
        color = {name: WHITE for name in hard}
        stack: list[str] = []

        def visit(node: str) -> None:
            color[node] = GRAY
            stack.append(node)
            for dep in sorted(hard[node]):
                if color[dep] == GRAY:
                    cycle = stack[stack.index(dep):]
                    raise CyclicDependencyError(cycle)
                if color[dep] == WHITE:
                    visit(dep)
            stack.pop()
            color[node] = BLACK

        for name in hard:
            if color[name] == WHITE:
                visit(name)

    def _assign_layers(
        self, hard: dict[str, set[str]], full: dict[str, set[str]]
    ) -> dict[str, int]:
        sccs = _tarjan(full)  # dependency-first order
        layer: dict[str, int] = {}
        for scc in sccs:
            members = set(scc)
            base = 0
            for node in scc:
                for dep in full[node] - members:
                    base = max(base, layer[dep])
            if len(scc) == 1 and scc[0] not in full[scc[0]]:
                layer[scc[0]] = base + 1
                continue
            # cycle through window/default edges: order members by the
            # (acyclic) hard subgraph, ignoring broken soft edges
            for node in self._topo_hard(scc, hard):
                lvl = base + 1
                for dep in hard[node] & members:
                    lvl = max(lvl, layer[dep] + 1)
                layer[node] = lvl
        return layer

    @staticmethod
    def _topo_hard(scc: list[str], hard: dict[str, set[str]]) -> list[str]:
        members = set(scc)
        remaining = {n: hard[n] & members for n in scc}
        order: list[str] = []
        while remaining:
            ready = sorted(n for n, deps in remaining.items() if not deps - set(order))
            order.extend(n for n in ready if n not in order)
            for n in ready:
                del remaining[n]
        return order


def _collect_refs(expr: Expr, soft: bool, hard: set[str], full: set[str]) -> None:
    if isinstance(expr, StreamRef):
        full.add(expr.name)
        if not soft:
            hard.add(expr.name)
    elif isinstance(expr, Unary):
        _collect_refs(expr.operand, soft, hard, full)
    elif isinstance(expr, Binary):
        _collect_refs(expr.left, soft, hard, full)
        _collect_refs(expr.right, soft, hard, full)
    elif isinstance(expr, WindowExpr):
        _collect_refs(expr.target, True, hard, full)
    elif isinstance(expr, Default):
        _collect_refs(expr.operand, True, hard, full)
        _collect_refs(expr.fallback, True, hard, full)
    elif isinstance(expr, IfThenElse):
        _collect_refs(expr.cond, soft, hard, full)
        _collect_refs(expr.then, soft, hard, full)
        _collect_refs(expr.orelse, soft, hard, full)


def _walk(expr: Expr):
    from .ast import walk

    return walk(expr)


def _is_constant(expr: Expr) -> bool:
    if isinstance(expr, Literal):
        return True
    return isinstance(expr, Unary) and expr.op is UnOp.NEG and isinstance(
        expr.operand, Literal
    )


def _tarjan(graph: dict[str, set[str]]) -> list[list[str]]:
    """Strongly connected components, emitted dependencies-first."""
    index: dict[str, int] = {}
    lowlink: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    counter = [0]
    result: list[list[str]] = []

    def strongconnect(v: str) -> None:
        index[v] = lowlink[v] = counter[0]
        counter[0] += 1
        stack.append(v)
        on_stack.add(v)
        for w in sorted(graph[v]):
            if w not in index:
                strongconnect(w)
                lowlink[v] = min(lowlink[v], lowlink[w])
            elif w in on_stack:
                lowlink[v] = min(lowlink[v], index[w])
        if lowlink[v] == index[v]:
            scc: list[str] = []
            while True:
                w = stack.pop()
                on_stack.discard(w)
                scc.append(w)
                if w == v:
                    break
            result.append(scc)

    for v in graph:
        if v not in index:
            strongconnect(v)
    return result


def typecheck(spec: Specification) -> TypedSpecification:
    """Type a parsed specification and compute its evaluation plan.

    Raises :class:`SpecTypeError` on type mismatches,
    :class:`UntimedWindowError` when a window appears without a rate, and
    :class:`CyclicDependencyError` when plain references form a cycle.
    """
    return _Checker(spec).run()
