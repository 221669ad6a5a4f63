"""Tree-walking evaluator.

Every evaluation step tags its result with the producing expression and the
traced values it consumed; list values additionally carry back-links from
each element to the lists containing it. The resulting ExecutionRecord is
the sole input for widget derivation and the transformation tools.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .nodes import (
    App,
    AsPat,
    BinOp,
    Expr,
    If,
    Lambda,
    LetIn,
    ListLit,
    ListPat,
    Num,
    Pattern,
    PbeHole,
    Program,
    Str,
    TerminationHole,
    ValueHole,
    Var,
    VarPat,
)
from .prelude import PRELUDE, Decl

DEFAULT_CALL_DEPTH_LIMIT = 64


class EvalError(Exception):
    def __init__(self, message: str, nid: int = -1):
        super().__init__(message)
        self.message = message
        self.nid = nid


class RecursionGuard(EvalError):
    pass


class NotAnSvgValue(EvalError):
    pass


@dataclass(eq=False)
class Trace:
    expr_nid: int
    parents: tuple
    prelude_internal: bool = False


@dataclass(eq=False)
class TracedValue:
    value: object
    trace: Trace
    serial: int
    member_of: list = field(default_factory=list)

    def is_num(self) -> bool:
        return isinstance(self.value, Fraction)

    def is_list(self) -> bool:
        return isinstance(self.value, list)

    def is_point(self) -> bool:
        return (
            isinstance(self.value, list)
            and len(self.value) == 2
            and all(isinstance(c.value, Fraction) for c in self.value)
        )

    def is_shape(self) -> bool:
        return isinstance(self.value, SvgNode) and self.value.tag != "svg"


@dataclass(eq=False)
class Closure:
    name: str
    params: list
    body: Expr
    env: dict
    def_nid: int


@dataclass(eq=False)
class Builtin:
    decl: Decl


@dataclass(eq=False)
class SvgNode:
    tag: str  # square | rect | circle | line | polygon | svg
    args: dict  # ctor argument TracedValues by parameter name
    attrs: dict = field(default_factory=dict)  # destructured scalar attributes


@dataclass
class NumOp:
    op: str
    lhs: TracedValue
    rhs: TracedValue
    result: TracedValue


@dataclass
class CallRecord:
    fn_name: str
    callee_nid: int
    call_nid: int
    args: tuple
    ret: TracedValue
    depth: int
    start_serial: int
    end_serial: int
    ordinal: int  # 1-based among completed calls of the same function
    locals: dict  # let/param bindings established during the call, by name


@dataclass
class ExecutionRecord:
    program: Program
    final: TracedValue
    bindings: dict  # top-level name -> TracedValue
    numeric_ops: list
    call_records: list
    max_serial: int
    all_values: list  # every TracedValue in creation order

    def calls_of(self, fn_name: str) -> list[CallRecord]:
        return [c for c in self.call_records if c.fn_name == fn_name]

    def find_call(self, fn_name: str, ordinal: int) -> CallRecord | None:
        for c in self.call_records:
            if c.fn_name == fn_name and c.ordinal == ordinal:
                return c
        return None


class _Evaluator:
    def __init__(self, program: Program, depth_limit: int):
        self.program = program
        self.depth_limit = depth_limit
        self.serial = 0
        self.numeric_ops: list[NumOp] = []
        self.call_records: list[CallRecord] = []
        self.call_counts: dict[str, int] = {}
        self.hole_counters: dict[int, int] = {}
        self.stack: list[int] = []  # closure def nids currently executing
        self.frames: list[dict] = []  # local binding collectors
        self.values: list[TracedValue] = []

    def tv(self, value, nid, parents=(), internal=False) -> TracedValue:
        self.serial += 1
        out = TracedValue(value, Trace(nid, tuple(parents), internal), self.serial)
        if isinstance(value, list):
            for elem in value:
                elem.member_of.append(out)
        self.values.append(out)
        return out

    def run(self) -> ExecutionRecord:
        env: dict[str, object] = {}
        for name, decl in PRELUDE.items():
            self.serial += 1
            env[name] = TracedValue(Builtin(decl), Trace(-1, (), True), self.serial)
        bindings: dict[str, TracedValue] = {}
        for d in self.program.defs:
            if d.name is not None and d.params:
                self.serial += 1
                env = dict(env)
                clo = Closure(d.name, d.params, d.rhs, env, d.nid)
                ctv = TracedValue(clo, Trace(d.nid, ()), self.serial)
                env[d.name] = ctv  # visible to its own body for recursion
                bindings[d.name] = ctv
            else:
                rhs = self.eval(d.rhs, env, 0)
                env = dict(env)
                if d.name is not None:
                    env[d.name] = rhs
                    bindings[d.name] = rhs
                else:
                    bound = {}
                    self.bind_pattern(d.pattern, rhs, bound)
                    env.update(bound)
                    bindings.update(bound)
        final = self.eval(self.program.main, env, 0)
        return ExecutionRecord(
            program=self.program,
            final=final,
            bindings=bindings,
            numeric_ops=self.numeric_ops,
            call_records=self.call_records,
            max_serial=self.serial,
            all_values=self.values,
        )

    def bind_pattern(self, pat: Pattern, tv: TracedValue, out: dict):
        # destructured bindings alias the parent value; no synthetic step
        if isinstance(pat, VarPat):
            out[pat.name] = tv
        elif isinstance(pat, AsPat):
            out[pat.name] = tv
            self.bind_pattern(pat.pat, tv, out)
        elif isinstance(pat, ListPat):
            if not isinstance(tv.value, list) or len(tv.value) != len(pat.items):
                raise EvalError(
                    f"cannot match a {_kind_name(tv)} against a "
                    f"{len(pat.items)}-element list pattern",
                    pat.nid,
                )
            for sub, elem in zip(pat.items, tv.value):
                self.bind_pattern(sub, elem, out)
        else:
            raise EvalError("unsupported pattern", pat.nid)

    def eval(self, e: Expr, env: dict, depth: int) -> TracedValue:
        if isinstance(e, Num):
            return self.tv(e.value, e.nid)
        if isinstance(e, Str):
            return self.tv(e.value, e.nid)
        if isinstance(e, Var):
            bound = env.get(e.name)
            if bound is None:
                raise EvalError(f"unbound variable {e.name!r}", e.nid)
            return self.tv(bound.value, e.nid, (bound,))
        if isinstance(e, ListLit):
            items = [self.eval(i, env, depth) for i in e.items]
            return self.tv(list(items), e.nid, items)
        if isinstance(e, Lambda):
            return self.tv(Closure("<lambda>", e.params, e.body, env, e.nid), e.nid)
        if isinstance(e, LetIn):
            bound = self.eval(e.bound, env, depth)
            frame = {}
            self.bind_pattern(e.pat, bound, frame)
            if self.frames:
                self.frames[-1].update(frame)
            inner = dict(env)
            inner.update(frame)
            return self.eval(e.body, inner, depth)
        if isinstance(e, If):
            cond = self.eval(e.cond, env, depth)
            if not isinstance(cond.value, bool):
                raise EvalError("condition did not evaluate to a boolean", e.cond.nid)
            branch = self.eval(e.then if cond.value else e.els, env, depth)
            return self.tv(branch.value, e.nid, (cond, branch))
        if isinstance(e, BinOp):
            return self.eval_binop(e, env, depth)
        if isinstance(e, App):
            fn = self.eval(e.fn, env, depth)
            args = [self.eval(a, env, depth) for a in e.args]
            return self.apply(fn, args, e.nid, depth)
        if isinstance(e, TerminationHole):
            enclosing = self.stack[-1] if self.stack else None
            seen = self.stack.count(enclosing) if enclosing is not None else 0
            return self.tv(seen >= 2, e.nid)
        if isinstance(e, PbeHole):
            count = self.hole_counters.get(e.nid, 0) + 1
            self.hole_counters[e.nid] = count
            if count > len(e.observations):
                raise EvalError(
                    f"example hole executed {count} times but records only "
                    f"{len(e.observations)} values",
                    e.nid,
                )
            _, value = e.observations[count - 1]
            return self.tv(value, e.nid)
        if isinstance(e, ValueHole):
            target = e.target
            return self.tv(target.value, e.nid, (target,))
        raise EvalError(f"cannot evaluate {type(e).__name__}", getattr(e, "nid", -1))

    def eval_binop(self, e: BinOp, env: dict, depth: int) -> TracedValue:
        if e.op == "<|":
            fn = self.eval(e.lhs, env, depth)
            arg = self.eval(e.rhs, env, depth)
            return self.apply(fn, [arg], e.nid, depth)
        lhs = self.eval(e.lhs, env, depth)
        rhs = self.eval(e.rhs, env, depth)
        if e.op == "==":
            result = _values_equal(lhs, rhs)
            return self.tv(result, e.nid, (lhs, rhs))
        if e.op in ("<", ">", "<=", ">="):
            a, b = _want_num(lhs, e), _want_num(rhs, e)
            result = {"<": a < b, ">": a > b, "<=": a <= b, ">=": a >= b}[e.op]
            return self.tv(result, e.nid, (lhs, rhs))
        a, b = _want_num(lhs, e), _want_num(rhs, e)
        if e.op == "+":
            value = a + b
        elif e.op == "-":
            value = a - b
        elif e.op == "*":
            value = a * b
        elif e.op == "/":
            if b == 0:
                raise EvalError("division by zero", e.nid)
            value = a / b
        else:
            raise EvalError(f"unknown operator {e.op}", e.nid)
        out = self.tv(value, e.nid, (lhs, rhs))
        self.numeric_ops.append(NumOp(e.op, lhs, rhs, out))
        return out

    def apply(self, fn: TracedValue, args: list, call_nid: int, depth: int):
        if isinstance(fn.value, Builtin):
            return self.apply_builtin(fn.value.decl, args, call_nid, depth)
        if not isinstance(fn.value, Closure):
            raise EvalError("applied a non-function value", call_nid)
        clo: Closure = fn.value
        if len(args) != len(clo.params):
            raise EvalError(
                f"{clo.name} expects {len(clo.params)} arguments, got {len(args)}",
                call_nid,
            )
        if depth + 1 > self.depth_limit:
            raise RecursionGuard(
                f"call depth exceeded {self.depth_limit} in {clo.name}", call_nid
            )
        inner = dict(clo.env)
        frame: dict = {}
        for pat, arg in zip(clo.params, args):
            bound = {}
            self.bind_pattern(pat, arg, bound)
            inner.update(bound)
            frame.update(bound)
        self.stack.append(clo.def_nid)
        self.frames.append(frame)
        start = self.serial
        try:
            ret = self.eval(clo.body, inner, depth + 1)
        finally:
            self.stack.pop()
            self.frames.pop()
        out = self.tv(ret.value, call_nid, (ret,))
        ordinal = self.call_counts.get(clo.name, 0) + 1
        self.call_counts[clo.name] = ordinal
        self.call_records.append(
            CallRecord(
                fn_name=clo.name,
                callee_nid=clo.def_nid,
                call_nid=call_nid,
                args=tuple(args),
                ret=out,
                depth=depth + 1,
                start_serial=start,
                end_serial=self.serial,
                ordinal=ordinal,
                locals=frame,
            )
        )
        return out

    def apply_builtin(self, decl: Decl, args: list, nid: int, depth: int):
        if len(args) != decl.arity:
            raise EvalError(
                f"{decl.name} expects {decl.arity} arguments, got {len(args)}", nid
            )
        name = decl.name
        if name == "svg":
            _want_list(args[0], nid, "svg")
            return self.tv(SvgNode("svg", {"shapes": args[0]}), nid, args)
        if name == "concat":
            lists = _want_list(args[0], nid, "concat")
            flat = []
            for sub in lists:
                flat.extend(_want_list(sub, nid, "concat"))
            return self.tv(list(flat), nid, args)
        if name == "map":
            fn, items_tv = args
            items = _want_list(items_tv, nid, "map")
            out = [self.apply(fn, [item], nid, depth) for item in items]
            return self.tv(out, nid, args)
        if name == "reverse":
            items = _want_list(args[0], nid, "reverse")
            return self.tv(list(reversed(items)), nid, args)
        if name == "zeroTo":
            n = _want_num(args[0], None, nid)
            if n.denominator != 1 or n < 0:
                raise EvalError("zeroTo needs a non-negative integer", nid)
            items = [
                self.tv(Fraction(k), nid, (args[0],), internal=True)
                for k in range(int(n))
            ]
            return self.tv(items, nid, args)
        if name == "mod":
            a = _want_num(args[0], None, nid)
            b = _want_num(args[1], None, nid)
            if b == 0:
                raise EvalError("mod by zero", nid)
            value = a - b * (a / b).__floor__()
            return self.tv(value, nid, args)
        if name == "not":
            if not isinstance(args[0].value, bool):
                raise EvalError("not needs a boolean", nid)
            return self.tv(not args[0].value, nid, args)
        if name == "pointsBetweenSepBy":
            return self.points_between(args, nid)
        if decl.kind == "shape":
            shape_args = {}
            for param, arg in zip(decl.params, args):
                if param.role == "Point":
                    _want_point(arg, nid, name)
                elif param.role == "PointList":
                    for item in _want_list(arg, nid, name):
                        _want_point(item, nid, name)
                elif param.role is not None:
                    _want_num(arg, None, nid)
                shape_args[param.name] = arg
            attrs = self._shape_attrs(name, shape_args, nid)
            return self.tv(SvgNode(name, shape_args, attrs), nid, args)
        raise EvalError(f"no evaluator for {name}", nid)

    def _destructure(self, point_tv: TracedValue, k: int, nid: int) -> TracedValue:
        # pattern-match tracing keeps the containing list as a parent
        comp = point_tv.value[k]
        return self.tv(comp.value, nid, (comp, point_tv))

    def _shape_attrs(self, name: str, a: dict, nid: int) -> dict:
        if name in ("square", "rect"):
            return {
                "x": self._destructure(a["topLeft"], 0, nid),
                "y": self._destructure(a["topLeft"], 1, nid),
            }
        if name == "circle":
            return {
                "cx": self._destructure(a["center"], 0, nid),
                "cy": self._destructure(a["center"], 1, nid),
            }
        if name == "line":
            return {
                "x1": self._destructure(a["pt1"], 0, nid),
                "y1": self._destructure(a["pt1"], 1, nid),
                "x2": self._destructure(a["pt2"], 0, nid),
                "y2": self._destructure(a["pt2"], 1, nid),
            }
        return {}

    def points_between(self, args, nid):
        p1, p2, sep_tv = args
        _want_point(p1, nid, "pointsBetweenSepBy")
        _want_point(p2, nid, "pointsBetweenSepBy")
        sep = _want_num(sep_tv, None, nid)
        if sep <= 0:
            raise EvalError("separation must be positive", nid)
        x1, y1 = (c.value for c in p1.value)
        x2, y2 = (c.value for c in p2.value)
        span = max(abs(x2 - x1), abs(y2 - y1))
        count = int(span / sep) + 1 if span > 0 else 1
        points = []
        for k in range(count):
            t = Fraction(k) * sep / span if span > 0 else Fraction(0)
            px = self.tv(x1 + t * (x2 - x1), nid, (p1, p2, sep_tv), internal=True)
            py = self.tv(y1 + t * (y2 - y1), nid, (p1, p2, sep_tv), internal=True)
            points.append(self.tv([px, py], nid, (p1, p2, sep_tv), internal=True))
        return self.tv(points, nid, args)


def _kind_name(tv: TracedValue) -> str:
    v = tv.value
    if isinstance(v, Fraction):
        return "number"
    if isinstance(v, bool):
        return "boolean"
    if isinstance(v, list):
        return f"{len(v)}-element list"
    if isinstance(v, SvgNode):
        return v.tag
    if isinstance(v, (Closure, Builtin)):
        return "function"
    return type(v).__name__


def _want_num(tv: TracedValue, e, nid=None) -> Fraction:
    if not isinstance(tv.value, Fraction):
        raise EvalError(
            f"expected a number, got a {_kind_name(tv)}",
            e.nid if e is not None else (nid if nid is not None else -1),
        )
    return tv.value


def _want_list(tv: TracedValue, nid: int, who: str) -> list:
    if not isinstance(tv.value, list):
        raise EvalError(f"{who} expected a list, got a {_kind_name(tv)}", nid)
    return tv.value


def _want_point(tv: TracedValue, nid: int, who: str):
    if not tv.is_point():
        raise EvalError(f"{who} expected a point, got a {_kind_name(tv)}", nid)
    return tv


def _values_equal(a: TracedValue, b: TracedValue) -> bool:
    va, vb = a.value, b.value
    if isinstance(va, Fraction) and isinstance(vb, Fraction):
        return va == vb
    if isinstance(va, bool) and isinstance(vb, bool):
        return va == vb
    if isinstance(va, str) and isinstance(vb, str):
        return va == vb
    if isinstance(va, list) and isinstance(vb, list):
        return len(va) == len(vb) and all(
            _values_equal(x, y) for x, y in zip(va, vb)
        )
    return va is vb


def evaluate(program: Program, depth_limit: int = DEFAULT_CALL_DEPTH_LIMIT):
    """Evaluate a parsed program, producing a full ExecutionRecord."""
    return _Evaluator(program, depth_limit).run()


def dependencies(tv: TracedValue) -> set[int]:
    """Transitive closure of producing expressions over trace parents."""
    seen: set[int] = set()
    out: set[int] = set()
    stack = [tv]
    while stack:
        cur = stack.pop()
        if id(cur) in seen:
            continue
        seen.add(id(cur))
        if cur.trace.expr_nid >= 0:
            out.add(cur.trace.expr_nid)
        stack.extend(cur.trace.parents)
    return out


def strip_traces(tv: TracedValue):
    """Plain python rendering of a traced value, for structural comparison."""
    v = tv.value
    if isinstance(v, list):
        return [strip_traces(e) for e in v]
    if isinstance(v, SvgNode):
        return (v.tag, {k: strip_traces(a) for k, a in v.args.items()})
    if isinstance(v, (Closure, Builtin)):
        return "<function>"
    return v
