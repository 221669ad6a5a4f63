"""AST for the design language: expressions, patterns, and whole programs."""

from __future__ import annotations

import copy
from dataclasses import dataclass, field, fields
from fractions import Fraction
from typing import Iterator, Optional

Span = tuple[int, int]

NO_SPAN: Span = (-1, -1)


@dataclass
class Expr:
    nid: int = field(default=-1, kw_only=True, compare=False)
    span: Span = field(default=NO_SPAN, kw_only=True, compare=False)


@dataclass
class Num(Expr):
    value: Fraction = Fraction(0)
    frozen: bool = False
    slider: Optional[tuple[Fraction, Fraction]] = None


@dataclass
class Str(Expr):
    value: str = ""


@dataclass
class Var(Expr):
    name: str = ""


@dataclass
class ListLit(Expr):
    items: list[Expr] = field(default_factory=list)


@dataclass
class App(Expr):
    fn: Expr = None
    args: list[Expr] = field(default_factory=list)


@dataclass
class Lambda(Expr):
    params: list["Pattern"] = field(default_factory=list)
    body: Expr = None


@dataclass
class LetIn(Expr):
    pat: "Pattern" = None
    bound: Expr = None
    body: Expr = None


@dataclass
class If(Expr):
    cond: Expr = None
    then: Expr = None
    els: Expr = None


@dataclass
class BinOp(Expr):
    op: str = ""
    lhs: Expr = None
    rhs: Expr = None


@dataclass
class TerminationHole(Expr):
    """Guard placeholder bounding a fresh recursive function to one layer."""


@dataclass
class PbeHole(Expr):
    """Records the value each successive execution must produce."""

    observations: list[tuple[int, Fraction]] = field(default_factory=list)


@dataclass
class ValueHole(Expr):
    """Transient leaf carrying a run-time value; never reaches unparsed output."""

    target: object = None

    def __deepcopy__(self, memo):
        # the carried value stays shared: identity against the execution
        # record is what makes the hole resolvable
        fresh = ValueHole(target=self.target)
        fresh.nid = self.nid
        fresh.span = self.span
        return fresh


@dataclass
class Pattern:
    nid: int = field(default=-1, kw_only=True, compare=False)
    span: Span = field(default=NO_SPAN, kw_only=True, compare=False)


@dataclass
class VarPat(Pattern):
    name: str = ""


@dataclass
class ListPat(Pattern):
    items: list[Pattern] = field(default_factory=list)


@dataclass
class AsPat(Pattern):
    pat: Pattern = None
    name: str = ""


@dataclass
class TopDef:
    """One top-level definition: `name p1 p2 = rhs` or `pattern = rhs`."""

    name: Optional[str]
    pattern: Optional[Pattern]
    params: list[Pattern]
    rhs: Expr
    comments: list[str] = field(default_factory=list)
    nid: int = field(default=-1, compare=False)
    span: Span = field(default=NO_SPAN, compare=False)

    def bound_names(self) -> list[str]:
        if self.name is not None:
            return [self.name]
        return pattern_names(self.pattern)

    def display_name(self) -> str:
        if self.name is not None:
            return self.name
        return "/".join(pattern_names(self.pattern))


@dataclass
class Program:
    defs: list[TopDef]
    main: Expr
    source: str = ""

    def def_named(self, name: str) -> Optional[TopDef]:
        for d in self.defs:
            if name in d.bound_names():
                return d
        return None

    def def_index(self, name: str) -> int:
        for i, d in enumerate(self.defs):
            if name in d.bound_names():
                return i
        return -1

    def top_exprs(self) -> Iterator[Expr]:
        for d in self.defs:
            yield d.rhs
        yield self.main


def child_exprs(e: Expr) -> list[Expr]:
    if isinstance(e, ListLit):
        return list(e.items)
    if isinstance(e, App):
        return [e.fn] + list(e.args)
    if isinstance(e, Lambda):
        return [e.body]
    if isinstance(e, LetIn):
        return [e.bound, e.body]
    if isinstance(e, If):
        return [e.cond, e.then, e.els]
    if isinstance(e, BinOp):
        return [e.lhs, e.rhs]
    return []


def walk(e: Expr) -> Iterator[Expr]:
    yield e
    for c in child_exprs(e):
        yield from walk(c)


def walk_program(program: Program) -> Iterator[Expr]:
    for e in program.top_exprs():
        yield from walk(e)


def walk_patterns(p: Pattern) -> Iterator[Pattern]:
    yield p
    if isinstance(p, ListPat):
        for sub in p.items:
            yield from walk_patterns(sub)
    elif isinstance(p, AsPat):
        yield from walk_patterns(p.pat)


def pattern_names(p: Pattern) -> list[str]:
    names = []
    for sub in walk_patterns(p):
        if isinstance(sub, VarPat):
            names.append(sub.name)
        elif isinstance(sub, AsPat):
            names.append(sub.name)
    return names


def clone(node):
    """Deep copy of an AST fragment; ids/spans are cleared for re-numbering."""
    fresh = copy.deepcopy(node)
    for e in _all_nodes(fresh):
        e.nid = -1
        e.span = NO_SPAN
    return fresh


def _all_nodes(node):
    if isinstance(node, Expr):
        yield node
        for c in child_exprs(node):
            yield from _all_nodes(c)
        if isinstance(node, Lambda):
            for p in node.params:
                yield from _all_nodes(p)
        if isinstance(node, LetIn):
            yield from _all_nodes(node.pat)
    elif isinstance(node, Pattern):
        yield from walk_patterns(node)
    elif isinstance(node, TopDef):
        if node.pattern is not None:
            yield from _all_nodes(node.pattern)
        for p in node.params:
            yield from _all_nodes(p)
        yield from _all_nodes(node.rhs)


def structural_eq(a, b) -> bool:
    """Equality on shape and content, ignoring node ids and spans."""
    if type(a) is not type(b):
        return False
    if isinstance(a, (Expr, Pattern, TopDef)):
        for f in fields(a):
            if not f.compare:
                continue
            if not structural_eq(getattr(a, f.name), getattr(b, f.name)):
                return False
        return True
    if isinstance(a, list):
        return len(a) == len(b) and all(structural_eq(x, y) for x, y in zip(a, b))
    if isinstance(a, tuple):
        return len(a) == len(b) and all(structural_eq(x, y) for x, y in zip(a, b))
    return a == b


def program_eq(a: Program, b: Program) -> bool:
    if len(a.defs) != len(b.defs):
        return False
    for da, db in zip(a.defs, b.defs):
        if da.name != db.name or not structural_eq(da.params, db.params):
            return False
        if not structural_eq(da.pattern, db.pattern):
            return False
        if not structural_eq(da.rhs, db.rhs):
            return False
    return structural_eq(a.main, b.main)


def number_nodes(program: Program) -> dict[int, object]:
    """Assign fresh sequential ids to every node; returns the id index."""
    counter = 0
    index: dict[int, object] = {}

    def assign(node):
        nonlocal counter
        node.nid = counter
        index[counter] = node
        counter += 1

    for d in program.defs:
        assign(d)
        if d.pattern is not None:
            for p in walk_patterns(d.pattern):
                assign(p)
        for param in d.params:
            for p in walk_patterns(param):
                assign(p)
        _number_expr(d.rhs, assign)
    _number_expr(program.main, assign)
    return index


def _number_expr(e: Expr, assign):
    assign(e)
    if isinstance(e, Lambda):
        for param in e.params:
            for p in walk_patterns(param):
                assign(p)
    if isinstance(e, LetIn):
        for p in walk_patterns(e.pat):
            assign(p)
    for c in child_exprs(e):
        _number_expr(c, assign)


def node_index(program: Program) -> dict[int, object]:
    index: dict[int, object] = {}
    for d in program.defs:
        index[d.nid] = d
        if d.pattern is not None:
            for p in walk_patterns(d.pattern):
                index[p.nid] = p
        for param in d.params:
            for p in walk_patterns(param):
                index[p.nid] = p
        for e in walk(d.rhs):
            index[e.nid] = e
            _index_inner_patterns(e, index)
    for e in walk(program.main):
        index[e.nid] = e
        _index_inner_patterns(e, index)
    return index


def _index_inner_patterns(e: Expr, index):
    if isinstance(e, Lambda):
        for param in e.params:
            for p in walk_patterns(param):
                index[p.nid] = p
    if isinstance(e, LetIn):
        for p in walk_patterns(e.pat):
            index[p.nid] = p


def num(value, frozen=False, slider=None) -> Num:
    return Num(value=Fraction(value), frozen=frozen, slider=slider)


def var(name: str) -> Var:
    return Var(name=name)


def app(fn, *args) -> App:
    fn = var(fn) if isinstance(fn, str) else fn
    return App(fn=fn, args=list(args))


def lst(*items) -> ListLit:
    return ListLit(items=list(items))


def binop(op, lhs, rhs) -> BinOp:
    return BinOp(op=op, lhs=lhs, rhs=rhs)
