"""Scope analysis: binding resolution, use sites, and fresh-name generation."""

from __future__ import annotations

from dataclasses import dataclass, field

from .nodes import (
    App,
    AsPat,
    BinOp,
    Expr,
    If,
    Lambda,
    LetIn,
    ListLit,
    Pattern,
    Program,
    Var,
    VarPat,
    walk_patterns,
)
from .prelude import PRELUDE


class UnboundVariable(Exception):
    def __init__(self, name: str, nid: int):
        super().__init__(f"unbound variable {name!r}")
        self.name = name
        self.nid = nid


@dataclass(frozen=True)
class Binding:
    kind: str  # topdef | param | let | lambda | prelude
    name: str
    nid: int  # binding-site node id (-1 for prelude)
    owner_nid: int = -1  # enclosing def/lambda node id


@dataclass
class ScopeInfo:
    binding_of: dict[int, Binding] = field(default_factory=dict)  # var nid -> binding
    uses: dict[int, list[int]] = field(default_factory=dict)  # binding nid -> var nids
    top_names: list[str] = field(default_factory=list)
    all_bound_names: set[str] = field(default_factory=set)

    def uses_of(self, binding_nid: int) -> list[int]:
        return self.uses.get(binding_nid, [])


def _pattern_bindings(pat: Pattern, kind: str, owner: int) -> dict[str, Binding]:
    out = {}
    for p in walk_patterns(pat):
        if isinstance(p, VarPat):
            out[p.name] = Binding(kind, p.name, p.nid, owner)
        elif isinstance(p, AsPat):
            out[p.name] = Binding(kind, p.name, p.nid, owner)
    return out


def analyze(program: Program) -> ScopeInfo:
    """Resolve every variable occurrence to its binding, innermost-first."""
    info = ScopeInfo()
    prelude_env = {name: Binding("prelude", name, -1) for name in PRELUDE}
    env: list[dict[str, Binding]] = [prelude_env, {}]
    top_env = env[1]

    def record(var: Var, binding: Binding):
        info.binding_of[var.nid] = binding
        info.uses.setdefault(binding.nid, []).append(var.nid)

    def lookup(name: str):
        for frame in reversed(env):
            if name in frame:
                return frame[name]
        return None

    def visit(e: Expr, owner: int):
        if isinstance(e, Var):
            b = lookup(e.name)
            if b is None:
                raise UnboundVariable(e.name, e.nid)
            record(e, b)
        elif isinstance(e, ListLit):
            for i in e.items:
                visit(i, owner)
        elif isinstance(e, App):
            visit(e.fn, owner)
            for a in e.args:
                visit(a, owner)
        elif isinstance(e, BinOp):
            visit(e.lhs, owner)
            visit(e.rhs, owner)
        elif isinstance(e, If):
            visit(e.cond, owner)
            visit(e.then, owner)
            visit(e.els, owner)
        elif isinstance(e, Lambda):
            frame = {}
            for p in e.params:
                frame.update(_pattern_bindings(p, "lambda", e.nid))
            env.append(frame)
            info.all_bound_names.update(frame)
            visit(e.body, e.nid)
            env.pop()
        elif isinstance(e, LetIn):
            visit(e.bound, owner)
            frame = _pattern_bindings(e.pat, "let", owner)
            env.append(frame)
            info.all_bound_names.update(frame)
            visit(e.body, owner)
            env.pop()

    for d in program.defs:
        if d.name is not None:
            own = Binding("topdef", d.name, d.nid)
            top_env[d.name] = own  # visible to its own body (recursion)
            info.top_names.append(d.name)
            info.all_bound_names.add(d.name)
            frame = {}
            for p in d.params:
                frame.update(_pattern_bindings(p, "param", d.nid))
            env.append(frame)
            info.all_bound_names.update(frame)
            visit(d.rhs, d.nid)
            env.pop()
        else:
            visit(d.rhs, d.nid)
            binds = _pattern_bindings(d.pattern, "topdef", d.nid)
            top_env.update(binds)
            info.top_names.extend(binds)
            info.all_bound_names.update(binds)
    visit(program.main, -1)
    return info


def free_vars(e: Expr, bound: set[str] | None = None) -> set[str]:
    """Names used in e that are not bound within e (prelude names included)."""
    bound = set(bound or ())
    out: set[str] = set()

    def visit(node: Expr, local: set[str]):
        if isinstance(node, Var):
            if node.name not in local:
                out.add(node.name)
        elif isinstance(node, Lambda):
            inner = set(local)
            for p in node.params:
                for sub in walk_patterns(p):
                    if isinstance(sub, (VarPat, AsPat)):
                        inner.add(sub.name)
            visit(node.body, inner)
        elif isinstance(node, LetIn):
            visit(node.bound, local)
            inner = set(local)
            for sub in walk_patterns(node.pat):
                if isinstance(sub, (VarPat, AsPat)):
                    inner.add(sub.name)
            visit(node.body, inner)
        else:
            from .nodes import child_exprs

            for c in child_exprs(node):
                visit(c, local)

    visit(e, bound)
    return out


def fresh_name(base: str, taken: set[str]) -> str:
    """Numbered-suffix naming.

    A free base is returned as-is. A taken user name continues base2, base3,
    ... (the bare name counts as the first of the series); prelude names are
    never reused bare, so their series starts at base1.
    """
    in_prelude = base in PRELUDE
    if base not in taken and not in_prelude:
        return base
    k = 1 if in_prelude else 2
    while f"{base}{k}" in taken or f"{base}{k}" in PRELUDE:
        k += 1
    return f"{base}{k}"


def names_in_program(program: Program) -> set[str]:
    info = analyze(program)
    return set(info.all_bound_names)
