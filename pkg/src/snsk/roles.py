"""Role inference: semantic tags (X, Y, Point, distances, Color, ...) for
values and parameters, propagated to a least fixed point from standard
library signatures and usage rules such as "a number added to an X is a
HorizontalDistance". Roles gate widget emission, custom-tool exposure,
generated names, and default arguments.
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
    Program,
    TopDef,
    Var,
    VarPat,
)
from .prelude import (
    COLOR,
    COUNT,
    HDIST,
    HEIGHT,
    PRELUDE,
    POINT,
    POINT_LIST,
    ROLE_DEFAULTS,
    STROKE_WIDTH,
    VDIST,
    WIDTH,
    X,
    Y,
)
from .scopes import ScopeInfo, analyze

H_LIKE = {HDIST, WIDTH}
V_LIKE = {VDIST, HEIGHT}


@dataclass
class RoleAssignment:
    expr_roles: dict[int, set] = field(default_factory=dict)
    binding_roles: dict[int, set] = field(default_factory=dict)
    fn_returns: dict[int, set] = field(default_factory=dict)  # def/lambda nid

    def of_expr(self, nid: int) -> set:
        return self.expr_roles.get(nid, set())

    def of_binding(self, nid: int) -> set:
        return self.binding_roles.get(nid, set())


class _Inference:
    def __init__(self, program: Program, scopes: ScopeInfo):
        self.program = program
        self.scopes = scopes
        self.out = RoleAssignment()
        self.changed = False
        # binding-site nid per (def nid, param position) for call propagation
        self.fn_params: dict[str, list] = {}
        self.fn_def: dict[str, TopDef] = {}
        for d in program.defs:
            if d.name is not None and d.params:
                self.fn_params[d.name] = d.params
                self.fn_def[d.name] = d

    def add_expr(self, nid: int, roles):
        cur = self.out.expr_roles.setdefault(nid, set())
        before = len(cur)
        cur.update(roles)
        if len(cur) != before:
            self.changed = True

    def add_binding(self, nid: int, roles):
        cur = self.out.binding_roles.setdefault(nid, set())
        before = len(cur)
        cur.update(roles)
        if len(cur) != before:
            self.changed = True

    def add_return(self, fn_nid: int, roles):
        cur = self.out.fn_returns.setdefault(fn_nid, set())
        before = len(cur)
        cur.update(roles)
        if len(cur) != before:
            self.changed = True

    def run(self) -> RoleAssignment:
        for _ in range(24):
            self.changed = False
            for d in self.program.defs:
                self.seed_pattern(d.pattern) if d.pattern is not None else None
                for p in d.params:
                    self.seed_pattern(p)
                rhs_roles = self.visit(d.rhs)
                if d.name is not None and not d.params:
                    self.add_binding(d.nid, rhs_roles)
                    self.give_to_expr(d.rhs, self.out.of_binding(d.nid))
                if d.name is not None and d.params:
                    self.add_return(d.nid, rhs_roles)
                if d.pattern is not None:
                    self.bind_pattern_roles(d.pattern, rhs_roles, d.rhs)
                    if isinstance(d.pattern, AsPat):
                        self.give_to_expr(
                            d.rhs, self.out.of_binding(d.pattern.nid)
                        )
            self.visit(self.program.main)
            if not self.changed:
                break
        return self.out

    def seed_pattern(self, pat):
        if isinstance(pat, AsPat) and isinstance(pat.pat, ListPat):
            if len(pat.pat.items) == 2:
                self.add_binding(pat.nid, {POINT})
                comps = pat.pat.items
                if isinstance(comps[0], VarPat):
                    self.add_binding(comps[0].nid, {X})
                if isinstance(comps[1], VarPat):
                    self.add_binding(comps[1].nid, {Y})

    def bind_pattern_roles(self, pat, roles, rhs):
        if isinstance(pat, AsPat):
            self.add_binding(pat.nid, roles)
            self.bind_pattern_roles(pat.pat, roles, rhs)
        elif isinstance(pat, ListPat) and POINT in roles and len(pat.items) == 2:
            for sub, axis in zip(pat.items, (X, Y)):
                if isinstance(sub, VarPat):
                    self.add_binding(sub.nid, {axis})
        elif isinstance(pat, VarPat):
            self.add_binding(pat.nid, roles)

    def binding_of(self, var: Var):
        return self.scopes.binding_of.get(var.nid)

    def give_to_expr(self, e: Expr, roles):
        """Push roles onto an expression and through it to its binding."""
        if not roles:
            return
        self.add_expr(e.nid, roles)
        if isinstance(e, Var):
            b = self.binding_of(e)
            if b is not None and b.nid >= 0:
                self.add_binding(b.nid, roles)
        if isinstance(e, ListLit) and len(e.items) == 2 and POINT in roles:
            self.give_to_expr(e.items[0], {X})
            self.give_to_expr(e.items[1], {Y})

    def visit(self, e: Expr) -> set:
        roles: set = set()
        if isinstance(e, Num):
            roles = self.out.of_expr(e.nid)
        elif isinstance(e, Var):
            b = self.binding_of(e)
            if b is not None and b.nid >= 0:
                roles = set(self.out.of_binding(b.nid))
        elif isinstance(e, ListLit):
            item_roles = [self.visit(i) for i in e.items]
            if len(e.items) == 2 and X in item_roles[0] and Y in item_roles[1]:
                roles = {POINT}
            if item_roles and all(POINT in r for r in item_roles):
                roles = roles | {POINT_LIST}
        elif isinstance(e, BinOp):
            roles = self.visit_binop(e)
        elif isinstance(e, App):
            roles = self.visit_app(e)
        elif isinstance(e, If):
            self.visit(e.cond)
            roles = self.visit(e.then) | self.visit(e.els)
        elif isinstance(e, LetIn):
            bound = self.visit(e.bound)
            self.bind_pattern_roles(e.pat, bound, e.bound)
            self.seed_pattern(e.pat)
            if isinstance(e.pat, VarPat):
                self.give_to_expr(e.bound, self.out.of_binding(e.pat.nid))
            roles = self.visit(e.body)
        elif isinstance(e, Lambda):
            for p in e.params:
                self.seed_pattern(p)
            body = self.visit(e.body)
            self.add_return(e.nid, body)
            roles = set()
        self.add_expr(e.nid, roles)
        return set(self.out.of_expr(e.nid))

    def visit_binop(self, e: BinOp) -> set:
        lr = self.visit(e.lhs)
        rr = self.visit(e.rhs)
        roles: set = set()
        if e.op in ("+", "-"):
            if X in lr:
                self.give_to_expr(e.rhs, {HDIST})
                roles.add(X)
            if Y in lr:
                self.give_to_expr(e.rhs, {VDIST})
                roles.add(Y)
            if X in rr and e.op == "+":
                self.give_to_expr(e.lhs, {HDIST})
                roles.add(X)
            if Y in rr and e.op == "+":
                self.give_to_expr(e.lhs, {VDIST})
                roles.add(Y)
            if e.op == "-" and X in lr and X in rr:
                roles = {HDIST}
            if e.op == "-" and Y in lr and Y in rr:
                roles = {VDIST}
        return roles

    def visit_app(self, e: App) -> set:
        arg_roles = [self.visit(a) for a in e.args]
        self.visit(e.fn)
        if not isinstance(e.fn, Var):
            return set()
        name = e.fn.name
        binding = self.binding_of(e.fn)
        if binding is not None and binding.kind == "prelude":
            decl = PRELUDE[name]
            for param, arg in zip(decl.params, e.args):
                if param.role is not None:
                    self.give_to_expr(arg, {param.role})
            if name == "map" and len(e.args) == 2:
                fn_arg = e.args[0]
                ret = self._callee_returns(fn_arg)
                if ret is not None and POINT in ret:
                    return {POINT_LIST}
                return set()
            if name == "reverse" and len(e.args) == 1:
                return set(arg_roles[0] & {POINT_LIST})
            if decl.returns == POINT_LIST:
                return {POINT_LIST}
            return set()
        # user-defined function: exchange roles between args and params
        if name in self.fn_params:
            d = self.fn_def[name]
            for param, arg, got in zip(self.fn_params[name], e.args, arg_roles):
                pr = self._pattern_role(param)
                if pr:
                    self.give_to_expr(arg, pr)
                if isinstance(param, VarPat) and got:
                    self.add_binding(param.nid, got)
                if isinstance(param, AsPat) and POINT in got:
                    self.add_binding(param.nid, {POINT})
            return set(self.out.fn_returns.get(d.nid, set()))
        return set()

    def _callee_returns(self, fn_expr: Expr):
        if isinstance(fn_expr, Lambda):
            return self.out.fn_returns.get(fn_expr.nid)
        if isinstance(fn_expr, Var):
            d = self.fn_def.get(fn_expr.name)
            if d is not None:
                return self.out.fn_returns.get(d.nid)
        return None

    def _pattern_role(self, pat) -> set:
        if isinstance(pat, AsPat) and isinstance(pat.pat, ListPat):
            return {POINT}
        if isinstance(pat, VarPat):
            return set(self.out.of_binding(pat.nid))
        return set()


def infer_roles(program: Program, scopes: ScopeInfo | None = None) -> RoleAssignment:
    scopes = scopes or analyze(program)
    return _Inference(program, scopes).run()


@dataclass
class ToolSignature:
    name: str
    arity: int
    point_params: list  # ("pattern", i) single-point pattern, or ("xy", i, j)
    dist_params: list  # (i, "x" | "y")
    other_params: list  # (i, role or None)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "arity": self.arity,
            "pointParams": [list(p) for p in self.point_params],
            "distParams": [list(p) for p in self.dist_params],
            "otherParams": [list(p) for p in self.other_params],
        }


def tool_signature(d: TopDef, roles: RoleAssignment) -> ToolSignature | None:
    """Exposure rule: two points, or one point plus an axis distance."""
    point_params = []
    dist_params = []
    other_params = []
    taken = set()
    params = d.params
    for i, p in enumerate(params):
        if isinstance(p, AsPat) or (
            isinstance(p, VarPat) and POINT in roles.of_binding(p.nid)
        ):
            if isinstance(p, AsPat) and isinstance(p.pat, ListPat):
                point_params.append(("pattern", i))
                taken.add(i)
            elif isinstance(p, VarPat) and POINT in roles.of_binding(p.nid):
                point_params.append(("pattern", i))
                taken.add(i)
    i = 0
    while i < len(params) - 1:
        a, b = params[i], params[i + 1]
        if (
            i not in taken
            and i + 1 not in taken
            and isinstance(a, VarPat)
            and isinstance(b, VarPat)
        ):
            ra = roles.of_binding(a.nid)
            rb = roles.of_binding(b.nid)
            if X in ra and Y in rb:
                point_params.append(("xy", i, i + 1))
                taken.update((i, i + 1))
                i += 2
                continue
            if Y in ra and X in rb:  # pre-reorder parameter order
                point_params.append(("xy", i + 1, i))
                taken.update((i, i + 1))
                i += 2
                continue
        i += 1
    for i, p in enumerate(params):
        if i in taken:
            continue
        r = roles.of_binding(p.nid) if isinstance(p, VarPat) else set()
        if r & H_LIKE:
            dist_params.append((i, "x"))
        elif r & V_LIKE:
            dist_params.append((i, "y"))
        else:
            main = None
            for candidate in (COLOR, STROKE_WIDTH, COUNT):
                if candidate in r:
                    main = candidate
                    break
            other_params.append((i, main))
    exposed = len(point_params) >= 2 or (len(point_params) == 1 and dist_params)
    if not exposed:
        return None
    return ToolSignature(
        name=d.name,
        arity=len(params),
        point_params=point_params,
        dist_params=dist_params,
        other_params=other_params,
    )


def custom_tools(program: Program, roles: RoleAssignment | None = None):
    roles = roles or infer_roles(program)
    out = []
    for d in program.defs:
        if d.name is None or not d.params:
            continue
        sig = tool_signature(d, roles)
        if sig is not None:
            out.append(sig)
    return out


def default_for_role(role: str | None) -> Fraction:
    if role in ROLE_DEFAULTS:
        return ROLE_DEFAULTS[role]
    return Fraction(100)
