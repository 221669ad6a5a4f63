"""Shared program-editing machinery for the transformation tools.

An EditContext owns a working copy of the program plus affine views of the
current execution, and provides the snap-resolution rules: reuse an in-scope
name whose value matches, extract a matching list literal into a definition,
lift bare literals into role-named definitions, or render the affine form
inline. The same rules implement value-hole resolution.
"""

from __future__ import annotations

import copy
import math
from fractions import Fraction

from .affine import Affine, AffineDeriver
from .candidates import ToolError
from .interp import ExecutionRecord, TracedValue
from .nodes import (
    App,
    AsPat,
    BinOp,
    Expr,
    LetIn,
    ListLit,
    ListPat,
    Num,
    Program,
    TopDef,
    ValueHole,
    Var,
    VarPat,
    node_index,
    walk,
)
from .prelude import PRELUDE, ROLE_NAME_BASES, X, Y
from .roles import RoleAssignment, infer_roles
from .scopes import fresh_name, names_in_program


def clone_program(program: Program) -> Program:
    """Deep copy preserving node ids, so selections keep their targets."""
    return copy.deepcopy(program)


def replace_node(root: Expr, nid: int, new: Expr) -> bool:
    """Replace the node with the given id somewhere under root. In place."""
    if isinstance(root, ListLit):
        for i, item in enumerate(root.items):
            if item.nid == nid:
                root.items[i] = new
                return True
            if replace_node(item, nid, new):
                return True
        return False
    if isinstance(root, App):
        if root.fn.nid == nid:
            root.fn = new
            return True
        for i, a in enumerate(root.args):
            if a.nid == nid:
                root.args[i] = new
                return True
            if replace_node(a, nid, new):
                return True
        return replace_node(root.fn, nid, new)
    for attr in ("body", "bound", "cond", "then", "els", "lhs", "rhs"):
        child = getattr(root, attr, None)
        if isinstance(child, Expr):
            if child.nid == nid:
                setattr(root, attr, new)
                return True
            if replace_node(child, nid, new):
                return True
    return False


def find_node(root: Expr, nid: int) -> Expr | None:
    for e in walk(root):
        if e.nid == nid:
            return e
    return None


def parent_app_of(root: Expr, nid: int):
    """(App, arg index) whose direct argument is the node, if any."""
    for e in walk(root):
        if isinstance(e, App):
            for i, a in enumerate(e.args):
                if a.nid == nid:
                    return e, i
    return None


def chain_lets(e: Expr):
    """Flatten a let-chain body into ([(pat, bound, node)], final)."""
    lets = []
    cur = e
    while isinstance(cur, LetIn):
        lets.append((cur.pat, cur.bound, cur))
        cur = cur.body
    return lets, cur


def build_chain(lets, final: Expr) -> Expr:
    out = final
    for pat, bound, _ in reversed(lets):
        out = LetIn(pat=pat, bound=bound, body=out)
    return out


class Scope:
    """Editable sequence of definitions: either the top level or a function
    body's let-chain."""

    def items(self):
        raise NotImplementedError

    def insert(self, idx: int, name: str, rhs: Expr):
        raise NotImplementedError

    def item_containing(self, nid: int) -> int:
        for i, (_, rhs) in enumerate(self.items()):
            if rhs.nid == nid or find_node(rhs, nid) is not None:
                return i
        return len(self.items())


class TopScope(Scope):
    def __init__(self, work: Program):
        self.work = work

    def items(self):
        return [(d.display_name(), d.rhs) for d in self.work.defs]

    def insert(self, idx: int, name: str, rhs: Expr):
        self.work.defs.insert(
            idx, TopDef(name=name, pattern=None, params=[], rhs=rhs)
        )

    def item_containing(self, nid: int) -> int:
        for i, d in enumerate(self.work.defs):
            if find_node(d.rhs, nid) is not None:
                return i
        return len(self.work.defs)


class FnScope(Scope):
    def __init__(self, work: Program, fn_name: str):
        self.work = work
        self.fn_name = fn_name
        d = work.def_named(fn_name)
        if d is None:
            raise ToolError("StaleSelection", f"no function named {fn_name}")
        self.d = d

    def items(self):
        lets, final = chain_lets(self.d.rhs)
        out = []
        for pat, bound, _ in lets:
            name = pat.name if isinstance(pat, VarPat) else None
            out.append((name or "<pattern>", bound))
        out.append(("<return>", final))
        return out

    def insert(self, idx: int, name: str, rhs: Expr):
        lets, final = chain_lets(self.d.rhs)
        lets.insert(idx, (VarPat(name=name), rhs, None))
        self.d.rhs = build_chain(lets, final)

    def item_containing(self, nid: int) -> int:
        lets, final = chain_lets(self.d.rhs)
        for i, (_, bound, _) in enumerate(lets):
            if find_node(bound, nid) is not None:
                return i
        return len(lets)


class EditContext:
    """Working program copy plus naming/affine context for one transformation."""

    def __init__(
        self,
        program: Program,
        record: ExecutionRecord | None,
        focus_fn: str | None = None,
        focus_ordinal: int = 1,
        roles: RoleAssignment | None = None,
    ):
        self.original = program
        self.work = clone_program(program)
        self.record = record
        self.index = node_index(program)
        self.roles = roles or infer_roles(program)
        self.names = names_in_program(program)
        self.focus_fn = focus_fn
        self.call = None
        boundary = {}
        if focus_fn is not None and record is not None:
            self.call = record.find_call(focus_fn, focus_ordinal)
            if self.call is None:
                raise ToolError(
                    "StaleSelection",
                    f"no call {focus_ordinal} of {focus_fn} in this execution",
                )
            for name, tv in self.call.locals.items():
                boundary[tv.serial] = name
        self.bind_names = boundary
        self.deriver = AffineDeriver(self.index, boundary or None)
        self.scope: Scope = (
            FnScope(self.work, focus_fn) if focus_fn else TopScope(self.work)
        )
        if focus_fn:
            self.anchor = len(chain_lets(self.scope.d.rhs)[0])
        else:
            self.anchor = len(self.work.defs)
        self.lit_names: dict[int, str] = {}
        self.num_bindings: list[tuple[str, Affine]] = []
        self.point_bindings: list[tuple[str, tuple]] = []
        # lifted definitions are inserted no later than this scope position
        self.lift_anchor: int | None = None
        self._build_binding_tables()

    # ----- binding tables ---------------------------------------------------

    def _scope_value_items(self):
        if self.record is None:
            return []
        if self.call is not None:
            return list(self.call.locals.items())
        return list(self.record.bindings.items())

    def _binding_affine(self, tv: TracedValue) -> Affine:
        # a local's own value must not stop at itself at the focus boundary
        if tv.serial in self.bind_names:
            b2 = dict(self.bind_names)
            b2.pop(tv.serial)
            return AffineDeriver(self.index, b2 or None).derive(tv)
        return self.deriver.derive(tv)

    def _build_binding_tables(self):
        for name, tv in self._scope_value_items():
            if isinstance(tv.value, Fraction):
                self.num_bindings.append((name, self._binding_affine(tv)))
                node = self.index.get(tv.trace.expr_nid)
                if isinstance(node, Num) and not node.frozen:
                    self.lit_names.setdefault(node.nid, name)
            elif tv.is_point():
                ax = self.deriver.derive(tv.value[0])
                ay = self.deriver.derive(tv.value[1])
                self.point_bindings.append((name, (ax, ay)))
                for comp, axis_tv in zip((0, 1), tv.value):
                    node = self.index.get(axis_tv.trace.expr_nid)
                    if isinstance(node, Num) and not node.frozen:
                        compname = self._component_name(name, tv, comp)
                        if compname:
                            self.lit_names.setdefault(node.nid, compname)

    def _component_name(self, holder: str, tv: TracedValue, k: int):
        # [x, y] as point = [lit, lit]: literal components carry pattern names
        for d in self.work.defs:
            if d.pattern is None:
                continue
            if holder not in d.bound_names():
                continue
            pat = d.pattern
            if isinstance(pat, AsPat):
                pat = pat.pat
            if isinstance(pat, ListPat) and len(pat.items) == 2:
                sub = pat.items[k]
                if isinstance(sub, VarPat):
                    return sub.name
        return None

    # ----- naming and insertion ----------------------------------------------

    def fresh(self, base: str) -> str:
        name = fresh_name(base, self.names)
        self.names.add(name)
        return name

    def insert_item(self, idx: int, name: str, rhs: Expr):
        self.scope.insert(idx, name, rhs)
        if idx <= self.anchor:
            self.anchor += 1

    def node_in_work(self, nid: int) -> Expr | None:
        for d in self.work.defs:
            found = find_node(d.rhs, nid)
            if found is not None:
                return found
        return find_node(self.work.main, nid)

    def _replace_everywhere(self, nid: int, new: Expr) -> bool:
        for d in self.work.defs:
            if d.rhs.nid == nid:
                d.rhs = new
                return True
            if replace_node(d.rhs, nid, new):
                return True
        if self.work.main.nid == nid:
            self.work.main = new
            return True
        return replace_node(self.work.main, nid, new)

    def lift_literal(self, lit_nid: int, base: str) -> str:
        """Move an unfrozen literal into its own definition; returns the name."""
        if lit_nid in self.lit_names:
            return self.lit_names[lit_nid]
        node = self.node_in_work(lit_nid)
        if node is None or not isinstance(node, Num):
            raise ToolError("StaleSelection", "literal to lift no longer exists")
        name = self.fresh(base)
        idx = self.scope.item_containing(lit_nid)
        if self.lift_anchor is not None:
            idx = min(idx, self.lift_anchor)
        moved = Num(value=node.value, frozen=node.frozen, slider=node.slider)
        moved.nid = node.nid
        self._replace_everywhere(lit_nid, Var(name=name))
        self.insert_item(idx, name, moved)
        self.lit_names[lit_nid] = name
        self.num_bindings.append((name, Affine({("lit", lit_nid): Fraction(1)})))
        return name

    def extract_list(self, list_nid: int, base: str) -> str:
        """Move a list literal into its own definition; lifts bare literal
        components first (vertical coordinate first, per the generated-code
        canon), so an extracted point reads [x, y]."""
        node = self.node_in_work(list_nid)
        if node is None or not isinstance(node, ListLit):
            raise ToolError("StaleSelection", "list to extract no longer exists")
        if len(node.items) == 2:
            for k in (1, 0):  # y component first
                item = node.items[k]
                if isinstance(item, Num) and not item.frozen:
                    axis_role = self.roles.of_expr(item.nid)
                    axis_base = "y" if k == 1 else "x"
                    if X in axis_role:
                        axis_base = "x"
                    if Y in axis_role:
                        axis_base = "y"
                    self.lift_literal(item.nid, axis_base)
        node = self.node_in_work(list_nid)
        name = self.fresh(base)
        idx = self.scope.item_containing(list_nid)
        moved = ListLit(items=list(node.items))
        moved.nid = node.nid
        self._replace_everywhere(list_nid, Var(name=name))
        self.insert_item(idx, name, moved)
        if self.record is not None and len(moved.items) == 2:
            pass  # affine registration happens via name lookup below
        return name

    # ----- value naming -------------------------------------------------------

    def name_of_value(self, tv: TracedValue) -> str | None:
        for name, bound in self._scope_value_items():
            if bound is tv or bound.value is tv.value:
                return name
        return None

    # ----- affine rendering ---------------------------------------------------

    def atom_position(self, atom) -> int:
        kind, key = atom
        if kind == "bind":
            for i, (name, _) in enumerate(self._scope_value_items()):
                if self.bind_names.get(key) == name:
                    return i
            return 10_000
        name = self.lit_names.get(key)
        if name is not None:
            for i, (iname, _) in enumerate(self.scope.items()):
                if iname == name:
                    return i
        return self.scope.item_containing(key)

    def atom_expr(self, atom, lift_base: str | None = None) -> Expr:
        kind, key = atom
        if kind == "bind":
            return Var(name=self.bind_names[key])
        name = self.lit_names.get(key)
        if name is not None:
            return Var(name=name)
        node = self.index.get(key)
        if lift_base is not None:
            base = lift_base
            roles = self.roles.of_expr(key)
            for role, rbase in ROLE_NAME_BASES.items():
                if role in roles:
                    base = rbase
                    break
            return Var(name=self.lift_literal(key, base))
        return Num(value=node.value)

    def render_affine(self, aff: Affine, lift: bool = True) -> Expr:
        """Program expression denoting an affine form.

        Solver-introduced multipliers and denominators are frozen so later
        canvas drags cannot silently restructure the relationship.
        """
        for name, baff in self.num_bindings:
            if baff.same_form(aff):
                return Var(name=name)
        if not aff.terms:
            return Num(value=aff.const)
        denom = aff.const.denominator
        for c in aff.terms.values():
            denom = denom * c.denominator // math.gcd(denom, c.denominator)
        # positive terms lead so differences read `x2 - x`
        atoms = sorted(
            aff.terms, key=lambda a: (aff.terms[a] < 0, self.atom_position(a))
        )
        expr: Expr | None = None
        for atom in atoms:
            n = aff.terms[atom] * denom
            assert n.denominator == 1
            n = n.numerator
            base = self.atom_expr(atom, lift_base="n" if lift else None)
            if expr is None:
                if n == 1:
                    expr = base
                elif n == -1:
                    expr = BinOp(op="*", lhs=Num(value=Fraction(-1), frozen=True),
                                 rhs=base)
                else:
                    expr = BinOp(op="*", lhs=Num(value=Fraction(n), frozen=True),
                                 rhs=base)
            else:
                op = "+" if n > 0 else "-"
                mag = abs(n)
                term = base if mag == 1 else BinOp(
                    op="*", lhs=Num(value=Fraction(mag), frozen=True), rhs=base
                )
                expr = BinOp(op=op, lhs=expr, rhs=term)
        nc = aff.const * denom
        if nc != 0:
            assert nc.denominator == 1
            op = "+" if nc > 0 else "-"
            expr = BinOp(op=op, lhs=expr, rhs=Num(value=Fraction(abs(nc.numerator))))
        if denom != 1:
            expr = BinOp(op="/", lhs=expr, rhs=Num(value=Fraction(denom), frozen=True))
        return expr

    # ----- snap / hole resolution ----------------------------------------------

    def coord_expr(self, aff: Affine, axis: str) -> Expr:
        for name, baff in self.num_bindings:
            if baff.same_form(aff):
                return Var(name=name)
        if len(aff.terms) == 1 and aff.const == 0:
            (atom,) = aff.terms
            if aff.terms[atom] == 1:
                return self.atom_expr(atom, lift_base=axis)
        if not aff.terms:
            return Num(value=aff.const)
        # composite: vertical coordinates with whole coefficients get their
        # own definition; horizontal (and fractional) forms stay inline
        denom = aff.const.denominator
        for c in aff.terms.values():
            denom = denom * c.denominator // math.gcd(denom, c.denominator)
        if axis == "y" and denom == 1:
            rhs = self.render_affine(aff)
            name = self.fresh("y")
            self.insert_item(self.anchor, name, rhs)
            self.num_bindings.append((name, aff))
            return Var(name=name)
        return self.render_affine(aff)

    def point_expr_from_feature(self, feature) -> Expr:
        """Expression for a snapped point target."""
        backing = getattr(feature, "backing", None)
        if backing is not None:
            name = self.name_of_value(backing)
            if name is not None:
                return Var(name=name)
            nid = backing.trace.expr_nid
            node = self.index.get(nid)
            if isinstance(node, ListLit) and not backing.trace.prelude_internal:
                base = "xYPair"
                at = parent_app_of_work(self.work, nid)
                if at is not None:
                    app_node, arg_i = at
                    if isinstance(app_node.fn, Var) and app_node.fn.name in PRELUDE:
                        decl = PRELUDE[app_node.fn.name]
                        if arg_i < len(decl.params):
                            en = decl.params[arg_i].extract_name
                            if en:
                                base = en
                name = self.extract_list(nid, base)
                aff = (
                    self.deriver.derive(backing.value[0]),
                    self.deriver.derive(backing.value[1]),
                )
                self.point_bindings.append((name, aff))
                return Var(name=name)
        # derived features (corners, centers) resolve component-wise
        ax, ay = feature.affines
        y_expr = self.coord_expr(ay, "y")
        x_expr = self.coord_expr(ax, "x")
        return ListLit(items=[x_expr, y_expr])


def parent_app_of_work(work: Program, nid: int):
    for d in work.defs:
        found = parent_app_of(d.rhs, nid)
        if found is not None:
            return found
    return parent_app_of(work.main, nid)


def main_output_list(work: Program) -> ListLit | None:
    """The list argument of `concat` in the `svg (concat [...])` main."""
    m = work.main
    if (
        isinstance(m, App)
        and isinstance(m.fn, Var)
        and m.fn.name == "svg"
        and len(m.args) == 1
        and isinstance(m.args[0], App)
        and isinstance(m.args[0].fn, Var)
        and m.args[0].fn.name == "concat"
        and len(m.args[0].args) == 1
        and isinstance(m.args[0].args[0], ListLit)
    ):
        return m.args[0].args[0]
    return None


def add_to_output(work: Program, name: str, as_list: bool = False):
    """Append a drawn definition to the program's output.

    Scalar shapes join the trailing inner shape list (created on demand);
    list-valued definitions become entries of the concat list directly.
    """
    out = main_output_list(work)
    if out is None:
        raise ToolError("FocusHasNoOutputList", "main expression has no shape list")
    if as_list:
        out.items.append(Var(name=name))
        return
    if out.items and isinstance(out.items[-1], ListLit):
        out.items[-1].items.append(Var(name=name))
    else:
        out.items.append(ListLit(items=[Var(name=name)]))


def remove_from_output(work: Program, name: str):
    out = main_output_list(work)
    if out is None:
        return
    for entry in list(out.items):
        if isinstance(entry, Var) and entry.name == name:
            out.items.remove(entry)
        elif isinstance(entry, ListLit):
            entry.items = [
                i for i in entry.items if not (isinstance(i, Var) and i.name == name)
            ]
    out.items = [e for e in out.items if not (isinstance(e, ListLit) and not e.items)]


def resolve_value_holes(program: Program, record: ExecutionRecord) -> Program:
    """Replace every transient value hole with an equivalent expression.

    The program must be the record's program with holes spliced in; other
    nodes keep their original ids so provenance stays aligned.
    """
    from .parser import parse
    from .unparse import unparse

    holes = [
        e for e in _walk_program_exprs(program) if isinstance(e, ValueHole)
    ]
    if not holes:
        return program
    for i, hole in enumerate(holes):
        if hole.nid < 0:
            hole.nid = -(1000 + i)  # unique sentinels, disjoint from real ids
    hole_nids = [e.nid for e in holes]
    ctx = EditContext(program, record)
    for nid in hole_nids:
        hole = ctx.node_in_work(nid)
        target: TracedValue = hole.target
        if target is None:
            raise ToolError("UnresolvableHole", "value hole carries no target")
        if target.is_point():
            from .widgets import Feature

            feature = Feature(
                kind="point",
                affines=(
                    ctx.deriver.derive(target.value[0]),
                    ctx.deriver.derive(target.value[1]),
                ),
                backing=target,
            )
            replacement = ctx.point_expr_from_feature(feature)
        elif isinstance(target.value, Fraction):
            name = ctx.name_of_value(target)
            if name is not None:
                replacement = Var(name=name)
            else:
                aff = ctx.deriver.derive(target)
                replacement = ctx.render_affine(aff)
        else:
            raise ToolError(
                "UnresolvableHole", "only numeric and point holes resolve"
            )
        ctx._replace_everywhere(nid, replacement)
    return parse(unparse(ctx.work))


def _walk_program_exprs(program: Program):
    for e in program.top_exprs():
        yield from walk(e)
