"""Generic refactorings: rename, argument add/remove/reorder, list reorder,
add-to-output, termination-condition selection, and expression focusing.

The focused expression is encoded as a reserved comment `--*focus:<fn>:<k>`
placed above the focused function's definition (k = call ordinal, 0 for a
definition focus); being an ordinary comment, it survives text edits.
"""

from __future__ import annotations

from fractions import Fraction

from .candidates import Candidate, ToolError, make_candidate, rank_candidates
from .edits import build_chain, chain_lets, clone_program, find_node
from .interp import ExecutionRecord, dependencies, _values_equal
from .nodes import (
    App,
    BinOp,
    Expr,
    If,
    Lambda,
    LetIn,
    ListLit,
    Num,
    Program,
    TerminationHole,
    Var,
    VarPat,
    node_index,
    walk,
    walk_patterns,
)
from .parser import parse
from .roles import default_for_role, infer_roles
from .scopes import analyze
from .unparse import unparse
from .widgets import Feature, resolve_selection

FOCUS_PREFIX = "--*focus:"


def find_focus(program: Program):
    """(fn name, call ordinal) from the focus comment, if one is present."""
    for d in program.defs:
        for c in d.comments:
            if c.startswith(FOCUS_PREFIX):
                body = c[len(FOCUS_PREFIX):]
                fn, _, ordinal = body.partition(":")
                try:
                    return fn, int(ordinal or "1")
                except ValueError:
                    return fn, 1
    return None


def focus_expression(program: Program, target: dict) -> Program:
    """Insert or retarget the focus comment; a second focus replaces the first."""
    if "call" in target:
        fn = target["call"]["fn"]
        ordinal = target["call"].get("ordinal", 1)
    elif "def" in target:
        fn = target["def"]
        ordinal = 0
    else:
        raise ToolError("NotFocusable", f"cannot focus {target!r}")
    work = clone_program(program)
    d = work.def_named(fn)
    if d is None:
        raise ToolError("NotFocusable", f"no definition named {fn}")
    for other in work.defs:
        other.comments = [
            c for c in other.comments if not c.startswith(FOCUS_PREFIX)
        ]
    d.comments.append(f"{FOCUS_PREFIX}{fn}:{ordinal}")
    return parse(unparse(work))


def unfocus(program: Program) -> Program:
    work = clone_program(program)
    for d in work.defs:
        d.comments = [c for c in d.comments if not c.startswith(FOCUS_PREFIX)]
    return parse(unparse(work))


# --- rename -------------------------------------------------------------------


def _find_binding_site(program: Program, spec) -> int:
    """Node id of the binding to rename."""
    info = analyze(program)
    if isinstance(spec, str):
        spec = {"name": spec}
    name = spec["name"]
    fn = spec.get("fn")
    candidates = []
    for d in program.defs:
        if fn is not None and d.name != fn:
            continue
        if fn is None:
            if d.name == name:
                return d.nid
            if d.pattern is not None:
                for p in walk_patterns(d.pattern):
                    if getattr(p, "name", None) == name:
                        return p.nid
        else:
            for p in d.params:
                for sub in walk_patterns(p):
                    if getattr(sub, "name", None) == name:
                        return sub.nid
            for e in walk(d.rhs):
                if isinstance(e, LetIn):
                    for sub in walk_patterns(e.pat):
                        if getattr(sub, "name", None) == name:
                            candidates.append(sub.nid)
    if candidates:
        return candidates[0]
    raise ToolError("StaleSelection", f"no binding named {name!r}")


def rename(program: Program, binding, new_name: str) -> Candidate:
    if not new_name.isidentifier():
        raise ToolError("NameCollision", f"{new_name!r} is not a valid identifier")
    nid = binding if isinstance(binding, int) else _find_binding_site(program, binding)
    info = analyze(program)
    index = node_index(program)
    site = index.get(nid)
    if site is None:
        raise ToolError("StaleSelection", "binding no longer exists")
    old_name = getattr(site, "name", None)
    if old_name is None:
        raise ToolError("StaleSelection", "selection is not a named binding")
    work = clone_program(program)
    wsite = _node_anywhere(work, nid)
    wsite.name = new_name
    for use in info.uses_of(nid):
        target = _node_anywhere(work, use)
        target.name = new_name
    cand = make_candidate(
        program, work, f"Rename {old_name} to {new_name}"
    )
    _check_rename_capture(program, cand.program, nid, old_name, new_name)
    return cand


def _node_anywhere(work: Program, nid: int):
    for d in work.defs:
        if d.nid == nid:
            return d
        if d.pattern is not None:
            for p in walk_patterns(d.pattern):
                if p.nid == nid:
                    return p
        for p in d.params:
            for sub in walk_patterns(p):
                if sub.nid == nid:
                    return sub
        found = find_node(d.rhs, nid)
        if found is not None:
            return found
        for e in walk(d.rhs):
            if isinstance(e, LetIn):
                for sub in walk_patterns(e.pat):
                    if sub.nid == nid:
                        return sub
            if isinstance(e, Lambda):
                for p in e.params:
                    for sub in walk_patterns(p):
                        if sub.nid == nid:
                            return sub
    found = find_node(work.main, nid)
    if found is not None:
        return found
    raise ToolError("StaleSelection", "node disappeared during rename")


def _check_rename_capture(old: Program, new: Program, nid, old_name, new_name):
    """The renamed binding must keep exactly its old use sites."""
    if old_name == new_name:
        return
    old_info = analyze(old)
    new_info = analyze(new)
    old_uses = len(old_info.uses_of(nid))
    renamed_counts = [
        len(new_info.uses_of(b.nid))
        for b in set(new_info.binding_of.values())
        if b.name == new_name and b.nid >= 0
    ]
    if sum(renamed_counts) != old_uses or len(
        [c for c in renamed_counts if c]
    ) > 1:
        raise ToolError(
            "NameCollision", f"renaming to {new_name!r} would capture uses"
        )


# --- arguments ------------------------------------------------------------------


def _fn_def(program: Program, fn: str):
    d = program.def_named(fn)
    if d is None or not d.params:
        raise ToolError("StaleSelection", f"no function named {fn}")
    return d


def _call_sites(program: Program, fn: str):
    """Direct applications and bare value references of a function."""
    calls, refs = [], []
    for e in _all_exprs(program):
        if isinstance(e, App) and isinstance(e.fn, Var) and e.fn.name == fn:
            calls.append(e)
    for e in _all_exprs(program):
        if isinstance(e, Var) and e.name == fn:
            if not any(c.fn is e for c in calls):
                refs.append(e)
    return calls, refs


def _all_exprs(program: Program):
    for top in program.top_exprs():
        yield from walk(top)


def _value_literal(tv) -> Expr:
    if isinstance(tv.value, Fraction):
        return Num(value=tv.value)
    if tv.is_point():
        return ListLit(
            items=[Num(value=tv.value[0].value), Num(value=tv.value[1].value)]
        )
    raise ToolError(
        "CallSitesDisagree", "argument value cannot be written as a literal"
    )


def add_argument(
    program: Program, record: ExecutionRecord, fn: str, sel: dict
) -> list[Candidate]:
    d = _fn_def(program, fn)
    focus = find_focus(program) or (fn, 1)
    feature = resolve_selection(record, sel, focus=(fn, focus[1]))
    if not isinstance(feature, Feature) or feature.backing is None:
        raise ToolError("StaleSelection", "selection has no traced value")
    deps = dependencies(feature.backing)
    lets, _ = chain_lets(d.rhs)
    candidates = []
    seen_exprs = set()
    for i, (pat, bound, _node) in enumerate(lets):
        if not isinstance(pat, VarPat):
            continue
        if bound.nid not in deps:  # the bound value itself fed the selection
            continue
        try:
            candidates.append(
                _lift_let_to_param(program, record, fn, i, pat.name)
            )
        except ToolError:
            continue  # value not expressible at call sites
        seen_exprs.add(pat.name)
    index = node_index(program)
    for nid in sorted(deps):
        node = index.get(nid)
        if isinstance(node, Num) and not node.frozen:
            if find_node(d.rhs, nid) is None:
                continue
            if any(find_node(bound, nid) is not None
                   for pat, bound, _n in lets
                   if isinstance(pat, VarPat) and pat.name in seen_exprs):
                continue
            candidates.append(_lift_literal_to_param(program, record, fn, nid))
    if not candidates:
        raise ToolError(
            "NoInternalDependencies",
            "selection does not depend on anything inside the function",
        )
    return rank_candidates(candidates)


def _lift_let_to_param(program, record, fn, let_index, let_name) -> Candidate:
    work = clone_program(program)
    d = work.def_named(fn)
    lets, final = chain_lets(d.rhs)
    pat, bound, _ = lets.pop(let_index)
    d.params.append(VarPat(name=let_name))
    d.rhs = build_chain(lets, final)
    value = None
    for call in record.calls_of(fn):
        if let_name in call.locals:
            value = call.locals[let_name]
            break
    if value is None:
        raise ToolError("StaleSelection", f"{let_name} never evaluated")
    _append_arg_everywhere(work, fn, _value_literal(value), len(d.params) - 1)
    return make_candidate(
        program, work, f"Add argument {let_name} to {fn}"
    )


def _lift_literal_to_param(program, record, fn, lit_nid) -> Candidate:
    from .edits import replace_node
    from .prelude import ROLE_NAME_BASES
    from .scopes import fresh_name, names_in_program

    work = clone_program(program)
    d = work.def_named(fn)
    roles = infer_roles(program)
    base = "n"
    for role, rbase in ROLE_NAME_BASES.items():
        if role in roles.of_expr(lit_nid):
            base = rbase
            break
    name = fresh_name(base, names_in_program(program))
    lit = find_node(d.rhs, lit_nid)
    value = lit.value
    if d.rhs.nid == lit_nid:
        d.rhs = Var(name=name)
    else:
        replace_node(d.rhs, lit_nid, Var(name=name))
    d.params.append(VarPat(name=name))
    _append_arg_everywhere(work, fn, Num(value=value), len(d.params) - 1)
    return make_candidate(
        program, work, f"Add argument {name} = {value} to {fn}"
    )


def _append_arg_everywhere(work: Program, fn: str, arg: Expr, new_arity_minus_one):
    from .nodes import clone
    from .scopes import fresh_name, names_in_program

    calls, refs = _call_sites(work, fn)
    for call in calls:
        call.args.append(clone(arg))
    if refs:
        names = names_in_program(work)
        d = work.def_named(fn)
        for ref in refs:
            wrap_params = []
            wrap_args = []
            for i in range(len(d.params) - 1):
                pname = fresh_name(f"a{i + 1}", names)
                names.add(pname)
                wrap_params.append(VarPat(name=pname))
                wrap_args.append(Var(name=pname))
            lam = Lambda(
                params=wrap_params,
                body=App(fn=Var(name=fn), args=wrap_args + [clone(arg)]),
            )
            _replace_expr_everywhere(work, ref.nid, lam)


def _replace_expr_everywhere(work: Program, nid: int, new: Expr):
    from .edits import replace_node

    for d in work.defs:
        if d.rhs.nid == nid:
            d.rhs = new
            return
        if replace_node(d.rhs, nid, new):
            return
    if work.main.nid == nid:
        work.main = new
        return
    replace_node(work.main, nid, new)


def remove_argument(
    program: Program, record: ExecutionRecord, fn: str, param_index: int
) -> Candidate:
    d = _fn_def(program, fn)
    if not 0 <= param_index < len(d.params):
        raise ToolError("IndexOutOfRange", f"{fn} has {len(d.params)} parameters")
    pat = d.params[param_index]
    if not isinstance(pat, VarPat):
        raise ToolError("CallSitesDisagree", "only plain parameters can be removed")
    calls = record.calls_of(fn)
    value_expr = None
    if calls:
        first = calls[0].args[param_index]
        for call in calls[1:]:
            if not _values_equal(call.args[param_index], first):
                raise ToolError(
                    "CallSitesDisagree",
                    f"call sites pass different values for {pat.name}",
                )
        value_expr = _value_literal(first)
    else:
        roles = infer_roles(program)
        value_expr = Num(value=default_for_role(_main_role(roles, pat)))
    work = clone_program(program)
    wd = work.def_named(fn)
    wd.params.pop(param_index)
    lets, final = chain_lets(wd.rhs)
    lets.insert(0, (VarPat(name=pat.name), value_expr, None))
    wd.rhs = build_chain(lets, final)
    call_nodes, refs = _call_sites(work, fn)
    if refs:
        raise ToolError(
            "CallSitesDisagree", f"{fn} is referenced as a value; cannot rewrite"
        )
    for call in call_nodes:
        if param_index < len(call.args):
            call.args.pop(param_index)
    return make_candidate(
        program, work, f"Remove argument {pat.name} from {fn}"
    )


def _main_role(roles, pat):
    r = roles.of_binding(pat.nid)
    for candidate in ("Color", "StrokeWidth", "Count"):
        if candidate in r:
            return candidate
    return None


def reorder_arguments(program: Program, fn: str, order: list[int]) -> Candidate:
    d = _fn_def(program, fn)
    if sorted(order) != list(range(len(d.params))):
        raise ToolError(
            "NotAPermutation", f"{order} is not a permutation of 0..{len(d.params) - 1}"
        )
    work = clone_program(program)
    wd = work.def_named(fn)
    wd.params = [wd.params[i] for i in order]
    calls, refs = _call_sites(work, fn)
    if refs:
        raise ToolError(
            "NotAPermutation", f"{fn} is referenced as a value; cannot reorder"
        )
    for call in calls:
        if len(call.args) == len(order):
            call.args = [call.args[i] for i in order]
    names = [getattr(p, "name", "?") for p in wd.params]
    return make_candidate(
        program, work, f"Reorder {fn} arguments to {' '.join(names)}"
    )


# --- lists and outputs -----------------------------------------------------------


def _locate_list(program: Program, target: dict) -> int:
    """Node id of the list literal a reorder/delete targets."""
    if "def" in target:
        d = program.def_named(target["def"])
        if d is None:
            raise ToolError("StaleSelection", f"no definition {target['def']}")
        if isinstance(d.rhs, ListLit):
            return d.rhs.nid
        raise ToolError("StaleSelection", f"{target['def']} is not a list literal")
    if target.get("main"):
        from .edits import main_output_list

        out = main_output_list(program)
        if out is None:
            raise ToolError("StaleSelection", "main has no output list")
        if target.get("inner") and out.items and isinstance(out.items[-1], ListLit):
            return out.items[-1].nid
        return out.nid
    if "fn" in target:
        d = program.def_named(target["fn"])
        if d is None:
            raise ToolError("StaleSelection", f"no function {target['fn']}")
        lets, final = chain_lets(d.rhs)
        branch = target.get("branch")
        if isinstance(final, If) and branch in ("base", "recursive"):
            sub = final.then if branch == "base" else final.els
            sub_lets, sub_final = chain_lets(sub)
            final = sub_final
        if isinstance(final, ListLit):
            return final.nid
        if (
            isinstance(final, App)
            and isinstance(final.fn, Var)
            and final.fn.name == "concat"
            and final.args
            and isinstance(final.args[0], ListLit)
        ):
            return final.args[0].nid
        raise ToolError("StaleSelection", "no list literal at that return")
    raise ToolError("StaleSelection", f"cannot locate list {target!r}")


def reorder_in_list(
    program: Program, target: dict, from_idx: int, to_idx: int
) -> Candidate:
    nid = _locate_list(program, target)
    work = clone_program(program)
    node = _node_anywhere(work, nid)
    n = len(node.items)
    if not (0 <= from_idx < n and 0 <= to_idx < n):
        raise ToolError("IndexOutOfRange", f"list has {n} elements")
    item = node.items.pop(from_idx)
    node.items.insert(to_idx, item)
    return make_candidate(
        program, work, f"Move element {from_idx} to {to_idx}"
    )


def remove_list_element(program: Program, target: dict, index: int) -> Candidate:
    nid = _locate_list(program, target)
    work = clone_program(program)
    node = _node_anywhere(work, nid)
    if not 0 <= index < len(node.items):
        raise ToolError("IndexOutOfRange", f"list has {len(node.items)} elements")
    node.items.pop(index)
    return make_candidate(program, work, f"Remove list element {index}")


def add_to_output_of(
    program: Program, record: ExecutionRecord, fn: str, sel: dict,
    branch: str | None = None,
) -> Candidate:
    """Rewrite a focused function's return to also include a selected value."""
    d = _fn_def(program, fn)
    focus = find_focus(program)
    ordinal = focus[1] if focus and focus[0] == fn else 1
    feature = resolve_selection(record, sel, focus=(fn, ordinal))
    sel_expr, sel_is_list = _selected_expr(record, feature, fn, ordinal)
    work = clone_program(program)
    wd = work.def_named(fn)
    lets, final = chain_lets(wd.rhs)
    if isinstance(final, If) and branch in ("base", "recursive"):
        if branch == "base":
            final.then = _combine_output(final.then, sel_expr, sel_is_list)
        else:
            sub_lets, sub_final = chain_lets(final.els)
            final.els = build_chain(
                sub_lets, _combine_output(sub_final, sel_expr, sel_is_list)
            )
        wd.rhs = build_chain(lets, final)
    else:
        wd.rhs = build_chain(lets, _combine_output(final, sel_expr, sel_is_list))
    return make_candidate(
        program, work, f"Add {_expr_label(sel_expr)} to output of {fn}"
    )


def _selected_expr(record, feature, fn, ordinal):
    if isinstance(feature, Feature):
        backing = feature.backing
    else:
        backing = feature.payload.get("tv")
    if backing is None:
        raise ToolError("SelectionOutsideFocus", "selection has no value")
    focused = record.find_call(fn, ordinal)
    calls = ([focused] if focused else []) + [
        c for c in record.calls_of(fn) if c is not focused
    ]
    name = None
    for call in calls:
        for lname, tv in call.locals.items():
            if tv is backing or tv.value is backing.value:
                name = lname
                break
        if name is not None:
            break
    if name is None:
        raise ToolError(
            "SelectionOutsideFocus", "selected value is not bound inside the function"
        )
    return Var(name=name), isinstance(backing.value, list) and not backing.is_point()


def _expr_label(e: Expr) -> str:
    return e.name if isinstance(e, Var) else "value"


def _combine_output(old: Expr, sel_expr: Expr, sel_is_list: bool) -> Expr:
    # already a concat [..]: extend its argument list
    if (
        isinstance(old, App)
        and isinstance(old.fn, Var)
        and old.fn.name == "concat"
        and old.args
        and isinstance(old.args[0], ListLit)
    ):
        old.args[0].items.append(sel_expr)
        return old
    if sel_is_list:
        first = old if isinstance(old, ListLit) else ListLit(items=[old])
        return App(
            fn=Var(name="concat"), args=[ListLit(items=[first, sel_expr])]
        )
    if isinstance(old, ListLit):
        old.items.append(sel_expr)
        return old
    return ListLit(items=[old, sel_expr])


# --- termination ------------------------------------------------------------------


def select_termination_condition(
    program: Program, fn: str, strategy: str = "FixedDepth"
) -> Candidate:
    if strategy != "FixedDepth":
        raise ToolError("NoTerminationHole", f"unknown strategy {strategy}")
    d = _fn_def(program, fn)
    hole = None
    for e in walk(d.rhs):
        if isinstance(e, TerminationHole):
            hole = e
            break
    if hole is None:
        raise ToolError("NoTerminationHole", f"{fn} has no termination hole")
    work = clone_program(program)
    wd = work.def_named(fn)
    wd.params.insert(0, VarPat(name="depth"))
    _replace_expr_everywhere(
        work,
        hole.nid,
        BinOp(op="<", lhs=Var(name="depth"), rhs=Num(value=Fraction(1), frozen=True)),
    )
    calls, refs = _call_sites(work, fn)
    if refs:
        raise ToolError("NoTerminationHole", f"{fn} is referenced as a value")
    internal = set()
    for e in walk(wd.rhs):
        if isinstance(e, App) and isinstance(e.fn, Var) and e.fn.name == fn:
            internal.add(id(e))
    for call in calls:
        if id(call) in internal:
            call.args.insert(
                0, BinOp(op="-", lhs=Var(name="depth"), rhs=Num(value=Fraction(1)))
            )
        else:
            call.args.insert(
                0,
                Num(value=Fraction(3), slider=(Fraction(0), Fraction(15))),
            )
    return make_candidate(
        program, work, f"Terminate {fn} at a fixed depth"
    )
