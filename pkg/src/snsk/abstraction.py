"""Group, Abstract (extract function), the repetition tools, and Fill Hole.

Abstract pulls a definition's supporting definitions into a new function:
a definition moves inside when it has at least one free variable and every
one of its uses lies in the extracted dependency cone; literal definitions
stay outside and become parameters, preserving the rendered output exactly.
"""

from __future__ import annotations

from fractions import Fraction

from .candidates import (
    Candidate,
    ToolError,
    dedupe_candidates,
    make_candidate,
    rank_candidates,
)
from .edits import (
    EditContext,
    add_to_output,
    build_chain,
    clone_program,
    main_output_list,
    remove_from_output,
)
from .interp import ExecutionRecord, SvgNode, evaluate
from .nodes import (
    App,
    AsPat,
    BinOp,
    Expr,
    If,
    Lambda,
    ListLit,
    ListPat,
    Num,
    PbeHole,
    Program,
    TopDef,
    Var,
    VarPat,
    clone,
    node_index,
    structural_eq,
    walk,
    walk_patterns,
)
from .prelude import PRELUDE, POINT_LIST
from .roles import infer_roles
from .scopes import analyze, free_vars, fresh_name, names_in_program


def _selection_names(sels) -> list[str]:
    names = []
    for sel in sels:
        if isinstance(sel, str):
            names.append(sel)
        elif isinstance(sel, dict):
            for key in ("def", "shape", "name"):
                if key in sel:
                    names.append(sel[key])
                    break
            else:
                if "feature" in sel:
                    names.append(sel["feature"]["shape"])
                elif "list" in sel and "def" in sel["list"]:
                    names.append(sel["list"]["def"])
                else:
                    raise ToolError("StaleSelection", f"unnamed selection {sel!r}")
    return names


def _strip_digits(name: str) -> str:
    return name.rstrip("0123456789") or name


# --- group ---------------------------------------------------------------------


def group(program: Program, record: ExecutionRecord, sels: list) -> Candidate:
    names = _selection_names(sels)
    if len(names) < 2:
        raise ToolError("ShapesNotInSameOutputList", "group needs two or more shapes")
    out = main_output_list(program)
    if out is None:
        raise ToolError("ShapesNotInSameOutputList", "main has no output list")
    holder = None
    for entry in out.items:
        if isinstance(entry, ListLit):
            members = {
                i.name for i in entry.items if isinstance(i, Var)
            }
            if all(n in members for n in names):
                holder = entry
                break
    if holder is None:
        raise ToolError(
            "ShapesNotInSameOutputList",
            "selected shapes are not entries of one output list",
        )
    gname = _strip_digits(names[0]) + "".join(
        _strip_digits(n)[:1].upper() + _strip_digits(n)[1:] for n in names[1:]
    )
    ctx = EditContext(program, record)
    gname = ctx.fresh(gname)
    last_idx = max(program.def_index(n) for n in names)
    ctx.insert_item(last_idx + 1, gname, ListLit(
        items=[Var(name=n) for n in names]
    ))
    wout = main_output_list(ctx.work)
    for entry in list(wout.items):
        if not isinstance(entry, ListLit):
            continue
        member_positions = [
            i for i, item in enumerate(entry.items)
            if isinstance(item, Var) and item.name in names
        ]
        if not member_positions:
            continue
        first = member_positions[0]
        # z-order preserved: pre-members, the group, then post-members
        pre = [
            item for i, item in enumerate(entry.items)
            if i < first and i not in member_positions
        ]
        post = [
            item for i, item in enumerate(entry.items)
            if i > first and i not in member_positions
        ]
        pos = wout.items.index(entry)
        replacement = []
        if pre:
            replacement.append(ListLit(items=pre))
        replacement.append(Var(name=gname))
        if post:
            replacement.append(ListLit(items=post))
        wout.items[pos:pos + 1] = replacement
        break
    return make_candidate(program, ctx.work, f"Group into {gname}")


# --- abstract ---------------------------------------------------------------------


def abstract(program: Program, record: ExecutionRecord, sel) -> Candidate:
    names = _selection_names([sel])
    target = program.def_named(names[0])
    if target is None:
        raise ToolError("StaleSelection", f"no definition named {names[0]}")
    if target.params:
        raise ToolError("TargetIsPreludeValue", "cannot abstract a function")
    info = analyze(program)
    def_exprs = {d.nid: d for d in program.defs}

    def uses_within(d: TopDef, region: set[int]) -> bool:
        sites = []
        for name in d.bound_names():
            b = _binding_for_topdef(info, program, d, name)
            if b is None:
                continue
            sites.extend(info.uses_of(b))
        owners = set()
        for use in sites:
            owners.add(_owning_def(program, use))
        return owners <= region and bool(sites)

    pulled: list[TopDef] = []
    region = {target.nid}
    changed = True
    while changed:
        changed = False
        for d in program.defs:
            if d is target or d in pulled or d.params or d.pattern is not None:
                continue
            fv = free_vars(d.rhs) - set(PRELUDE)
            if not fv:
                continue
            if uses_within(d, region):
                pulled.append(d)
                region.add(d.nid)
                changed = True
    pulled.sort(key=lambda d: program.defs.index(d))

    pulled_names = set()
    for d in pulled:
        pulled_names.update(d.bound_names())
    body_free = set()
    for d in pulled + [target]:
        body_free |= free_vars(d.rhs)
    body_free -= pulled_names
    body_free -= set(PRELUDE)
    # functions stay as top-level references, not parameters
    body_free = {
        n
        for n in body_free
        if not (
            program.def_named(n) is not None and program.def_named(n).params
        )
    }

    params: list = []
    args: list[Expr] = []
    seen_defs = set()
    ordered = sorted(
        body_free,
        key=lambda n: (program.def_index(n) if program.def_index(n) >= 0 else 9999),
    )
    for name in ordered:
        d = program.def_named(name)
        if d is None:
            raise ToolError("StaleSelection", f"free variable {name} has no definition")
        if d.nid in seen_defs:
            continue
        seen_defs.add(d.nid)
        if d.pattern is not None:
            pat = d.pattern
            comp_used = any(
                n in body_free
                for n in _component_names(pat)
            )
            as_name = pat.name if isinstance(pat, AsPat) else None
            if comp_used and isinstance(pat, AsPat):
                params.append(clone(pat))
                args.append(Var(name=as_name))
            else:
                params.append(VarPat(name=as_name or d.display_name()))
                args.append(Var(name=as_name or name))
        else:
            params.append(VarPat(name=d.name))
            args.append(Var(name=d.name))

    base = (target.name or (target.pattern.name if isinstance(
        target.pattern, AsPat) else "extracted"))
    fname = fresh_name(base + "Func", names_in_program(program))
    work = clone_program(program)
    wtarget = work.def_named(names[0])
    lets = []
    for d in pulled:
        wd = work.def_named(d.bound_names()[0])
        pat = (
            clone(wd.pattern)
            if wd.pattern is not None
            else VarPat(name=wd.name)
        )
        lets.append((pat, wd.rhs, None))
        work.defs.remove(wd)
    body = build_chain(lets, wtarget.rhs)
    fdef = TopDef(name=fname, pattern=None, params=params, rhs=body)
    work.defs.insert(work.defs.index(wtarget), fdef)
    wtarget.rhs = App(fn=Var(name=fname), args=args)
    return make_candidate(
        program, work, f"Abstract {target.display_name()} into {fname}"
    )


def _component_names(pat) -> list[str]:
    if isinstance(pat, AsPat) and isinstance(pat.pat, ListPat):
        return [
            p.name for p in pat.pat.items if isinstance(p, VarPat)
        ]
    return []


def _binding_for_topdef(info, program, d: TopDef, name: str):
    if d.name is not None:
        return d.nid
    for p in walk_patterns(d.pattern):
        if getattr(p, "name", None) == name:
            return p.nid
    return None


def _owning_def(program: Program, use_nid: int) -> int:
    from .edits import find_node

    for d in program.defs:
        if find_node(d.rhs, use_nid) is not None:
            return d.nid
    return -1  # main expression


# --- repetition --------------------------------------------------------------------


def repeat_over_existing_list(
    program: Program, record: ExecutionRecord, shape_sel, list_sel
) -> Candidate:
    shape_name = _selection_names([shape_sel])[0]
    list_name = _selection_names([list_sel])[0]
    sdef = program.def_named(shape_name)
    if sdef is None or not isinstance(sdef.rhs, App):
        raise ToolError("StaleSelection", f"{shape_name} is not a shape call")
    ltv = record.bindings.get(list_name)
    if ltv is None or not isinstance(ltv.value, list) or not all(
        item.is_point() for item in ltv.value
    ):
        raise ToolError("ListNotPoints", f"{list_name} is not a list of points")
    callee = sdef.rhs.fn
    if not isinstance(callee, Var):
        raise ToolError("StaleSelection", "shape call has no named head")
    point_index = _point_param_index(program, callee.name)
    if point_index is None or point_index >= len(sdef.rhs.args):
        raise ToolError("StaleSelection", f"{callee.name} takes no point argument")

    work = clone_program(program)
    names = names_in_program(program)
    wrapper = fresh_name(callee.name, names)
    names.add(wrapper)
    lets = []
    call_args: list[Expr] = []
    for i, arg in enumerate(sdef.rhs.args):
        if i == point_index:
            call_args.append(Var(name="point"))
        elif isinstance(arg, Var):
            tv = record.bindings.get(arg.name)
            value = _literal_of(tv)
            lets.append((VarPat(name=arg.name), value, None))
            call_args.append(Var(name=arg.name))
        else:
            call_args.append(clone(arg))
    body = build_chain(lets, App(fn=Var(name=callee.name), args=call_args))
    wdef = TopDef(
        name=wrapper,
        pattern=None,
        params=[
            AsPat(
                pat=ListPat(items=[VarPat(name="x"), VarPat(name="y")]),
                name="point",
            )
        ],
        rhs=body,
    )
    repeated = fresh_name(
        "repeated" + wrapper[:1].upper() + wrapper[1:], names
    )
    rdef = TopDef(
        name=repeated,
        pattern=None,
        params=[],
        rhs=App(fn=Var(name="map"),
                args=[Var(name=wrapper), Var(name=list_name)]),
    )
    ws = work.def_named(shape_name)
    shape_idx = work.defs.index(ws)
    remove_from_output(work, shape_name)
    work.defs.remove(ws)
    ldef = work.def_named(list_name)
    list_idx = work.defs.index(ldef) if ldef is not None else -1
    at = max(shape_idx, list_idx + 1)
    work.defs.insert(at, wdef)
    work.defs.insert(at + 1, rdef)
    add_to_output(work, repeated, as_list=True)
    return make_candidate(
        program, work, f"Repeat {shape_name} over {list_name}"
    )


def _point_param_index(program: Program, callee: str):
    if callee in PRELUDE:
        for i, p in enumerate(PRELUDE[callee].params):
            if p.role == "Point":
                return i
        return None
    d = program.def_named(callee)
    if d is None:
        return None
    for i, p in enumerate(d.params):
        if isinstance(p, AsPat):
            return i
    return None


def _literal_of(tv) -> Expr:
    if tv is None:
        raise ToolError("StaleSelection", "argument value not recorded")
    if isinstance(tv.value, Fraction):
        return Num(value=tv.value)
    if tv.is_point():
        return ListLit(
            items=[Num(value=tv.value[0].value), Num(value=tv.value[1].value)]
        )
    raise ToolError("StaleSelection", "argument value is not a literal")


def repeat_over_function_call(
    program: Program,
    record: ExecutionRecord,
    shape_sel,
    fn_name: str,
    gesture: dict,
) -> Candidate:
    returns_points = False
    if fn_name in PRELUDE:
        returns_points = PRELUDE[fn_name].returns == POINT_LIST
    else:
        d = program.def_named(fn_name)
        if d is not None:
            roles = infer_roles(program)
            returns_points = POINT_LIST in roles.fn_returns.get(d.nid, set())
    if not returns_points:
        raise ToolError(
            "FnDoesNotReturnPointList", f"{fn_name} does not return points"
        )
    from .draw import draw_custom

    first = draw_custom(program, record, fn_name,
                        {"gesture": gesture, "args": gesture.get("args", {})})
    mid_program = first.program
    mid_record = evaluate(mid_program)
    new_names = [
        d.name for d in mid_program.defs
        if d.name is not None and program.def_named(d.name) is None
    ]
    list_name = new_names[-1]
    second = repeat_over_existing_list(
        mid_program, mid_record, shape_sel, {"def": list_name}
    )
    return make_candidate(
        program,
        second.program,
        f"Repeat {_selection_names([shape_sel])[0]} over new {fn_name} call",
    )


def repeat_by_indexed_merge(
    program: Program, record: ExecutionRecord, sels: list
) -> list[Candidate]:
    names = _selection_names(sels)
    if len(names) < 2:
        raise ToolError("ShapesNotUnifiable", "merge needs two or more shapes")
    defs = []
    for n in names:
        d = program.def_named(n)
        if d is None or not isinstance(d.rhs, App) or not isinstance(d.rhs.fn, Var):
            raise ToolError("ShapesNotUnifiable", f"{n} is not a shape call")
        defs.append(d)
    head = defs[0].rhs.fn.name
    arity = len(defs[0].rhs.args)
    for d in defs[1:]:
        if d.rhs.fn.name != head or len(d.rhs.args) != arity:
            raise ToolError(
                "ShapesNotUnifiable", "selected shapes call different constructors"
            )
    merged_args: list[Expr] = []
    for j in range(arity):
        exprs = [d.rhs.args[j] for d in defs]
        if all(structural_eq(e, exprs[0]) for e in exprs[1:]):
            merged_args.append(clone(exprs[0]))
            continue
        observations = []
        for k, (d, e) in enumerate(zip(defs, exprs), start=1):
            if not isinstance(e, Num):
                value = _arg_value(record, d, j)
            else:
                value = e.value
            if value is None:
                raise ToolError(
                    "ShapesNotUnifiable",
                    f"argument {j} of {d.name} is not numeric",
                )
            observations.append((k, value))
        merged_args.append(PbeHole(observations=observations))
    base = {_strip_digits(n) for n in names}
    merged_name = (base.pop() + "s") if len(base) == 1 else "shapes"
    names_taken = names_in_program(program)
    merged_name = fresh_name(merged_name, names_taken)
    i_name = fresh_name("i", names_taken | {merged_name})
    n = len(defs)
    out = []
    for use_reverse in (False, True):
        work = clone_program(program)
        first_idx = min(work.defs.index(work.def_named(nm)) for nm in names)
        count = Num(value=Fraction(n), slider=(Fraction(0), Fraction(15)))
        domain: Expr = App(fn=Var(name="zeroTo"), args=[count])
        if use_reverse:
            domain = App(fn=Var(name="reverse"), args=[domain])
        rhs = App(
            fn=Var(name="map"),
            args=[
                Lambda(
                    params=[VarPat(name=i_name)],
                    body=App(fn=Var(name=head),
                             args=[clone(a) for a in merged_args]),
                ),
                domain,
            ],
        )
        for nm in names:
            remove_from_output(work, nm)
            work.defs.remove(work.def_named(nm))
        work.defs.insert(
            first_idx, TopDef(name=merged_name, pattern=None, params=[], rhs=rhs)
        )
        add_to_output(work, merged_name, as_list=True)
        desc = f"Merge {', '.join(names)} indexed by {i_name}"
        if use_reverse:
            desc += " (reversed order)"
        out.append(make_candidate(program, work, desc))
    ranked = rank_candidates(out)
    ranked.sort(key=lambda c: "reversed order" in c.description)
    for i, c in enumerate(ranked):
        c.rank = i
    return ranked


def _arg_value(record: ExecutionRecord, d: TopDef, j: int):
    tv = record.bindings.get(d.name)
    if tv is None or not isinstance(tv.value, SvgNode):
        return None
    arg_names = list(tv.value.args)
    if j >= len(arg_names):
        return None
    v = tv.value.args[arg_names[j]].value
    return v if isinstance(v, Fraction) else None


# --- hole filling -----------------------------------------------------------------


def fill_hole(program: Program, record: ExecutionRecord, sel: dict) -> list[Candidate]:
    index = node_index(program)
    holes = [
        nid for nid in sorted(index) if isinstance(index[nid], PbeHole)
    ]
    k = sel.get("hole", {}).get("index", 0) if isinstance(sel, dict) else 0
    if k >= len(holes):
        raise ToolError("NoObservations", f"no example hole #{k}")
    hole_nid = holes[k]
    hole: PbeHole = index[hole_nid]
    observations = hole.observations
    if not observations:
        raise ToolError("NoObservations", "hole has no recorded values")
    env_vars = _env_values_per_execution(program, record, hole_nid,
                                         len(observations))
    if not env_vars:
        raise ToolError(
            "NoObservations", "hole was not executed with a varying environment"
        )
    exprs: list[tuple[Expr, str, bool]] = []
    values = [v for _, v in observations]
    if all(v == values[0] for v in values):
        exprs.append((Num(value=values[0]), f"constant {values[0]}", False))
    for var_name, xs in env_vars.items():
        fit = _exact_affine(xs, values)
        if fit is not None:
            a, b = fit
            exprs.append(
                (
                    _affine_expr(a, b, var_name),
                    f"{_fmt(a)} + {var_name} * {_fmt(b)}",
                    False,
                )
            )
    for var_name, xs in env_vars.items():
        for m in (2, 3):
            for c in range(m):
                split = _mod_split(xs, values, m, c)
                if split is None:
                    continue
                v1, v2 = split
                cond = BinOp(
                    op="==",
                    lhs=App(fn=Var(name="mod"),
                            args=[Var(name=var_name), Num(value=Fraction(m))]),
                    rhs=Num(value=Fraction(c), frozen=True),
                )
                expr = If(cond=cond, then=Num(value=v1), els=Num(value=v2))
                exprs.append(
                    (expr,
                     f"if mod {var_name} {m} == {c}! then {_fmt(v1)} else {_fmt(v2)}",
                     False)
                )
    for var_name, xs in env_vars.items():
        if len(set(xs)) == len(xs) and not all(v == values[0] for v in values):
            exprs.append(
                (
                    _table_expr(var_name, xs, values),
                    f"match {var_name} against recorded values",
                    False,
                )
            )
    for var_name, xs in env_vars.items():
        if _exact_affine(xs, values) is None and len(set(xs)) >= 2:
            a, b, resid = _least_squares(xs, values)
            exprs.append(
                (
                    _affine_expr(a, b, var_name),
                    f"{_fmt(a)} + {var_name} * {_fmt(b)} "
                    f"(approximate, max residual {float(resid):g})",
                    True,
                )
            )
    candidates = []
    for expr, label, approx in exprs:
        work = clone_program(program)
        from .refactor import _replace_expr_everywhere

        _replace_expr_everywhere(work, hole_nid, expr)
        candidates.append(
            make_candidate(program, work, f"Fill hole with {label}",
                           approx=approx)
        )
    if not candidates:
        raise ToolError("NoObservations", "no candidate fillings found")
    out = dedupe_candidates(candidates)
    for i, c in enumerate(out):
        c.rank = i
    return out


def _fmt(v: Fraction) -> str:
    from .unparse import frac_str

    return frac_str(v)


def _env_values_per_execution(program, record, hole_nid, count):
    """Values of enclosing-lambda variables at each hole execution."""
    index = node_index(program)
    lam = None
    for e in _all_exprs(program):
        if isinstance(e, Lambda):
            from .edits import find_node

            if find_node(e.body, hole_nid) is not None or e.body.nid == hole_nid:
                lam = e
                break
    if lam is None:
        return {}
    calls = [c for c in record.call_records if c.callee_nid == lam.nid]
    calls.sort(key=lambda c: c.start_serial)
    calls = calls[:count]
    if len(calls) < 2:
        return {}
    out = {}
    for name in calls[0].locals:
        xs = []
        ok = True
        for c in calls:
            v = c.locals.get(name)
            if v is None or not isinstance(v.value, Fraction):
                ok = False
                break
            xs.append(v.value)
        if ok and len(set(xs)) > 1:
            out[name] = xs
    return out


def _all_exprs(program: Program):
    for top in program.top_exprs():
        yield from walk(top)


def _exact_affine(xs, ys):
    pairs = list(zip(xs, ys))
    distinct = [(x, y) for i, (x, y) in enumerate(pairs) if x not in xs[:i]]
    if len(distinct) < 2:
        return None
    (x1, y1), (x2, y2) = distinct[0], distinct[1]
    b = (y2 - y1) / (x2 - x1)
    a = y1 - b * x1
    for x, y in pairs:
        if a + b * x != y:
            return None
    return a, b


def _least_squares(xs, ys):
    n = len(xs)
    sx = sum(xs)
    sy = sum(ys)
    sxx = sum(x * x for x in xs)
    sxy = sum(x * y for x, y in zip(xs, ys))
    denom = n * sxx - sx * sx
    b = (n * sxy - sx * sy) / denom
    a = (sy - b * sx) / n
    resid = max(abs(a + b * x - y) for x, y in zip(xs, ys))
    return a, b, resid


def _affine_expr(a: Fraction, b: Fraction, var_name: str) -> Expr:
    scaled = BinOp(op="*", lhs=Var(name=var_name), rhs=Num(value=b))
    if a == 0:
        return scaled
    return BinOp(op="+", lhs=Num(value=a), rhs=scaled)


def _mod_split(xs, ys, m, c):
    in_class = [y for x, y in zip(xs, ys) if x % m == c]
    out_class = [y for x, y in zip(xs, ys) if x % m != c]
    if not in_class or not out_class:
        return None
    if any(y != in_class[0] for y in in_class):
        return None
    if any(y != out_class[0] for y in out_class):
        return None
    return in_class[0], out_class[0]


def _table_expr(var_name, xs, ys) -> Expr:
    expr = Num(value=ys[-1])
    for x, y in reversed(list(zip(xs[:-1], ys[:-1]))):
        expr = If(
            cond=BinOp(op="==", lhs=Var(name=var_name),
                       rhs=Num(value=x, frozen=True)),
            then=Num(value=y),
            els=expr,
        )
    return expr
