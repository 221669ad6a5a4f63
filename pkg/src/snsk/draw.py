"""Drawing tools: shapes, points and offsets, custom-function tools,
recursive-call insertion, duplication, deletion, and feature drags.

Draw commands arrive as plain dicts (see docs/cli.md): a tool name, gesture
coordinates, and optional snap selections. Snapped coordinates resolve to
expressions over existing program values through the EditContext rules.
"""

from __future__ import annotations

from fractions import Fraction

from .candidates import Candidate, ToolError, make_candidate
from .edits import (
    EditContext,
    add_to_output,
    build_chain,
    chain_lets,
    remove_from_output,
)
from .interp import ExecutionRecord, SvgNode
from .nodes import (
    App,
    AsPat,
    BinOp,
    Expr,
    If,
    LetIn,
    ListLit,
    ListPat,
    Num,
    Program,
    TerminationHole,
    TopDef,
    Var,
    VarPat,
    node_index,
    walk,
)
from .prelude import PRELUDE, SHAPE_DRAW_DEFAULTS
from .roles import custom_tools, default_for_role
from .widgets import Feature, resolve_selection

MIN_GESTURE_PX = 1
DUPE_OFFSET = Fraction(20)


def _frac(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, float):
        return Fraction(str(v))
    return Fraction(v)


def _gesture_points(cmd: dict):
    g = cmd.get("gesture", {})
    start = g.get("start")
    end = g.get("end")
    return (
        tuple(_frac(c) for c in start) if start else None,
        tuple(_frac(c) for c in end) if end else None,
    )


def _resolve_point_arg(ctx: EditContext, record, snap, raw, focus) -> Expr:
    """Expression for one point argument: a snapped selection or raw coords."""
    if snap is not None:
        feature = resolve_selection(record, snap, focus=focus)
        if isinstance(feature, Feature) and feature.kind == "point":
            if ctx.call is not None:
                feature = _rescope_feature(ctx, feature)
            return ctx.point_expr_from_feature(feature)
        raise ToolError("StaleSelection", f"snap {snap} is not a point")
    if raw is None:
        raise ToolError("DegenerateGesture", "missing gesture coordinates")
    return ListLit(items=[Num(value=raw[0]), Num(value=raw[1])])


def _rescope_feature(ctx: EditContext, feature: Feature) -> Feature:
    """Re-derive a feature's affines against the focused call's boundary."""
    if feature.backing is not None and feature.backing.is_point():
        return Feature(
            kind="point",
            affines=(
                ctx.deriver.derive(feature.backing.value[0]),
                ctx.deriver.derive(feature.backing.value[1]),
            ),
            label=feature.label,
            backing=feature.backing,
            shape=feature.shape,
        )
    if feature.shape is not None:
        from .widgets import feature_for_shape

        feat_name = feature.label.split(" ")[-1]
        return feature_for_shape(
            feature.shape, feat_name, ctx.deriver, feature.label.split(" ")[0]
        )
    return feature


def _current_focus(program):
    from .refactor import find_focus

    return find_focus(program)


def draw_shape(program: Program, record: ExecutionRecord, cmd: dict) -> Candidate:
    tool = cmd["tool"]
    if tool not in SHAPE_DRAW_DEFAULTS:
        raise ToolError("ToolNotExposed", f"unknown shape tool {tool}")
    focus = _current_focus(program)
    ctx = EditContext(
        program,
        record,
        focus_fn=focus[0] if focus else None,
        focus_ordinal=focus[1] if focus else 1,
    )
    start, end = _gesture_points(cmd)
    snaps = cmd.get("snaps", {})
    if not snaps and start is not None and end is not None:
        if abs(end[0] - start[0]) < MIN_GESTURE_PX and abs(
            end[1] - start[1]
        ) < MIN_GESTURE_PX:
            raise ToolError("DegenerateGesture", "gesture smaller than 1px")
    defaults = SHAPE_DRAW_DEFAULTS[tool]
    fwd = focus if focus else None

    if tool == "polygon":
        name, rhs = _polygon_rhs(ctx, record, cmd, fwd)
    else:
        args: list[Expr] = []
        if tool in ("square", "rect", "circle"):
            args.append(Num(value=defaults["color"]))
            args.append(
                _resolve_point_arg(ctx, record, snaps.get("start"), start, fwd)
            )
            if tool == "square":
                side = min(abs(end[0] - start[0]), abs(end[1] - start[1]))
                args.append(Num(value=side))
            elif tool == "rect":
                args.append(Num(value=abs(end[0] - start[0])))
                args.append(Num(value=abs(end[1] - start[1])))
            else:
                r = max(abs(end[0] - start[0]), abs(end[1] - start[1]))
                args.append(Num(value=r))
        elif tool == "line":
            args.append(Num(value=defaults["color"]))
            args.append(Num(value=defaults["strokeWidth"]))
            args.append(_resolve_point_arg(ctx, record, snaps.get("start"), start, fwd))
            args.append(_resolve_point_arg(ctx, record, snaps.get("end"), end, fwd))
        name = ctx.fresh(tool)
        rhs = App(fn=Var(name=tool), args=args)

    _insert_drawn(ctx, name, rhs, add_output=True, as_list=False)
    return make_candidate(program, ctx.work, f"Draw {tool} {name}")


def _polygon_rhs(ctx: EditContext, record, cmd: dict, focus):
    snaps = cmd.get("snaps", {})
    defaults = SHAPE_DRAW_DEFAULTS["polygon"]
    name = ctx.fresh("polygon")
    list_snaps = snaps.get("pointLists")
    if list_snaps:
        refs = []
        for sel in list_snaps:
            w = resolve_selection(record, sel, focus=focus)
            label = getattr(w, "label", "")
            if not label:
                raise ToolError("StaleSelection", "point list has no name")
            refs.append(Var(name=label))
        pts_rhs: Expr = (
            refs[0]
            if len(refs) == 1
            else App(fn=Var(name="concat"), args=[ListLit(items=refs)])
        )
    else:
        vertices = []
        raw_points = cmd.get("gesture", {}).get("points", [])
        snap_points = snaps.get("points", [None] * len(raw_points))
        if len(raw_points) < len(snap_points):
            raw_points = raw_points + [None] * (
                len(snap_points) - len(raw_points)
            )
        for raw, snap in zip(raw_points, snap_points):
            coords = tuple(_frac(c) for c in raw) if raw else None
            vertices.append(_resolve_point_arg(ctx, record, snap, coords, focus))
        if len(vertices) < 3:
            raise ToolError("DegenerateGesture", "polygon needs three points")
        pts_rhs = ListLit(items=vertices)
    body = App(
        fn=Var(name="polygon"),
        args=[
            Var(name="color"),
            Var(name="strokeColor"),
            Var(name="strokeWidth"),
            Var(name="pts"),
        ],
    )
    inner = LetIn(
        pat=ListPat(
            items=[
                VarPat(name="color"),
                VarPat(name="strokeColor"),
                VarPat(name="strokeWidth"),
            ]
        ),
        bound=ListLit(
            items=[
                Num(value=defaults["color"]),
                Num(value=defaults["strokeColor"]),
                Num(value=defaults["strokeWidth"]),
            ]
        ),
        body=body,
    )
    rhs = LetIn(pat=VarPat(name="pts"), bound=pts_rhs, body=inner)
    return name, rhs


def _insert_drawn(ctx: EditContext, name: str, rhs: Expr, add_output: bool,
                  as_list: bool):
    if ctx.call is None:
        ctx.insert_item(ctx.anchor, name, rhs)
        if add_output:
            add_to_output(ctx.work, name, as_list=as_list)
    else:
        d = ctx.scope.d
        lets, final = chain_lets(d.rhs)
        lets.insert(len(lets), (VarPat(name=name), rhs, None))
        if add_output:
            if not isinstance(final, ListLit):
                raise ToolError(
                    "FocusHasNoOutputList",
                    f"{ctx.focus_fn} does not return a list",
                )
            final.items.append(Var(name=name))
        d.rhs = build_chain(lets, final)


def draw_point_or_offset(
    program: Program, record: ExecutionRecord, cmd: dict
) -> Candidate:
    focus = _current_focus(program)
    ctx = EditContext(
        program,
        record,
        focus_fn=focus[0] if focus else None,
        focus_ordinal=focus[1] if focus else 1,
    )
    if "at" in cmd:  # click: new point definition
        cx, cy = (_frac(c) for c in cmd["at"])
        point_name = ctx.fresh("point")
        suffix = point_name[len("point"):]
        x_name = ctx.fresh("x" + suffix)
        y_name = ctx.fresh("y" + suffix)
        d = TopDef(
            name=None,
            pattern=AsPat(
                pat=ListPat(items=[VarPat(name=x_name), VarPat(name=y_name)]),
                name=point_name,
            ),
            params=[],
            rhs=ListLit(items=[Num(value=cx), Num(value=cy)]),
        )
        if ctx.call is not None:
            raise ToolError("FocusHasNoOutputList",
                            "point definitions are top-level")
        ctx.work.defs.insert(ctx.anchor, d)
        return make_candidate(program, ctx.work, f"Draw point {point_name}")

    axis = cmd["axis"]
    if axis not in ("x", "y"):
        raise ToolError("DiagonalDrag", "offsets are axis-aligned")
    amount = _frac(cmd["amount"])
    base_sel = cmd.get("from")
    if isinstance(base_sel, list):  # empty-canvas drag inserts the base point
        sub = draw_point_or_offset(program, record, {"at": base_sel})
        from .interp import evaluate

        program = sub.program
        record = evaluate(program)
        point_def = program.defs[len(program.defs) - 1]
        # the freshly inserted point is the last definition before main
        names = point_def.bound_names()
        base_sel = {"point": {"def": names[-1]}}
        ctx = EditContext(program, record)
    feature = resolve_selection(record, base_sel, focus=focus)
    if not isinstance(feature, Feature) or feature.kind != "point":
        raise ToolError("StaleSelection", "offset base must be a point")
    k = 0 if axis == "x" else 1
    base_expr = ctx.coord_expr(feature.affines[k], axis)
    op = "+" if amount >= 0 else "-"
    mag = abs(amount)
    amount_expr: Expr = Num(value=mag)
    snap_amount = cmd.get("snapAmount")
    if snap_amount is not None:
        amount_expr = Var(name=_shared_amount(ctx, record, snap_amount, focus))
    name = ctx.fresh("xOffset" if axis == "x" else "yOffset")
    ctx.insert_item(ctx.anchor, name, BinOp(op=op, lhs=base_expr, rhs=amount_expr))
    return make_candidate(program, ctx.work, f"Draw offset {name}")


def _shared_amount(ctx: EditContext, record, sel, focus) -> str:
    """Snapping one offset amount to another introduces a shared variable."""
    w = resolve_selection(record, sel, focus=focus)
    if isinstance(w, Feature):
        raise ToolError("StaleSelection", "amount snap expects an offset widget")
    amount_tv = w.payload.get("amount")
    node = ctx.index.get(amount_tv.trace.expr_nid)
    if isinstance(node, Num) and not node.frozen:
        return ctx.lift_literal(node.nid, "dist")
    if isinstance(node, Var):
        return node.name
    raise ToolError("StaleSelection", "offset amount is not shareable")


def draw_custom(
    program: Program, record: ExecutionRecord, fn_name: str, cmd: dict
) -> Candidate:
    focus = _current_focus(program)
    sig = None
    for tool in custom_tools(program):
        if tool.name == fn_name:
            sig = tool
            break
    prelude_decl = PRELUDE.get(fn_name)
    if sig is None and not (
        prelude_decl is not None and prelude_decl.kind == "listfn"
    ):
        raise ToolError("ToolNotExposed", f"{fn_name} is not a drawing tool")
    ctx = EditContext(
        program,
        record,
        focus_fn=focus[0] if focus else None,
        focus_ordinal=focus[1] if focus else 1,
    )
    start, end = _gesture_points(cmd)
    snaps = cmd.get("snaps", {})
    gesture_pts = [("start", start, snaps.get("start")),
                   ("end", end, snaps.get("end"))]

    if sig is not None:
        d = program.def_named(fn_name)
        args: list[Expr | None] = [None] * sig.arity
        for slot, (key, raw, snap) in zip(sig.point_params, gesture_pts):
            if slot[0] == "pattern":
                args[slot[1]] = _resolve_point_arg(ctx, record, snap, raw, focus)
            else:
                _, xi, yi = slot
                pexpr = _resolve_point_arg(ctx, record, snap, raw, focus)
                if isinstance(pexpr, ListLit):
                    args[xi], args[yi] = pexpr.items
                else:  # a whole-point variable cannot fill split x/y params
                    args[xi] = Num(value=raw[0] if raw else Fraction(0))
                    args[yi] = Num(value=raw[1] if raw else Fraction(0))
        for i, axis in sig.dist_params:
            if args[i] is None:
                span = (
                    abs(end[0] - start[0]) if axis == "x"
                    else abs(end[1] - start[1])
                ) if start and end else Fraction(100)
                args[i] = Num(value=span)
        for i, role in sig.other_params:
            if args[i] is not None:
                continue
            pname = d.params[i].name if isinstance(d.params[i], VarPat) else None
            if pname == "depth":  # recursion depth gets the slider convention
                args[i] = Num(
                    value=Fraction(3), slider=(Fraction(0), Fraction(15))
                )
            elif pname and program.def_named(pname) is not None:
                args[i] = Var(name=pname)
            else:
                args[i] = Num(value=default_for_role(role))
        base = fn_name[: -len("Func")] if fn_name.endswith("Func") else fn_name
    else:
        decl = prelude_decl
        args = []
        gi = 0
        for param in decl.params:
            if param.role == "Point":
                key, raw, snap = gesture_pts[gi]
                gi += 1
                args.append(_resolve_point_arg(ctx, record, snap, raw, focus))
            else:
                override = cmd.get("args", {}).get(param.name)
                args.append(
                    Num(value=_frac(override))
                    if override is not None
                    else Num(value=default_for_role(param.role))
                )
        base = fn_name
    name = ctx.fresh(base)
    rhs = App(fn=Var(name=fn_name), args=[a for a in args])
    _insert_drawn(ctx, name, rhs, add_output=False, as_list=False)
    cand = make_candidate(program, ctx.work, f"Draw {fn_name} call {name}")
    # shape-valued results join the output; point-valued results do not
    value = _binding_value(cand, name, ctx)
    if value is not None and _contains_shape(value):
        ctx2 = EditContext(program, record,
                           focus_fn=focus[0] if focus else None,
                           focus_ordinal=focus[1] if focus else 1)
        name2 = ctx2.fresh(base)
        rhs2 = App(fn=Var(name=fn_name), args=[a for a in args])
        _insert_drawn(ctx2, name2, rhs2, add_output=True,
                      as_list=isinstance(value.value, list))
        cand = make_candidate(program, ctx2.work, f"Draw {fn_name} call {name2}")
    return cand


def _binding_value(cand: Candidate, name: str, ctx: EditContext):
    if cand.error is not None:
        return None
    from .interp import evaluate

    rec = evaluate(cand.program)
    if ctx.call is None:
        return rec.bindings.get(name)
    call = rec.find_call(ctx.focus_fn, ctx.call.ordinal)
    return call.locals.get(name) if call else None


def _contains_shape(tv) -> bool:
    if tv.is_shape():
        return True
    if isinstance(tv.value, list):
        return any(_contains_shape(i) for i in tv.value)
    return False


def insert_recursive_call(
    program: Program, record: ExecutionRecord, fn_name: str, cmd: dict
) -> Candidate:
    from .refactor import find_focus

    focus = find_focus(program)
    if focus is None or focus[0] != fn_name:
        raise ToolError(
            "NotFocusedOnDrawnFunction",
            "recursive drawing requires focusing the drawn function",
        )
    ctx = EditContext(program, record, focus_fn=focus[0], focus_ordinal=focus[1])
    d = ctx.scope.d
    arg_exprs = []
    for snap in cmd.get("snaps", []):
        feature = resolve_selection(record, snap, focus=focus)
        if not isinstance(feature, Feature) or feature.kind != "point":
            raise ToolError("StaleSelection", "recursive call snaps to points")
        feature = _rescope_feature(ctx, feature)
        arg_exprs.append(ctx.point_expr_from_feature(feature))
    lets, final = chain_lets(d.rhs)
    call_name = ctx.fresh(fn_name)
    if not (isinstance(final, If) and isinstance(final.cond, TerminationHole)):
        # first recursive draw: wrap the return into the guard skeleton
        if isinstance(final, App) and isinstance(final.fn, Var):
            r_base = final.fn.name
        else:
            r_base = "result"
        r_name = ctx.fresh(r_base)
        ret = Var(name=r_name)
        new_final = If(
            cond=TerminationHole(),
            then=ret,
            els=LetIn(
                pat=VarPat(name=call_name),
                bound=App(fn=Var(name=fn_name), args=arg_exprs),
                body=Var(name=r_name),
            ),
        )
        lets.append((VarPat(name=r_name), final, None))
        d.rhs = build_chain(lets, new_final)
    else:
        else_lets, else_final = chain_lets(final.els)
        else_lets.append(
            (VarPat(name=call_name), App(fn=Var(name=fn_name), args=arg_exprs),
             None)
        )
        final.els = build_chain(else_lets, else_final)
        d.rhs = build_chain(lets, final)
    return make_candidate(
        program, ctx.work, f"Insert recursive call {call_name}"
    )


def dupe(program: Program, record: ExecutionRecord, selections: list) -> Candidate:
    if not selections:
        raise ToolError("NothingSelected", "dupe needs at least one shape")
    ctx = EditContext(program, record)
    descriptions = []
    for sel in selections:
        name = _selection_def_name(sel)
        d = program.def_named(name)
        if d is None or d.name is None:
            raise ToolError("StaleSelection", f"no definition named {name}")
        tv = record.bindings.get(name)
        if tv is None or not isinstance(tv.value, SvgNode):
            raise ToolError("StaleSelection", f"{name} is not a drawable shape")
        copy_name = ctx.fresh(_strip_digits(name))
        new_rhs = _offset_shape_rhs(ctx, d.rhs, tv.value)
        ctx.insert_item(ctx.anchor, copy_name, new_rhs)
        add_to_output(ctx.work, copy_name)
        descriptions.append(f"{name} as {copy_name}")
    return make_candidate(program, ctx.work, "Dupe " + ", ".join(descriptions))


def _strip_digits(name: str) -> str:
    return name.rstrip("0123456789") or name


def _selection_def_name(sel) -> str:
    if isinstance(sel, str):
        return sel
    if isinstance(sel, dict):
        for key in ("shape", "def", "name"):
            if key in sel:
                return sel[key]
        if "feature" in sel:
            return sel["feature"]["shape"]
    raise ToolError("StaleSelection", f"cannot name selection {sel!r}")


def _offset_shape_rhs(ctx: EditContext, rhs: Expr, node: SvgNode) -> Expr:
    """Copy of a shape call with +20px on both position coordinates."""
    if not isinstance(rhs, App) or not isinstance(rhs.fn, Var):
        from .nodes import clone

        return clone(rhs)
    decl = PRELUDE.get(rhs.fn.name)
    from .nodes import clone

    new_args = []
    for i, arg in enumerate(rhs.args):
        param = decl.params[i] if decl and i < len(decl.params) else None
        if param is not None and param.role == "Point":
            new_args.append(_offset_point_expr(ctx, arg, node, param.name))
        else:
            new_args.append(clone(arg))
    return App(fn=Var(name=rhs.fn.name), args=new_args)


def _offset_point_expr(ctx: EditContext, arg: Expr, node: SvgNode,
                       pname: str) -> Expr:
    if isinstance(arg, ListLit) and len(arg.items) == 2:
        return ListLit(items=[_plus20(ctx, c) for c in arg.items])
    tv = node.args.get(pname)
    comps = []
    for k in (0, 1):
        aff = ctx.deriver.derive(tv.value[k])
        folded = _fold_unnamed(ctx, aff)
        shifted = folded
        shifted = Affine_shift(shifted, DUPE_OFFSET)
        comps.append(ctx.render_affine(shifted, lift=False))
    return ListLit(items=comps)


def Affine_shift(aff, delta):
    from .affine import Affine

    return Affine(dict(aff.terms), aff.const + delta, aff.discontinuous,
                  aff.opaque_lits)


def _fold_unnamed(ctx: EditContext, aff):
    from .affine import Affine

    terms = {}
    const = aff.const
    for atom, coeff in aff.terms.items():
        kind, key = atom
        if kind == "lit" and key not in ctx.lit_names:
            const += coeff * ctx.index[key].value
        else:
            terms[atom] = coeff
    return Affine(terms, const, aff.discontinuous, aff.opaque_lits)


def _plus20(ctx: EditContext, e: Expr) -> Expr:
    from .nodes import clone

    if isinstance(e, Num) and not e.frozen:
        return Num(value=e.value + DUPE_OFFSET, slider=e.slider)
    return BinOp(op="+", lhs=clone(e), rhs=Num(value=DUPE_OFFSET))


def delete_shapes(program: Program, record: ExecutionRecord,
                  selections: list) -> Candidate:
    if not selections:
        raise ToolError("SelectionNotDeletable", "nothing selected")
    ctx = EditContext(program, record)
    names = [_selection_def_name(s) for s in selections]
    for name in names:
        d = ctx.work.def_named(name)
        if d is None:
            raise ToolError("SelectionNotDeletable", f"no definition {name}")
        remove_from_output(ctx.work, name)
        _drop_list_uses(ctx.work, name)
        ctx.work.defs.remove(d)
    _cascade_unused(ctx.work)
    return make_candidate(program, ctx.work, "Delete " + ", ".join(names))


def _drop_list_uses(work: Program, name: str):
    """Remove `name` entries from every list literal (group lists included)."""
    for top in list(work.defs):
        for e in walk(top.rhs):
            if isinstance(e, ListLit):
                e.items = [
                    i for i in e.items
                    if not (isinstance(i, Var) and i.name == name)
                ]
    for e in walk(work.main):
        if isinstance(e, ListLit):
            e.items = [
                i for i in e.items
                if not (isinstance(i, Var) and i.name == name)
            ]


def _cascade_unused(work: Program):
    """Drop snap-support definitions that became unused: bare literals,
    two-element coordinate lists, and simple offset arithmetic."""
    from .scopes import analyze

    while True:
        info = analyze(work)
        removed = False
        for d in list(work.defs):
            if d.name is None or d.params:
                continue
            if not _is_simple_support(d.rhs):
                continue
            if info.uses_of(d.nid):
                continue
            work.defs.remove(d)
            removed = True
        if not removed:
            return


def _is_simple_support(e: Expr) -> bool:
    if isinstance(e, Num):
        return True
    if isinstance(e, ListLit):
        return all(isinstance(i, (Num, Var)) for i in e.items) and len(e.items) == 2
    if isinstance(e, BinOp):
        return isinstance(e.lhs, (Num, Var)) and isinstance(e.rhs, (Num, Var))
    return False


def drag_feature(
    program: Program,
    record: ExecutionRecord,
    sel: dict,
    delta=None,
    value=None,
) -> Candidate:
    feature = resolve_selection(record, sel)
    if not isinstance(feature, Feature) or feature.kind != "num":
        raise ToolError("StaleSelection", "drag needs a numeric feature")
    index = node_index(program)
    aff = feature.affines[0]
    lit_atoms = [
        (kind, nid) for (kind, nid) in aff.terms if kind == "lit"
    ]
    if not lit_atoms:
        raise ToolError("AllConstantsFrozen",
                        "no unfrozen constants drive this feature")
    current = feature.value(index)
    target = current + _frac(delta) if delta is not None else _frac(value)
    # adjust the last constant in program order
    chosen = max(lit_atoms, key=lambda a: index[a[1]].span[0])
    coeff = aff.terms[chosen]
    lit = index[chosen[1]]
    new_value = lit.value + (target - current) / coeff
    ctx = EditContext(program, record)
    node = ctx.node_in_work(chosen[1])
    node.value = new_value
    what = feature.label or "feature"
    return make_candidate(
        program, ctx.work, f"Set {what} to {float(target):g}"
    )
