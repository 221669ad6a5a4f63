"""Canvas widgets derived from an execution record, and selection resolution.

Widget kinds: point, offset, list, call, feature (shape features). Keys are
stable across re-evaluation of the same text: kind + source span of the
producing expression + occurrence index in evaluation order. The JSON shape
is documented in docs/widgets.schema.json; selection descriptors in
docs/selections.schema.json.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .affine import Affine
from .interp import CallRecord, ExecutionRecord, SvgNode, TracedValue
from .nodes import Num, node_index
from .prelude import POINT, X, Y
from .roles import RoleAssignment, infer_roles
from .svg import shape_bbox

LIST_NEST_INFLATION = 4  # px per nesting level, keeps stacked boxes clickable
CALL_BOX_PAD = 2


class StaleSelection(Exception):
    pass


class NotAPoint(Exception):
    pass


@dataclass
class Widget:
    kind: str  # point | offset | list | call | feature
    key: str
    source_nid: int
    span: tuple
    occ: int
    geometry: dict
    label: str = ""
    internal: bool = False
    payload: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        geo = {k: _jsnum(v) for k, v in self.geometry.items()}
        out = {
            "kind": self.kind,
            "key": self.key,
            "sourceSpan": list(self.span),
            "geometry": geo,
            "label": self.label,
            "internal": self.internal,
        }
        extra = {
            k: v
            for k, v in self.payload.items()
            if isinstance(v, (str, int, float, bool))
        }
        if extra:
            out["payload"] = extra
        return out


def _jsnum(v):
    if isinstance(v, Fraction):
        f = float(v)
        return int(f) if f.is_integer() else f
    if isinstance(v, float) and v.is_integer():
        return int(v)
    return v


@dataclass
class Feature:
    """A selectable numeric or point property, as affine forms over literals."""

    kind: str  # num | point
    affines: tuple  # one Affine for num, (x, y) pair for point
    label: str = ""
    backing: TracedValue | None = None  # real value behind the feature, if any
    shape: SvgNode | None = None
    role_hint: str | None = None

    def value(self, index) -> Fraction:
        assert self.kind == "num"
        return _affine_value(self.affines[0], index)

    def point_value(self, index):
        assert self.kind == "point"
        return (
            _affine_value(self.affines[0], index),
            _affine_value(self.affines[1], index),
        )


def _affine_value(aff: Affine, index) -> Fraction:
    total = aff.const
    for (kind, nid), coeff in aff.terms.items():
        if kind != "lit":
            raise StaleSelection("feature crosses a function boundary")
        total += coeff * index[nid].value
    return total


class WidgetDeriver:
    def __init__(self, record: ExecutionRecord, roles: RoleAssignment | None = None):
        self.record = record
        self.program = record.program
        self.index = node_index(self.program)
        self.roles = roles or infer_roles(self.program)
        self.occ_counts: dict = {}
        self.value_names: dict[int, str] = {}
        for name, bound in record.bindings.items():
            self.value_names.setdefault(id(bound.value), name)
        for call in record.call_records:
            for name, bound in call.locals.items():
                self.value_names.setdefault(id(bound.value), name)

    def key_for(self, kind: str, nid: int) -> tuple[str, int]:
        node = self.index.get(nid)
        span = getattr(node, "span", (-1, -1)) if node is not None else (-1, -1)
        occ = self.occ_counts.get((kind, nid), 0)
        self.occ_counts[(kind, nid)] = occ + 1
        return f"{kind}:{span[0]}-{span[1]}:{occ}", occ

    def derive(self) -> list[Widget]:
        out: list[Widget] = []
        out.extend(self.point_widgets())
        out.extend(self.offset_widgets())
        out.extend(self.list_widgets())
        out.extend(self.call_widgets())
        out.extend(self.feature_widgets())
        return out

    # --- emission rules ----------------------------------------------------

    def point_widgets(self) -> list[Widget]:
        out = []
        for tv in self.record.all_values:
            if not tv.is_point():
                continue
            nid = tv.trace.expr_nid
            if POINT not in self.roles.of_expr(nid) and not tv.trace.prelude_internal:
                continue
            if not tv.is_point():
                continue
            x, y = (float(c.value) for c in tv.value)
            key, occ = self.key_for("point", nid)
            node = self.index.get(nid)
            out.append(
                Widget(
                    kind="point",
                    key=key,
                    source_nid=nid,
                    span=getattr(node, "span", (-1, -1)),
                    occ=occ,
                    geometry={"x": x, "y": y},
                    label=self._name_of_value(tv),
                    internal=tv.trace.prelude_internal,
                    payload={"tv": tv},
                )
            )
        return out

    def offset_widgets(self) -> list[Widget]:
        out = []
        for op in self.record.numeric_ops:
            if op.op not in ("+", "-"):
                continue
            axis = None
            base, amount = None, None
            lhs_roles = self.roles.of_expr(op.lhs.trace.expr_nid)
            rhs_roles = self.roles.of_expr(op.rhs.trace.expr_nid)
            if X in lhs_roles and Y not in lhs_roles:
                axis, base, amount = "x", op.lhs, op.rhs
            elif Y in lhs_roles and X not in lhs_roles:
                axis, base, amount = "y", op.lhs, op.rhs
            elif op.op == "+" and X in rhs_roles and Y not in rhs_roles:
                axis, base, amount = "x", op.rhs, op.lhs
            elif op.op == "+" and Y in rhs_roles and X not in rhs_roles:
                axis, base, amount = "y", op.rhs, op.lhs
            if axis is None:
                continue
            if not (base.is_num() and amount.is_num()):
                continue
            anchor = self._anchor_for(base, axis)
            delta = float(amount.value) * (1 if op.op == "+" else -1)
            geometry = {
                "x": anchor[0],
                "y": anchor[1],
                "dx": delta if axis == "x" else 0.0,
                "dy": delta if axis == "y" else 0.0,
            }
            key, occ = self.key_for("offset", op.result.trace.expr_nid)
            node = self.index.get(op.result.trace.expr_nid)
            out.append(
                Widget(
                    kind="offset",
                    key=key,
                    source_nid=op.result.trace.expr_nid,
                    span=getattr(node, "span", (-1, -1)),
                    occ=occ,
                    geometry=geometry,
                    label=self._name_of_value(op.result),
                    internal=op.result.trace.prelude_internal
                    or base.trace.prelude_internal,
                    payload={
                        "axis": axis,
                        "base": base,
                        "amount": amount,
                        "result": op.result,
                        "op": op.op,
                    },
                )
            )
        return out

    def list_widgets(self) -> list[Widget]:
        out = []
        for tv in self.record.all_values:
            if not isinstance(tv.value, list) or not tv.value:
                continue
            items = tv.value
            all_shapes = all(item.is_shape() for item in items)
            all_points = all(item.is_point() for item in items)
            all_lists = all(isinstance(item.value, list) for item in items)
            if not (all_shapes or all_points or all_lists):
                continue
            geo = self._value_bbox(tv)
            if geo is None:
                continue
            level = self._nesting_level(tv)
            x, y, w, h = geo
            pad = LIST_NEST_INFLATION * level
            key, occ = self.key_for("list", tv.trace.expr_nid)
            node = self.index.get(tv.trace.expr_nid)
            out.append(
                Widget(
                    kind="list",
                    key=key,
                    source_nid=tv.trace.expr_nid,
                    span=getattr(node, "span", (-1, -1)),
                    occ=occ,
                    geometry={
                        "x": x - pad,
                        "y": y - pad,
                        "w": w + 2 * pad,
                        "h": h + 2 * pad,
                    },
                    label=self._name_of_value(tv),
                    internal=tv.trace.prelude_internal,
                    payload={"tv": tv, "level": level},
                )
            )
        return out

    def call_widgets(self) -> list[Widget]:
        out = []
        recursive_fns = self._guarded_recursive_fns()
        for call in self.record.call_records:
            if not _contains_shape_or_point(call.ret):
                continue
            geo = self._value_bbox(call.ret)
            if geo is None:
                continue
            x, y, w, h = geo
            key, occ = self.key_for("call", call.call_nid)
            node = self.index.get(call.call_nid)
            payload = {"call": call, "fn": call.fn_name,
                       "ordinal": call.ordinal}
            if call.fn_name in recursive_fns:
                # the guard is stored un-negated; only the label negates it
                took_recursive = any(
                    c.fn_name == call.fn_name
                    and call.start_serial < c.start_serial
                    and c.end_serial <= call.end_serial
                    for c in self.record.call_records
                )
                payload["conditionLabel"] = (
                    "not <| ??terminationCondition"
                    if took_recursive
                    else "??terminationCondition"
                )
            out.append(
                Widget(
                    kind="call",
                    key=key,
                    source_nid=call.call_nid,
                    span=getattr(node, "span", (-1, -1)),
                    occ=occ,
                    geometry={
                        "x": x - CALL_BOX_PAD,
                        "y": y - CALL_BOX_PAD,
                        "w": w + 2 * CALL_BOX_PAD,
                        "h": h + 2 * CALL_BOX_PAD,
                    },
                    label=f"{call.fn_name} (call {call.ordinal})",
                    payload=payload,
                )
            )
        return out

    def _guarded_recursive_fns(self) -> set:
        from .nodes import TerminationHole, walk as _walk

        out = set()
        for d in self.program.defs:
            if d.name is None or not d.params:
                continue
            if any(isinstance(e, TerminationHole) for e in _walk(d.rhs)):
                out.add(d.name)
        return out

    def feature_widgets(self) -> list[Widget]:
        out = []
        for tv in self.record.all_values:
            if not tv.is_shape():
                continue
            node: SvgNode = tv.value
            # one widget set per shape construction; skip re-tagging steps
            if tv.trace.parents and any(
                p.value is node for p in tv.trace.parents
            ):
                continue
            name = self._name_of_value(tv)
            for feat in _FEATURES_BY_TAG.get(node.tag, ()):
                geo = _feature_geometry(node, feat)
                if geo is None:
                    continue
                key, occ = self.key_for("feature", tv.trace.expr_nid)
                spannode = self.index.get(tv.trace.expr_nid)
                out.append(
                    Widget(
                        kind="feature",
                        key=f"{key}:{feat}",
                        source_nid=tv.trace.expr_nid,
                        span=getattr(spannode, "span", (-1, -1)),
                        occ=occ,
                        geometry=geo,
                        label=f"{name}.{feat}" if name else feat,
                        payload={"shape": node, "feature": feat, "tv": tv},
                    )
                )
        return out

    # --- helpers -------------------------------------------------------------

    def _name_of_value(self, tv: TracedValue) -> str:
        return self.value_names.get(id(tv.value), "")

    def _anchor_for(self, base: TracedValue, axis: str):
        # find a point value containing this coordinate, walking re-tag steps
        seen = set()
        frontier = [base]
        while frontier:
            cur = frontier.pop(0)
            if id(cur) in seen:
                continue
            seen.add(id(cur))
            for lst in cur.member_of:
                if lst.is_point():
                    x, y = (float(c.value) for c in lst.value)
                    return (x, y)
            frontier.extend(cur.trace.parents)
        v = float(base.value)
        return (v, 0.0) if axis == "x" else (0.0, v)

    def _value_bbox(self, tv: TracedValue):
        boxes = []

        def visit(t: TracedValue):
            if t.is_shape():
                boxes.append(shape_bbox(t.value))
            elif t.is_point():
                x, y = (float(c.value) for c in t.value)
                boxes.append((x, y, 0.0, 0.0))
            elif isinstance(t.value, list):
                for item in t.value:
                    visit(item)

        visit(tv)
        if not boxes:
            return None
        x0 = min(b[0] for b in boxes)
        y0 = min(b[1] for b in boxes)
        x1 = max(b[0] + b[2] for b in boxes)
        y1 = max(b[1] + b[3] for b in boxes)
        return (x0, y0, x1 - x0, y1 - y0)

    def _nesting_level(self, tv: TracedValue) -> int:
        if not isinstance(tv.value, list):
            return 0
        level = 0
        for item in tv.value:
            if isinstance(item.value, list) and not item.is_point():
                level = max(level, self._nesting_level(item))
        return level + 1 if any(
            isinstance(i.value, list) and not i.is_point() for i in tv.value
        ) else 1


_FEATURES_BY_TAG = {
    "square": (
        "corner-TL",
        "corner-TR",
        "corner-BL",
        "corner-BR",
        "center",
        "edge-top",
        "edge-bottom",
        "edge-left",
        "edge-right",
        "width",
        "height",
        "color",
    ),
    "rect": (
        "corner-TL",
        "corner-TR",
        "corner-BL",
        "corner-BR",
        "center",
        "edge-top",
        "edge-bottom",
        "edge-left",
        "edge-right",
        "width",
        "height",
        "color",
    ),
    "circle": ("center", "width", "color"),
    "line": ("endpoint1", "endpoint2", "color", "strokeWidth"),
    "polygon": ("color", "strokeColor", "strokeWidth"),
}


def _feature_geometry(node: SvgNode, feat: str):
    try:
        x, y, w, h = shape_bbox(node)
    except Exception:
        return None
    pts = {
        "corner-TL": (x, y),
        "corner-TR": (x + w, y),
        "corner-BL": (x, y + h),
        "corner-BR": (x + w, y + h),
        "center": (x + w / 2, y + h / 2),
        "edge-top": (x + w / 2, y),
        "edge-bottom": (x + w / 2, y + h),
        "edge-left": (x, y + h / 2),
        "edge-right": (x + w, y + h / 2),
    }
    if node.tag == "line":
        a = node.args
        pts["endpoint1"] = tuple(float(c.value) for c in a["pt1"].value)
        pts["endpoint2"] = tuple(float(c.value) for c in a["pt2"].value)
    if feat in pts:
        px, py = pts[feat]
        return {"x": px, "y": py}
    if feat == "color":
        return {"x": x, "y": y - 18, "w": 100, "h": 8}
    if feat in ("strokeWidth", "strokeColor"):
        return {"x": x, "y": y - 8, "w": 100, "h": 8}
    if feat == "width":
        return {"x": x, "y": y + h, "w": w, "h": 6}
    if feat == "height":
        return {"x": x + w, "y": y, "w": 6, "h": h}
    return None


def derive_widgets(record: ExecutionRecord, roles=None) -> list[Widget]:
    return WidgetDeriver(record, roles).derive()


def visible_widgets(
    widgets: list[Widget],
    record: ExecutionRecord,
    hover_nid: int | None = None,
    hover_name: str | None = None,
) -> list[Widget]:
    """Default visibility policy.

    User-level points and offsets always show; shape features, list boxes,
    and call boxes show only while hovering an associated shape; widgets from
    standard-library internals never show.
    """
    out = [
        w
        for w in widgets
        if w.kind in ("point", "offset") and not w.internal
    ]
    hovered: list[TracedValue] = []
    if hover_name is not None:
        bound = record.bindings.get(hover_name)
        if bound is None:
            for call in record.call_records:
                if hover_name in call.locals:
                    bound = call.locals[hover_name]
                    break
        if bound is not None:
            hovered = [
                tv
                for tv in record.all_values
                if tv.value is bound.value and tv.is_shape()
            ]
    elif hover_nid is not None:
        hovered = [
            tv
            for tv in record.all_values
            if tv.trace.expr_nid == hover_nid and tv.is_shape()
        ]
    if not hovered:
        return out
    shape_objs = {id(tv.value) for tv in hovered}
    containing = set()
    frontier = [tv for tv in record.all_values if id(tv.value) in shape_objs]
    seen = set()
    while frontier:
        cur = frontier.pop()
        if id(cur) in seen:
            continue
        seen.add(id(cur))
        for lst in cur.member_of:
            containing.add(id(lst))
            frontier.append(lst)
    for w in widgets:
        if w.internal:
            continue
        if w.kind == "feature" and id(w.payload.get("shape")) in shape_objs:
            out.append(w)
        elif w.kind == "list" and id(w.payload.get("tv")) in containing:
            out.append(w)
        elif w.kind == "call":
            call: CallRecord = w.payload.get("call")
            if call is not None and _ret_contains(call.ret, shape_objs):
                out.append(w)
    return out


def focus_metadata(widgets: list[Widget], call: CallRecord) -> list[Widget]:
    """Tag point widgets of a focused call: inputs render orange, outputs
    blue. Returns the widgets whose values live inside the call."""
    arg_ids = set()
    for arg in call.args:
        if arg.is_point():
            arg_ids.add(id(arg.value))
    out_ids = set()

    def collect(tv: TracedValue):
        if tv.is_point():
            out_ids.add(id(tv.value))
        elif isinstance(tv.value, list):
            for item in tv.value:
                collect(item)

    collect(call.ret)
    tagged = []
    for w in widgets:
        if w.kind != "point":
            continue
        tv = w.payload.get("tv")
        if tv is None:
            continue
        if id(tv.value) in arg_ids:
            w.payload["roleTag"] = "input"
            tagged.append(w)
        elif id(tv.value) in out_ids:
            w.payload["roleTag"] = "output"
            tagged.append(w)
        elif call.start_serial <= tv.serial <= call.end_serial:
            w.payload["roleTag"] = "intermediate"
            tagged.append(w)
    return tagged


def _ret_contains(tv: TracedValue, shape_objs: set) -> bool:
    if id(tv.value) in shape_objs:
        return True
    if isinstance(tv.value, list):
        return any(_ret_contains(item, shape_objs) for item in tv.value)
    return False


def _contains_shape_or_point(tv: TracedValue) -> bool:
    if tv.is_shape() or tv.is_point():
        return True
    if isinstance(tv.value, list):
        return any(_contains_shape_or_point(item) for item in tv.value)
    return False


# --- feature equations and selection descriptors -----------------------------

_COLOR_ARG = {"square": "color", "rect": "color", "circle": "color",
              "line": "color", "polygon": "color"}


def feature_for_shape(
    shape: SvgNode, feat: str, deriver, shape_name: str = ""
) -> Feature:
    """FeatureEquation for a named shape feature."""

    def aff(tv):
        return deriver.derive(tv)

    label = f"{shape_name} {feat}".strip()
    a = shape.args
    at = shape.attrs
    if feat == "color":
        return Feature("num", (aff(a[_COLOR_ARG[shape.tag]]),), label,
                       backing=a[_COLOR_ARG[shape.tag]], shape=shape,
                       role_hint="Color")
    if feat == "strokeColor" and shape.tag == "polygon":
        return Feature("num", (aff(a["strokeColor"]),), label,
                       backing=a["strokeColor"], shape=shape, role_hint="Color")
    if feat == "strokeWidth" and "strokeWidth" in a:
        return Feature("num", (aff(a["strokeWidth"]),), label,
                       backing=a["strokeWidth"], shape=shape,
                       role_hint="StrokeWidth")
    if shape.tag in ("square", "rect"):
        ax, ay = aff(at["x"]), aff(at["y"])
        aw = aff(a["w"])
        ah = aff(a["h"]) if shape.tag == "rect" else aw
        half = Fraction(1, 2)
        # corners are derived features; they resolve component-wise rather
        # than reusing the point argument wholesale
        pts = {
            "corner-TL": (ax, ay, None),
            "corner-TR": (ax + aw, ay, None),
            "corner-BL": (ax, ay + ah, None),
            "corner-BR": (ax + aw, ay + ah, None),
            "center": (ax + aw.scaled(half), ay + ah.scaled(half), None),
            "edge-top": (ax + aw.scaled(half), ay, None),
            "edge-bottom": (ax + aw.scaled(half), ay + ah, None),
            "edge-left": (ax, ay + ah.scaled(half), None),
            "edge-right": (ax + aw, ay + ah.scaled(half), None),
        }
        if feat in pts:
            fx, fy, backing = pts[feat]
            return Feature("point", (fx, fy), label, backing=backing, shape=shape)
        if feat == "width":
            return Feature("num", (aw,), label, backing=a["w"], shape=shape,
                           role_hint="Width")
        if feat == "height":
            backing = a["h"] if shape.tag == "rect" else a["w"]
            return Feature("num", (ah,), label, backing=backing, shape=shape,
                           role_hint="Height")
        if feat == "x":
            return Feature("num", (ax,), label, backing=at["x"], shape=shape,
                           role_hint="X")
        if feat == "y":
            return Feature("num", (ay,), label, backing=at["y"], shape=shape,
                           role_hint="Y")
    if shape.tag == "circle":
        if feat == "center":
            return Feature(
                "point",
                (aff(at["cx"]), aff(at["cy"])),
                label,
                backing=a["center"],
                shape=shape,
            )
        if feat in ("width", "radius"):
            return Feature("num", (aff(a["r"]),), label, backing=a["r"],
                           shape=shape, role_hint="Width")
    if shape.tag == "line":
        if feat == "endpoint1":
            return Feature("point", (aff(at["x1"]), aff(at["y1"])), label,
                           backing=a["pt1"], shape=shape)
        if feat == "endpoint2":
            return Feature("point", (aff(at["x2"]), aff(at["y2"])), label,
                           backing=a["pt2"], shape=shape)
    raise StaleSelection(f"{shape.tag} has no feature {feat!r}")


def _find_shape(record: ExecutionRecord, name: str, call=None) -> SvgNode:
    scopes = []
    if call is not None:
        scopes.append(call.locals)
    scopes.append(record.bindings)
    for s in scopes:
        tv = s.get(name)
        if tv is not None and isinstance(tv.value, SvgNode):
            return tv.value
    for c in record.call_records:
        tv = c.locals.get(name)
        if tv is not None and isinstance(tv.value, SvgNode):
            return tv.value
    raise StaleSelection(f"no shape named {name!r}")


def _find_binding(record: ExecutionRecord, name: str, call=None) -> TracedValue:
    if call is not None and name in call.locals:
        return call.locals[name]
    if name in record.bindings:
        return record.bindings[name]
    for c in record.call_records:
        if name in c.locals:
            return c.locals[name]
    raise StaleSelection(f"nothing named {name!r}")


def resolve_selection(
    record: ExecutionRecord,
    sel: dict,
    widgets: list[Widget] | None = None,
    focus=None,
):
    """Resolve a serialized selection to a Feature or Widget.

    `focus` is an optional (fn_name, ordinal) pair; names then resolve against
    that call's locals first.
    """
    from .nodes import node_index as _ni

    index = _ni(record.program)
    deriver_boundary = None
    call = None
    if focus is not None:
        call = record.find_call(*focus)
        if call is None:
            raise StaleSelection(f"focused call {focus} not in this execution")
    from .affine import AffineDeriver

    deriver = AffineDeriver(index, deriver_boundary)
    if not isinstance(sel, dict):
        raise StaleSelection(f"malformed selection {sel!r}")
    if "widget" in sel:
        ws = widgets if widgets is not None else derive_widgets(record)
        for w in ws:
            if w.key == sel["widget"]:
                if w.kind == "feature":
                    return feature_for_shape(
                        w.payload["shape"],
                        w.payload["feature"],
                        deriver,
                        w.label.split(".")[0],
                    )
                return w
        raise StaleSelection(f"no widget with key {sel['widget']!r}")
    if "feature" in sel:
        spec = sel["feature"]
        shape = _find_shape(record, spec["shape"], call)
        return feature_for_shape(shape, spec["name"], deriver, spec["shape"])
    if "point" in sel:
        spec = sel["point"]
        if "def" in spec:
            tv = _find_binding(record, spec["def"], call)
        else:
            shape = _find_shape(record, spec["argOf"], call)
            arg_names = list(shape.args)
            tv = shape.args[arg_names[spec["index"]]]
        if not tv.is_point():
            raise NotAPoint(f"selection {spec} is not a point")
        return Feature(
            "point",
            (deriver.derive(tv.value[0]), deriver.derive(tv.value[1])),
            label=spec.get("def", ""),
            backing=tv,
        )
    if "binding" in sel:
        spec = sel["binding"]
        c = call
        if "fn" in spec:
            c = record.find_call(spec["fn"], spec.get("ordinal", 1))
        tv = _find_binding(record, spec["name"], c)
        if tv.is_point():
            return Feature(
                "point",
                (deriver.derive(tv.value[0]), deriver.derive(tv.value[1])),
                label=spec["name"],
                backing=tv,
            )
        return Feature(
            "num", (deriver.derive(tv),), label=spec["name"], backing=tv
        )
    if "list" in sel:
        spec = sel["list"]
        tv = _find_binding(record, spec["def"], call)
        if not isinstance(tv.value, list):
            raise StaleSelection(f"{spec['def']} is not a list")
        ws = widgets if widgets is not None else derive_widgets(record)
        for w in ws:
            if w.kind == "list" and w.payload.get("tv").value is tv.value:
                return w
        raise StaleSelection(f"no list widget for {spec['def']}")
    if "call" in sel:
        spec = sel["call"]
        ws = widgets if widgets is not None else derive_widgets(record)
        for w in ws:
            if (
                w.kind == "call"
                and w.payload.get("fn") == spec["fn"]
                and w.payload.get("ordinal") == spec.get("ordinal", 1)
            ):
                return w
        raise StaleSelection(f"no call widget for {spec}")
    if "offset" in sel:
        spec = sel["offset"]
        ws = widgets if widgets is not None else derive_widgets(record)
        for w in ws:
            if w.kind == "offset" and w.label == spec.get("def"):
                return w
        raise StaleSelection(f"no offset widget named {spec.get('def')!r}")
    if "offsetEnd" in sel:
        spec = sel["offsetEnd"]
        ws = widgets if widgets is not None else derive_widgets(record)
        for w in ws:
            if w.kind == "offset" and w.label == spec.get("def"):
                base = w.payload["base"]
                result = w.payload["result"]
                axis = w.payload["axis"]
                anchor = None
                frontier = [base]
                seen = set()
                while frontier:
                    cur = frontier.pop(0)
                    if id(cur) in seen:
                        continue
                    seen.add(id(cur))
                    for lst in cur.member_of:
                        if lst.is_point():
                            anchor = lst
                            break
                    if anchor:
                        break
                    frontier.extend(cur.trace.parents)
                if anchor is None:
                    raise StaleSelection("offset has no base point")
                cross = anchor.value[1] if axis == "x" else anchor.value[0]
                ax = deriver.derive(result if axis == "x" else cross)
                ay = deriver.derive(cross if axis == "x" else result)
                return Feature(
                    "point", (ax, ay), label=f"{w.label} end"
                )
        raise StaleSelection(f"no offset widget named {spec.get('def')!r}")
    if "distance" in sel:
        spec = sel["distance"]
        return distance_feature(
            record, spec["p1"], spec["p2"], spec.get("axis", "horizontal"),
            focus=focus,
        )
    if "slider" in sel:
        k = sel["slider"].get("index", 0)
        sliders = [
            n
            for n in sorted(index)
            if isinstance(index[n], Num) and index[n].slider is not None
        ]
        if k >= len(sliders):
            raise StaleSelection(f"no slider literal #{k}")
        nid = sliders[k]
        return Feature(
            "num",
            (Affine({("lit", nid): Fraction(1)}),),
            label=f"slider{k}",
        )
    raise StaleSelection(f"unrecognized selection {sel!r}")


def distance_feature(record, p1_sel, p2_sel, axis: str, focus=None) -> Feature:
    """Axis-aligned distance between two point selections, |a - b| rendered
    with the sign of the current values."""
    f1 = resolve_selection(record, p1_sel, focus=focus)
    f2 = resolve_selection(record, p2_sel, focus=focus)
    for f in (f1, f2):
        if not isinstance(f, Feature) or f.kind != "point":
            raise NotAPoint("distance endpoints must be point selections")
    index = node_index(record.program)
    k = 0 if axis == "horizontal" else 1
    a1 = f1.affines[k]
    a2 = f2.affines[k]
    v1 = _affine_value(a1, index)
    v2 = _affine_value(a2, index)
    diff = (a2 - a1) if v2 >= v1 else (a1 - a2)
    return Feature(
        "num",
        (diff,),
        label=f"{axis} distance",
        role_hint="HorizontalDistance" if axis == "horizontal" else
        "VerticalDistance",
    )
