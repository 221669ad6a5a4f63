"""Drawing tools: shapes, points/offsets, custom tools, recursion, dupe,
delete, drags."""

import pytest

from conftest import corpus_text
from snsk.candidates import ToolError
from snsk.draw import (
    delete_shapes,
    drag_feature,
    draw_custom,
    draw_point_or_offset,
    draw_shape,
    dupe,
    insert_recursive_call,
)
from snsk.interp import evaluate
from snsk.parser import parse
from snsk.refactor import find_focus, focus_expression
from snsk.svg import render_svg
from snsk.unparse import unparse


def _eval(src):
    p = parse(src)
    return p, evaluate(p)


EMPTY = "svg (concat [\n])\n"


def test_draw_square_inserts_def_and_output():
    p, rec = _eval(EMPTY)
    cand = draw_shape(p, rec, {
        "tool": "square",
        "gesture": {"start": [158, 127], "end": [314, 283]},
    })
    assert "square1 = square 0 [158, 127] 156" in cand.source
    assert "svg (concat [\n  [square1]\n])" in cand.source


def test_draw_line_snapped_reproduces_shared_variables():
    p, rec = _eval(corpus_text("square"))
    cand = draw_shape(p, rec, {
        "tool": "line",
        "gesture": {"start": [158, 127], "end": [314, 283]},
        "snaps": {
            "start": {"point": {"argOf": "square1", "index": 1}},
            "end": {"feature": {"shape": "square1", "name": "corner-BR"}},
        },
    })
    expected = corpus_text("logo_fig3").replace(
        "\nline2 = line 0 5 [x, y2] [(2! * x + w) / 2!, (2! * y + w) / 2!]\n\n",
        "\n",
    ).replace("[square1, line1, line2]", "[square1, line1]")
    assert cand.source == expected


def test_draw_polygon_under_focus_adds_to_return():
    p = parse(corpus_text("logo_final"))
    # remove the polygon to re-draw it
    from snsk.edits import build_chain, chain_lets, clone_program

    work = clone_program(p)
    d = work.def_named("logoFunc")
    lets, final = chain_lets(d.rhs)
    lets = [lp for lp in lets if getattr(lp[0], "name", "") not in
            ("polygon1", "xYPair")]
    # restore line1's endpoint literal
    from snsk.nodes import BinOp, ListLit, Var
    for pat, bound, _ in lets:
        if getattr(pat, "name", "") == "line1":
            bound.args[3] = ListLit(items=[
                BinOp(op="+", lhs=Var(name="x"), rhs=Var(name="w")),
                Var(name="y2"),
            ])
    final.items = [i for i in final.items if i.name != "polygon1"]
    d.rhs = build_chain(lets, final)
    base = parse(unparse(work))
    focused = focus_expression(base, {"call": {"fn": "logoFunc", "ordinal": 1}})
    rec = evaluate(focused)
    cand = draw_shape(focused, rec, {
        "tool": "polygon",
        "gesture": {"points": [[158, 127], [314, 127], [314, 283], [158, 283]]},
        "snaps": {"points": [
            {"feature": {"shape": "square1", "name": "corner-TL"}},
            {"feature": {"shape": "square1", "name": "corner-TR"}},
            {"point": {"argOf": "line1", "index": 3}},
            {"feature": {"shape": "square1", "name": "corner-BL"}},
        ]},
    })
    assert "let polygon1 =" in cand.source
    assert "[square1, line1, line2, polygon1]" in cand.source
    # main expression untouched under focus
    assert "svg (concat [\n  logo\n])" in cand.source


def test_focused_draw_requires_list_return():
    src = (
        "f point = square 0 point 40\n"
        "\nsq = f [10, 10]\n"
        "\nsvg (concat [\n  [sq]\n])\n"
    )
    p = focus_expression(parse(src), {"call": {"fn": "f", "ordinal": 1}})
    rec = evaluate(p)
    with pytest.raises(ToolError) as err:
        draw_shape(p, rec, {
            "tool": "square",
            "gesture": {"start": [1, 1], "end": [20, 20]},
        })
    assert err.value.code == "FocusHasNoOutputList"


def test_degenerate_gesture_rejected():
    p, rec = _eval(EMPTY)
    with pytest.raises(ToolError) as err:
        draw_shape(p, rec, {
            "tool": "square",
            "gesture": {"start": [10, 10], "end": [10.4, 10.4]},
        })
    assert err.value.code == "DegenerateGesture"


def test_draw_point_click():
    p, rec = _eval(EMPTY)
    cand = draw_point_or_offset(p, rec, {"op": "draw-point", "at": [208, 256]})
    assert "[x, y] as point = [208, 256]" in cand.source


def test_draw_offset_and_amount_snap_share_variable():
    p, rec = _eval("[x, y] as point = [208, 256]\n\n" + EMPTY)
    c1 = draw_point_or_offset(p, rec, {
        "from": {"point": {"def": "point"}}, "axis": "x", "amount": 102,
    })
    assert "xOffset = x + 102" in c1.source
    p2 = c1.program
    rec2 = evaluate(p2)
    c2 = draw_point_or_offset(p2, rec2, {
        "from": {"point": {"def": "point"}}, "axis": "x", "amount": -102,
        "snapAmount": {"offset": {"def": "xOffset"}},
    })
    assert "dist = 102" in c2.source
    assert "xOffset = x + dist" in c2.source
    assert "xOffset2 = x - dist" in c2.source


def test_draw_offset_upward_form():
    p, rec = _eval("[x, y] as point = [208, 256]\n\n" + EMPTY)
    cand = draw_point_or_offset(p, rec, {
        "from": {"point": {"def": "point"}}, "axis": "y", "amount": -145,
    })
    assert "yOffset = y - 145" in cand.source


def test_diagonal_offset_rejected():
    p, rec = _eval("[x, y] as point = [208, 256]\n\n" + EMPTY)
    with pytest.raises(ToolError) as err:
        draw_point_or_offset(p, rec, {
            "from": {"point": {"def": "point"}}, "axis": "xy", "amount": 10,
        })
    assert err.value.code == "DiagonalDrag"


def test_draw_custom_logofunc_style_call():
    p = parse(corpus_text("logo_final"))
    rec = evaluate(p)
    cand = draw_custom(p, rec, "logoFunc",
                       {"gesture": {"start": [400, 320], "end": [480, 400]}})
    assert "logo2 = logoFunc 400 320 80 color strokeWidth" in cand.source
    # shape-valued result joins the output
    assert "logo2" in cand.source.split("svg (concat [")[1]


def test_draw_custom_two_point_tool():
    p = parse(corpus_text("koch_final"))
    rec = evaluate(p)
    cand = draw_custom(p, rec, "oneThirdPt", {
        "gesture": {"start": [100, 300], "end": [400, 300]},
        "snaps": {"start": {"point": {"def": "point"}},
                  "end": {"point": {"def": "point2"}}},
    })
    assert "= oneThirdPt point point2" in cand.source


def test_draw_custom_degenerate_same_point_allowed():
    p = parse(corpus_text("koch_final"))
    rec = evaluate(p)
    cand = draw_custom(p, rec, "oneThirdPt", {
        "gesture": {"start": [100, 300], "end": [100, 300]},
        "snaps": {"start": {"point": {"def": "point"}},
                  "end": {"point": {"def": "point"}}},
    })
    assert "= oneThirdPt point point" in cand.source
    assert cand.error is None


def test_recursive_draw_requires_focus():
    p = parse(corpus_text("koch_final"))
    rec = evaluate(p)
    assert find_focus(p) is None
    with pytest.raises(ToolError) as err:
        insert_recursive_call(p, rec, "makeKochPts", {"snaps": []})
    assert err.value.code == "NotFocusedOnDrawnFunction"


def test_dupe_square_offsets_position():
    p, rec = _eval(corpus_text("square"))
    cand = dupe(p, rec, [{"def": "square1"}])
    assert "square2 = square 140 [178, 147] 156" in cand.source
    rec2 = evaluate(cand.program)
    sq2 = rec2.bindings["square2"].value
    # re-evaluation oracle: copy sits +20 px from the original
    assert (sq2.attrs["x"].value, sq2.attrs["y"].value) == (178, 147)


def test_dupe_frozen_coordinates_wrap_addition():
    p, rec = _eval("sq = square 0 [100!, 50!] 40\n\nsvg (concat [\n  [sq]\n])\n")
    cand = dupe(p, rec, [{"def": "sq"}])
    assert "[100! + 20, 50! + 20]" in cand.source
    rec2 = evaluate(cand.program)
    copy = rec2.bindings["sq2"].value
    assert copy.attrs["x"].value == 120


def test_dupe_nothing_is_an_error():
    p, rec = _eval(EMPTY)
    with pytest.raises(ToolError):
        dupe(p, rec, [])


def test_delete_removes_def_and_output_use(logo_grouped):
    rec = evaluate(logo_grouped)
    cand = delete_shapes(logo_grouped, rec, [{"def": "line2"}])
    assert "line2" not in cand.source
    doc = render_svg(evaluate(cand.program))
    assert len([e for e in doc.elements if e.tag == "line"]) == 1


def test_delete_sole_shape_leaves_valid_program():
    p, rec = _eval(corpus_text("square"))
    cand = delete_shapes(p, rec, [{"def": "square1"}])
    assert cand.error is None
    assert render_svg(evaluate(cand.program)).elements == []


def test_delete_keeps_defs_still_used(logo_fig3):
    rec = evaluate(logo_fig3)
    cand = delete_shapes(logo_fig3, rec, [{"def": "square1"}])
    # x, y, w, topLeft, y2 still feed line1/line2
    for name in ("x", "y", "w", "topLeft", "y2"):
        assert cand.program.def_named(name) is not None, name
    from snsk.scopes import analyze

    analyze(cand.program)


def test_drag_color_slider(logo_fig3):
    rec = evaluate(logo_fig3)
    cand = drag_feature(
        logo_fig3, rec,
        {"feature": {"shape": "square1", "name": "color"}}, value=140,
    )
    assert "square1 = square 140 topLeft w" in cand.source


def test_drag_offset_amount(rhombus_skeleton):
    rec = evaluate(rhombus_skeleton)
    cand = drag_feature(
        rhombus_skeleton, rec, {"binding": {"name": "xOffset"}}, delta=10,
    )
    assert "halfW = 112" in cand.source
    rec2 = evaluate(cand.program)
    assert rec2.bindings["xOffset"].value == 208 + 112


def test_drag_frozen_only_errors():
    p, rec = _eval("a = 2! + 3!\n\nsvg (concat [\n])\n")
    with pytest.raises(ToolError) as err:
        drag_feature(p, rec, {"binding": {"name": "a"}}, delta=1)
    assert err.value.code == "AllConstantsFrozen"


def test_insertion_locality_without_focus():
    p, rec = _eval(corpus_text("logo_fig3"))
    cand = draw_shape(p, rec, {
        "tool": "circle", "gesture": {"start": [500, 100], "end": [540, 100]},
    })
    names = [d.display_name() for d in cand.program.defs]
    assert names[-1] == "circle1"  # between last def and main


def test_focused_draw_leaves_outside_text_unchanged():
    p = parse(corpus_text("logo_final"))
    focused = focus_expression(p, {"call": {"fn": "logoFunc", "ordinal": 1}})
    rec = evaluate(focused)
    cand = draw_shape(focused, rec, {
        "tool": "circle", "gesture": {"start": [200, 200], "end": [230, 200]},
    })
    before = unparse(focused)
    after = cand.source

    def outside(text):
        lines = text.splitlines()
        take = []
        inside = False
        for ln in lines:
            if ln.startswith("logoFunc"):
                inside = True
            elif inside and ln and not ln.startswith(" "):
                inside = False
            if not inside:
                take.append(ln)
        return "\n".join(take)

    assert outside(before) == outside(after)
