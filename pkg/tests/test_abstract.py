"""Group, Abstract, repetition tools, and Fill Hole."""

import pytest

from conftest import corpus_text
from snsk.abstraction import (
    abstract,
    fill_hole,
    group,
    repeat_by_indexed_merge,
    repeat_over_existing_list,
    repeat_over_function_call,
)
from snsk.candidates import ToolError
from snsk.interp import evaluate
from snsk.parser import parse
from snsk.svg import render_svg
from snsk.unparse import unparse


def svg_of(program):
    return render_svg(evaluate(program)).to_text()


def test_group_three_shapes_into_named_list(logo_fig3):
    rec = evaluate(logo_fig3)
    cand = group(logo_fig3, rec, [
        {"def": "square1"}, {"def": "line1"}, {"def": "line2"},
    ])
    assert "squareLineLine = [square1, line1, line2]" in cand.source
    assert "svg (concat [\n  squareLineLine\n])" in cand.source
    assert svg_of(cand.program) == svg_of(logo_fig3)


def test_group_partial_keeps_third_entry(logo_fig3):
    rec = evaluate(logo_fig3)
    cand = group(logo_fig3, rec, [{"def": "square1"}, {"def": "line1"}])
    assert "squareLine = [square1, line1]" in cand.source
    assert "[line2]" in cand.source.split("svg (concat [")[1] or \
        "line2" in cand.source.split("svg (concat [")[1]
    assert svg_of(cand.program) == svg_of(logo_fig3)


def test_group_single_shape_rejected(logo_fig3):
    rec = evaluate(logo_fig3)
    with pytest.raises(ToolError):
        group(logo_fig3, rec, [{"def": "square1"}])


def test_abstract_logo_extracts_function(logo_grouped):
    from snsk.refactor import rename

    renamed = rename(logo_grouped, "squareLineLine", "logo").program
    rec = evaluate(renamed)
    cand = abstract(renamed, rec, {"def": "logo"})
    assert "logoFunc y x w color strokeWidth =" in cand.source
    assert "logo = logoFunc y x w color strokeWidth" in cand.source
    assert "  let topLeft = [x, y] in" in cand.source
    assert svg_of(cand.program) == svg_of(renamed)


def test_abstract_rhombus_params():
    p = parse(corpus_text("tree_branch_final"))
    d = p.def_named("rhombusFunc")
    assert d is not None
    from snsk.nodes import AsPat, VarPat

    assert isinstance(d.params[0], AsPat)
    assert [getattr(x, "name", "") for x in d.params[1:]] == ["halfW", "halfH"]


def test_abstract_no_free_vars_zero_parameters():
    src = "shape = square 140 [10, 20] 30\n\nsvg (concat [\n  [shape]\n])\n"
    p = parse(src)
    rec = evaluate(p)
    cand = abstract(p, rec, {"def": "shape"})
    d = cand.program.def_named("shapeFunc")
    assert d is not None and d.params == []
    assert svg_of(cand.program) == svg_of(p)


def test_repeat_over_existing_list_structure():
    p = parse(corpus_text("tree_branch_final"))
    assert "rhombusFunc2 ([x, y] as point) =" in unparse(p)
    assert "repeatedRhombusFunc2 = map rhombusFunc2 leafAttachmentPts" in unparse(p)


def test_repeat_over_one_element_list_preserves_svg():
    src = (
        "[x, y] as point = [208, 256]\n\nhalfW = 40\n\nhalfH = 83\n"
        "\nrhombusFunc ([x, y] as point) halfW halfH = polygon 529 360 5 "
        "[[x + halfW, y], [x, y - halfH], [x - halfW, y], [x, y + halfH]]\n"
        "\nleaf = rhombusFunc point halfW halfH\n"
        "\nonePt = [point]\n"
        "\nsvg (concat [\n  [leaf]\n])\n"
    )
    p = parse(src)
    rec = evaluate(p)
    before = svg_of(p)
    cand = repeat_over_existing_list(p, rec, {"def": "leaf"}, {"def": "onePt"})
    assert svg_of(cand.program) == before


def test_repeat_over_empty_list_valid():
    src = (
        "[x, y] as point = [208, 256]\n"
        "\nleaf = square 140 point 40\n"
        "\nnoPts = []\n"
        "\nsvg (concat [\n  [leaf]\n])\n"
    )
    p = parse(src)
    rec = evaluate(p)
    cand = repeat_over_existing_list(p, rec, {"def": "leaf"}, {"def": "noPts"})
    assert cand.error is None
    assert render_svg(evaluate(cand.program)).elements == []


def test_repeat_over_non_point_list_rejected(logo_fig3):
    rec = evaluate(logo_fig3)
    with pytest.raises(ToolError) as err:
        repeat_over_existing_list(
            logo_fig3, {"def": "square1"} and rec, {"def": "square1"},
            {"def": "topLeft"},
        )
    assert err.value.code == "ListNotPoints"


def test_repeat_over_function_call_inserts_points_def():
    src = (
        "[x, y] as point = [100, 100]\n"
        "\nleaf = square 140 point 30\n"
        "\nsvg (concat [\n  [leaf]\n])\n"
    )
    p = parse(src)
    rec = evaluate(p)
    cand = repeat_over_function_call(
        p, rec, {"def": "leaf"}, "pointsBetweenSepBy",
        {"start": [100, 400], "end": [400, 400], "args": {"sep": 100}},
    )
    assert "pointsBetweenSepBy [100, 400] [400, 400] 100" in cand.source
    assert "map squareFunc" in cand.source.replace("map square2Func", "map squareFunc") or "map " in cand.source
    doc = render_svg(evaluate(cand.program))
    assert len([e for e in doc.elements if e.tag == "rect"]) == 4


def test_repeat_over_call_rejects_non_point_fn():
    p = parse(corpus_text("logo_final"))
    rec = evaluate(p)
    with pytest.raises(ToolError) as err:
        repeat_over_function_call(
            p, rec, {"def": "logo"}, "logoFunc", {"start": [0, 0],
                                                  "end": [10, 10]},
        )
    assert err.value.code == "FnDoesNotReturnPointList"


def test_indexed_merge_three_circles():
    p = parse(corpus_text("target_premerge"))
    rec = evaluate(p)
    cands = repeat_by_indexed_merge(p, rec, [
        {"def": "circle1"}, {"def": "circle2"}, {"def": "circle3"},
    ])
    assert len(cands) == 2
    assert "reversed order" not in cands[0].description
    assert "reversed order" in cands[1].description
    plain, reverse = cands
    assert (
        "circles = map (\\i -> circle ??(1 => 0, 2 => 466, 3 => 0) point "
        "??(1 => 114, 2 => 68, 3 => 25)) (zeroTo 3{0-15})" in plain.source
    )
    assert "(reverse (zeroTo 3{0-15}))" in reverse.source
    before = svg_of(p)
    assert svg_of(plain.program) == before
    assert svg_of(reverse.program) == before


def test_indexed_merge_identical_shapes_no_holes():
    src = (
        "[x, y] as point = [100, 100]\n"
        "\nsq1 = square 140 point 40\n\nsq2 = square 140 point 40\n"
        "\nsvg (concat [\n  [sq1, sq2]\n])\n"
    )
    p = parse(src)
    rec = evaluate(p)
    cands = repeat_by_indexed_merge(p, rec, [{"def": "sq1"}, {"def": "sq2"}])
    assert "??(" not in cands[0].source
    assert svg_of(cands[0].program) == svg_of(p)


def test_indexed_merge_rejects_different_heads(logo_fig3):
    rec = evaluate(logo_fig3)
    with pytest.raises(ToolError) as err:
        repeat_by_indexed_merge(logo_fig3, rec, [
            {"def": "square1"}, {"def": "line1"},
        ])
    assert err.value.code == "ShapesNotUnifiable"


def _merged_target():
    p = parse(corpus_text("target_premerge"))
    rec = evaluate(p)
    cands = repeat_by_indexed_merge(p, rec, [
        {"def": "circle1"}, {"def": "circle2"}, {"def": "circle3"},
    ])
    merged = cands[1].program
    return merged, evaluate(merged)


def test_fill_hole_color_offers_mod_conditional():
    merged, rec = _merged_target()
    cands = fill_hole(merged, rec, {"hole": {"index": 0}})
    assert "if mod i 2 == 0! then 0 else 466" in cands[0].description
    filled = cands[0].program
    assert svg_of(filled) == svg_of(merged)  # exact filling reproduces output


def test_fill_hole_radius_offers_least_squares_affine():
    import numpy as np

    merged, rec = _merged_target()
    cands = fill_hole(merged, rec, {"hole": {"index": 1}})
    approx = [c for c in cands if c.approx]
    assert approx
    # least-squares oracle: i values are [2, 1, 0], radii [114, 68, 25]
    slope, intercept = np.polyfit([2.0, 1.0, 0.0], [114.0, 68.0, 25.0], 1)
    assert abs(slope - 44.5) < 1e-9 and abs(intercept - 24.5) < 1e-9
    assert "24.5 + i * 44.5" in approx[0].description
    # exact candidates reproduce every observation on re-evaluation
    exact = [c for c in cands if not c.approx]
    for c in exact:
        assert svg_of(c.program) == svg_of(merged), c.description


def test_fill_hole_constant_observations_rank_first():
    src = (
        "xs = map (\\i -> circle ??(1 => 5, 2 => 5) [100 + i * 50, 100] 20) "
        "(zeroTo 2)\n"
        "\nsvg (concat [\n  xs\n])\n"
    )
    p = parse(src)
    rec = evaluate(p)
    cands = fill_hole(p, rec, {"hole": {"index": 0}})
    assert cands[0].description == "Fill hole with constant 5"
    assert svg_of(cands[0].program) == svg_of(p)


def test_fill_hole_without_observations_errors():
    p = parse(corpus_text("square"))
    rec = evaluate(p)
    with pytest.raises(ToolError) as err:
        fill_hole(p, rec, {"hole": {"index": 0}})
    assert err.value.code == "NoObservations"
