"""Widget derivation, selection resolution, and visibility tests."""

import json
from fractions import Fraction
from pathlib import Path

import pytest

from conftest import corpus_text
from snsk.interp import evaluate
from snsk.nodes import node_index
from snsk.parser import parse
from snsk.unparse import unparse
from snsk.widgets import (
    Feature,
    NotAPoint,
    StaleSelection,
    derive_widgets,
    distance_feature,
    resolve_selection,
    visible_widgets,
)


@pytest.fixture
def fig8_record(rhombus_skeleton):
    return evaluate(rhombus_skeleton)


def test_fig8_census_exactly_one_point_four_offsets(fig8_record):
    ws = derive_widgets(fig8_record)
    points = [w for w in ws if w.kind == "point"]
    offsets = [w for w in ws if w.kind == "offset"]
    assert len(points) == 1
    assert points[0].geometry == {"x": 208.0, "y": 256.0}
    assert len(offsets) == 4
    deltas = sorted((w.geometry["dx"], w.geometry["dy"]) for w in offsets)
    assert deltas == [(-102.0, 0.0), (0.0, -145.0), (0.0, 145.0), (102.0, 0.0)]
    horizontal = [w for w in offsets if w.payload["axis"] == "x"]
    vertical = [w for w in offsets if w.payload["axis"] == "y"]
    assert len(horizontal) == 2 and len(vertical) == 2


def test_grouped_logo_has_exactly_four_list_widgets(logo_grouped):
    rec = evaluate(logo_grouped)
    ws = derive_widgets(rec)
    lists = [w for w in ws if w.kind == "list"]
    assert len(lists) == 4


def test_minimal_program_list_widgets_only_from_main():
    rec = evaluate(parse(corpus_text("square")))
    lists = [w for w in derive_widgets(rec) if w.kind == "list"]
    # the inner [square1] literal, the concat argument, the concat result
    assert len(lists) == 3


def test_resolve_line2_color_feature(logo_fig3):
    rec = evaluate(logo_fig3)
    idx = node_index(logo_fig3)
    f = resolve_selection(rec, {"feature": {"shape": "line2", "name": "color"}})
    assert isinstance(f, Feature) and f.kind == "num"
    assert f.value(idx) == 0
    ((kind, nid),) = list(f.affines[0].terms)
    assert kind == "lit"
    line2 = logo_fig3.def_named("line2").rhs
    assert line2.args[0].nid == nid  # the literal 0 in `line 0 5 ...`


def test_resolve_corner_feature_traces(logo_fig3):
    rec = evaluate(logo_fig3)
    idx = node_index(logo_fig3)
    f = resolve_selection(
        rec, {"feature": {"shape": "square1", "name": "corner-TL"}}
    )
    assert f.kind == "point"
    assert f.point_value(idx) == (158, 127)
    lits = {idx[nid].value for aff in f.affines for (_, nid) in aff.terms}
    assert lits == {Fraction(158), Fraction(127)}


def test_stale_selection_raises():
    rec = evaluate(parse(corpus_text("square")))
    with pytest.raises(StaleSelection):
        resolve_selection(rec, {"widget": "point:999-1000:0"})
    with pytest.raises(StaleSelection):
        resolve_selection(rec, {"feature": {"shape": "ghost", "name": "color"}})


def test_distance_feature_subtraction_oracle():
    src = (
        "[x, y] as point = [100, 50]\n\n[x2, y2] as point2 = [180, 50]\n"
        "\nsvg (concat [\n])\n"
    )
    p = parse(src)
    rec = evaluate(p)
    idx = node_index(p)
    d = distance_feature(
        rec, {"point": {"def": "point"}}, {"point": {"def": "point2"}},
        "horizontal",
    )
    assert d.value(idx) == 180 - 100  # independent subtraction oracle
    same = distance_feature(
        rec, {"point": {"def": "point"}}, {"point": {"def": "point"}},
        "horizontal",
    )
    assert same.value(idx) == 0


def test_distance_feature_symbolic_two_halfw(fig8_record, rhombus_skeleton):
    idx = node_index(rhombus_skeleton)
    d = distance_feature(
        fig8_record,
        {"offsetEnd": {"def": "xOffset2"}},
        {"offsetEnd": {"def": "xOffset"}},
        "horizontal",
    )
    # |(x + halfW) - (and x - halfW)| = 2 * halfW, symbolically
    assert d.value(idx) == 204
    halfw_def = rhombus_skeleton.def_named("halfW")
    assert d.affines[0].terms == {("lit", halfw_def.rhs.nid): Fraction(2)}


def test_distance_feature_requires_points(fig8_record):
    with pytest.raises((NotAPoint, StaleSelection)):
        distance_feature(
            fig8_record,
            {"binding": {"name": "halfW"}},
            {"point": {"def": "point"}},
            "horizontal",
        )


def test_visible_widgets_default_policy(logo_grouped):
    rec = evaluate(logo_grouped)
    ws = derive_widgets(rec)
    no_hover = visible_widgets(ws, rec)
    assert all(w.kind in ("point", "offset") for w in no_hover)
    hover = visible_widgets(ws, rec, hover_name="line1")
    assert len([w for w in hover if w.kind == "list"]) == 4
    assert any(w.kind == "feature" for w in hover)


def test_visible_widgets_suppresses_prelude_internals():
    src = (
        "[x, y] as point = [100, 100]\n\n[x2, y2] as point2 = [400, 100]\n"
        "\npts = pointsBetweenSepBy point point2 50\n"
        "\nsvg (concat [\n])\n"
    )
    rec = evaluate(parse(src))
    ws = derive_widgets(rec)
    internal_points = [w for w in ws if w.kind == "point" and w.internal]
    assert internal_points  # emitted for snapping machinery
    visible = visible_widgets(ws, rec)
    assert all(not w.internal for w in visible)


def test_widget_keys_stable_across_reparse(logo_grouped):
    rec1 = evaluate(logo_grouped)
    keys1 = [w.key for w in derive_widgets(rec1)]
    reparsed = parse(unparse(logo_grouped))
    rec2 = evaluate(reparsed)
    keys2 = [w.key for w in derive_widgets(rec2)]
    assert keys1 == keys2


def test_resolution_stable_across_reparse(logo_fig3):
    rec1 = evaluate(logo_fig3)
    f1 = resolve_selection(rec1, {"feature": {"shape": "line2", "name": "color"}})
    idx1 = node_index(logo_fig3)
    reparsed = parse(unparse(logo_fig3))
    rec2 = evaluate(reparsed)
    f2 = resolve_selection(rec2, {"feature": {"shape": "line2", "name": "color"}})
    idx2 = node_index(reparsed)
    ((_, nid1),) = list(f1.affines[0].terms)
    ((_, nid2),) = list(f2.affines[0].terms)
    assert idx1[nid1].span == idx2[nid2].span


def test_widget_determinism(logo_grouped):
    rec = evaluate(logo_grouped)
    a = [w.key for w in derive_widgets(rec)]
    b = [w.key for w in derive_widgets(evaluate(logo_grouped))]
    assert a == b


def test_widget_json_matches_schema():
    import jsonschema

    schema = json.loads(
        Path(__file__).parent.parent.joinpath(
            "docs", "widgets.schema.json"
        ).read_text()
    )
    rec = evaluate(parse(corpus_text("logo_grouped")))
    for w in derive_widgets(rec):
        jsonschema.validate(w.to_json(), schema)


def test_point_widget_emission_for_as_point_defs():
    # every `as point` definition yields a point widget
    for name in ("rhombus_skeleton", "target_premerge", "tree_branch_final"):
        p = parse(corpus_text(name))
        rec = evaluate(p)
        ws = derive_widgets(rec)
        as_points = [
            d for d in p.defs
            if d.pattern is not None
        ]
        point_widgets = [w for w in ws if w.kind == "point"]
        assert len(point_widgets) >= len(as_points), name
