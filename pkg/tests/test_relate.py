"""Make Equal and Relate."""

from fractions import Fraction

import pytest

from snsk.candidates import ToolError
from snsk.interp import evaluate
from snsk.nodes import node_index
from snsk.parser import parse
from snsk.relate import make_equal, relate
from snsk.widgets import resolve_selection


def feature_value(program, sel):
    rec = evaluate(program)
    return resolve_selection(rec, sel).value(node_index(program))


def test_equal_colors_single_candidate(logo_fig3):
    rec = evaluate(logo_fig3)
    cands = make_equal(logo_fig3, rec, [
        {"feature": {"shape": "line1", "name": "color"}},
        {"feature": {"shape": "line2", "name": "color"}},
    ])
    assert len(cands) == 1
    assert cands[0].description == "Equalize by removing line2 color"
    new = cands[0].program
    assert new.def_named("color") is not None
    for sel_shape in ("line1", "line2"):
        assert feature_value(
            new, {"feature": {"shape": sel_shape, "name": "color"}}
        ) == 0


def test_different_widths_two_candidates():
    src = (
        "a = rect 100 [10, 10] 60 30\n\nb = rect 200 [200, 10] 120 30\n"
        "\nsvg (concat [\n  [a, b]\n])\n"
    )
    p = parse(src)
    rec = evaluate(p)
    cands = make_equal(p, rec, [
        {"feature": {"shape": "a", "name": "width"}},
        {"feature": {"shape": "b", "name": "width"}},
    ])
    assert len(cands) == 2
    descriptions = {c.description for c in cands}
    assert descriptions == {
        "Equalize by removing a width", "Equalize by removing b width",
    }
    for c in cands:
        va = feature_value(c.program, {"feature": {"shape": "a", "name": "width"}})
        vb = feature_value(c.program, {"feature": {"shape": "b", "name": "width"}})
        assert va == vb


def test_three_features_equalize_all():
    src = (
        "a = rect 100 [10, 10] 60 30\n\nb = rect 200 [200, 10] 120 30\n"
        "\nc = rect 300 [400, 10] 90 30\n"
        "\nsvg (concat [\n  [a, b, c]\n])\n"
    )
    p = parse(src)
    rec = evaluate(p)
    sels = [
        {"feature": {"shape": n, "name": "width"}} for n in ("a", "b", "c")
    ]
    cands = make_equal(p, rec, sels)
    assert cands
    for cand in cands:
        values = {feature_value(cand.program, s) for s in sels}
        assert len(values) == 1, cand.description


def test_make_equal_never_rewrites_frozen():
    src = (
        "a = rect 100 [10, 10] 60! 30\n\nb = rect 200 [200, 10] 120 30\n"
        "\nsvg (concat [\n  [a, b]\n])\n"
    )
    p = parse(src)
    rec = evaluate(p)
    cands = make_equal(p, rec, [
        {"feature": {"shape": "a", "name": "width"}},
        {"feature": {"shape": "b", "name": "width"}},
    ])
    # only b's constant is removable; 60! must survive everywhere
    assert len(cands) == 1
    assert "60!" in cands[0].source
    assert feature_value(
        cands[0].program, {"feature": {"shape": "b", "name": "width"}}
    ) == 60


def test_make_equal_all_frozen_errors():
    src = (
        "a = rect 100 [10, 10] 60! 30\n\nb = rect 200 [200, 10] 120! 30\n"
        "\nsvg (concat [\n  [a, b]\n])\n"
    )
    p = parse(src)
    rec = evaluate(p)
    with pytest.raises(ToolError) as err:
        make_equal(p, rec, [
            {"feature": {"shape": "a", "name": "width"}},
            {"feature": {"shape": "b", "name": "width"}},
        ])
    assert err.value.code == "NoFreeConstants"


def test_candidate_count_bounded_by_removable_constants():
    src = (
        "a = rect 100 [10, 10] 60 30\n\nb = rect 200 [200, 10] 120 30\n"
        "\nsvg (concat [\n  [a, b]\n])\n"
    )
    p = parse(src)
    rec = evaluate(p)
    sels = [
        {"feature": {"shape": "a", "name": "width"}},
        {"feature": {"shape": "b", "name": "width"}},
    ]
    cands = make_equal(p, rec, sels)
    removable = 2
    assert len(cands) <= removable


def test_preservation_of_unrelated_features(logo_fig3):
    rec = evaluate(logo_fig3)
    before = feature_value(
        logo_fig3, {"feature": {"shape": "square1", "name": "width"}}
    )
    cands = make_equal(logo_fig3, rec, [
        {"feature": {"shape": "line1", "name": "color"}},
        {"feature": {"shape": "line2", "name": "color"}},
    ])
    after = feature_value(
        cands[0].program, {"feature": {"shape": "square1", "name": "width"}}
    )
    assert before == after


def test_relate_one_third_form():
    src = (
        "[x, y] as point = [100, 200]\n\n[x2, y2] as point2 = [200, 200]\n"
        "\n[x3, y3] as point3 = [133.33, 200]\n"
        "\nsvg (concat [\n])\n"
    )
    p = parse(src)
    rec = evaluate(p)
    cands = relate(p, rec, [
        {"binding": {"name": "x3"}},
        {"binding": {"name": "x"}},
        {"binding": {"name": "x2"}},
    ])
    forms = [c.description for c in cands]
    assert any("1/3" in f for f in forms)
    chosen = next(c for c in cands if "x + (x2 - x) * 1/3" in c.description)
    assert "x + (x2 - x) / 3!" in chosen.source
    v = feature_value(chosen.program, {"binding": {"name": "x3"}})
    assert v == Fraction(100) + Fraction(100, 3)


def test_relate_equal_values_includes_equality():
    src = "a = rect 100 [10, 10] 60 30\n\nb = rect 200 [200, 50] 60 40\n" \
          "\nsvg (concat [\n  [a, b]\n])\n"
    p = parse(src)
    rec = evaluate(p)
    cands = relate(p, rec, [
        {"feature": {"shape": "a", "name": "width"}},
        {"feature": {"shape": "b", "name": "width"}},
    ])
    assert any("Equalize" in c.description for c in cands)


def test_relate_no_plausible_relation():
    # exhaustive small-rational oracle: no p/q in the search space fits
    src = "a = 7\n\nb = 113\n\nc = 1000\n\nsvg (concat [\n])\n"
    p = parse(src)
    rec = evaluate(p)
    ratios = (Fraction(1, 3), Fraction(2, 3), Fraction(1, 2))
    vals = {"a": 7, "b": 113, "c": 1000}
    for target, v in vals.items():
        for j, vj in vals.items():
            for k, vk in vals.items():
                if len({target, j, k}) != 3:
                    continue
                for r in ratios:
                    assert abs(v - (vj + (vk - vj) * r)) > Fraction(1, 2)
        for j, vj in vals.items():
            if j != target:
                assert abs(v - vj) > Fraction(1, 2)
    with pytest.raises(ToolError) as err:
        relate(p, rec, [
            {"binding": {"name": "a"}},
            {"binding": {"name": "b"}},
            {"binding": {"name": "c"}},
        ])
    assert err.value.code == "NoPlausibleRelation"


def test_make_equal_exactness_after_float_rendering():
    # equality holds exactly in rationals and within 1e-9 after float render
    src = (
        "a = rect 100 [10, 10] 61 30\n\nb = rect 200 [200, 10] 123 30\n"
        "\nsvg (concat [\n  [a, b]\n])\n"
    )
    p = parse(src)
    rec = evaluate(p)
    cands = make_equal(p, rec, [
        {"feature": {"shape": "a", "name": "width"}},
        {"feature": {"shape": "b", "name": "width"}},
    ])
    for c in cands:
        va = feature_value(c.program, {"feature": {"shape": "a", "name": "width"}})
        vb = feature_value(c.program, {"feature": {"shape": "b", "name": "width"}})
        assert va == vb
        assert abs(float(va) - float(vb)) < 1e-9
