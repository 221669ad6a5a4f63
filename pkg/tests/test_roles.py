"""Role inference and custom-tool exposure tests."""

from conftest import corpus_text
from snsk.interp import evaluate
from snsk.nodes import walk_patterns
from snsk.parser import parse
from snsk.prelude import COLOR, HDIST, POINT, STROKE_WIDTH, VDIST, WIDTH, X, Y
from snsk.roles import custom_tools, infer_roles
from snsk.scopes import analyze


def binding_roles(program, roles, name):
    for d in program.defs:
        if d.name == name:
            return roles.of_binding(d.nid)
        if d.pattern is not None:
            for p in walk_patterns(d.pattern):
                if getattr(p, "name", None) == name:
                    return roles.of_binding(p.nid)
    raise AssertionError(name)


def test_fig8_halfw_is_horizontal_distance(rhombus_skeleton):
    roles = infer_roles(rhombus_skeleton)
    assert HDIST in binding_roles(rhombus_skeleton, roles, "halfW")
    assert VDIST in binding_roles(rhombus_skeleton, roles, "halfH")
    assert X in binding_roles(rhombus_skeleton, roles, "x")
    assert Y in binding_roles(rhombus_skeleton, roles, "y")
    assert POINT in binding_roles(rhombus_skeleton, roles, "point")


def test_fig8_use_counts_two_h_two_v(rhombus_skeleton):
    roles = infer_roles(rhombus_skeleton)
    info = analyze(rhombus_skeleton)
    h_uses = v_uses = 0
    for d in rhombus_skeleton.defs:
        if d.pattern is not None:
            for p in walk_patterns(d.pattern):
                if getattr(p, "name", None) == "halfW":
                    h_uses = len(info.uses_of(p.nid))
        if d.name == "halfW":
            h_uses = len(info.uses_of(d.nid))
        if d.name == "halfH":
            v_uses = len(info.uses_of(d.nid))
    assert h_uses == 2 and v_uses == 2
    for d in rhombus_skeleton.defs:
        if d.name in ("halfW", "halfH"):
            for use in analyze(rhombus_skeleton).uses_of(d.nid):
                use_roles = roles.of_expr(use)
                assert (HDIST in use_roles) or (VDIST in use_roles)


def test_logofunc_param_roles():
    p = parse(corpus_text("logo_final"))
    roles = infer_roles(p)
    lf = p.def_named("logoFunc")
    by_name = {param.name: roles.of_binding(param.nid) for param in lf.params}
    assert X in by_name["x"]
    assert Y in by_name["y"]
    assert by_name["w"] & {WIDTH, HDIST}
    assert COLOR in by_name["color"]
    assert STROKE_WIDTH in by_name["strokeWidth"]


def test_unused_literal_def_has_no_role():
    p = parse("mystery = 42\n\nsvg (concat [\n])\n")
    roles = infer_roles(p)
    assert binding_roles(p, roles, "mystery") == set()


def test_two_point_functions_exposed():
    p = parse(corpus_text("koch_final"))
    names = [t.name for t in custom_tools(p)]
    assert "oneThirdPt" in names
    assert "equiTriPt" in names
    assert "makeKochPts" in names  # depth + two points


def test_logofunc_exposed_as_point_plus_width():
    p = parse(corpus_text("logo_final"))
    tools = {t.name: t for t in custom_tools(p)}
    assert "logoFunc" in tools
    sig = tools["logoFunc"]
    assert sig.point_params == [("xy", 0, 1)]
    assert sig.dist_params and sig.dist_params[0][1] == "x"


def test_color_only_function_not_exposed():
    src = (
        "tint c = square c [10, 10] 40\n"
        "\nsq = tint 140\n"
        "\nsvg (concat [\n  [sq]\n])\n"
    )
    p = parse(src)
    assert all(t.name != "tint" for t in custom_tools(p))


def test_monotonic_roles_adding_uses():
    # adding a use can only add roles, never remove them
    base = (
        "[x, y] as point = [10, 20]\n\nd = 5\n"
        "\nsvg (concat [\n])\n"
    )
    more = (
        "[x, y] as point = [10, 20]\n\nd = 5\n\nxOff = x + d\n"
        "\nsvg (concat [\n])\n"
    )
    p1, p2 = parse(base), parse(more)
    r1, r2 = infer_roles(p1), infer_roles(p2)
    assert binding_roles(p1, r1, "d") <= binding_roles(p2, r2, "d")
    assert HDIST in binding_roles(p2, r2, "d")


def test_exposure_soundness_draw_each_tool():
    # invoking any exposed tool with a plain gesture yields a valid program
    from snsk.draw import draw_custom

    for name in ("logo_final", "koch_final", "tree_branch_final"):
        p = parse(corpus_text(name))
        rec = evaluate(p)
        for tool in custom_tools(p):
            cand = draw_custom(
                p, rec, tool.name,
                {"gesture": {"start": [500, 420], "end": [560, 470]}},
            )
            analyze(cand.program)  # raises on unbound variables
