"""Standard-library declarations: arities, parameter names, and roles.

Role tags drive widget emission, custom-tool exposure, generated names, and
default arguments. `extract_name` is the definition name used when a point
argument in that position is lifted out of a call.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

# role tags
POINT = "Point"
X = "X"
Y = "Y"
WIDTH = "Width"
HEIGHT = "Height"
HDIST = "HorizontalDistance"
VDIST = "VerticalDistance"
COLOR = "Color"
STROKE_WIDTH = "StrokeWidth"
COUNT = "Count"
POINT_LIST = "PointList"
SHAPE_LIST = "ShapeList"

AXIS_OF_ROLE = {X: "x", Y: "y", HDIST: "x", VDIST: "y", WIDTH: "x", HEIGHT: "y"}

# default argument value per role when a tool is invoked from a gesture
ROLE_DEFAULTS = {
    COLOR: Fraction(0),
    STROKE_WIDTH: Fraction(5),
    COUNT: Fraction(3),
}

# base name for a lifted literal carrying the given role
ROLE_NAME_BASES = {
    X: "x",
    Y: "y",
    WIDTH: "w",
    HEIGHT: "h",
    HDIST: "w",
    VDIST: "h",
    COLOR: "color",
    STROKE_WIDTH: "strokeWidth",
    COUNT: "n",
}


@dataclass(frozen=True)
class Param:
    name: str
    role: str | None = None
    extract_name: str | None = None  # def name used when lifting this argument


@dataclass(frozen=True)
class Decl:
    name: str
    params: tuple[Param, ...]
    kind: str  # shape | listfn | numeric | doc
    returns: str | None = None

    @property
    def arity(self) -> int:
        return len(self.params)


def _decl(name, params, kind, returns=None):
    return Decl(name, tuple(params), kind, returns)


PRELUDE: dict[str, Decl] = {
    d.name: d
    for d in [
        _decl("svg", [Param("shapes", SHAPE_LIST)], "doc"),
        _decl("concat", [Param("lists")], "listfn"),
        _decl("map", [Param("fn"), Param("list")], "listfn"),
        _decl("reverse", [Param("list")], "listfn"),
        _decl("zeroTo", [Param("n", COUNT)], "listfn"),
        _decl("mod", [Param("a"), Param("b")], "numeric"),
        _decl("not", [Param("b")], "numeric"),
        _decl(
            "square",
            [
                Param("color", COLOR),
                Param("topLeft", POINT, extract_name="topLeft"),
                Param("w", WIDTH),
            ],
            "shape",
        ),
        _decl(
            "rect",
            [
                Param("color", COLOR),
                Param("topLeft", POINT, extract_name="topLeft"),
                Param("w", WIDTH),
                Param("h", HEIGHT),
            ],
            "shape",
        ),
        _decl(
            "circle",
            [
                Param("color", COLOR),
                Param("center", POINT, extract_name="center"),
                Param("r", WIDTH),
            ],
            "shape",
        ),
        _decl(
            "line",
            [
                Param("color", COLOR),
                Param("strokeWidth", STROKE_WIDTH),
                Param("pt1", POINT),
                Param("pt2", POINT),
            ],
            "shape",
        ),
        _decl(
            "polygon",
            [
                Param("color", COLOR),
                Param("strokeColor", COLOR),
                Param("strokeWidth", STROKE_WIDTH),
                Param("pts", POINT_LIST),
            ],
            "shape",
        ),
        _decl(
            "pointsBetweenSepBy",
            [
                Param("pt1", POINT),
                Param("pt2", POINT),
                Param("sep", HDIST),
            ],
            "listfn",
            returns=POINT_LIST,
        ),
    ]
}

# default arguments for freshly drawn shapes, per the generated-code style
SHAPE_DRAW_DEFAULTS = {
    "square": {"color": Fraction(0)},
    "rect": {"color": Fraction(0)},
    "circle": {"color": Fraction(0)},
    "line": {"color": Fraction(0), "strokeWidth": Fraction(5)},
    # polygon attrs are bound via a destructuring let, see draw.py
    "polygon": {
        "color": Fraction(529),
        "strokeColor": Fraction(360),
        "strokeWidth": Fraction(5),
    },
}
