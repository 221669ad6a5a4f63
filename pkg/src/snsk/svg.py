"""SVG document rendering with deterministic serialization.

Colors are single numbers 0..500+: 0..359 picks a fully saturated hue,
360..499 sweeps black to white, and anything at or above 500 (or below 0)
renders as "none" so polygon fills can be transparent. Attribute order is
alphabetical and numbers print in minimal decimal form, so output is
byte-stable. See docs/color.md.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .interp import ExecutionRecord, NotAnSvgValue, SvgNode, TracedValue
from .unparse import frac_str

CANVAS_W = 800
CANVAS_H = 600


def color_css(n: Fraction) -> str:
    if n < 0 or n >= 500:
        return "none"
    if n >= 360:
        level = round(255 * float((n - 360) / 140))
        return f"#{level:02x}{level:02x}{level:02x}"
    return _hue_hex(float(n))


def _hue_hex(h: float) -> str:
    c = 1.0
    x = c * (1 - abs((h / 60.0) % 2 - 1))
    sector = int(h // 60) % 6
    rgb = [
        (c, x, 0.0),
        (x, c, 0.0),
        (0.0, c, x),
        (0.0, x, c),
        (x, 0.0, c),
        (c, 0.0, x),
    ][sector]
    # lightness 0.5, full saturation: scale chroma to 0..255
    r, g, b = (round(v * 255) for v in rgb)
    return f"#{r:02x}{g:02x}{b:02x}"


@dataclass
class SvgElement:
    tag: str
    attrs: dict

    def to_text(self) -> str:
        parts = " ".join(
            f'{k}="{v}"' for k, v in sorted(self.attrs.items())
        )
        return f"<{self.tag} {parts}/>" if parts else f"<{self.tag}/>"


@dataclass
class SvgDocument:
    width: int
    height: int
    elements: list

    def to_text(self) -> str:
        attrs = {
            "height": str(self.height),
            "viewBox": f"0 0 {self.width} {self.height}",
            "width": str(self.width),
            "xmlns": "http://www.w3.org/2000/svg",
        }
        head = " ".join(f'{k}="{v}"' for k, v in sorted(attrs.items()))
        if not self.elements:
            return f"<svg {head}/>\n"
        lines = [f"<svg {head}>"]
        for el in self.elements:
            lines.append("  " + el.to_text())
        lines.append("</svg>")
        return "\n".join(lines) + "\n"


def _num(tv: TracedValue) -> Fraction:
    return tv.value


def _point(tv: TracedValue) -> tuple[Fraction, Fraction]:
    return (tv.value[0].value, tv.value[1].value)


def shape_element(node: SvgNode) -> SvgElement:
    a = node.args
    if node.tag == "square":
        x, y = _point(a["topLeft"])
        side = _num(a["w"])
        return SvgElement(
            "rect",
            {
                "fill": color_css(_num(a["color"])),
                "height": frac_str(side),
                "width": frac_str(side),
                "x": frac_str(x),
                "y": frac_str(y),
            },
        )
    if node.tag == "rect":
        x, y = _point(a["topLeft"])
        return SvgElement(
            "rect",
            {
                "fill": color_css(_num(a["color"])),
                "height": frac_str(_num(a["h"])),
                "width": frac_str(_num(a["w"])),
                "x": frac_str(x),
                "y": frac_str(y),
            },
        )
    if node.tag == "circle":
        cx, cy = _point(a["center"])
        return SvgElement(
            "circle",
            {
                "cx": frac_str(cx),
                "cy": frac_str(cy),
                "fill": color_css(_num(a["color"])),
                "r": frac_str(_num(a["r"])),
            },
        )
    if node.tag == "line":
        x1, y1 = _point(a["pt1"])
        x2, y2 = _point(a["pt2"])
        return SvgElement(
            "line",
            {
                "stroke": color_css(_num(a["color"])),
                "stroke-width": frac_str(_num(a["strokeWidth"])),
                "x1": frac_str(x1),
                "x2": frac_str(x2),
                "y1": frac_str(y1),
                "y2": frac_str(y2),
            },
        )
    if node.tag == "polygon":
        pts = [_point(p) for p in a["pts"].value]
        return SvgElement(
            "polygon",
            {
                "fill": color_css(_num(a["color"])),
                "points": " ".join(f"{frac_str(x)},{frac_str(y)}" for x, y in pts),
                "stroke": color_css(_num(a["strokeColor"])),
                "stroke-width": frac_str(_num(a["strokeWidth"])),
            },
        )
    raise NotAnSvgValue(f"cannot render a {node.tag} node")


def collect_shapes(tv: TracedValue) -> list[SvgNode]:
    """Flatten a final value into its drawable shape nodes."""
    v = tv.value
    if isinstance(v, SvgNode):
        if v.tag == "svg":
            return collect_shapes(v.args["shapes"])
        return [v]
    if isinstance(v, list):
        out = []
        for item in v:
            out.extend(collect_shapes(item))
        return out
    raise NotAnSvgValue(
        "final value is not an SVG document", tv.trace.expr_nid
    )


def render_svg(record: ExecutionRecord, focus_call=None) -> SvgDocument:
    """Serializable document for the final value, or for a focused call."""
    root = focus_call.ret if focus_call is not None else record.final
    shapes = _shapes_or_empty(root)
    return SvgDocument(CANVAS_W, CANVAS_H, [shape_element(s) for s in shapes])


def _shapes_or_empty(tv: TracedValue) -> list[SvgNode]:
    # a focused call may return points or lists of points; those render empty
    try:
        return collect_shapes(tv)
    except NotAnSvgValue:
        if _is_point_tree(tv):
            return []
        raise


def _is_point_tree(tv: TracedValue) -> bool:
    if tv.is_point() or tv.is_num():
        return True
    if isinstance(tv.value, list):
        return all(_is_point_tree(e) for e in tv.value)
    return False


def shape_bbox(node: SvgNode) -> tuple[float, float, float, float]:
    """(x, y, w, h) bounding box of a shape, for widget geometry."""
    a = node.args
    if node.tag in ("square", "rect"):
        x, y = _point(a["topLeft"])
        w = _num(a["w"])
        h = _num(a["h"]) if node.tag == "rect" else w
        return (float(x), float(y), float(w), float(h))
    if node.tag == "circle":
        cx, cy = _point(a["center"])
        r = _num(a["r"])
        return (float(cx - r), float(cy - r), float(2 * r), float(2 * r))
    if node.tag == "line":
        x1, y1 = _point(a["pt1"])
        x2, y2 = _point(a["pt2"])
        return (
            float(min(x1, x2)),
            float(min(y1, y2)),
            float(abs(x2 - x1)),
            float(abs(y2 - y1)),
        )
    if node.tag == "polygon":
        pts = [_point(p) for p in a["pts"].value]
        xs = [float(x) for x, _ in pts]
        ys = [float(y) for _, y in pts]
        return (min(xs), min(ys), max(xs) - min(xs), max(ys) - min(ys))
    raise NotAnSvgValue(f"no bbox for {node.tag}")
