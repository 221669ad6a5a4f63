// Widget overlay rendering: list widgets dashed, call widgets solid gray,
// offsets as axis arrows, points as dots (orange inputs / blue outputs when
// a call is focused), labels clickable for renaming.

import { widgetSelection } from "./hittest.js";
import { SelectionDescriptor, Widget } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export interface OverlayHandlers {
    onSelect(sel: SelectionDescriptor, widget: Widget): void;
    onRename?(widget: Widget): void;
    onHover?(widget: Widget | null): void;
}

const ROLE_TAG_COLORS: Record<string, string> = {
    input: "#e67e22", // orange
    output: "#2980b9", // blue
    intermediate: "#ffffff",
};

export function buildOverlay(
    doc: Document,
    widgets: Widget[],
    handlers: OverlayHandlers,
    width = 800,
    height = 600,
): SVGSVGElement {
    const svg = doc.createElementNS(SVG_NS, "svg") as SVGSVGElement;
    svg.setAttribute("class", "widget-overlay");
    svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
    for (const widget of widgets) {
        const el = renderWidget(doc, widget);
        if (el === null) continue;
        el.setAttribute("data-key", widget.key);
        el.setAttribute("data-kind", widget.kind);
        el.addEventListener("click", (event) => {
            event.stopPropagation();
            handlers.onSelect(widgetSelection(widget), widget);
        });
        el.addEventListener("mouseenter", () => handlers.onHover?.(widget));
        el.addEventListener("mouseleave", () => handlers.onHover?.(null));
        svg.appendChild(el);
        if (widget.label && (widget.kind === "list" || widget.kind === "point")) {
            const label = doc.createElementNS(SVG_NS, "text");
            label.setAttribute("x", String(widget.geometry.x + 4));
            label.setAttribute("y", String(widget.geometry.y - 4));
            label.setAttribute("class", "widget-label");
            label.setAttribute("data-label-for", widget.key);
            label.textContent = widget.label;
            label.addEventListener("click", (event) => {
                event.stopPropagation();
                handlers.onRename?.(widget);
            });
            svg.appendChild(label);
        }
    }
    return svg;
}

function renderWidget(doc: Document, widget: Widget): SVGElement | null {
    const g = widget.geometry;
    switch (widget.kind) {
        case "point": {
            const c = doc.createElementNS(SVG_NS, "circle");
            c.setAttribute("cx", String(g.x));
            c.setAttribute("cy", String(g.y));
            c.setAttribute("r", "4");
            const tag = widget.payload?.roleTag as string | undefined;
            c.setAttribute("fill", ROLE_TAG_COLORS[tag ?? ""] ?? "#ffffff");
            c.setAttribute("stroke", "#333333");
            c.setAttribute("class", "widget-point");
            return c;
        }
        case "offset": {
            const group = doc.createElementNS(SVG_NS, "g");
            group.setAttribute("class", "widget-offset");
            const line = doc.createElementNS(SVG_NS, "line");
            line.setAttribute("x1", String(g.x));
            line.setAttribute("y1", String(g.y));
            const x2 = g.x + (g.dx ?? 0);
            const y2 = g.y + (g.dy ?? 0);
            line.setAttribute("x2", String(x2));
            line.setAttribute("y2", String(y2));
            line.setAttribute("stroke", "#555555");
            line.setAttribute("marker-end", "url(#arrowhead)");
            group.appendChild(line);
            return group;
        }
        case "list": {
            const r = boxElement(doc, widget);
            r.setAttribute("class", "widget-list");
            r.setAttribute("fill", "none");
            r.setAttribute("stroke", "#4444aa");
            r.setAttribute("stroke-dasharray", "5,3"); // dashed: a list
            return r;
        }
        case "call": {
            const r = boxElement(doc, widget);
            r.setAttribute("class", "widget-call");
            r.setAttribute("fill", "none");
            r.setAttribute("stroke", "#888888"); // solid gray: a call
            return r;
        }
        case "feature": {
            if (g.w !== undefined && g.h !== undefined) {
                const r = boxElement(doc, widget);
                r.setAttribute("class", "widget-feature-slider");
                r.setAttribute("fill", "#dddddd");
                r.setAttribute("stroke", "#999999");
                return r;
            }
            const s = doc.createElementNS(SVG_NS, "rect");
            s.setAttribute("x", String(g.x - 3));
            s.setAttribute("y", String(g.y - 3));
            s.setAttribute("width", "6");
            s.setAttribute("height", "6");
            s.setAttribute("class", "widget-feature-point");
            s.setAttribute("fill", "#ffffff");
            s.setAttribute("stroke", "#333333");
            return s;
        }
        default:
            return null;
    }
}

function boxElement(doc: Document, widget: Widget): SVGElement {
    const r = doc.createElementNS(SVG_NS, "rect");
    r.setAttribute("x", String(widget.geometry.x));
    r.setAttribute("y", String(widget.geometry.y));
    r.setAttribute("width", String(widget.geometry.w ?? 0));
    r.setAttribute("height", String(widget.geometry.h ?? 0));
    r.setAttribute("pointer-events", "all");
    return r;
}
