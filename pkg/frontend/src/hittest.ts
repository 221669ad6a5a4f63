// Widget hit-testing and snapping. Pointer positions within SNAP_RADIUS of
// a point-providing widget snap to it; hit-testing area widgets prefers the
// smallest box so nested list widgets stay clickable.

import { Point, SelectionDescriptor, Widget } from "./types.js";

export const SNAP_RADIUS = 8;

export function widgetSelection(widget: Widget): SelectionDescriptor {
    return { widget: widget.key };
}

function distance(a: Point, b: Point): number {
    return Math.hypot(a.x - b.x, a.y - b.y);
}

export function offsetEndPoint(widget: Widget): Point {
    return {
        x: widget.geometry.x + (widget.geometry.dx ?? 0),
        y: widget.geometry.y + (widget.geometry.dy ?? 0),
    };
}

// widgets that stand for a concrete point on the canvas
export function pointAnchors(widgets: Widget[]): { widget: Widget; at: Point }[] {
    const anchors: { widget: Widget; at: Point }[] = [];
    for (const w of widgets) {
        if (w.internal) continue;
        if (w.kind === "point") {
            anchors.push({ widget: w, at: { x: w.geometry.x, y: w.geometry.y } });
        } else if (w.kind === "offset") {
            anchors.push({ widget: w, at: offsetEndPoint(w) });
        } else if (
            w.kind === "feature" &&
            w.geometry.w === undefined &&
            w.geometry.h === undefined
        ) {
            anchors.push({ widget: w, at: { x: w.geometry.x, y: w.geometry.y } });
        }
    }
    return anchors;
}

export function snapTarget(
    widgets: Widget[],
    at: Point,
    radius: number = SNAP_RADIUS,
): Widget | null {
    let best: Widget | null = null;
    let bestDist = radius;
    for (const { widget, at: anchor } of pointAnchors(widgets)) {
        const d = distance(anchor, at);
        if (d <= bestDist) {
            best = widget;
            bestDist = d;
        }
    }
    return best;
}

function boxArea(w: Widget): number {
    return (w.geometry.w ?? 0) * (w.geometry.h ?? 0);
}

function inBox(w: Widget, at: Point): boolean {
    const { x, y, w: width, h: height } = w.geometry;
    if (width === undefined || height === undefined) return false;
    return at.x >= x && at.x <= x + width && at.y >= y && at.y <= y + height;
}

export function hitTest(widgets: Widget[], at: Point): Widget | null {
    const snapped = snapTarget(widgets, at);
    if (snapped !== null) return snapped;
    const boxes = widgets
        .filter((w) => !w.internal && inBox(w, at))
        .sort((a, b) => boxArea(a) - boxArea(b));
    return boxes[0] ?? null;
}
