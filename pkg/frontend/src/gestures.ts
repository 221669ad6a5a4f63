// Turning pointer gestures into engine draw steps. Endpoints within the
// snap radius of a point widget attach to it; the engine resolves the
// attachment into shared variables. Degenerate gestures pass through — the
// engine validates.

import { snapTarget, widgetSelection } from "./hittest.js";
import { Point, SelectionDescriptor, Step, Widget } from "./types.js";

export type DrawTool =
    | "square"
    | "rect"
    | "circle"
    | "line"
    | "polygon"
    | "point"
    | { custom: string };

function snapOrNull(
    widgets: Widget[],
    at: Point,
): SelectionDescriptor | null {
    const target = snapTarget(widgets, at);
    return target === null ? null : widgetSelection(target);
}

export function gestureToCommand(
    tool: DrawTool,
    track: Point[],
    widgets: Widget[],
): Step {
    if (track.length === 0) throw new Error("empty pointer track");
    const start = track[0];
    const end = track[track.length - 1];
    if (tool === "point") {
        return { op: "draw-point", at: [start.x, start.y] };
    }
    if (typeof tool === "object") {
        const step: Step = {
            op: "draw-custom",
            fn: tool.custom,
            gesture: { start: [start.x, start.y], end: [end.x, end.y] },
        };
        const snaps: Record<string, SelectionDescriptor> = {};
        const s = snapOrNull(widgets, start);
        const e = snapOrNull(widgets, end);
        if (s) snaps.start = s;
        if (e) snaps.end = e;
        if (Object.keys(snaps).length > 0) step.snaps = snaps;
        return step;
    }
    if (tool === "polygon") {
        const points = track.map((p) => [p.x, p.y]);
        const snaps = track.map((p) => snapOrNull(widgets, p));
        const step: Step = {
            op: "draw",
            tool,
            gesture: { points },
        };
        if (snaps.some((s) => s !== null)) {
            step.snaps = { points: snaps };
        }
        return step;
    }
    const step: Step = {
        op: "draw",
        tool,
        gesture: { start: [start.x, start.y], end: [end.x, end.y] },
    };
    const snaps: Record<string, SelectionDescriptor> = {};
    const s = snapOrNull(widgets, start);
    const e = snapOrNull(widgets, end);
    if (s) snaps.start = s;
    if (e) snaps.end = e;
    if (Object.keys(snaps).length > 0) step.snaps = snaps;
    return step;
}

export function dragToOffsetCommand(
    from: Point,
    to: Point,
    widgets: Widget[],
): Step {
    const dx = to.x - from.x;
    const dy = to.y - from.y;
    const axis = Math.abs(dx) >= Math.abs(dy) ? "x" : "y";
    const amount = axis === "x" ? dx : dy;
    const base = snapOrNull(widgets, from);
    const step: Step = {
        op: "draw-offset",
        from: base ?? [from.x, from.y],
        axis,
        amount,
    };
    // amounts snap to an existing offset of the same magnitude, which the
    // engine turns into a shared distance variable
    for (const w of widgets) {
        if (w.kind !== "offset" || w.internal) continue;
        const existing = Math.abs(w.geometry.dx ?? 0) + Math.abs(w.geometry.dy ?? 0);
        if (Math.abs(existing - Math.abs(amount)) <= 1 && w.label) {
            step.snapAmount = { offset: { def: w.label } };
            step.amount = amount < 0 ? -existing : existing;
            break;
        }
    }
    return step;
}
