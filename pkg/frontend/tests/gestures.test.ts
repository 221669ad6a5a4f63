import { describe, expect, it } from "vitest";

import { dragToOffsetCommand, gestureToCommand } from "../src/gestures.js";
import { WidgetsFixture, fixture } from "./helpers.js";

const fx = fixture<WidgetsFixture>("rhombus_skeleton.widgets.json");

describe("gestureToCommand", () => {
    it("line drag with both ends near points emits snapped draw", () => {
        const point = fx.widgets.find((w) => w.kind === "point")!;
        const offset = fx.widgets.find(
            (w) => w.kind === "offset" && (w.geometry.dx ?? 0) > 0,
        )!;
        const start = { x: point.geometry.x + 3, y: point.geometry.y - 2 };
        const end = {
            x: offset.geometry.x + (offset.geometry.dx ?? 0) - 3,
            y: offset.geometry.y + 2,
        };
        const step = gestureToCommand("line", [start, end], fx.widgets);
        expect(step.op).toBe("draw");
        expect(step.tool).toBe("line");
        const snaps = step.snaps as {
            start?: { widget: string };
            end?: { widget: string };
        };
        expect(snaps.start).toEqual({ widget: point.key });
        expect(snaps.end).toEqual({ widget: offset.key });
    });

    it("point tool click emits draw-point", () => {
        const step = gestureToCommand("point", [{ x: 208, y: 256 }], []);
        expect(step).toEqual({ op: "draw-point", at: [208, 256] });
    });

    it("unsnapped drag passes raw coordinates through", () => {
        const step = gestureToCommand(
            "square",
            [
                { x: 500, y: 500 },
                { x: 560, y: 560 },
            ],
            fx.widgets,
        );
        expect(step.snaps).toBeUndefined();
        expect(step.gesture).toEqual({ start: [500, 500], end: [560, 560] });
    });

    it("polygon tracks snap per vertex", () => {
        const point = fx.widgets.find((w) => w.kind === "point")!;
        const step = gestureToCommand(
            "polygon",
            [
                { x: point.geometry.x + 1, y: point.geometry.y + 1 },
                { x: 600, y: 500 },
                { x: 700, y: 520 },
            ],
            fx.widgets,
        );
        const snaps = step.snaps as { points: ({ widget: string } | null)[] };
        expect(snaps.points[0]).toEqual({ widget: point.key });
        expect(snaps.points[1]).toBeNull();
    });

    it("custom tools carry the function name", () => {
        const step = gestureToCommand(
            { custom: "oneThirdPt" },
            [
                { x: 100, y: 300 },
                { x: 400, y: 300 },
            ],
            [],
        );
        expect(step.op).toBe("draw-custom");
        expect(step.fn).toBe("oneThirdPt");
    });
});

describe("dragToOffsetCommand", () => {
    it("amounts snap to an existing offset magnitude", () => {
        const point = fx.widgets.find((w) => w.kind === "point")!;
        const from = { x: point.geometry.x, y: point.geometry.y };
        const to = { x: from.x - 101.5, y: from.y + 1 };
        const step = dragToOffsetCommand(from, to, fx.widgets);
        expect(step.op).toBe("draw-offset");
        expect(step.axis).toBe("x");
        expect(step.amount).toBe(-102);
        expect(step.snapAmount).toEqual({ offset: { def: "xOffset" } });
    });

    it("free drags keep the raw amount", () => {
        const step = dragToOffsetCommand(
            { x: 10, y: 10 },
            { x: 10, y: 73 },
            [],
        );
        expect(step.axis).toBe("y");
        expect(step.amount).toBe(63);
        expect(step.snapAmount).toBeUndefined();
    });
});
