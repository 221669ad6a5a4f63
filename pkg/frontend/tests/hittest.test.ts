import { describe, expect, it } from "vitest";

import { hitTest, snapTarget, widgetSelection } from "../src/hittest.js";
import { Widget } from "../src/types.js";
import { WidgetsFixture, fixture } from "./helpers.js";

const fx = fixture<WidgetsFixture>("rhombus_skeleton.widgets.json");

describe("snapping", () => {
    it("snaps within the 8px radius", () => {
        const point = fx.widgets.find((w) => w.kind === "point")!;
        const at = { x: point.geometry.x + 6, y: point.geometry.y + 4 };
        expect(snapTarget(fx.widgets, at)?.key).toBe(point.key);
    });

    it("does not snap beyond the radius", () => {
        const point = fx.widgets.find((w) => w.kind === "point")!;
        const at = { x: point.geometry.x + 9, y: point.geometry.y + 9 };
        expect(snapTarget(fx.widgets, at)).toBeNull();
    });

    it("offset arrow ends are snap targets", () => {
        const offset = fx.widgets.find(
            (w) => w.kind === "offset" && (w.geometry.dx ?? 0) > 0,
        )!;
        const at = {
            x: offset.geometry.x + (offset.geometry.dx ?? 0) + 2,
            y: offset.geometry.y + 1,
        };
        expect(snapTarget(fx.widgets, at)?.key).toBe(offset.key);
    });

    it("prefers the nearest anchor", () => {
        const widgets: Widget[] = [
            mkPoint("a", 100, 100),
            mkPoint("b", 104, 100),
        ];
        expect(snapTarget(widgets, { x: 103, y: 100 })?.key).toBe("b");
    });
});

describe("hit testing", () => {
    it("prefers the smallest enclosing box for nested lists", () => {
        const logo = fixture<WidgetsFixture>("logo_grouped.widgets.json");
        const lists = logo.widgets.filter((w) => w.kind === "list");
        const smallest = [...lists].sort(
            (a, b) =>
                (a.geometry.w ?? 0) * (a.geometry.h ?? 0) -
                (b.geometry.w ?? 0) * (b.geometry.h ?? 0),
        )[0];
        // probe among list boxes only: nesting inflation keeps each box
        // individually clickable at its edge
        const inside = {
            x: smallest.geometry.x + 1,
            y: smallest.geometry.y + 1,
        };
        const hit = hitTest(lists, inside);
        expect(hit?.kind).toBe("list");
        expect(hit?.key).toBe(smallest.key);
        // with every widget present, some clickable widget still wins
        expect(hitTest(logo.widgets, inside)).not.toBeNull();
    });

    it("widget selections are key descriptors", () => {
        const w = fx.widgets[0];
        expect(widgetSelection(w)).toEqual({ widget: w.key });
    });
});

function mkPoint(key: string, x: number, y: number): Widget {
    return {
        kind: "point",
        key,
        sourceSpan: [0, 0],
        geometry: { x, y },
        label: key,
        internal: false,
    };
}
