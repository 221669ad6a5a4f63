// Clicking each widget kind must produce a SelectionDescriptor the engine
// resolves; the fixtures carry the engine-verified resolvable key set for
// the logo and Koch sessions.

import { describe, expect, it } from "vitest";

import { buildOverlay } from "../src/overlay.js";
import { SelectionDescriptor, Widget, WidgetKind } from "../src/types.js";
import { WidgetsFixture, fixture } from "./helpers.js";

const KINDS: WidgetKind[] = ["point", "offset", "list", "call", "feature"];

function clickEachKind(fx: WidgetsFixture) {
    const selections: { kind: WidgetKind; sel: SelectionDescriptor }[] = [];
    const overlay = buildOverlay(document, fx.widgets, {
        onSelect: (sel, widget) => selections.push({ kind: widget.kind, sel }),
    });
    document.body.appendChild(overlay);
    for (const kind of KINDS) {
        const el = overlay.querySelector(`[data-kind="${kind}"]`);
        if (el === null) continue;
        (el as SVGElement).dispatchEvent(
            new MouseEvent("click", { bubbles: true }),
        );
    }
    overlay.remove();
    return selections;
}

describe("overlay round-trip", () => {
    for (const name of ["logo_final", "koch_final"]) {
        it(`every clicked widget kind resolves on ${name}`, () => {
            const fx = fixture<WidgetsFixture>(`${name}.widgets.json`);
            const resolvable = new Set(fx.resolvableKeys);
            const clicked = clickEachKind(fx);
            const kindsPresent = new Set(fx.widgets.map((w) => w.kind));
            expect(new Set(clicked.map((c) => c.kind))).toEqual(kindsPresent);
            for (const { sel } of clicked) {
                const key = (sel as { widget: string }).widget;
                expect(typeof key).toBe("string");
                expect(resolvable.has(key)).toBe(true);
            }
        });
    }

    it("list widgets render dashed, call widgets solid gray", () => {
        const fx = fixture<WidgetsFixture>("koch_final.widgets.json");
        const overlay = buildOverlay(document, fx.widgets, {
            onSelect: () => undefined,
        });
        const list = overlay.querySelector('[data-kind="list"]')!;
        expect(list.getAttribute("stroke-dasharray")).toBe("5,3");
        const call = overlay.querySelector('[data-kind="call"]')!;
        expect(call.getAttribute("stroke-dasharray")).toBeNull();
        expect(call.getAttribute("stroke")).toBe("#888888");
    });

    it("labels are clickable rename affordances", () => {
        const fx = fixture<WidgetsFixture>("logo_grouped.widgets.json");
        let renamed: Widget | null = null;
        const overlay = buildOverlay(document, fx.widgets, {
            onSelect: () => undefined,
            onRename: (widget) => {
                renamed = widget;
            },
        });
        const label = overlay.querySelector(
            '[data-label-for]',
        ) as SVGElement | null;
        expect(label).not.toBeNull();
        label!.dispatchEvent(new MouseEvent("click", { bubbles: true }));
        expect(renamed).not.toBeNull();
        expect(renamed!.label).toBe(label!.textContent);
    });

    it("point widgets carry input/output role colors", () => {
        const widgets: Widget[] = [
            {
                kind: "point",
                key: "point:0-1:0",
                sourceSpan: [0, 1],
                geometry: { x: 10, y: 10 },
                label: "point",
                internal: false,
                payload: { roleTag: "input" },
            },
            {
                kind: "point",
                key: "point:2-3:0",
                sourceSpan: [2, 3],
                geometry: { x: 30, y: 10 },
                label: "out",
                internal: false,
                payload: { roleTag: "output" },
            },
        ];
        const overlay = buildOverlay(document, widgets, {
            onSelect: () => undefined,
        });
        const dots = overlay.querySelectorAll("circle");
        expect(dots[0].getAttribute("fill")).toBe("#e67e22"); // orange input
        expect(dots[1].getAttribute("fill")).toBe("#2980b9"); // blue output
    });
});
