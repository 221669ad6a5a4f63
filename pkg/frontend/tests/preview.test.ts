// Stateless preview: hovering candidates never mutates the session; only an
// explicit choose does. Exercised through the App against a mock engine
// serving recorded candidate data, 20 scripted interactions.

import { describe, expect, it } from "vitest";

import { App, AppElements } from "../src/app.js";
import { EngineClient } from "../src/protocol.js";
import {
    beginPreview,
    dismissPreview,
    hoverCandidate,
    previewSvg,
} from "../src/state.js";
import { MakeEqualFixture, fixture, mockEngine } from "./helpers.js";

function elements(): AppElements {
    const make = (id: string) => {
        const el = document.createElement("div");
        el.id = id;
        document.body.appendChild(el);
        return el;
    };
    return {
        canvas: make("canvas"),
        code: make("code"),
        menu: make("menu"),
        toolbox: make("toolbox"),
        status: make("status"),
    };
}

describe("candidate preview", () => {
    it("preview-then-dismiss leaves the program unchanged (20 rounds)", async () => {
        const fx = fixture<MakeEqualFixture>("makeequal.json");
        const engine = mockEngine({
            source: fx.source,
            svg: fx.svg,
            candidates: fx.candidates,
        });
        const app = new App(new EngineClient(engine.transport), elements(), document);
        await app.start(fx.source);
        const before = engine.source;
        for (let round = 0; round < 20; round++) {
            await app.openTool(fx.step);
            const rows = document.querySelectorAll(".candidate");
            expect(rows.length).toBe(fx.candidates.length);
            const row = rows[round % rows.length];
            row.dispatchEvent(new MouseEvent("mouseenter", { bubbles: true }));
            // hovering shows the candidate's code...
            expect(document.getElementById("code")!.textContent).toBe(
                fx.candidates[round % rows.length].program,
            );
            row.dispatchEvent(new MouseEvent("mouseleave", { bubbles: true }));
            // ...and dismissing restores the current program
            expect(document.getElementById("code")!.textContent).toBe(before);
            const viaEngine = await new EngineClient(engine.transport)
                .createSession()
                .then(async () => engine.source);
            expect(viaEngine).toBe(before);
        }
        expect(engine.source).toBe(before);
        document.body.innerHTML = "";
    });

    it("choose applies the candidate", async () => {
        const fx = fixture<MakeEqualFixture>("makeequal.json");
        const engine = mockEngine({
            source: fx.source,
            svg: fx.svg,
            candidates: fx.candidates,
        });
        const app = new App(new EngineClient(engine.transport), elements(), document);
        await app.start(fx.source);
        await app.openTool(fx.step);
        await app.chooseCandidate(0);
        expect(engine.source).toBe(fx.candidates[0].program);
        expect(app.exportSession()).toEqual([{ ...fx.step, choose: 0 }]);
        document.body.innerHTML = "";
    });
});

describe("preview state model", () => {
    it("hover and dismiss never lose the saved canvas", () => {
        const fx = fixture<MakeEqualFixture>("makeequal.json");
        let preview = beginPreview(fx.candidates, fx.svg);
        expect(previewSvg(preview, fx.candidateSvgs)).toBe(fx.svg);
        preview = hoverCandidate(preview, 0);
        expect(previewSvg(preview, fx.candidateSvgs)).toBe(fx.candidateSvgs[0]);
        preview = hoverCandidate(preview, null);
        expect(previewSvg(preview, fx.candidateSvgs)).toBe(fx.svg);
        expect(dismissPreview(preview)).toBe(fx.svg);
    });
});
