// Protocol fidelity: every client action maps to exactly one documented
// call, and the UI holds no program-semantics logic of its own.

import { describe, expect, it } from "vitest";

import { EngineClient } from "../src/protocol.js";
import { mockEngine } from "./helpers.js";

describe("EngineClient", () => {
    it("maps each action to exactly one protocol call", async () => {
        const engine = mockEngine({ source: "svg (concat [\n])\n", svg: "<svg/>" });
        const client = new EngineClient(engine.transport);

        await client.createSession();
        expect(engine.calls.map((c) => `${c.method} ${c.path}`)).toEqual([
            "POST /v1/session",
        ]);

        engine.calls.length = 0;
        await client.getProgram();
        await client.getSvg();
        await client.getWidgets();
        await client.getWidgets("line1", true);
        await client.getTools();
        expect(engine.calls.map((c) => `${c.method} ${c.path}`)).toEqual([
            "GET /v1/session/s1/program",
            "GET /v1/session/s1/svg",
            "GET /v1/session/s1/widgets",
            "GET /v1/session/s1/widgets?hover=line1&all=true",
            "GET /v1/session/s1/tools",
        ]);

        engine.calls.length = 0;
        await client.apply({ op: "make-equal", selections: [] });
        await client.choose(0).catch(() => undefined);
        await client.step({ op: "unfocus" });
        expect(engine.calls.map((c) => `${c.method} ${c.path}`)).toEqual([
            "POST /v1/session/s1/apply",
            "POST /v1/session/s1/choose",
            "POST /v1/session/s1/step",
        ]);
    });

    it("passes step bodies through unmodified", async () => {
        const engine = mockEngine({ source: "svg (concat [\n])\n", svg: "<svg/>" });
        const client = new EngineClient(engine.transport);
        await client.createSession();
        const step = {
            op: "draw",
            tool: "line",
            gesture: { start: [1, 2], end: [3, 4] },
            snaps: { start: { widget: "point:0-5:0" } },
        };
        await client.apply(step);
        const sent = engine.calls[engine.calls.length - 1].body;
        expect(sent).toEqual(step);
    });
});
