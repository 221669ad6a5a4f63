// Test helpers: fixture loading and a mock engine backed by recorded
// engine responses, so UI behavior is checked against real protocol data.

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { Transport } from "../src/protocol.js";
import { Candidate, Step, Widget } from "../src/types.js";

const here = dirname(fileURLToPath(import.meta.url));

export function fixture<T>(name: string): T {
    return JSON.parse(
        readFileSync(join(here, "fixtures", name), "utf8"),
    ) as T;
}

export interface WidgetsFixture {
    source: string;
    svg: string;
    widgets: Widget[];
    resolvableKeys: string[];
}

export interface MakeEqualFixture {
    source: string;
    svg: string;
    step: Step;
    candidates: Candidate[];
    candidateSvgs: string[];
}

export interface MockEngine {
    transport: Transport;
    calls: { method: string; path: string; body?: unknown }[];
    source: string;
}

// a tiny engine double: one session, apply serves recorded candidates,
// choose swaps in the chosen program text
export function mockEngine(fx: {
    source: string;
    svg: string;
    widgets?: Widget[];
    candidates?: Candidate[];
}): MockEngine {
    const state = {
        source: fx.source,
        pending: [] as Candidate[],
    };
    const calls: MockEngine["calls"] = [];
    const transport: Transport = async (method, path, body) => {
        calls.push({ method, path, body });
        if (method === "POST" && path === "/v1/session") {
            return { id: "s1", source: state.source };
        }
        if (path.endsWith("/program")) return { source: state.source };
        if (path.endsWith("/svg")) return fx.svg;
        if (path.includes("/widgets")) return { widgets: fx.widgets ?? [] };
        if (path.endsWith("/tools")) return { tools: [] };
        if (path.endsWith("/apply")) {
            state.pending = fx.candidates ?? [];
            return { candidates: state.pending };
        }
        if (path.endsWith("/choose")) {
            const index = (body as { index: number }).index;
            if (state.pending.length > 0) {
                state.source = state.pending[index].program;
                state.pending = [];
            }
            return { source: state.source };
        }
        if (path.endsWith("/step")) {
            return { source: state.source, description: "step" };
        }
        if (path.endsWith("/resolve")) {
            return { kind: "widget:point", label: "" };
        }
        throw new Error(`mock engine: unhandled ${method} ${path}`);
    };
    return {
        transport,
        calls,
        get source() {
            return state.source;
        },
    };
}
