// Typed client for the /v1 session protocol. Every UI action maps to
// exactly one documented call; the transport is injectable so tests can spy
// on or replay the traffic.

import { Candidate, Step, ToolSignature, Widget } from "./types.js";

export interface Transport {
    (method: string, path: string, body?: unknown): Promise<unknown>;
}

export function fetchTransport(base: string): Transport {
    return async (method, path, body) => {
        const response = await fetch(base + path, {
            method,
            headers: body !== undefined ? { "Content-Type": "application/json" } : undefined,
            body: body !== undefined ? JSON.stringify(body) : undefined,
        });
        if (!response.ok) {
            const text = await response.text();
            throw new EngineError(response.status, text);
        }
        const type = response.headers.get("content-type") ?? "";
        return type.includes("json") ? response.json() : response.text();
    };
}

export class EngineError extends Error {
    constructor(public status: number, message: string) {
        super(message);
    }
}

export class EngineClient {
    private sessionId: string | null = null;

    constructor(private transport: Transport) {}

    get id(): string {
        if (this.sessionId === null) throw new Error("no session open");
        return this.sessionId;
    }

    async createSession(source?: string): Promise<string> {
        const body = source === undefined ? {} : { source };
        const result = (await this.transport("POST", "/v1/session", body)) as {
            id: string;
        };
        this.sessionId = result.id;
        return result.id;
    }

    async getProgram(): Promise<string> {
        const r = (await this.transport(
            "GET",
            `/v1/session/${this.id}/program`,
        )) as { source: string };
        return r.source;
    }

    async getSvg(): Promise<string> {
        return (await this.transport(
            "GET",
            `/v1/session/${this.id}/svg`,
        )) as string;
    }

    async getWidgets(hover?: string, all = false): Promise<Widget[]> {
        const params = new URLSearchParams();
        if (hover !== undefined) params.set("hover", hover);
        if (all) params.set("all", "true");
        const query = params.toString();
        const r = (await this.transport(
            "GET",
            `/v1/session/${this.id}/widgets${query ? "?" + query : ""}`,
        )) as { widgets: Widget[] };
        return r.widgets;
    }

    async getTools(): Promise<ToolSignature[]> {
        const r = (await this.transport(
            "GET",
            `/v1/session/${this.id}/tools`,
        )) as { tools: ToolSignature[] };
        return r.tools;
    }

    async resolve(
        selection: Record<string, unknown>,
    ): Promise<{ kind: string; label: string }> {
        return (await this.transport(
            "POST",
            `/v1/session/${this.id}/resolve`,
            selection,
        )) as { kind: string; label: string };
    }

    async apply(step: Step): Promise<Candidate[]> {
        const r = (await this.transport(
            "POST",
            `/v1/session/${this.id}/apply`,
            step,
        )) as { candidates: Candidate[] };
        return r.candidates;
    }

    async choose(index: number): Promise<string> {
        const r = (await this.transport(
            "POST",
            `/v1/session/${this.id}/choose`,
            { index },
        )) as { source: string };
        return r.source;
    }

    async step(step: Step): Promise<string> {
        const r = (await this.transport(
            "POST",
            `/v1/session/${this.id}/step`,
            step,
        )) as { source: string };
        return r.source;
    }

    async focus(target: Record<string, unknown>): Promise<string> {
        const r = (await this.transport(
            "POST",
            `/v1/session/${this.id}/focus`,
            target,
        )) as { source: string };
        return r.source;
    }

    async unfocus(): Promise<string> {
        const r = (await this.transport(
            "POST",
            `/v1/session/${this.id}/unfocus`,
        )) as { source: string };
        return r.source;
    }
}
