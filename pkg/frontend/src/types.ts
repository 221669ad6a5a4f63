// JSON shapes shared with the engine (docs/widgets.schema.json,
// docs/selections.schema.json, docs/cli.md).

export type WidgetKind = "point" | "offset" | "list" | "call" | "feature";

export interface WidgetGeometry {
    x: number;
    y: number;
    dx?: number;
    dy?: number;
    w?: number;
    h?: number;
}

export interface Widget {
    kind: WidgetKind;
    key: string;
    sourceSpan: [number, number];
    geometry: WidgetGeometry;
    label: string;
    internal: boolean;
    payload?: Record<string, string | number | boolean>;
}

// exactly one key is present; mirrors the engine schema
export type SelectionDescriptor = Record<string, unknown>;

export interface DiffEntry {
    name: string;
    before: string;
    after: string;
    span: [number, number];
}

export interface Candidate {
    description: string;
    rank: number;
    diff: DiffEntry[];
    unifiedDiff: string;
    program: string;
    error: string | null;
    approximate: boolean;
}

export interface ToolSignature {
    name: string;
    arity: number;
    pointParams: unknown[][];
    distParams: unknown[][];
    otherParams: unknown[][];
}

// one session-script step; `op` plus op-specific fields (docs/cli.md)
export interface Step {
    op: string;
    [field: string]: unknown;
}

export interface Point {
    x: number;
    y: number;
}
