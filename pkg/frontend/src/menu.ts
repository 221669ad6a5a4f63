// The floating tools menu: which tools apply to the current selections, and
// candidate submenus with hover previews.

import { SelectionDescriptor, Step } from "./types.js";

export interface MenuEntry {
    tool: string;
    step: Step;
}

export function applicableTools(
    selections: SelectionDescriptor[],
    resolvedKinds: string[],
): MenuEntry[] {
    if (selections.length === 0) return [];
    const entries: MenuEntry[] = [];
    const kinds = resolvedKinds;
    const allNumeric = kinds.every((k) => k === "num");
    const allShapes = kinds.every((k) => k === "shape");
    const anyList = kinds.includes("list");
    if (selections.length >= 2 && allNumeric) {
        entries.push({
            tool: "make-equal",
            step: { op: "make-equal", selections },
        });
        entries.push({ tool: "relate", step: { op: "relate", selections } });
    }
    if (selections.length >= 2 && allShapes) {
        entries.push({ tool: "group", step: { op: "group", selections } });
    }
    if (selections.length >= 1 && allShapes) {
        entries.push({ tool: "dupe", step: { op: "dupe", selections } });
        entries.push({ tool: "delete", step: { op: "delete", selections } });
    }
    if (selections.length === 1 && (anyList || allShapes)) {
        entries.push({
            tool: "abstract",
            step: { op: "abstract", target: selections[0] },
        });
    }
    if (selections.length === 2 && kinds[0] === "shape" && kinds[1] === "list") {
        entries.push({
            tool: "repeat-over-list",
            step: {
                op: "repeat-over-list",
                shape: selections[0],
                list: selections[1],
            },
        });
    }
    if (selections.length >= 2 && allShapes) {
        entries.push({
            tool: "repeat-merge",
            step: { op: "repeat-merge", selections },
        });
    }
    return entries;
}
