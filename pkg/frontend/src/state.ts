// Canvas and preview state. Selections mirror engine descriptors exactly;
// previewing a candidate never mutates the session — only an explicit
// choose applies, after which everything re-derives from the engine.

import { Candidate, SelectionDescriptor, Widget } from "./types.js";

export interface CanvasState {
    source: string;
    svg: string;
    widgets: Widget[];
    selections: SelectionDescriptor[];
    hover: Widget | null;
    activeTool: string | null;
    focusLabel: string | null;
}

export interface PreviewState {
    candidates: Candidate[];
    hovered: number | null;
    savedSvg: string;
}

export function emptyCanvas(): CanvasState {
    return {
        source: "",
        svg: "",
        widgets: [],
        selections: [],
        hover: null,
        activeTool: null,
        focusLabel: null,
    };
}

export function addSelection(
    state: CanvasState,
    sel: SelectionDescriptor,
): CanvasState {
    const key = JSON.stringify(sel);
    if (state.selections.some((s) => JSON.stringify(s) === key)) return state;
    return { ...state, selections: [...state.selections, sel] };
}

export function clearSelections(state: CanvasState): CanvasState {
    return { ...state, selections: [] };
}

export function beginPreview(
    candidates: Candidate[],
    currentSvg: string,
): PreviewState {
    return { candidates, hovered: null, savedSvg: currentSvg };
}

export function hoverCandidate(
    preview: PreviewState,
    index: number | null,
): PreviewState {
    return { ...preview, hovered: index };
}

// what the canvas should show while previewing: the hovered candidate's
// output, or the saved canvas when nothing is hovered / preview dismissed
export function previewSvg(
    preview: PreviewState,
    candidateSvgs: (string | null)[],
): string {
    if (preview.hovered === null) return preview.savedSvg;
    return candidateSvgs[preview.hovered] ?? preview.savedSvg;
}

export function dismissPreview(preview: PreviewState): string {
    return preview.savedSvg;
}
