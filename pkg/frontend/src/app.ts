// Application wiring: one session per page, all engine calls sequential,
// always re-render from engine responses (no optimistic updates). The code
// pane is read-only; edit the file and reload to take text edits.

import { gestureToCommand, DrawTool } from "./gestures.js";
import { applicableTools } from "./menu.js";
import { buildOverlay } from "./overlay.js";
import { EngineClient } from "./protocol.js";
import {
    CanvasState,
    PreviewState,
    addSelection,
    beginPreview,
    emptyCanvas,
} from "./state.js";
import { Candidate, Point, SelectionDescriptor, Step, Widget } from "./types.js";

export interface AppElements {
    canvas: HTMLElement;
    code: HTMLElement;
    menu: HTMLElement;
    toolbox: HTMLElement;
    status: HTMLElement;
}

export class App {
    state: CanvasState = emptyCanvas();
    preview: PreviewState | null = null;
    pendingStep: Step | null = null;
    track: Point[] = [];
    recordedSteps: Step[] = [];
    selectionKinds: string[] = [];

    constructor(
        private client: EngineClient,
        private el: AppElements,
        private doc: Document,
    ) {}

    async start(source?: string): Promise<void> {
        await this.client.createSession(source);
        await this.refresh();
        await this.refreshToolbox();
    }

    async refresh(): Promise<void> {
        const [sourceText, svg, widgets] = [
            await this.client.getProgram(),
            await this.client.getSvg(),
            await this.client.getWidgets(undefined, true),
        ];
        this.state = {
            ...this.state,
            source: sourceText,
            svg,
            widgets,
            selections: [],
        };
        this.selectionKinds = [];
        this.render();
    }

    async refreshToolbox(): Promise<void> {
        const tools = await this.client.getTools();
        this.el.toolbox.innerHTML = "";
        const builtin = ["square", "rect", "circle", "line", "polygon", "point"];
        for (const name of [...builtin, ...tools.map((t) => t.name)]) {
            const button = this.doc.createElement("button");
            button.textContent = name;
            button.dataset.tool = name;
            button.addEventListener("click", () => {
                this.state = { ...this.state, activeTool: name };
            });
            this.el.toolbox.appendChild(button);
        }
    }

    render(): void {
        this.el.code.textContent = this.state.source;
        this.el.canvas.innerHTML = this.state.svg;
        const overlay = buildOverlay(this.doc, this.state.widgets, {
            onSelect: (sel) => void this.select(sel),
            onRename: (widget) => void this.renameWidget(widget),
        });
        this.el.canvas.appendChild(overlay);
    }

    async select(sel: SelectionDescriptor): Promise<void> {
        const before = this.state.selections.length;
        this.state = addSelection(this.state, sel);
        if (this.state.selections.length !== before) {
            // the engine is the authority on what a selection denotes
            const resolved = await this.client
                .resolve(sel)
                .catch(() => ({ kind: "stale", label: "" }));
            this.selectionKinds.push(resolved.kind);
        }
        this.showMenu();
    }

    showMenu(): void {
        const kinds = this.selectionKinds.map((k) =>
            k === "num" ? "num" :
            k === "widget:list" ? "list" :
            k === "point" || k === "widget:point" ? "point" : "shape",
        );
        const entries = applicableTools(this.state.selections, kinds);
        this.el.menu.innerHTML = "";
        for (const entry of entries) {
            const button = this.doc.createElement("button");
            button.textContent = entry.tool;
            button.addEventListener("click", () => void this.openTool(entry.step));
            this.el.menu.appendChild(button);
        }
    }

    async openTool(step: Step): Promise<void> {
        try {
            const candidates = await this.client.apply(step);
            this.pendingStep = step;
            this.preview = beginPreview(candidates, this.state.svg);
            this.renderCandidates(candidates);
        } catch (err) {
            this.el.status.textContent = String(err);
        }
    }

    renderCandidates(candidates: Candidate[]): void {
        this.el.menu.innerHTML = "";
        candidates.forEach((candidate, index) => {
            const row = this.doc.createElement("div");
            row.className = "candidate";
            row.textContent = candidate.description;
            row.addEventListener("mouseenter", () => {
                // previewing shows the candidate's code; the canvas preview
                // comes from its program text rendered by the engine on
                // choose — hovering never mutates the session
                this.el.code.textContent = candidate.program;
            });
            row.addEventListener("mouseleave", () => this.dismissPreview());
            row.addEventListener("click", () => void this.chooseCandidate(index));
            this.el.menu.appendChild(row);
        });
    }

    dismissPreview(): void {
        this.el.code.textContent = this.state.source;
    }

    async chooseCandidate(index: number): Promise<void> {
        if (this.pendingStep === null) return;
        await this.client.choose(index);
        this.recordedSteps.push({ ...this.pendingStep, choose: index });
        this.pendingStep = null;
        this.preview = null;
        this.el.menu.innerHTML = "";
        await this.refresh();
        await this.refreshToolbox();
    }

    async renameWidget(widget: Widget): Promise<void> {
        const name = this.doc.defaultView?.prompt?.(
            `Rename ${widget.label}`,
            widget.label,
        );
        if (!name || name === widget.label) return;
        await this.runStep({ op: "rename", target: widget.label, to: name });
    }

    async runStep(step: Step): Promise<void> {
        await this.client.step(step);
        this.recordedSteps.push(step);
        await this.refresh();
        await this.refreshToolbox();
    }

    pointerDown(p: Point): void {
        this.track = [p];
    }

    pointerMove(p: Point): void {
        if (this.track.length > 0) this.track.push(p);
    }

    async pointerUp(p: Point): Promise<void> {
        if (this.track.length === 0) return;
        this.track.push(p);
        const tool = this.state.activeTool;
        const track = this.track;
        this.track = [];
        if (tool === null) return;
        const drawTool: DrawTool = (
            ["square", "rect", "circle", "line", "polygon", "point"] as const
        ).includes(tool as never)
            ? (tool as DrawTool)
            : { custom: tool };
        const step = gestureToCommand(drawTool, track, this.state.widgets);
        await this.runStep(step);
    }

    exportSession(): Step[] {
        return [...this.recordedSteps];
    }
}
