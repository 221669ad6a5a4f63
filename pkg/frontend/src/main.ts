// Browser bootstrap: connect to a local engine (`snsk serve --port 8077`).

import { App } from "./app.js";
import { EngineClient, fetchTransport } from "./protocol.js";

const base = (window as { SNSK_BASE?: string }).SNSK_BASE ?? "http://127.0.0.1:8077";

window.addEventListener("DOMContentLoaded", () => {
    const el = {
        canvas: document.getElementById("canvas")!,
        code: document.getElementById("code")!,
        menu: document.getElementById("menu")!,
        toolbox: document.getElementById("toolbox")!,
        status: document.getElementById("status")!,
    };
    const app = new App(new EngineClient(fetchTransport(base)), el, document);
    void app.start();
    el.canvas.addEventListener("pointerdown", (e) =>
        app.pointerDown({ x: e.offsetX, y: e.offsetY }));
    el.canvas.addEventListener("pointermove", (e) =>
        app.pointerMove({ x: e.offsetX, y: e.offsetY }));
    el.canvas.addEventListener("pointerup", (e) =>
        void app.pointerUp({ x: e.offsetX, y: e.offsetY }));
    (window as { snskApp?: App }).snskApp = app;
});
