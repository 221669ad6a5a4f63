"""HTTP session service: the /v1 protocol consumed by the browser companion.

One program state per session; applying a candidate is the only state
transition. Requests against the same session are serialized by a lock;
sessions are independent.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

from fastapi import FastAPI, HTTPException
from fastapi.responses import PlainTextResponse

from .candidates import Candidate, ToolError
from .interp import EvalError, evaluate
from .parser import LangSyntaxError, parse
from .refactor import find_focus
from .roles import custom_tools
from .scopes import UnboundVariable, analyze
from .session import EMPTY_TEMPLATE, candidates_for_step, run_step
from .svg import render_svg
from .unparse import unparse
from .widgets import NotAPoint, StaleSelection, derive_widgets, visible_widgets


@dataclass
class Session:
    source: str
    lock: threading.Lock = field(default_factory=threading.Lock)
    pending: list = field(default_factory=list)


class SessionStore:
    def __init__(self):
        self.sessions: dict[str, Session] = {}
        self.counter = 0
        self.lock = threading.Lock()

    def create(self, source: str) -> str:
        with self.lock:
            self.counter += 1
            sid = f"s{self.counter}"
            self.sessions[sid] = Session(source=source)
            return sid

    def get(self, sid: str) -> Session:
        s = self.sessions.get(sid)
        if s is None:
            raise HTTPException(status_code=404, detail=f"no session {sid}")
        return s


def _parse_or_422(source: str):
    try:
        program = parse(source)
        analyze(program)
        return program
    except (LangSyntaxError, UnboundVariable) as err:
        raise HTTPException(status_code=422, detail=str(err))


def create_app() -> FastAPI:
    app = FastAPI(title="snsk session service")
    store = SessionStore()

    @app.post("/v1/session")
    def create_session(body: dict | None = None):
        source = (body or {}).get("source") or EMPTY_TEMPLATE
        _parse_or_422(source)
        sid = store.create(source)
        return {"id": sid, "source": source}

    @app.get("/v1/session/{sid}/program")
    def get_program(sid: str):
        s = store.get(sid)
        return {"source": s.source}

    @app.get("/v1/session/{sid}/svg", response_class=PlainTextResponse)
    def get_svg(sid: str):
        s = store.get(sid)
        with s.lock:
            program = _parse_or_422(s.source)
            try:
                record = evaluate(program)
                focus = find_focus(program)
                call = record.find_call(*focus) if focus else None
                return render_svg(record, call).to_text()
            except EvalError as err:
                raise HTTPException(status_code=409, detail=str(err))

    @app.get("/v1/session/{sid}/widgets")
    def get_widgets(sid: str, hover: str | None = None, all: bool = False):
        s = store.get(sid)
        with s.lock:
            program = _parse_or_422(s.source)
            try:
                record = evaluate(program)
            except EvalError as err:
                raise HTTPException(status_code=409, detail=str(err))
            widgets = derive_widgets(record)
            if not all:
                widgets = visible_widgets(widgets, record, hover_name=hover)
            return {"widgets": [w.to_json() for w in widgets]}

    @app.get("/v1/session/{sid}/tools")
    def get_tools(sid: str):
        s = store.get(sid)
        with s.lock:
            program = _parse_or_422(s.source)
            return {"tools": [t.to_json() for t in custom_tools(program)]}

    def _step_or_http(source: str, step: dict) -> list[Candidate]:
        program = _parse_or_422(source)
        try:
            return candidates_for_step(program, step)
        except (StaleSelection, NotAPoint) as err:
            raise HTTPException(status_code=422, detail=str(err))
        except ToolError as err:
            if err.code == "StaleSelection":
                raise HTTPException(status_code=422, detail=err.message)
            raise HTTPException(
                status_code=409, detail=f"{err.code}: {err.message}"
            )
        except EvalError as err:
            raise HTTPException(status_code=409, detail=str(err))

    @app.post("/v1/session/{sid}/resolve")
    def resolve(sid: str, selection: dict):
        from .widgets import Feature, resolve_selection

        s = store.get(sid)
        with s.lock:
            program = _parse_or_422(s.source)
            try:
                record = evaluate(program)
                result = resolve_selection(record, selection)
            except (StaleSelection, NotAPoint) as err:
                raise HTTPException(status_code=422, detail=str(err))
            except EvalError as err:
                raise HTTPException(status_code=409, detail=str(err))
            if isinstance(result, Feature):
                return {"kind": result.kind, "label": result.label}
            return {"kind": f"widget:{result.kind}", "label": result.label}

    @app.post("/v1/session/{sid}/apply")
    def apply_tool(sid: str, step: dict):
        s = store.get(sid)
        with s.lock:
            cands = _step_or_http(s.source, step)
            s.pending = cands
            return {"candidates": [c.to_json() for c in cands]}

    @app.post("/v1/session/{sid}/choose")
    def choose(sid: str, body: dict):
        s = store.get(sid)
        index = body.get("index", 0)
        with s.lock:
            if not s.pending:
                raise HTTPException(status_code=409, detail="nothing to choose")
            if not 0 <= index < len(s.pending):
                raise HTTPException(
                    status_code=422,
                    detail=f"{len(s.pending)} candidates; no index {index}",
                )
            s.source = s.pending[index].source
            s.pending = []
            return {"source": s.source}

    @app.post("/v1/session/{sid}/step")
    def do_step(sid: str, step: dict):
        s = store.get(sid)
        with s.lock:
            program = _parse_or_422(s.source)
            try:
                new_program, result = run_step(program, step)
            except (StaleSelection, NotAPoint) as err:
                raise HTTPException(status_code=422, detail=str(err))
            except ToolError as err:
                if err.code == "StaleSelection":
                    raise HTTPException(status_code=422, detail=err.message)
                raise HTTPException(
                    status_code=409, detail=f"{err.code}: {err.message}"
                )
            except EvalError as err:
                raise HTTPException(status_code=409, detail=str(err))
            s.source = unparse(new_program)
            s.pending = []
            return {"source": s.source, "description": result.description}

    @app.post("/v1/session/{sid}/focus")
    def focus(sid: str, body: dict):
        return do_step(sid, {"op": "focus", **body})

    @app.post("/v1/session/{sid}/unfocus")
    def unfocus(sid: str):
        return do_step(sid, {"op": "unfocus"})

    @app.delete("/v1/session/{sid}")
    def delete_session(sid: str):
        store.get(sid)
        del store.sessions[sid]
        return {"deleted": sid}

    return app
