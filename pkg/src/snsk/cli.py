"""Command-line driver: evaluate programs, list tools, apply transformations,
replay scripted sessions, and serve the HTTP session protocol.

Commands and flags are documented in docs/cli.md. Exit codes: 1 I/O or
usage, 2 parse/scope errors, 3 runtime errors, 4 unresolvable selections,
5 tool errors.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .candidates import ToolError
from .interp import EvalError, evaluate
from .nodes import Program
from .parser import LangSyntaxError, parse
from .refactor import find_focus
from .roles import custom_tools
from .scopes import UnboundVariable, analyze
from .session import TOOL_OPS, candidates_for_step, load_script, replay, run_step
from .svg import render_svg
from .unparse import unparse
from .widgets import NotAPoint, StaleSelection, derive_widgets


def _load_program(path: str) -> Program:
    try:
        source = Path(path).read_text()
    except OSError as err:
        click.echo(f"error: {err}", err=True)
        sys.exit(1)
    try:
        program = parse(source)
        analyze(program)
    except LangSyntaxError as err:
        click.echo(f"{path}:{err}", err=True)
        sys.exit(2)
    except UnboundVariable as err:
        click.echo(f"{path}: {err}", err=True)
        sys.exit(2)
    return program


@click.group()
def main():
    """Output-directed programming engine."""


@main.command("eval")
@click.argument("file")
@click.option("--out", default=None, help="output directory")
def cmd_eval(file, out):
    """Evaluate FILE; write FILE.svg and FILE.widgets.json."""
    program = _load_program(file)
    try:
        record = evaluate(program)
        focus = find_focus(program)
        focus_call = None
        if focus is not None:
            focus_call = record.find_call(*focus)
        doc = render_svg(record, focus_call)
        widgets = derive_widgets(record)
    except EvalError as err:
        click.echo(f"{file}: runtime error: {err}", err=True)
        sys.exit(3)
    base = Path(file)
    out_dir = Path(out) if out else base.parent
    out_dir.mkdir(parents=True, exist_ok=True)
    svg_path = out_dir / (base.stem + ".svg")
    widgets_path = out_dir / (base.stem + ".widgets.json")
    svg_path.write_text(doc.to_text())
    widgets_path.write_text(
        json.dumps({"widgets": [w.to_json() for w in widgets]}, indent=2)
        + "\n"
    )
    click.echo(f"wrote {svg_path} and {widgets_path}")


@main.command("tools")
@click.argument("file")
def cmd_tools(file):
    """List custom drawing tools exposed by FILE."""
    program = _load_program(file)
    tools = custom_tools(program)
    click.echo(json.dumps({"tools": [t.to_json() for t in tools]}, indent=2))


def _parse_arg(value: str):
    try:
        return json.loads(value)
    except json.JSONDecodeError:
        return value


@main.command("apply")
@click.argument("file")
@click.argument("tool")
@click.option("--selection", "selections", multiple=True,
              help="selection descriptor (JSON), repeatable")
@click.option("--selections-file", default=None,
              help="file with a JSON list of selections")
@click.option("--arg", "args", multiple=True, help="extra step field key=value")
@click.option("--choose", default=None, type=int,
              help="apply candidate K and print the new program")
@click.option("--in-place", is_flag=True, help="rewrite FILE with the result")
def cmd_apply(file, tool, selections, selections_file, args, choose, in_place):
    """Apply TOOL to FILE's program; prints candidates or the chosen result."""
    if tool not in TOOL_OPS:
        click.echo(f"error: unknown tool {tool!r}", err=True)
        sys.exit(1)
    program = _load_program(file)
    step = {"op": tool}
    sel_list = [json.loads(s) for s in selections]
    if selections_file:
        sel_list.extend(json.loads(Path(selections_file).read_text()))
    if sel_list:
        step["selections"] = sel_list
    for kv in args:
        key, _, value = kv.partition("=")
        step[key] = _parse_arg(value)
    # single-selection tools accept the first selection under their own key
    if sel_list:
        if tool in ("abstract",):
            step.setdefault("target", sel_list[0])
        if tool in ("add-argument", "add-to-output"):
            step.setdefault("selection", sel_list[0])
        if tool in ("drag", "set"):
            step.setdefault("feature", sel_list[0])
        if tool in ("repeat-over-list",):
            step.setdefault("shape", sel_list[0])
            if len(sel_list) > 1:
                step.setdefault("list", sel_list[1])
        if tool in ("repeat-over-call",):
            step.setdefault("shape", sel_list[0])
    try:
        if choose is None:
            cands = candidates_for_step(program, step)
            payload = [c.to_json() for c in cands]
            click.echo(json.dumps({"candidates": payload}, indent=2))
        else:
            step["choose"] = choose
            new_program, _result = run_step(program, step)
            text = unparse(new_program)
            if in_place:
                Path(file).write_text(text)
                click.echo(f"rewrote {file}")
            else:
                click.echo(text, nl=False)
    except (StaleSelection, NotAPoint) as err:
        click.echo(f"error: unresolvable selection: {err}", err=True)
        sys.exit(4)
    except ToolError as err:
        if err.code in ("StaleSelection",):
            click.echo(f"error: unresolvable selection: {err.message}", err=True)
            sys.exit(4)
        click.echo(f"error: {err.code}: {err.message}", err=True)
        sys.exit(5)
    except EvalError as err:
        click.echo(f"{file}: runtime error: {err}", err=True)
        sys.exit(3)


@main.command("replay")
@click.argument("script")
@click.option("--template", default=None, help="starting program file")
@click.option("--golden", default=None, help="compare final program to file")
@click.option("--out", default=None, help="directory for final artifacts")
def cmd_replay(script, template, golden, out):
    """Replay a JSON-lines session SCRIPT;  write the final program and SVG."""
    try:
        steps = load_script(Path(script).read_text())
    except OSError as err:
        click.echo(f"error: {err}", err=True)
        sys.exit(1)
    start = Path(template).read_text() if template else None
    try:
        if start is None:
            program, log = replay(steps)
        else:
            program, log = replay(steps, start)
    except ToolError as err:
        click.echo(f"error: {err.code}: {err.message}", err=True)
        sys.exit(5)
    except EvalError as err:
        click.echo(f"runtime error during replay: {err}", err=True)
        sys.exit(3)
    text = unparse(program)
    record = evaluate(program)
    svg = render_svg(record).to_text()
    base = Path(script)
    out_dir = Path(out) if out else base.parent
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / (base.stem + ".final.lil")).write_text(text)
    (out_dir / (base.stem + ".final.svg")).write_text(svg)
    log_lines = [
        json.dumps({"op": r.op, "description": r.description,
                    "chosen": r.chosen, "candidates": r.candidates})
        for r in log
    ]
    (out_dir / (base.stem + ".log.jsonl")).write_text(
        "\n".join(log_lines) + "\n"
    )
    if golden:
        expected = Path(golden).read_text()
        if text != expected:
            click.echo("golden mismatch", err=True)
            import difflib

            diff = difflib.unified_diff(
                expected.splitlines(True), text.splitlines(True),
                fromfile=golden, tofile="replayed",
            )
            click.echo("".join(diff), err=True)
            sys.exit(6)
        click.echo("golden match")
    else:
        click.echo(f"replayed {len(steps)} steps")


@main.command("serve")
@click.option("--port", default=8077, type=int)
@click.option("--host", default="127.0.0.1")
def cmd_serve(port, host):
    """Serve the /v1 session protocol over HTTP."""
    import uvicorn

    from .server import create_app

    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
