"""Scripted sessions: a JSON-lines step format shared by the CLI, the replay
runner, and the HTTP service, so all three drive the same tool registry.

Each step names an operation plus its arguments and optionally `choose`
(candidate index, default 0). Replaying a script from the empty template is
deterministic; goldens are byte-compared.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from . import abstraction, draw, refactor, relate
from .candidates import Candidate, ToolError
from .interp import evaluate
from .nodes import Program
from .parser import parse
from .unparse import unparse

EMPTY_TEMPLATE = "svg (concat [\n])\n"


@dataclass
class StepResult:
    op: str
    description: str
    candidates: list = field(default_factory=list)
    chosen: int = 0


def _candidates_for(program: Program, record, step: dict) -> list[Candidate]:
    op = step["op"]
    if op == "draw":
        return [draw.draw_shape(program, record, step)]
    if op == "draw-point" or (op == "draw-offset" and "at" in step):
        return [draw.draw_point_or_offset(program, record, step)]
    if op == "draw-offset":
        return [draw.draw_point_or_offset(program, record, step)]
    if op == "draw-custom":
        return [draw.draw_custom(program, record, step["fn"], step)]
    if op == "draw-recursive":
        return [draw.insert_recursive_call(program, record, step["fn"], step)]
    if op == "drag":
        return [
            draw.drag_feature(program, record, step["feature"],
                              delta=step["delta"])
        ]
    if op == "set":
        return [
            draw.drag_feature(program, record, step["feature"],
                              value=step["value"])
        ]
    if op == "dupe":
        return [draw.dupe(program, record, step["selections"])]
    if op == "delete":
        return [draw.delete_shapes(program, record, step["selections"])]
    if op == "delete-element":
        return [
            refactor.remove_list_element(program, step["list"], step["index"])
        ]
    if op == "make-equal":
        return relate.make_equal(program, record, step["selections"],
                                 focus=refactor.find_focus(program))
    if op == "relate":
        ratios = step.get("ratios")
        if ratios is not None:
            from fractions import Fraction

            ratios = tuple(Fraction(r) for r in ratios)
            return relate.relate(program, record, step["selections"],
                                 ratios=ratios,
                                 focus=refactor.find_focus(program))
        return relate.relate(program, record, step["selections"],
                             focus=refactor.find_focus(program))
    if op == "group":
        return [abstraction.group(program, record, step["selections"])]
    if op == "abstract":
        return [abstraction.abstract(program, record, step["target"])]
    if op == "repeat-over-list":
        return [
            abstraction.repeat_over_existing_list(
                program, record, step["shape"], step["list"]
            )
        ]
    if op == "repeat-over-call":
        return [
            abstraction.repeat_over_function_call(
                program, record, step["shape"], step["fn"],
                step.get("gesture", {})
            )
        ]
    if op == "repeat-merge":
        return abstraction.repeat_by_indexed_merge(
            program, record, step["selections"]
        )
    if op == "fill-hole":
        return abstraction.fill_hole(program, record, step)
    if op == "rename":
        return [refactor.rename(program, step["target"], step["to"])]
    if op == "add-argument":
        return refactor.add_argument(program, record, step["fn"],
                                     step["selection"])
    if op == "remove-argument":
        return [
            refactor.remove_argument(program, record, step["fn"], step["index"])
        ]
    if op == "reorder-arguments":
        return [refactor.reorder_arguments(program, step["fn"], step["order"])]
    if op == "reorder-list":
        return [
            refactor.reorder_in_list(program, step["list"], step["from"],
                                     step["to"])
        ]
    if op == "add-to-output":
        return [
            refactor.add_to_output_of(
                program, record, step["fn"], step["selection"],
                branch=step.get("branch"),
            )
        ]
    if op == "select-termination":
        return [
            refactor.select_termination_condition(
                program, step["fn"], step.get("strategy", "FixedDepth")
            )
        ]
    raise ToolError("UnknownTool", f"unknown operation {op!r}")


TOOL_OPS = [
    "draw", "draw-point", "draw-offset", "draw-custom", "draw-recursive",
    "drag", "set", "dupe", "delete", "delete-element", "make-equal", "relate",
    "group", "abstract", "repeat-over-list", "repeat-over-call",
    "repeat-merge", "fill-hole", "rename", "add-argument", "remove-argument",
    "reorder-arguments", "reorder-list", "add-to-output", "select-termination",
]


def candidates_for_step(program: Program, step: dict) -> list[Candidate]:
    record = evaluate(program)
    return _candidates_for(program, record, step)


def run_step(program: Program, step: dict) -> tuple[Program, StepResult]:
    op = step["op"]
    if op == "focus":
        target = {k: v for k, v in step.items() if k in ("call", "def")}
        new = refactor.focus_expression(program, target)
        return new, StepResult(op=op, description=f"Focus {target}")
    if op == "unfocus":
        return refactor.unfocus(program), StepResult(op=op, description="Unfocus")
    cands = candidates_for_step(program, step)
    choose = step.get("choose", 0)
    if not 0 <= choose < len(cands):
        raise ToolError(
            "IndexOutOfRange",
            f"step offers {len(cands)} candidates; cannot choose {choose}",
        )
    chosen = cands[choose]
    result = StepResult(
        op=op,
        description=chosen.description,
        candidates=[c.description for c in cands],
        chosen=choose,
    )
    return chosen.program, result


def replay(steps: list[dict], template: str = EMPTY_TEMPLATE):
    """Run a script from a starting program; returns (program, step log)."""
    program = parse(template)
    log: list[StepResult] = []
    for i, step in enumerate(steps):
        try:
            program, result = run_step(program, step)
        except ToolError as err:
            raise ToolError(
                err.code, f"step {i} ({step.get('op')}): {err.message}"
            )
        log.append(result)
    return program, log


def load_script(text: str) -> list[dict]:
    steps = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        steps.append(json.loads(line))
    return steps


def dump_program(program: Program) -> str:
    return unparse(program)
