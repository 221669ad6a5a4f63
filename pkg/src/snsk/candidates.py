"""Candidate transformations: construction, validation, ranking, application.

Every tool returns a ranked list of candidates. Construction re-parses and
scope-checks the proposed text centrally, so no tool can emit a program with
unbound variables; a candidate whose preview evaluation fails carries the
error and sorts last.
"""

from __future__ import annotations

import difflib
from dataclasses import dataclass, field

from .interp import EvalError, evaluate
from .nodes import Program
from .parser import LangSyntaxError, parse
from .scopes import UnboundVariable, analyze
from .unparse import unparse


class ToolError(Exception):
    def __init__(self, code: str, message: str | None = None):
        super().__init__(message or code)
        self.code = code
        self.message = message or code


@dataclass
class Candidate:
    description: str
    source: str
    program: Program
    diff: list
    rank: int = 0
    error: str | None = None
    approx: bool = False
    meta: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "description": self.description,
            "rank": self.rank,
            "diff": self.diff,
            "unifiedDiff": self.meta.get("unified", ""),
            "program": self.source,
            "error": self.error,
            "approximate": self.approx,
        }


def _def_texts(program: Program) -> list[tuple[str, str, tuple]]:
    from .unparse import _render_def, _render_main  # internal reuse

    out = []
    for d in program.defs:
        out.append((d.display_name(), "\n".join(_render_def(d)), d.span))
    out.append(("<main>", "\n".join(_render_main(program.main)), (-1, -1)))
    return out


def compute_diff(old: Program, new: Program) -> list[dict]:
    """Per-definition structured diff between two programs."""
    old_texts = _def_texts(old)
    new_texts = _def_texts(new)
    old_by_name: dict[str, list] = {}
    for name, text, span in old_texts:
        old_by_name.setdefault(name, []).append((text, span))
    entries = []
    seen_old = set()
    for name, text, _ in new_texts:
        candidates_for_name = old_by_name.get(name, [])
        matched = None
        for i, (otext, ospan) in enumerate(candidates_for_name):
            key = (name, i)
            if key in seen_old:
                continue
            matched = (i, otext, ospan)
            break
        if matched is None:
            entries.append({"name": name, "before": "", "after": text,
                            "span": [-1, -1]})
        else:
            i, otext, ospan = matched
            seen_old.add((name, i))
            if otext != text:
                entries.append(
                    {"name": name, "before": otext, "after": text,
                     "span": list(ospan)}
                )
    for name, variants in old_by_name.items():
        for i, (otext, ospan) in enumerate(variants):
            if (name, i) not in seen_old:
                entries.append(
                    {"name": name, "before": otext, "after": "",
                     "span": list(ospan)}
                )
    return entries


def make_candidate(
    old: Program,
    new_ast: Program,
    description: str,
    approx: bool = False,
    meta: dict | None = None,
) -> Candidate:
    source = unparse(new_ast)
    try:
        program = parse(source)
        analyze(program)
    except (LangSyntaxError, UnboundVariable) as err:  # engine bug guard
        raise ToolError("InvalidCandidate", f"{description}: {err}")
    error = None
    try:
        evaluate(program)
    except EvalError as err:
        error = f"{type(err).__name__}: {err.message}"
    diff = compute_diff(old, program)
    unified = "".join(
        difflib.unified_diff(
            unparse(old).splitlines(True),
            source.splitlines(True),
            fromfile="before",
            tofile="after",
        )
    )
    cand = Candidate(
        description=description,
        source=source,
        program=program,
        diff=diff,
        error=error,
        approx=approx,
        meta=dict(meta or {}),
    )
    cand.meta["unified"] = unified
    return cand


def rank_candidates(cands: list[Candidate]) -> list[Candidate]:
    """Stable ranking: spans rewritten near each other first, then later in
    the program first; failed previews last; generation order breaks ties."""

    def sort_key(item):
        i, c = item
        spans = [e["span"] for e in c.diff if e["span"][0] >= 0]
        if spans:
            starts = [s[0] for s in spans]
            ends = [s[1] for s in spans]
            distance = max(starts) - min(ends) if len(spans) > 1 else 0
            distance = max(distance, 0)
            position = max(starts)
        else:
            distance = 0
            position = -1
        return (c.error is not None, distance, -position, i)

    ranked = [c for _, c in sorted(enumerate(cands), key=sort_key)]
    for i, c in enumerate(ranked):
        c.rank = i
    return ranked


def dedupe_candidates(cands: list[Candidate]) -> list[Candidate]:
    seen = set()
    out = []
    for c in cands:
        if c.source in seen:
            continue
        seen.add(c.source)
        out.append(c)
    return out


def apply_candidate(program: Program, cand: Candidate) -> Program:
    return cand.program
