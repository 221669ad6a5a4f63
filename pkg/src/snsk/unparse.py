"""Canonical pretty-printer.

The engine always emits this canonical layout: top-level definitions
separated by one blank line, two-space indents, let-chains one binding per
line, and the main expression's shape list printed one element per line.
Re-parsing canonical output yields a structurally identical tree.
"""

from __future__ import annotations

from fractions import Fraction

from .nodes import (
    App,
    AsPat,
    BinOp,
    Expr,
    If,
    Lambda,
    LetIn,
    ListLit,
    ListPat,
    Num,
    Pattern,
    PbeHole,
    Program,
    Str,
    TerminationHole,
    TopDef,
    ValueHole,
    Var,
    VarPat,
)

ATOM, APP, MUL, ADD, CMP, PIPE, LOW = 6, 5, 4, 3, 2, 1, 0

_OP_PREC = {"<|": PIPE, "==": CMP, "<": CMP, ">": CMP, "<=": CMP, ">=": CMP,
            "+": ADD, "-": ADD, "*": MUL, "/": MUL}


def frac_str(v: Fraction) -> str:
    """Minimal decimal form; exact for denominators of the form 2^a * 5^b."""
    if v.denominator == 1:
        return str(v.numerator)
    den = v.denominator
    twos = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    fives = 0
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        # not finite-decimal; only reachable via unusual drag deltas
        text = f"{float(v):.6f}".rstrip("0").rstrip(".")
        return text
    k = max(twos, fives)
    scaled = v * 10**k
    digits = str(abs(scaled.numerator))
    digits = digits.rjust(k + 1, "0")
    whole, frac = digits[:-k], digits[-k:]
    frac = frac.rstrip("0")
    sign = "-" if v < 0 else ""
    if not frac:
        return sign + whole
    return f"{sign}{whole}.{frac}"


def render_num(e: Num) -> str:
    text = frac_str(e.value)
    if e.frozen:
        text += "!"
    if e.slider is not None:
        lo, hi = e.slider
        text += "{" + frac_str(lo) + "-" + frac_str(hi) + "}"
    return text


def render_pattern(p: Pattern) -> str:
    if isinstance(p, VarPat):
        return p.name
    if isinstance(p, ListPat):
        return "[" + ", ".join(render_pattern(i) for i in p.items) + "]"
    if isinstance(p, AsPat):
        return f"{render_pattern(p.pat)} as {p.name}"
    raise TypeError(f"unknown pattern {p!r}")


def render_param(p: Pattern) -> str:
    if isinstance(p, VarPat):
        return p.name
    return f"({render_pattern(p)})"


def render(e: Expr, ctx: int = LOW) -> str:
    """Render an expression on a single line, parenthesized for context."""
    if isinstance(e, Num):
        return render_num(e)
    if isinstance(e, Str):
        return f'"{e.value}"'
    if isinstance(e, Var):
        return e.name
    if isinstance(e, ListLit):
        return "[" + ", ".join(render(i, LOW) for i in e.items) + "]"
    if isinstance(e, TerminationHole):
        return "??terminationCondition"
    if isinstance(e, PbeHole):
        obs = ", ".join(f"{k} => {frac_str(v)}" for k, v in e.observations)
        return f"??({obs})"
    if isinstance(e, ValueHole):
        raise ValueError("value hole survived to unparse time")
    if isinstance(e, App):
        parts = [render(e.fn, ATOM)] + [render(a, ATOM) for a in e.args]
        text = " ".join(parts)
        return f"({text})" if ctx > APP else text
    if isinstance(e, BinOp):
        prec = _OP_PREC[e.op]
        if e.op == "<|":
            lhs = render(e.lhs, prec + 1)
            rhs = render(e.rhs, prec)
        else:
            lhs = render(e.lhs, prec)
            rhs = render(e.rhs, prec + 1)
        text = f"{lhs} {e.op} {rhs}"
        return f"({text})" if ctx > prec else text
    if isinstance(e, Lambda):
        params = " ".join(render_param(p) for p in e.params)
        text = f"\\{params} -> {render(e.body, LOW)}"
        return f"({text})" if ctx > LOW else text
    if isinstance(e, LetIn):
        text = (
            f"let {render_pattern(e.pat)} = {render(e.bound, LOW)} "
            f"in {render(e.body, LOW)}"
        )
        return f"({text})" if ctx > LOW else text
    if isinstance(e, If):
        text = (
            f"if {render(e.cond, LOW)} then {render(e.then, LOW)} "
            f"else {render(e.els, LOW)}"
        )
        return f"({text})" if ctx > LOW else text
    raise TypeError(f"unknown expression {e!r}")


def _is_block(e: Expr) -> bool:
    return isinstance(e, (LetIn, If))


def render_block(e: Expr, indent: int) -> list[str]:
    pad = " " * indent
    if isinstance(e, LetIn):
        lines = []
        if _is_block(e.bound):
            lines.append(f"{pad}let {render_pattern(e.pat)} =")
            lines.extend(render_block(e.bound, indent + 2))
            lines.append(f"{pad}in")
        else:
            lines.append(
                f"{pad}let {render_pattern(e.pat)} = {render(e.bound, LOW)} in"
            )
        lines.extend(render_block(e.body, indent))
        return lines
    if isinstance(e, If):
        lines = [f"{pad}if {render(e.cond, LOW)} then"]
        lines.extend(render_block(e.then, indent + 2))
        lines.append(f"{pad}else")
        lines.extend(render_block(e.els, indent + 2))
        return lines
    return [f"{pad}{render(e, LOW)}"]


def _render_def(d: TopDef) -> list[str]:
    lines = list(d.comments)
    if d.name is not None:
        head = " ".join([d.name] + [render_param(p) for p in d.params])
    else:
        head = render_pattern(d.pattern)
    if _is_block(d.rhs):
        lines.append(f"{head} =")
        lines.extend(render_block(d.rhs, 2))
    else:
        lines.append(f"{head} = {render(d.rhs, LOW)}")
    return lines


def _render_main(e: Expr) -> list[str]:
    # the `svg (concat [...])` form prints its shape list one entry per line
    if (
        isinstance(e, App)
        and isinstance(e.fn, Var)
        and e.fn.name == "svg"
        and len(e.args) == 1
        and isinstance(e.args[0], App)
        and isinstance(e.args[0].fn, Var)
        and e.args[0].fn.name == "concat"
        and len(e.args[0].args) == 1
        and isinstance(e.args[0].args[0], ListLit)
    ):
        items = e.args[0].args[0].items
        lines = ["svg (concat ["]
        for i, item in enumerate(items):
            sep = "," if i < len(items) - 1 else ""
            lines.append(f"  {render(item, LOW)}{sep}")
        lines.append("])")
        return lines
    return [render(e, LOW)]


def unparse(program: Program) -> str:
    """Deterministic canonical text for a program."""
    sections = []
    for d in program.defs:
        sections.append("\n".join(_render_def(d)))
    sections.append("\n".join(_render_main(program.main)))
    return "\n\n".join(sections) + "\n"
