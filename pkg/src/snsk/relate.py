"""Make Equal and Relate: equate or relate selected features by rewriting
constants into shared variables and expressions.

The solver is a built-in single-equation linear solver over exact rationals:
features become affine forms over unfrozen literals, the equality is solved
for one removable constant, and the solution is rendered back into program
text with simplified coefficients. Relate searches a small family of
rational relationships (thirds and halves by default).
"""

from __future__ import annotations

from fractions import Fraction

from .affine import Affine
from .candidates import (
    Candidate,
    ToolError,
    dedupe_candidates,
    make_candidate,
    rank_candidates,
)
from .edits import EditContext
from .interp import ExecutionRecord
from .nodes import BinOp, Expr, Num, Program, node_index
from .prelude import ROLE_NAME_BASES
from .widgets import Feature, resolve_selection

RELATE_EPSILON = Fraction(1, 2)  # px tolerance for a guessed relationship
DEFAULT_RATIOS = (Fraction(1, 3), Fraction(2, 3), Fraction(1, 2))


class ZeroCoefficient(ToolError):
    def __init__(self, message="unknown has zero coefficient"):
        super().__init__("ZeroCoefficient", message)


def solve_for(eq: Affine, unknown) -> Affine:
    """Solve `eq = 0` for the unknown atom; returns its closed form."""
    coeff = eq.terms.get(unknown, Fraction(0))
    if coeff == 0:
        raise ZeroCoefficient()
    rest = Affine(
        {k: c for k, c in eq.terms.items() if k != unknown},
        eq.const,
        eq.discontinuous,
        eq.opaque_lits,
    )
    return rest.scaled(Fraction(-1) / coeff)


def _resolve_features(record, sels, focus=None) -> list[Feature]:
    out = []
    for sel in sels:
        f = resolve_selection(record, sel, focus=focus)
        if not isinstance(f, Feature) or f.kind != "num":
            raise ToolError("StaleSelection", f"{sel} is not a numeric feature")
        out.append(f)
    return out


def _removable_atoms(aff: Affine, index) -> list:
    atoms = [a for a in aff.terms if a[0] == "lit"]
    return sorted(atoms, key=lambda a: index[a[1]].span[0])


def _role_base(feature: Feature) -> str:
    if feature.role_hint and feature.role_hint in ROLE_NAME_BASES:
        return ROLE_NAME_BASES[feature.role_hint]
    return "n"


def _substitute(
    program: Program,
    record: ExecutionRecord,
    removed_atom,
    solution: Affine,
    description: str,
    name_base: str,
    template: Expr | None = None,
) -> Candidate:
    ctx = EditContext(program, record)
    ctx.lift_anchor = ctx.scope.item_containing(removed_atom[1])
    if template is not None:
        replacement = template
    else:
        # share a role-named variable when the other side is a bare constant
        if (
            len(solution.terms) == 1
            and solution.const == 0
            and next(iter(solution.terms.values())) == 1
            and next(iter(solution.terms))[0] == "lit"
        ):
            other_lit = next(iter(solution.terms))[1]
            if other_lit not in ctx.lit_names:
                ctx.lift_literal(other_lit, name_base)
        replacement = ctx.render_affine(solution)
    node = ctx.node_in_work(removed_atom[1])
    if node is None:
        raise ToolError("StaleSelection", "constant to remove no longer exists")
    ctx._replace_everywhere(removed_atom[1], replacement)
    return make_candidate(program, ctx.work, description)


def make_equal(
    program: Program, record: ExecutionRecord, sels: list, focus=None
) -> list[Candidate]:
    features = _resolve_features(record, sels, focus=focus)
    if len(features) < 2:
        raise ToolError("StaleSelection", "Make Equal needs two or more features")
    index = node_index(program)
    for f in features:
        aff = f.affines[0]
        if not _removable_atoms(aff, index) and aff.opaque_lits:
            raise ToolError(
                "NonLinearDependence",
                f"{f.label or 'feature'} is not affine in any constant",
            )
    candidates = []
    if len(features) == 2:
        f1, f2 = features
        eq = f1.affines[0] - f2.affines[0]
        atoms = _removable_atoms(eq, index)
        # prefer removing the later-in-program constant first
        for atom in sorted(atoms, key=lambda a: -index[a[1]].span[0]):
            try:
                solution = solve_for(eq, atom)
            except ZeroCoefficient:
                continue
            owner = f2 if atom in f2.affines[0].terms else f1
            desc = f"Equalize by removing {owner.label or 'constant'}"
            try:
                candidates.append(
                    _substitute(program, record, atom, solution, desc,
                                _role_base(owner))
                )
            except ToolError:
                continue  # e.g. solution references a later definition
    else:
        from .interp import evaluate

        for pi in range(len(features)):
            work_program = program
            work_record = record
            removed = []
            ok = True
            for fi in range(len(features)):
                if fi == pi:
                    continue
                cur = _resolve_features(work_record, sels, focus=focus)
                idx2 = node_index(work_program)
                eq = cur[fi].affines[0] - cur[pi].affines[0]
                atoms = [
                    a
                    for a in _removable_atoms(eq, idx2)
                    if a in cur[fi].affines[0].terms
                ]
                if not atoms:
                    ok = False
                    break
                solution = solve_for(eq, atoms[-1])
                try:
                    step = _substitute(
                        work_program, work_record, atoms[-1], solution,
                        "step", _role_base(cur[fi]),
                    )
                except ToolError:
                    ok = False
                    break
                work_program = step.program
                work_record = evaluate(work_program)
                removed.append(cur[fi].label or "constant")
            if not ok:
                continue
            candidates.append(
                make_candidate(
                    program,
                    work_program,
                    "Equalize by removing " + ", ".join(removed),
                )
            )
    if not candidates:
        raise ToolError("NoFreeConstants", "no removable constants to equalize")
    return rank_candidates(dedupe_candidates(rank_candidates(candidates)))


def relate(
    program: Program,
    record: ExecutionRecord,
    sels: list,
    ratios=DEFAULT_RATIOS,
    focus=None,
) -> list[Candidate]:
    features = _resolve_features(record, sels, focus=focus)
    if len(features) < 2:
        raise ToolError("StaleSelection", "Relate needs two or more features")
    index = node_index(program)
    values = [f.value(index) for f in features]
    candidates = []

    def bare_atom(f: Feature):
        aff = f.affines[0]
        if len(aff.terms) == 1 and aff.const == 0:
            (atom,) = aff.terms
            if atom[0] == "lit" and aff.terms[atom] == 1:
                return atom
        atoms = _removable_atoms(aff, index)
        return atoms[-1] if atoms else None

    def feature_expr(ctx: EditContext, f: Feature) -> Expr:
        return ctx.render_affine(f.affines[0])

    # pairwise equality
    for i, fi in enumerate(features):
        for j, fj in enumerate(features):
            if i == j:
                continue
            if abs(values[i] - values[j]) <= RELATE_EPSILON:
                try:
                    for cand in make_equal(
                        program, record, [sels[i], sels[j]], focus=focus
                    ):
                        cand.description = "Relate: " + cand.description
                        candidates.append(cand)
                except ToolError:
                    pass
                break

    # fi = fj + (fk - fj) * p/q over selected features
    n = len(features)
    for i in range(n):
        atom = bare_atom(features[i])
        if atom is None:
            continue
        for j in range(n):
            for k in range(n):
                if len({i, j, k}) != 3:
                    continue
                for ratio in ratios:
                    expected = values[j] + (values[k] - values[j]) * ratio
                    if abs(values[i] - expected) > RELATE_EPSILON:
                        continue
                    ctx = EditContext(program, record)
                    ctx.lift_anchor = ctx.scope.item_containing(atom[1])
                    fj_expr = feature_expr(ctx, features[j])
                    fk_expr = feature_expr(ctx, features[k])
                    fj_expr2 = feature_expr(ctx, features[j])
                    span = BinOp(op="-", lhs=fk_expr, rhs=fj_expr2)
                    template = _ratio_expr(fj_expr, span, ratio, "+")
                    desc = (
                        f"Relate {features[i].label or 'feature'} = "
                        f"{features[j].label or 'a'} + "
                        f"({features[k].label or 'b'} - "
                        f"{features[j].label or 'a'}) * {ratio}"
                    )
                    node = ctx.node_in_work(atom[1])
                    if node is None:
                        continue
                    ctx._replace_everywhere(atom[1], template)
                    try:
                        candidates.append(make_candidate(program, ctx.work, desc))
                    except ToolError:
                        continue  # e.g. template references a later definition

    # fi = fj +/- d * p/q where d is a selected distance feature
    dists = [
        (idx, f)
        for idx, f in enumerate(features)
        if f.role_hint in ("HorizontalDistance", "VerticalDistance")
        and f.backing is None
    ]
    for i in range(n):
        atom = bare_atom(features[i])
        if atom is None:
            continue
        for j in range(n):
            if i == j:
                continue
            for di, dfeat in dists:
                if di in (i, j):
                    continue
                for ratio in ratios:
                    for sign in (1, -1):
                        expected = values[j] + sign * values[di] * ratio
                        if abs(values[i] - expected) > RELATE_EPSILON:
                            continue
                        ctx = EditContext(program, record)
                        ctx.lift_anchor = ctx.scope.item_containing(atom[1])
                        fj_expr = feature_expr(ctx, features[j])
                        d_expr = feature_expr(ctx, dfeat)
                        template = _ratio_expr(
                            fj_expr, d_expr, ratio, "+" if sign > 0 else "-"
                        )
                        desc = (
                            f"Relate {features[i].label or 'feature'} = "
                            f"{features[j].label or 'a'} "
                            f"{'+' if sign > 0 else '-'} "
                            f"{dfeat.label} * {ratio}"
                        )
                        node = ctx.node_in_work(atom[1])
                        if node is None:
                            continue
                        ctx._replace_everywhere(atom[1], template)
                        try:
                            candidates.append(
                                make_candidate(program, ctx.work, desc)
                            )
                        except ToolError:
                            continue
    candidates = dedupe_candidates(rank_candidates(candidates))
    if not candidates:
        raise ToolError("NoPlausibleRelation", "no relationship fits the values")
    return rank_candidates(candidates)


def _ratio_expr(base: Expr, span: Expr, ratio: Fraction, op: str) -> Expr:
    p, q = ratio.numerator, ratio.denominator
    scaled = span
    if p != 1:
        scaled = BinOp(op="*", lhs=Num(value=Fraction(p), frozen=True), rhs=scaled)
    if q != 1:
        scaled = BinOp(op="/", lhs=scaled, rhs=Num(value=Fraction(q), frozen=True))
    return BinOp(op=op, lhs=base, rhs=scaled)
