"""Affine views of traced numeric values.

A traced number is reconstructed, through its provenance graph, as an affine
combination of program literals (and, optionally, of designated boundary
values such as a focused function's arguments). Dependencies that pass
through mod, comparisons, branch conditions, or example holes cannot be
expressed affinely; they are folded into the constant and flagged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .interp import TracedValue, dependencies
from .nodes import BinOp, If, Num, PbeHole, ValueHole, Var

# atom keys: ("lit", expr nid) or ("bind", value serial)
Atom = tuple[str, int]


@dataclass
class Affine:
    terms: dict[Atom, Fraction] = field(default_factory=dict)
    const: Fraction = Fraction(0)
    discontinuous: bool = False
    opaque_lits: frozenset = frozenset()  # literal nids hidden in opaque regions

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def _combine(self, other: "Affine", sign: int) -> "Affine":
        terms = dict(self.terms)
        for k, c in other.terms.items():
            terms[k] = terms.get(k, Fraction(0)) + sign * c
        terms = {k: c for k, c in terms.items() if c != 0}
        return Affine(
            terms,
            self.const + sign * other.const,
            self.discontinuous or other.discontinuous,
            self.opaque_lits | other.opaque_lits,
        )

    def scaled(self, factor: Fraction) -> "Affine":
        if factor == 0:
            return Affine({}, Fraction(0), self.discontinuous, self.opaque_lits)
        return Affine(
            {k: c * factor for k, c in self.terms.items()},
            self.const * factor,
            self.discontinuous,
            self.opaque_lits,
        )

    def is_const(self) -> bool:
        return not self.terms

    def value_with(self, values: dict[Atom, Fraction]) -> Fraction:
        total = self.const
        for k, c in self.terms.items():
            total += c * values[k]
        return total

    def same_form(self, other: "Affine") -> bool:
        return self.terms == other.terms and self.const == other.const

    def _with_flags(self, other: "Affine") -> "Affine":
        return Affine(
            self.terms,
            self.const,
            self.discontinuous or other.discontinuous,
            self.opaque_lits | other.opaque_lits,
        )


def _unfrozen_lit_deps(tv: TracedValue, index) -> frozenset:
    out = set()
    for nid in dependencies(tv):
        node = index.get(nid)
        if isinstance(node, Num) and not node.frozen:
            out.add(nid)
    return frozenset(out)


class AffineDeriver:
    def __init__(self, index: dict, boundary: dict[int, str] | None = None):
        self.index = index
        self.boundary = boundary or {}
        self.memo: dict[int, tuple] = {}

    def derive(self, tv: TracedValue) -> Affine:
        key = id(tv)
        if key in self.memo:
            return self.memo[key][1]
        out = self._derive(tv)
        self.memo[key] = (tv, out)
        return out

    def _opaque(self, tv: TracedValue, discontinuous=True) -> Affine:
        value = tv.value if isinstance(tv.value, Fraction) else Fraction(0)
        return Affine(
            {}, value, discontinuous, _unfrozen_lit_deps(tv, self.index)
        )

    def _derive(self, tv: TracedValue) -> Affine:
        if tv.serial in self.boundary:
            return Affine({("bind", tv.serial): Fraction(1)})
        if not isinstance(tv.value, Fraction):
            return self._opaque(tv, discontinuous=False)
        node = self.index.get(tv.trace.expr_nid)
        parents = tv.trace.parents
        if isinstance(node, Num):
            if node.frozen:
                return Affine({}, tv.value)
            return Affine({("lit", node.nid): Fraction(1)})
        if (
            len(parents) == 2
            and isinstance(parents[1].value, list)
            and parents[0].value == tv.value
        ):
            return self.derive(parents[0])  # destructuring step
        if tv.trace.prelude_internal:
            return self._opaque(tv)
        if isinstance(node, PbeHole):
            return self._opaque(tv)
        if isinstance(node, Var) and len(parents) == 1:
            return self.derive(parents[0])
        if isinstance(node, ValueHole) and len(parents) == 1:
            return self.derive(parents[0])
        if isinstance(node, If) and len(parents) == 2:
            cond, branch = parents
            out = self.derive(branch)
            cond_lits = _unfrozen_lit_deps(cond, self.index)
            if cond_lits:
                out = Affine(
                    dict(out.terms),
                    out.const,
                    True,
                    out.opaque_lits | cond_lits,
                )
            return out
        if isinstance(node, BinOp) and len(parents) == 2 and node.op in "+-*/":
            lhs = self.derive(parents[0])
            rhs = self.derive(parents[1])
            if node.op == "+":
                return lhs + rhs
            if node.op == "-":
                return lhs - rhs
            if node.op == "*":
                if rhs.is_const() and not rhs.discontinuous:
                    return lhs.scaled(rhs.const)._with_flags(rhs)
                if lhs.is_const() and not lhs.discontinuous:
                    return rhs.scaled(lhs.const)._with_flags(lhs)
                return self._opaque(tv)
            if node.op == "/":
                if rhs.is_const() and not rhs.discontinuous and rhs.const != 0:
                    return lhs.scaled(1 / rhs.const)._with_flags(rhs)
                return self._opaque(tv)
        if len(parents) == 1 and parents[0].value == tv.value:
            return self.derive(parents[0])  # pass-through re-tag
        return self._opaque(tv)


def derive_affine(tv: TracedValue, index: dict, boundary=None) -> Affine:
    return AffineDeriver(index, boundary).derive(tv)


def constants_affecting(tv: TracedValue, index: dict) -> set:
    """Unfrozen literals that feed this value: (nid, current value) pairs.

    Literals whose affine coefficient cancels to zero are excluded; literals
    reachable only through discontinuous operations are included (their
    effect exists but is not affine).
    """
    aff = derive_affine(tv, index)
    out = set()
    for (kind, nid), coeff in aff.terms.items():
        if kind == "lit" and coeff != 0:
            out.add((nid, index[nid].value))
    for nid in aff.opaque_lits:
        out.add((nid, index[nid].value))
    return out


def affine_lcm_denominator(aff: Affine) -> int:
    d = aff.const.denominator
    for c in aff.terms.values():
        d = d * c.denominator // math.gcd(d, c.denominator)
    return d
