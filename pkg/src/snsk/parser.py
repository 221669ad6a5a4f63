"""Parser for the design language.

A program is a sequence of top-level definitions followed by one main
expression. Top-level chunks start at column 0; indented lines continue the
current chunk, as do lines inside unbalanced brackets. See docs/grammar.md
for the full grammar.
"""

from __future__ import annotations

from dataclasses import dataclass
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
    Var,
    VarPat,
    number_nodes,
)


class LangSyntaxError(Exception):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


@dataclass
class Token:
    kind: str  # ident, num, str, sym, kw
    text: str
    pos: int
    line: int
    col: int
    # number payload
    value: Fraction = None
    frozen: bool = False
    slider: tuple = None


KEYWORDS = {"let", "in", "if", "then", "else", "as"}

SYMBOLS = [
    "??(",
    "<|",
    "->",
    "==",
    "<=",
    ">=",
    "=>",
    "=",
    "<",
    ">",
    "+",
    "-",
    "*",
    "/",
    "(",
    ")",
    "[",
    "]",
    ",",
    "\\",
]


def tokenize(source: str) -> list[Token]:
    toks: list[Token] = []
    i = 0
    line = 1
    col = 1
    n = len(source)

    def advance(k):
        nonlocal i, line, col
        for _ in range(k):
            if i < n and source[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        ch = source[i]
        if ch in " \t\n\r":
            advance(1)
            continue
        if source.startswith("--", i):
            while i < n and source[i] != "\n":
                advance(1)
            continue
        if source.startswith("??", i) and i + 2 < n and (source[i + 2].isalpha()):
            start, sl, sc = i, line, col
            advance(2)
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            word = source[i:j]
            advance(j - i)
            toks.append(Token("hole", "??" + word, start, sl, sc))
            continue
        if ch.isdigit():
            start, sl, sc = i, line, col
            j = i
            while j < n and source[j].isdigit():
                j += 1
            if j < n and source[j] == "." and j + 1 < n and source[j + 1].isdigit():
                j += 1
                while j < n and source[j].isdigit():
                    j += 1
            text = source[i:j]
            value = Fraction(text)
            advance(j - i)
            frozen = False
            slider = None
            if i < n and source[i] == "!":
                frozen = True
                advance(1)
            if i < n and source[i] == "{":
                # slider annotation {lo-hi}
                j = source.find("}", i)
                if j == -1:
                    raise LangSyntaxError("unterminated slider annotation", line, col)
                body = source[i + 1 : j]
                parts = body.split("-")
                if len(parts) != 2:
                    raise LangSyntaxError(f"bad slider annotation {{{body}}}", line, col)
                try:
                    slider = (Fraction(parts[0]), Fraction(parts[1]))
                except ValueError:
                    raise LangSyntaxError(f"bad slider annotation {{{body}}}", line, col)
                advance(j - i + 1)
            tok = Token("num", text, start, sl, sc)
            tok.value = value
            tok.frozen = frozen
            tok.slider = slider
            toks.append(tok)
            continue
        if ch.isalpha() or ch == "_":
            start, sl, sc = i, line, col
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            word = source[i:j]
            advance(j - i)
            kind = "kw" if word in KEYWORDS else "ident"
            toks.append(Token(kind, word, start, sl, sc))
            continue
        if ch == '"':
            start, sl, sc = i, line, col
            j = i + 1
            while j < n and source[j] != '"':
                j += 1
            if j >= n:
                raise LangSyntaxError("unterminated string", sl, sc)
            text = source[i + 1 : j]
            advance(j - i + 1)
            toks.append(Token("str", text, start, sl, sc))
            continue
        for sym in SYMBOLS:
            if source.startswith(sym, i):
                toks.append(Token("sym", sym, i, line, col))
                advance(len(sym))
                break
        else:
            raise LangSyntaxError(f"unexpected character {ch!r}", line, col)
    return toks


@dataclass
class Chunk:
    text: str
    offset: int
    line: int
    comments: list[str]


def split_chunks(source: str) -> list[Chunk]:
    """Split into top-level chunks; a chunk starts at a column-0 line outside brackets."""
    chunks: list[Chunk] = []
    pending_comments: list[str] = []
    current: list[str] = []
    cur_offset = 0
    cur_line = 0
    depth = 0
    offset = 0
    for lineno, raw in enumerate(source.split("\n"), start=1):
        stripped = raw.strip()
        starts_flush = raw[:1] not in ("", " ", "\t")
        if depth == 0 and stripped.startswith("--"):
            if current:
                chunks.append(Chunk("\n".join(current), cur_offset, cur_line, []))
                current = []
            pending_comments.append(stripped)
        elif not stripped and depth == 0:
            if current:
                chunks.append(
                    Chunk("\n".join(current), cur_offset, cur_line, pending_comments)
                )
                current = []
                pending_comments = []
        else:
            if starts_flush and depth == 0 and current:
                chunks.append(
                    Chunk("\n".join(current), cur_offset, cur_line, pending_comments)
                )
                current = []
                pending_comments = []
            if not current:
                cur_offset = offset
                cur_line = lineno
            current.append(raw)
            depth += _bracket_delta(raw)
        offset += len(raw) + 1
    if current:
        chunks.append(Chunk("\n".join(current), cur_offset, cur_line, pending_comments))
    return chunks


def _bracket_delta(line: str) -> int:
    delta = 0
    i = 0
    while i < len(line):
        ch = line[i]
        if line.startswith("--", i):
            break
        if ch in "([":
            delta += 1
        elif ch in ")]":
            delta -= 1
        i += 1
    return delta


class _ChunkParser:
    def __init__(self, toks: list[Token], base_offset: int):
        self.toks = toks
        self.i = 0
        self.base = base_offset

    def peek(self, ahead=0) -> Token:
        j = self.i + ahead
        return self.toks[j] if j < len(self.toks) else None

    def at(self, kind, text=None) -> bool:
        t = self.peek()
        return t is not None and t.kind == kind and (text is None or t.text == text)

    def take(self, kind=None, text=None) -> Token:
        t = self.peek()
        if t is None:
            last = self.toks[-1] if self.toks else None
            line = last.line if last else 1
            col = last.col if last else 1
            raise LangSyntaxError("unexpected end of input", line, col)
        if (kind and t.kind != kind) or (text and t.text != text):
            raise LangSyntaxError(
                f"expected {text or kind}, found {t.text!r}", t.line, t.col
            )
        self.i += 1
        return t

    def done(self) -> bool:
        return self.i >= len(self.toks)

    def _span(self, start_tok: Token, end_tok: Token) -> tuple[int, int]:
        end = end_tok.pos + len(end_tok.text)
        return (self.base + start_tok.pos, self.base + end)

    def prev(self) -> Token:
        return self.toks[self.i - 1]

    # expressions -----------------------------------------------------------

    def parse_expr(self) -> Expr:
        return self.parse_binop(0)

    PREC = {"<|": 1, "==": 2, "<": 2, ">": 2, "<=": 2, ">=": 2,
            "+": 3, "-": 3, "*": 4, "/": 4}

    def parse_binop(self, min_prec: int) -> Expr:
        start = self.peek()
        lhs = self.parse_app()
        while True:
            t = self.peek()
            if t is None or t.kind != "sym" or t.text not in self.PREC:
                return lhs
            prec = self.PREC[t.text]
            if prec < min_prec:
                return lhs
            self.take()
            # <| is right-associative; the rest associate left
            rhs = self.parse_binop(prec if t.text == "<|" else prec + 1)
            node = BinOp(op=t.text, lhs=lhs, rhs=rhs)
            node.span = (lhs.span[0], rhs.span[1])
            lhs = node

    def parse_app(self) -> Expr:
        first = self.parse_atom()
        args = []
        while self._starts_atom():
            args.append(self.parse_atom())
        if not args:
            return first
        node = App(fn=first, args=args)
        node.span = (first.span[0], args[-1].span[1])
        return node

    def _starts_atom(self) -> bool:
        t = self.peek()
        if t is None:
            return False
        if t.kind in ("ident", "num", "str", "hole"):
            return True
        if t.kind == "kw":
            return False
        return t.text in ("(", "[", "\\", "??(")

    def parse_atom(self) -> Expr:
        t = self.peek()
        if t is None:
            raise LangSyntaxError("expected expression", 1, 1)
        if t.kind == "num":
            self.take()
            node = Num(value=t.value, frozen=t.frozen, slider=t.slider)
            node.span = self._span(t, self.prev())
            return node
        if t.kind == "sym" and t.text == "-" and self.peek(1) is not None and self.peek(1).kind == "num":
            self.take()
            nt = self.take("num")
            node = Num(value=-nt.value, frozen=nt.frozen, slider=nt.slider)
            node.span = self._span(t, self.prev())
            return node
        if t.kind == "str":
            self.take()
            node = Str(value=t.text)
            node.span = self._span(t, t)
            return node
        if t.kind == "ident":
            self.take()
            node = Var(name=t.text)
            node.span = self._span(t, t)
            return node
        if t.kind == "hole":
            self.take()
            if t.text == "??terminationCondition":
                node = TerminationHole()
                node.span = self._span(t, t)
                return node
            raise LangSyntaxError(f"unknown hole {t.text}", t.line, t.col)
        if t.kind == "kw" and t.text == "let":
            return self.parse_let()
        if t.kind == "kw" and t.text == "if":
            return self.parse_if()
        if t.kind == "sym":
            if t.text == "(":
                self.take()
                inner = self.parse_expr()
                close = self.take("sym", ")")
                inner.span = (self.base + t.pos, self.base + close.pos + 1)
                return inner
            if t.text == "[":
                return self.parse_list()
            if t.text == "\\":
                return self.parse_lambda()
            if t.text == "??(":
                return self.parse_pbe_hole()
        raise LangSyntaxError(f"unexpected token {t.text!r}", t.line, t.col)

    def parse_list(self) -> ListLit:
        open_tok = self.take("sym", "[")
        items = []
        if not self.at("sym", "]"):
            items.append(self.parse_expr())
            while self.at("sym", ","):
                self.take()
                items.append(self.parse_expr())
        close = self.take("sym", "]")
        node = ListLit(items=items)
        node.span = (self.base + open_tok.pos, self.base + close.pos + 1)
        return node

    def parse_lambda(self) -> Lambda:
        open_tok = self.take("sym", "\\")
        params = [self.parse_pattern_atom()]
        while not self.at("sym", "->"):
            params.append(self.parse_pattern_atom())
        self.take("sym", "->")
        body = self.parse_expr()
        node = Lambda(params=params, body=body)
        node.span = (self.base + open_tok.pos, body.span[1])
        return node

    def parse_let(self) -> LetIn:
        let_tok = self.take("kw", "let")
        pat = self.parse_pattern()
        self.take("sym", "=")
        bound = self.parse_expr()
        self.take("kw", "in")
        body = self.parse_expr()
        node = LetIn(pat=pat, bound=bound, body=body)
        node.span = (self.base + let_tok.pos, body.span[1])
        return node

    def parse_if(self) -> If:
        if_tok = self.take("kw", "if")
        cond = self.parse_expr()
        self.take("kw", "then")
        then = self.parse_expr()
        self.take("kw", "else")
        els = self.parse_expr()
        node = If(cond=cond, then=then, els=els)
        node.span = (self.base + if_tok.pos, els.span[1])
        return node

    def parse_pbe_hole(self) -> PbeHole:
        open_tok = self.take("sym", "??(")
        obs = []
        while True:
            k = self.take("num")
            self.take("sym", "=>")
            neg = False
            if self.at("sym", "-"):
                self.take()
                neg = True
            v = self.take("num")
            obs.append((int(k.value), -v.value if neg else v.value))
            if self.at("sym", ","):
                self.take()
                continue
            break
        close = self.take("sym", ")")
        node = PbeHole(observations=obs)
        node.span = (self.base + open_tok.pos, self.base + close.pos + 1)
        return node

    # patterns ---------------------------------------------------------------

    def parse_pattern(self) -> Pattern:
        pat = self.parse_pattern_atom()
        if self.at("kw", "as"):
            self.take()
            name = self.take("ident")
            node = AsPat(pat=pat, name=name.text)
            node.span = (pat.span[0], self.base + name.pos + len(name.text))
            return node
        return pat

    def parse_pattern_atom(self) -> Pattern:
        t = self.peek()
        if t is None:
            raise LangSyntaxError("expected pattern", 1, 1)
        if t.kind == "ident":
            self.take()
            node = VarPat(name=t.text)
            node.span = self._span(t, t)
            return node
        if t.kind == "sym" and t.text == "[":
            open_tok = self.take()
            items = []
            if not self.at("sym", "]"):
                items.append(self.parse_pattern())
                while self.at("sym", ","):
                    self.take()
                    items.append(self.parse_pattern())
            close = self.take("sym", "]")
            node = ListPat(items=items)
            node.span = (self.base + open_tok.pos, self.base + close.pos + 1)
            return node
        if t.kind == "sym" and t.text == "(":
            self.take()
            inner = self.parse_pattern()
            close = self.take("sym", ")")
            inner.span = (self.base + t.pos, self.base + close.pos + 1)
            return inner
        raise LangSyntaxError(f"unexpected token {t.text!r} in pattern", t.line, t.col)


def _chunk_is_def(toks: list[Token]) -> bool:
    depth = 0
    for t in toks:
        if t.kind == "sym" and t.text in ("(", "["):
            depth += 1
        elif t.kind == "sym" and t.text in (")", "]"):
            depth -= 1
        elif t.kind == "kw" and t.text == "let":
            # a let's `=` belongs to the let, not a top-level def
            return False
        elif depth == 0 and t.kind == "sym" and t.text == "=":
            return True
    return False


def parse(source: str) -> Program:
    """Parse source text into a Program; raises LangSyntaxError on bad input."""
    chunks = split_chunks(source)
    if not chunks:
        raise LangSyntaxError("empty program: expected a main expression", 1, 1)
    defs: list[TopDef] = []
    main: Expr = None
    for idx, chunk in enumerate(chunks):
        try:
            toks = tokenize(chunk.text)
        except LangSyntaxError as err:
            raise LangSyntaxError(err.message, err.line + chunk.line - 1, err.col)
        if not toks:
            continue
        p = _ChunkParser(toks, chunk.offset)
        try:
            if _chunk_is_def(toks):
                d = _parse_def(p, chunk)
                if main is not None:
                    raise LangSyntaxError(
                        "definition after main expression", toks[0].line, toks[0].col
                    )
                defs.append(d)
            else:
                expr = p.parse_expr()
                if not p.done():
                    t = p.peek()
                    raise LangSyntaxError(
                        f"unexpected token {t.text!r}", t.line, t.col
                    )
                if main is not None:
                    raise LangSyntaxError(
                        "multiple main expressions", toks[0].line, toks[0].col
                    )
                main = expr
        except LangSyntaxError as err:
            raise LangSyntaxError(err.message, err.line + chunk.line - 1, err.col)
    if main is None:
        raise LangSyntaxError("missing main expression", 1, 1)
    program = Program(defs=defs, main=main, source=source)
    number_nodes(program)
    return program


def _parse_def(p: _ChunkParser, chunk: Chunk) -> TopDef:
    first = p.peek()
    name = None
    pattern = None
    params: list[Pattern] = []
    if first.kind == "ident" and p.peek(1) is not None and not (
        p.peek(1).kind == "kw" and p.peek(1).text == "as"
    ):
        name_tok = p.take("ident")
        name = name_tok.text
        while not p.at("sym", "="):
            params.append(p.parse_pattern_atom())
            if p.at("kw", "as"):
                # single pattern def like `[x, y] as point = ...` never lands here;
                # `name as x` is not valid
                t = p.peek()
                raise LangSyntaxError("unexpected 'as'", t.line, t.col)
    else:
        pattern = p.parse_pattern()
    p.take("sym", "=")
    rhs = p.parse_expr()
    if not p.done():
        t = p.peek()
        raise LangSyntaxError(f"unexpected token {t.text!r}", t.line, t.col)
    end = rhs.span[1]
    d = TopDef(
        name=name,
        pattern=pattern,
        params=params,
        rhs=rhs,
        comments=list(chunk.comments),
    )
    d.span = (chunk.offset, end)
    return d
