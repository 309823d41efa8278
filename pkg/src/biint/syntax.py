"""Formulas of the bi-intuitionistic language.

Only the primitive connectives exist as node types; negation, co-negation
and the biconditional are expanded when built (``neg``, ``coneg``, ``iff``)
or parsed, so structural equality is equality of primitive trees.

Grammar (ASCII), tightest binding first::

    atom    := IDENT | 'T' | 'F' | '(' formula ')'
    unary   := '!' unary | '~' unary | atom
    and     := unary ('&' unary)*          left-assoc
    or      := and ('|' and)*              left-assoc
    excl    := or ('\\' or)*               left-assoc
    imp     := excl ('->' imp)?            right-assoc
    formula := imp ('<->' imp)?            non-assoc
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Union

__all__ = [
    "Formula", "Var", "Bot", "Top", "And", "Or", "Imp", "Excl",
    "BOT", "TOP", "neg", "coneg", "iff", "dn",
    "ParseError", "parse", "render", "depth", "substitute", "variables",
    "subformulas",
]


class _Node:
    __slots__ = ()

    def __str__(self) -> str:
        return render(self)  # type: ignore[arg-type]


def _binary(name: str, tag: int):
    @dataclass(frozen=True, slots=True, repr=False)
    class _Bin(_Node):
        left: "Formula"
        right: "Formula"
        _hash: int = field(init=False, compare=False, default=0)

        def __post_init__(self) -> None:
            object.__setattr__(self, "_hash", hash((tag, self.left, self.right)))

        def __hash__(self) -> int:
            return self._hash

        def __eq__(self, other: object) -> bool:
            if self is other:
                return True
            if other.__class__ is not self.__class__:
                return NotImplemented
            return (self._hash == other._hash  # type: ignore[attr-defined]
                    and self.left == other.left  # type: ignore[attr-defined]
                    and self.right == other.right)  # type: ignore[attr-defined]

        def __repr__(self) -> str:
            return f"{name}({self.left!r}, {self.right!r})"

    _Bin.__name__ = _Bin.__qualname__ = name
    return _Bin


@dataclass(frozen=True, slots=True)
class Var(_Node):
    name: str

    def __repr__(self) -> str:
        return f"Var({self.name!r})"


@dataclass(frozen=True, slots=True)
class Bot(_Node):
    def __hash__(self) -> int:
        return hash("Bot")

    def __repr__(self) -> str:
        return "Bot()"


@dataclass(frozen=True, slots=True)
class Top(_Node):
    def __hash__(self) -> int:
        return hash("Top")

    def __repr__(self) -> str:
        return "Top()"


And = _binary("And", 1)
Or = _binary("Or", 2)
Imp = _binary("Imp", 3)
Excl = _binary("Excl", 4)

Formula = Union[Var, Bot, Top, "And", "Or", "Imp", "Excl"]

BOT = Bot()
TOP = Top()


def neg(f: Formula) -> Formula:
    return Imp(f, BOT)


def coneg(f: Formula) -> Formula:
    return Excl(TOP, f)


def iff(f: Formula, g: Formula) -> Formula:
    return And(Imp(f, g), Imp(g, f))


def dn(n: int, f: Formula) -> Formula:
    """Apply ``!~`` (negation of co-negation) ``n`` times to ``f``."""
    if n < 0:
        raise ValueError("dn expects a natural number")
    for _ in range(n):
        f = Imp(Excl(TOP, f), BOT)
    return f


def depth(f: Formula) -> int:
    """Bi-depth: implication and exclusion each add a layer, lattice
    connectives do not, leaves count 1."""
    if isinstance(f, (Var, Bot, Top)):
        return 1
    d = max(depth(f.left), depth(f.right))
    if isinstance(f, (Imp, Excl)):
        return d + 1
    return d


def variables(f: Formula) -> frozenset[str]:
    out: set[str] = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, Var):
            out.add(g.name)
        elif isinstance(g, (Bot, Top)):
            continue
        else:
            stack.append(g.left)
            stack.append(g.right)
    return frozenset(out)


def subformulas(f: Formula) -> Iterator[Formula]:
    """Post-order walk, children before parents."""
    if not isinstance(f, (Var, Bot, Top)):
        yield from subformulas(f.left)
        yield from subformulas(f.right)
    yield f


def substitute(s: Mapping[str, Formula], f: Formula) -> Formula:
    """Simultaneous substitution; unmapped variables are left alone."""
    if not s:
        return f
    cache: dict[Formula, Formula] = {}

    def go(g: Formula) -> Formula:
        if isinstance(g, Var):
            return s.get(g.name, g)
        if isinstance(g, (Bot, Top)):
            return g
        hit = cache.get(g)
        if hit is not None:
            return hit
        out = g.__class__(go(g.left), go(g.right))
        cache[g] = out
        return out

    return go(f)


# ---------------------------------------------------------------------------
# parsing

class ParseError(ValueError):
    def __init__(self, message: str, pos: int, text: str = ""):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos
        self.text = text


_TOKEN = re.compile(r"\s*(?:(<->)|(->)|([&|\\!~()])|([A-Za-z][A-Za-z0-9_]*))")
_KEYWORDS = {"T", "F"}


def _tokenize(text: str) -> list[tuple[str, int]]:
    tokens = []
    pos = 0
    n = len(text)
    while True:
        while pos < n and text[pos].isspace():
            pos += 1
        if pos >= n:
            break
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        tok = m.group(m.lastindex)
        tokens.append((tok, m.start(m.lastindex)))
        pos = m.end()
    tokens.append(("", n))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self) -> str:
        return self.toks[self.i][0]

    def pos(self) -> int:
        return self.toks[self.i][1]

    def take(self, tok: str) -> None:
        if self.peek() != tok:
            found = self.peek() or "end of input"
            raise ParseError(f"expected {tok!r}, found {found!r}", self.pos(), self.text)
        self.i += 1

    def formula(self) -> Formula:
        left = self.imp()
        if self.peek() == "<->":
            self.i += 1
            right = self.imp()
            if self.peek() == "<->":
                raise ParseError("'<->' is non-associative; add parentheses",
                                 self.pos(), self.text)
            return iff(left, right)
        return left

    def imp(self) -> Formula:
        left = self.excl()
        if self.peek() == "->":
            self.i += 1
            return Imp(left, self.imp())
        return left

    def excl(self) -> Formula:
        f = self.or_()
        while self.peek() == "\\":
            self.i += 1
            f = Excl(f, self.or_())
        return f

    def or_(self) -> Formula:
        f = self.and_()
        while self.peek() == "|":
            self.i += 1
            f = Or(f, self.and_())
        return f

    def and_(self) -> Formula:
        f = self.unary()
        while self.peek() == "&":
            self.i += 1
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        tok = self.peek()
        if tok == "!":
            self.i += 1
            return neg(self.unary())
        if tok == "~":
            self.i += 1
            return coneg(self.unary())
        return self.atom()

    def atom(self) -> Formula:
        tok, pos = self.toks[self.i]
        if tok == "(":
            self.i += 1
            f = self.formula()
            self.take(")")
            return f
        if tok == "T":
            self.i += 1
            return TOP
        if tok == "F":
            self.i += 1
            return BOT
        if tok and (tok[0].isalpha()):
            self.i += 1
            return Var(tok)
        raise ParseError(f"unexpected {tok or 'end of input'!r}", pos, self.text)


def parse(text: str) -> Formula:
    p = _Parser(text)
    f = p.formula()
    if p.peek() != "":
        raise ParseError(f"trailing input {p.peek()!r}", p.pos(), p.text)
    return f


# ---------------------------------------------------------------------------
# rendering

_PREC = {And: 4, Or: 3, Excl: 2, Imp: 1}
_ASCII = {And: "&", Or: "|", Excl: "\\", Imp: "->"}
_UNICODE = {And: "∧", Or: "∨", Excl: "∖", Imp: "→"}


def render(f: Formula, *, sugar: bool = False, unicode: bool = False) -> str:
    """Precedence-minimal rendering.

    With ``sugar`` set, ``F -> ...`` patterns print as ``!x`` and ``T \\ x``
    as ``~x``; both forms parse back to the same tree. ``unicode`` output is
    display-only and is not accepted by :func:`parse`.
    """
    ops = _UNICODE if unicode else _ASCII
    top, bot = ("⊤", "⊥") if unicode else ("T", "F")
    negs = ("¬", "∼") if unicode else ("!", "~")

    def go(g: Formula, min_prec: int) -> str:
        if isinstance(g, Var):
            return g.name
        if isinstance(g, Top):
            return top
        if isinstance(g, Bot):
            return bot
        if sugar:
            if isinstance(g, Imp) and isinstance(g.right, Bot):
                return negs[0] + go(g.left, 5)
            if isinstance(g, Excl) and isinstance(g.left, Top):
                return negs[1] + go(g.right, 5)
        cls = g.__class__
        p = _PREC[cls]
        if cls is Imp:
            s = f"{go(g.left, p + 1)} {ops[cls]} {go(g.right, p)}"
        else:
            s = f"{go(g.left, p)} {ops[cls]} {go(g.right, p + 1)}"
        return f"({s})" if p < min_prec else s

    return go(f, 0)
