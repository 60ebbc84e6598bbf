"""Concrete syntax: a recursive-descent parser and a matching renderer.

Grammar summary (ASCII only):

* tense formulas: atoms ``[a-z][a-zA-Z0-9_]*``, ``false``, ``true``;
  prefix ``~ G H F P X`` bind tightest, then ``&``, then ``|``, then ``->``
  (right associative).
* relational formulas: ``x < y``, ``x = y``, ``x <. y``, ``empty``; prefix
  ``!``; ``/\\`` then ``\\/`` then ``=>`` (right associative);
  ``forall x. r`` and ``exists x. r`` scope as far right as possible.
* labeled formulas: ``x : A``.

``parse(render(e)) == e`` for every entity ``e`` produced by this package.
"""

from __future__ import annotations

import re

from .syntax import (
    And, Atom, Eq, Empty, Exists, F, Falsum, Forall, G, H, Implies, Less,
    Lwff, Not, Or, P, Prec, RAnd, RImplies, RNot, ROr, Top, X,
    is_formula,
)

KEYWORDS = {"false", "true", "forall", "exists", "empty"}

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<ident>[a-z][a-zA-Z0-9_]*)"
    r"|(?P<op>->|=>|<\.|/\\|\\/|[GHFPX~!&|()<=:.])"
    r")"
)


class ParseError(ValueError):
    """Syntax error with position and the tokens that would have been legal."""

    def __init__(self, text: str, pos: int, expected: str):
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"line {line}, column {col}: expected {expected}")
        self.line = line
        self.column = col
        self.expected = expected


class _Tokens:
    def __init__(self, text: str):
        self.text = text
        self.toks: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            m = _TOKEN_RE.match(text, pos)
            if not m or m.end() == pos:
                stripped = text[pos:].lstrip()
                if not stripped:
                    break
                raise ParseError(text, len(text) - len(stripped), "a token")
            if m.group("ident"):
                word = m.group("ident")
                kind = word if word in KEYWORDS else "ident"
                self.toks.append((kind, word, m.start("ident")))
            else:
                self.toks.append((m.group("op"), m.group("op"), m.start("op")))
            pos = m.end()
        self.i = 0

    def peek(self) -> str | None:
        return self.toks[self.i][0] if self.i < len(self.toks) else None

    def value(self) -> str:
        return self.toks[self.i][1]

    def pos(self) -> int:
        return self.toks[self.i][2] if self.i < len(self.toks) else len(self.text)

    def take(self, kind: str, expected: str | None = None) -> str:
        if self.peek() != kind:
            raise ParseError(self.text, self.pos(), expected or repr(kind))
        val = self.value()
        self.i += 1
        return val

    def done(self):
        if self.i < len(self.toks):
            raise ParseError(self.text, self.pos(), "end of input")


# ---------------------------------------------------------------------------
# Tense formulas

_PREFIX = {"~": Not, "G": G, "H": H, "F": F, "P": P, "X": X}


def _formula_imp(t: _Tokens):
    left = _formula_or(t)
    if t.peek() == "->":
        t.take("->")
        return Implies(left, _formula_imp(t))
    return left


def _formula_or(t: _Tokens):
    left = _formula_and(t)
    if t.peek() == "|":
        t.take("|")
        return Or(left, _formula_or(t))
    return left


def _formula_and(t: _Tokens):
    left = _formula_unary(t)
    if t.peek() == "&":
        t.take("&")
        return And(left, _formula_and(t))
    return left


def _formula_unary(t: _Tokens):
    kind = t.peek()
    if kind in _PREFIX:
        t.take(kind)
        return _PREFIX[kind](_formula_unary(t))
    return _formula_primary(t)


def _formula_primary(t: _Tokens):
    kind = t.peek()
    if kind == "false":
        t.take("false")
        return Falsum()
    if kind == "true":
        t.take("true")
        return Top()
    if kind == "ident":
        return Atom(t.take("ident"))
    if kind == "(":
        t.take("(")
        phi = _formula_imp(t)
        t.take(")", "')'")
        return phi
    raise ParseError(t.text, t.pos(), "an atom, 'false', 'true', prefix operator or '('")


# ---------------------------------------------------------------------------
# Relational formulas

def _rwff_imp(t: _Tokens):
    left = _rwff_or(t)
    if t.peek() == "=>":
        t.take("=>")
        return RImplies(left, _rwff_imp(t))
    return left


def _rwff_or(t: _Tokens):
    left = _rwff_and(t)
    if t.peek() == "\\/":
        t.take("\\/")
        return ROr(left, _rwff_or(t))
    return left


def _rwff_and(t: _Tokens):
    left = _rwff_unary(t)
    if t.peek() == "/\\":
        t.take("/\\")
        return RAnd(left, _rwff_and(t))
    return left


def _rwff_unary(t: _Tokens):
    kind = t.peek()
    if kind == "!":
        t.take("!")
        return RNot(_rwff_unary(t))
    if kind == "forall":
        t.take("forall")
        var = t.take("ident", "a bound label")
        t.take(".", "'.'")
        return Forall(var, _rwff_imp(t))
    if kind == "exists":
        t.take("exists")
        var = t.take("ident", "a bound label")
        t.take(".", "'.'")
        return Exists(var, _rwff_imp(t))
    return _rwff_primary(t)


def _rwff_primary(t: _Tokens):
    kind = t.peek()
    if kind == "empty":
        t.take("empty")
        return Empty()
    if kind == "(":
        t.take("(")
        rho = _rwff_imp(t)
        t.take(")", "')'")
        return rho
    if kind == "ident":
        x = t.take("ident")
        op = t.peek()
        if op == "<":
            t.take("<")
            return Less(x, t.take("ident", "a label"))
        if op == "=":
            t.take("=")
            return Eq(x, t.take("ident", "a label"))
        if op == "<.":
            t.take("<.")
            return Prec(x, t.take("ident", "a label"))
        raise ParseError(t.text, t.pos(), "'<', '=' or '<.'")
    raise ParseError(t.text, t.pos(), "'empty', '!', a quantifier, a label or '('")


# ---------------------------------------------------------------------------
# Entry points

def parse_formula(text: str):
    t = _Tokens(text)
    phi = _formula_imp(t)
    t.done()
    return phi


def parse_rwff(text: str):
    t = _Tokens(text)
    rho = _rwff_imp(t)
    t.done()
    return rho


def parse_lwff(text: str) -> Lwff:
    t = _Tokens(text)
    label = t.take("ident", "a label")
    t.take(":", "':'")
    phi = _formula_imp(t)
    t.done()
    return Lwff(label, phi)


def parse(kind: str, text: str):
    """Parse ``text`` as one of ``formula | rwff | lwff | any``.

    ``any`` sniffs an lwff by a top-level ``label :`` prefix and otherwise
    parses a relational formula.
    """
    if kind == "formula":
        return parse_formula(text)
    if kind == "rwff":
        return parse_rwff(text)
    if kind == "lwff":
        return parse_lwff(text)
    if kind == "any":
        t = _Tokens(text)
        if len(t.toks) >= 2 and t.toks[0][0] == "ident" and t.toks[1][0] == ":":
            return parse_lwff(text)
        return parse_rwff(text)
    raise ValueError(f"unknown parse kind {kind!r}")


# ---------------------------------------------------------------------------
# Rendering

# precedence levels, looser binds lower
_IMP, _OR, _AND, _UNARY, _PRIMARY = 0, 1, 2, 3, 4


def _wrap(text: str, level: int, context: int) -> str:
    return f"({text})" if level < context else text


def _render_formula(phi, context: int) -> str:
    if isinstance(phi, Atom):
        return phi.name
    if isinstance(phi, Falsum):
        return "false"
    if isinstance(phi, Top):
        return "true"
    if isinstance(phi, Implies):
        inner = f"{_render_formula(phi.left, _OR)} -> {_render_formula(phi.right, _IMP)}"
        return _wrap(inner, _IMP, context)
    if isinstance(phi, Or):
        inner = f"{_render_formula(phi.left, _AND)} | {_render_formula(phi.right, _OR)}"
        return _wrap(inner, _OR, context)
    if isinstance(phi, And):
        inner = f"{_render_formula(phi.left, _UNARY)} & {_render_formula(phi.right, _AND)}"
        return _wrap(inner, _AND, context)
    ops = {Not: "~", G: "G ", H: "H ", F: "F ", P: "P ", X: "X "}
    for cls, op in ops.items():
        if isinstance(phi, cls):
            return f"{op}{_render_formula(phi.body, _UNARY)}"
    raise TypeError(f"cannot render {phi!r}")


def _render_rwff(rho, context: int) -> str:
    if isinstance(rho, Empty):
        return "empty"
    if isinstance(rho, Less):
        return f"{rho.x} < {rho.y}"
    if isinstance(rho, Eq):
        return f"{rho.x} = {rho.y}"
    if isinstance(rho, Prec):
        return f"{rho.x} <. {rho.y}"
    if isinstance(rho, RImplies):
        inner = f"{_render_rwff(rho.left, _OR)} => {_render_rwff(rho.right, _IMP)}"
        return _wrap(inner, _IMP, context)
    if isinstance(rho, ROr):
        inner = f"{_render_rwff(rho.left, _AND)} \\/ {_render_rwff(rho.right, _OR)}"
        return _wrap(inner, _OR, context)
    if isinstance(rho, RAnd):
        inner = f"{_render_rwff(rho.left, _UNARY)} /\\ {_render_rwff(rho.right, _AND)}"
        return _wrap(inner, _AND, context)
    if isinstance(rho, RNot):
        return f"!{_render_rwff(rho.body, _UNARY)}"
    if isinstance(rho, Forall):
        inner = f"forall {rho.var}. {_render_rwff(rho.body, _IMP)}"
        return _wrap(inner, _IMP, context)
    if isinstance(rho, Exists):
        inner = f"exists {rho.var}. {_render_rwff(rho.body, _IMP)}"
        return _wrap(inner, _IMP, context)
    raise TypeError(f"cannot render {rho!r}")


def render(entity) -> str:
    """Surface text; derived forms keep their surface spelling."""
    if isinstance(entity, Lwff):
        return f"{entity.label} : {_render_formula(entity.formula, _IMP)}"
    if is_formula(entity):
        return _render_formula(entity, _IMP)
    return _render_rwff(entity, _IMP)
