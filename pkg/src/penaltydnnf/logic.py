"""Propositional formulas, literals, clauses and the formula text syntax.

Grammar (lowest to highest precedence)::

    formula := iff
    iff     := imp ("<->" imp)*
    imp     := disj ("->" imp)?
    disj    := conj ("|" conj)*
    conj    := neg ("&" neg)*
    neg     := "~" neg | atom
    atom    := "true" | "false" | IDENT | "(" formula ")"

``#`` starts a comment that runs to the end of the line.
"""
from __future__ import annotations

import itertools
import re
import typing as t
from dataclasses import dataclass

__all__ = [
    "Formula", "Const", "Var", "Not", "And", "Or", "Implies", "Iff",
    "TRUE", "FALSE", "conj", "disj",
    "Literal", "Term", "Clause", "Cnf", "ContradictionError",
    "ParseError", "UnassignedVariableError",
    "parse_formula", "parse_literals", "to_text", "evaluate", "variables",
    "ordered_variables", "to_cnf", "cnf_to_formula", "term_to_formula",
    "format_world", "all_worlds",
]

World = t.Mapping[str, bool]

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class Formula:
    """Base class of the formula AST. Nodes are immutable and hashable."""

    __slots__ = ()

    def __and__(self, other: Formula) -> Formula:
        return conj(self, other)

    def __or__(self, other: Formula) -> Formula:
        return disj(self, other)

    def __invert__(self) -> Formula:
        return Not(self)

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True, slots=True)
class Const(Formula):
    value: bool


@dataclass(frozen=True, slots=True)
class Var(Formula):
    name: str

    def __post_init__(self):
        if not _IDENT.match(self.name) or self.name in ("true", "false"):
            raise ValueError(f"invalid variable name {self.name!r}")


@dataclass(frozen=True, slots=True)
class Not(Formula):
    child: Formula


@dataclass(frozen=True, slots=True)
class And(Formula):
    children: tuple[Formula, ...]


@dataclass(frozen=True, slots=True)
class Or(Formula):
    children: tuple[Formula, ...]


@dataclass(frozen=True, slots=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Iff(Formula):
    left: Formula
    right: Formula


TRUE = Const(True)
FALSE = Const(False)


def _nary(cls, empty, items):
    out: list[Formula] = []
    seen = set()
    for item in items:
        parts = item.children if isinstance(item, cls) else (item,)
        for p in parts:
            if p not in seen:
                seen.add(p)
                out.append(p)
    if not out:
        return empty
    if len(out) == 1:
        return out[0]
    return cls(tuple(out))


def conj(*items: Formula) -> Formula:
    """Flattened, duplicate-free conjunction (``true`` when empty)."""
    return _nary(And, TRUE, items)


def disj(*items: Formula) -> Formula:
    """Flattened, duplicate-free disjunction (``false`` when empty)."""
    return _nary(Or, FALSE, items)


# -- literals, clauses, terms -------------------------------------------------

@dataclass(frozen=True, order=True, slots=True)
class Literal:
    var: str
    positive: bool = True

    def __invert__(self) -> Literal:
        return Literal(self.var, not self.positive)

    def __str__(self) -> str:
        return self.var if self.positive else "~" + self.var

    def holds_in(self, world: World) -> bool:
        try:
            return world[self.var] == self.positive
        except KeyError:
            raise UnassignedVariableError(self.var) from None


class ContradictionError(ValueError):
    """A term would contain a literal together with its negation."""


class Term(frozenset):
    """Conjunction of literals. Contradictory terms cannot be built."""

    def __new__(cls, literals: t.Iterable[Literal] = ()):
        self = super().__new__(cls, literals)
        pos = {lit.var for lit in self if lit.positive}
        clash = sorted(v for v in pos if Literal(v, False) in self)
        if clash:
            raise ContradictionError(f"term contains both polarities of {clash[0]!r}")
        return self

    def variables(self) -> frozenset[str]:
        return frozenset(lit.var for lit in self)

    def as_dict(self) -> dict[str, bool]:
        return {lit.var: lit.positive for lit in self}

    def __str__(self) -> str:
        return ",".join(str(lit) for lit in sorted(self)) or "true"


Clause = frozenset  # frozenset[Literal]; empty clause is false
Cnf = frozenset  # frozenset[Clause]; empty CNF is true


# -- parsing ------------------------------------------------------------------

class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


class UnassignedVariableError(KeyError):
    pass


_TOKEN = re.compile(
    r"(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<comment>#[^\n]*)"
    r"|(?P<op><->|->|[|&~()])|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
)


def _tokenize(text: str):
    pos, line, line_start = 0, 1, 0
    tokens = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind in ("op", "ident"):
            tokens.append((kind, m.group(), line, pos - line_start + 1))
        pos = m.end()
    tokens.append(("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, value=None):
        tok = self.tokens[self.i]
        if value is not None and tok[1] != value:
            found = tok[1] or "end of input"
            raise ParseError(f"expected {value!r}, found {found!r}", tok[2], tok[3])
        self.i += 1
        return tok

    def formula(self):
        node = self.imp()
        while self.peek()[1] == "<->":
            self.take()
            node = Iff(node, self.imp())
        return node

    def imp(self):
        node = self.disj()
        if self.peek()[1] == "->":
            self.take()
            return Implies(node, self.imp())
        return node

    def disj(self):
        items = [self.conj()]
        while self.peek()[1] == "|":
            self.take()
            items.append(self.conj())
        return disj(*items)

    def conj(self):
        items = [self.neg()]
        while self.peek()[1] == "&":
            self.take()
            items.append(self.neg())
        return conj(*items)

    def neg(self):
        if self.peek()[1] == "~":
            self.take()
            return Not(self.neg())
        return self.atom()

    def atom(self):
        kind, value, line, col = self.peek()
        if kind == "ident":
            self.take()
            if value == "true":
                return TRUE
            if value == "false":
                return FALSE
            return Var(value)
        if value == "(":
            self.take()
            node = self.formula()
            self.take(")")
            return node
        raise ParseError(f"unexpected {value or 'end of input'!r}", line, col)


def parse_formula(text: str) -> Formula:
    """Parse ``text`` into a :class:`Formula`.

    Raises :class:`ParseError` (with line and column) on malformed or empty input.
    """
    parser = _Parser(text)
    if parser.peek()[0] == "eof":
        _, _, line, col = parser.peek()
        raise ParseError("empty formula", line, col)
    node = parser.formula()
    kind, value, line, col = parser.peek()
    if kind != "eof":
        raise ParseError(f"unexpected {value!r}", line, col)
    return node


def parse_literals(text: str) -> Term:
    """Parse a literal list such as ``"x,~z"`` or ``"x & ~z"`` into a term."""
    lits = []
    for part in re.split(r"[,&]", text):
        part = part.strip()
        if not part or part == "true":
            continue
        positive = True
        while part.startswith("~"):
            positive = not positive
            part = part[1:].strip()
        if not _IDENT.match(part) or part == "false":
            raise ParseError(f"not a literal: {part!r}", 1, 1)
        lits.append(Literal(part, positive))
    return Term(lits)


_PREC = {Iff: 1, Implies: 2, Or: 3, And: 4, Not: 5}


def _prec(node):
    return _PREC.get(type(node), 6)


def to_text(node: Formula) -> str:
    """Render with the minimum parentheses needed to parse back to ``node``."""

    def wrap(child, min_prec):
        s = to_text(child)
        return f"({s})" if _prec(child) < min_prec else s

    if isinstance(node, Const):
        return "true" if node.value else "false"
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Not):
        return "~" + wrap(node.child, 5)
    if isinstance(node, And):
        return " & ".join(wrap(c, 5) for c in node.children)
    if isinstance(node, Or):
        return " | ".join(wrap(c, 4) for c in node.children)
    if isinstance(node, Implies):
        return f"{wrap(node.left, 3)} -> {wrap(node.right, 2)}"
    if isinstance(node, Iff):
        return f"{wrap(node.left, 1)} <-> {wrap(node.right, 2)}"
    raise TypeError(node)


# -- semantics ----------------------------------------------------------------

def evaluate(node: Formula, world: World) -> bool:
    """Classical truth value of ``node`` in ``world``."""
    if isinstance(node, Var):
        try:
            return bool(world[node.name])
        except KeyError:
            raise UnassignedVariableError(node.name) from None
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Not):
        return not evaluate(node.child, world)
    if isinstance(node, And):
        return all(evaluate(c, world) for c in node.children)
    if isinstance(node, Or):
        return any(evaluate(c, world) for c in node.children)
    if isinstance(node, Implies):
        return not evaluate(node.left, world) or evaluate(node.right, world)
    if isinstance(node, Iff):
        return evaluate(node.left, world) == evaluate(node.right, world)
    raise TypeError(node)


def ordered_variables(node: Formula) -> list[str]:
    """Variables of ``node`` in order of first occurrence (left to right)."""
    out: dict[str, None] = {}

    def walk(n):
        if isinstance(n, Var):
            out.setdefault(n.name)
        elif isinstance(n, Not):
            walk(n.child)
        elif isinstance(n, (And, Or)):
            for c in n.children:
                walk(c)
        elif isinstance(n, (Implies, Iff)):
            walk(n.left)
            walk(n.right)

    walk(node)
    return list(out)


def variables(node: Formula) -> frozenset[str]:
    return frozenset(ordered_variables(node))


def all_worlds(scope: t.Sequence[str]) -> t.Iterator[dict[str, bool]]:
    """Every world over ``scope``; ``True`` is tried before ``False``, first variable slowest."""
    for values in itertools.product((True, False), repeat=len(scope)):
        yield dict(zip(scope, values))


def format_world(world: World, order: t.Sequence[str]) -> str:
    return " ".join(v if world[v] else "~" + v for v in order)


# -- CNF conversion -----------------------------------------------------------

def _is_tautology(clause) -> bool:
    return any(Literal(l.var, not l.positive) in clause for l in clause if l.positive)


def _simplify(clauses):
    """Drop tautologies, duplicates and subsumed clauses (keeps first-seen order)."""
    uniq = list(dict.fromkeys(c for c in clauses if not _is_tautology(c)))
    uniq_sorted = sorted(uniq, key=len)
    kept = []
    for c in uniq_sorted:
        if not any(k <= c for k in kept):
            kept.append(c)
    keep = set(kept)
    return [c for c in uniq if c in keep]


def _product(left, right):
    return _simplify(a | b for a in left for b in right)


def _cnf(node, positive):
    if isinstance(node, Const):
        return [] if node.value == positive else [frozenset()]
    if isinstance(node, Var):
        return [frozenset((Literal(node.name, positive),))]
    if isinstance(node, Not):
        return _cnf(node.child, not positive)
    if isinstance(node, Implies):
        return _cnf(Or((Not(node.left), node.right)), positive)
    if isinstance(node, Iff):
        a, b = node.left, node.right
        if positive:
            return _simplify(_cnf(Or((Not(a), b)), True) + _cnf(Or((a, Not(b))), True))
        return _simplify(_cnf(Or((a, b)), True) + _cnf(Or((Not(a), Not(b))), True))
    conjunctive = isinstance(node, And) == positive
    parts = [_cnf(c, positive) for c in node.children]
    if conjunctive:
        return _simplify(itertools.chain.from_iterable(parts))
    acc = [frozenset()]
    for part in parts:
        acc = _product(acc, part)
        if not acc:
            break
    return acc


def to_cnf(node: Formula) -> Cnf:
    """Logically equivalent CNF by distribution (no auxiliary variables).

    Size may be exponential in the nesting depth of the input.
    """
    return frozenset(_cnf(node, True))


def cnf_to_formula(cnf: Cnf) -> Formula:
    clauses = sorted((sorted(c) for c in cnf), key=lambda c: (len(c), c))
    return conj(*(disj(*(Var(l.var) if l.positive else Not(Var(l.var)) for l in c))
                  for c in clauses))


def term_to_formula(term: t.Iterable[Literal]) -> Formula:
    return conj(*(Var(l.var) if l.positive else Not(Var(l.var)) for l in sorted(term)))
