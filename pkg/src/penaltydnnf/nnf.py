"""NNF circuits stored as deduplicated, topologically ordered node tables.

Node kinds follow the c2d convention: ``true`` is an And node without
children and ``false`` an Or node without children.  Literals are signed
1-based indices into the circuit scope.

Construction goes through :class:`Builder`, which flattens nested And/Or
nodes, drops neutral constants, propagates absorbing ones, and hash-conses
identical nodes.  A side effect worth relying on: in a decomposable circuit
produced by the builder, every node other than ``false`` is satisfiable.
"""
from __future__ import annotations

import typing as t
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .kernels import AND, LIT, OR
from .logic import Clause, Literal, Term, _is_tautology


class CircuitError(ValueError):
    pass


class NotDecomposableError(CircuitError):
    pass


class NotSmoothError(CircuitError):
    pass


class Builder:
    """Append-only node table with structural sharing."""

    def __init__(self, scope: t.Sequence[str]):
        self.scope = tuple(scope)
        self.index = {v: i for i, v in enumerate(self.scope)}
        if len(self.index) != len(self.scope):
            raise ValueError("duplicate variable in scope")
        self.kinds: list[int] = []
        self.lits: list[int] = []
        self.children: list[tuple[int, ...]] = []
        self._table: dict[tuple, int] = {}

    def _node(self, kind, lit, kids):
        key = (kind, lit, kids)
        nid = self._table.get(key)
        if nid is None:
            nid = len(self.kinds)
            self.kinds.append(kind)
            self.lits.append(lit)
            self.children.append(kids)
            self._table[key] = nid
        return nid

    def true(self) -> int:
        return self._node(AND, 0, ())

    def false(self) -> int:
        return self._node(OR, 0, ())

    def const(self, value: bool) -> int:
        return self.true() if value else self.false()

    def lit(self, var: str, positive: bool = True) -> int:
        i = self.index[var] + 1
        return self._node(LIT, i if positive else -i, ())

    def signed(self, lit: int) -> int:
        return self._node(LIT, lit, ())

    def is_true(self, nid) -> bool:
        return self.kinds[nid] == AND and not self.children[nid]

    def is_false(self, nid) -> bool:
        return self.kinds[nid] == OR and not self.children[nid]

    def _gather(self, kind, items):
        kids = set()
        for c in items:
            if self.kinds[c] == kind and self.children[c]:
                kids.update(self.children[c])
            else:
                kids.add(c)
        return kids

    def conj(self, items: t.Iterable[int]) -> int:
        kids = self._gather(AND, items)
        if any(self.is_false(c) for c in kids):
            return self.false()
        kids = sorted(c for c in kids if not self.is_true(c))
        if len(kids) == 1:
            return kids[0]
        return self._node(AND, 0, tuple(kids))

    def disj(self, items: t.Iterable[int]) -> int:
        kids = self._gather(OR, items)
        if any(self.is_true(c) for c in kids):
            return self.true()
        kids = sorted(c for c in kids if not self.is_false(c))
        if len(kids) == 1:
            return kids[0]
        return self._node(OR, 0, tuple(kids))

    def build(self, root: int, scope: t.Sequence[str] | None = None) -> NnfCircuit:
        """Freeze the sub-DAG reachable from ``root`` into a circuit.

        Unreachable nodes are dropped; surviving nodes keep their relative order.
        """
        reach = np.zeros(len(self.kinds), dtype=bool)
        reach[root] = True
        for i in range(root, -1, -1):
            if reach[i]:
                for c in self.children[i]:
                    reach[c] = True
        keep = np.flatnonzero(reach)
        remap = {int(old): new for new, old in enumerate(keep)}
        kinds = [self.kinds[i] for i in keep]
        lits = [self.lits[i] for i in keep]
        children = [tuple(remap[c] for c in self.children[i]) for i in keep]
        return NnfCircuit(self.scope if scope is None else tuple(scope),
                          kinds, lits, children)


@dataclass(frozen=True)
class CheckReport:
    decomposable: bool
    smooth: bool
    bad_and: list[int] = field(default_factory=list)
    bad_or: list[int] = field(default_factory=list)


class NnfCircuit:
    """Immutable rooted DAG; the root is the last node of the table."""

    def __init__(self, scope, kinds, lits, children):
        self.scope = tuple(scope)
        self.kinds = tuple(kinds)
        self.lits = tuple(lits)
        self.children = tuple(children)
        if not self.kinds:
            raise CircuitError("empty node table")
        for i, kids in enumerate(self.children):
            if any(c >= i or c < 0 for c in kids):
                raise CircuitError(f"node {i} references a non-earlier node")
        n = len(self.scope)
        if any(abs(lit) > n for lit in self.lits):
            raise CircuitError("literal outside scope")
        self._masks = None
        self._layout = None
        self._report = None

    # -- basic structure --------------------------------------------------
    @property
    def root(self) -> int:
        return len(self.kinds) - 1

    @property
    def node_count(self) -> int:
        return len(self.kinds)

    @property
    def edge_count(self) -> int:
        return sum(len(c) for c in self.children)

    @property
    def size(self) -> int:
        return self.node_count + self.edge_count

    def is_const(self, value: bool) -> bool:
        r = self.root
        return self.kinds[r] == (AND if value else OR) and not self.children[r]

    @property
    def masks(self) -> list[int]:
        """Variable set of every node as a bitmask over scope indices."""
        if self._masks is None:
            masks = []
            for kind, lit, kids in zip(self.kinds, self.lits, self.children):
                if kind == LIT:
                    masks.append(1 << (abs(lit) - 1))
                else:
                    m = 0
                    for c in kids:
                        m |= masks[c]
                    masks.append(m)
            self._masks = masks
        return self._masks

    def varset(self, node: int | None = None) -> frozenset[str]:
        m = self.masks[self.root if node is None else node]
        return frozenset(v for i, v in enumerate(self.scope) if m >> i & 1)

    @property
    def layout(self) -> kernels.Layout:
        if self._layout is None:
            ptr = np.zeros(len(self.kinds) + 1, dtype=np.int64)
            ptr[1:] = np.cumsum([len(c) for c in self.children])
            idx = np.fromiter((c for kids in self.children for c in kids),
                              dtype=np.int64, count=int(ptr[-1]))
            self._layout = kernels.Layout(self.kinds, self.lits, ptr, idx)
        return self._layout

    def check(self) -> CheckReport:
        if self._report is None:
            self._report = check(self)
        return self._report

    @property
    def decomposable(self) -> bool:
        return self.check().decomposable

    @property
    def smooth_flag(self) -> bool:
        return self.check().smooth

    def literal(self, node: int) -> Literal:
        lit = self.lits[node]
        return Literal(self.scope[abs(lit) - 1], lit > 0)

    def __eq__(self, other):
        if not isinstance(other, NnfCircuit):
            return NotImplemented
        return (self.scope == other.scope and self.kinds == other.kinds
                and self.lits == other.lits and self.children == other.children)

    def __hash__(self):
        return hash((self.scope, self.kinds, self.lits, self.children))

    def __repr__(self):
        return (f"<NnfCircuit {self.node_count} nodes, {self.edge_count} edges, "
                f"{len(self.scope)} vars>")

    # -- evaluation -------------------------------------------------------
    def values_under(self, assignment) -> np.ndarray:
        """Per-node min-sum values for a (batched) partial assignment array."""
        pos, neg = kernels.assignment_costs(assignment)
        return kernels.minsum(self.layout, pos, neg)

    def evaluate_worlds(self, worlds) -> np.ndarray:
        """Truth value of the root for each row of a 0/1 matrix over the scope."""
        worlds = np.asarray(worlds, dtype=np.int8).reshape(-1, len(self.scope))
        vals = self.values_under(worlds)
        return vals[:, self.root] < np.inf

    def evaluate(self, world: t.Mapping[str, bool]) -> bool:
        row = np.array([1 if world[v] else 0 for v in self.scope], dtype=np.int8)
        return bool(self.evaluate_worlds(row[None, :])[0])

    def is_consistent(self) -> bool:
        """Satisfiability; exact on decomposable circuits."""
        return bool(self.values_under(np.full(len(self.scope), -1))[self.root] < np.inf)

    def rebuild(self, scope, leaf) -> NnfCircuit:
        """Copy into a fresh builder, replacing each literal leaf by ``leaf(builder, Literal)``."""
        b = Builder(scope)
        new = []
        for i, (kind, kids) in enumerate(zip(self.kinds, self.children)):
            if kind == LIT:
                new.append(leaf(b, self.literal(i)))
            elif kind == AND:
                new.append(b.conj(new[c] for c in kids))
            else:
                new.append(b.disj(new[c] for c in kids))
        return b.build(new[-1])


def check(c: NnfCircuit) -> CheckReport:
    """Decomposability and smoothness flags plus offending node ids."""
    masks = c.masks
    bad_and, bad_or = [], []
    for i, (kind, kids) in enumerate(zip(c.kinds, c.children)):
        if kind == AND:
            acc = 0
            for k in kids:
                if acc & masks[k]:
                    bad_and.append(i)
                    break
                acc |= masks[k]
        elif kind == OR and kids:
            m = masks[i]
            if any(masks[k] != m for k in kids):
                bad_or.append(i)
    return CheckReport(not bad_and, not bad_or, bad_and, bad_or)


def _require_decomposable(c: NnfCircuit):
    if not c.decomposable:
        raise NotDecomposableError(f"And nodes {c.check().bad_and[:5]} share variables")


def _require_smooth(c: NnfCircuit):
    _require_decomposable(c)
    if not c.smooth_flag:
        raise NotSmoothError(f"Or nodes {c.check().bad_or[:5]} are not smooth")


def smooth(c: NnfCircuit, complete: bool = False) -> NnfCircuit:
    """Equivalent smooth circuit.

    Each Or child missing some variables of its parent is conjoined with one
    shared ``v | ~v`` node per missing variable.  With ``complete=True`` the
    root is also extended to mention every scope variable.
    """
    _require_decomposable(c)
    masks = c.masks
    b = Builder(c.scope)
    gadgets: dict[int, int] = {}

    def gadget(i):
        if i not in gadgets:
            v = c.scope[i]
            gadgets[i] = b.disj([b.lit(v, True), b.lit(v, False)])
        return gadgets[i]

    def pad(node_new, missing):
        if not missing:
            return node_new
        extra = [gadget(i) for i in range(missing.bit_length()) if missing >> i & 1]
        return b.conj([node_new, *extra])

    new = []
    for i, (kind, kids) in enumerate(zip(c.kinds, c.children)):
        if kind == LIT:
            new.append(b.signed(c.lits[i]))
        elif kind == AND:
            new.append(b.conj(new[k] for k in kids))
        else:
            m = masks[i]
            new.append(b.disj(pad(new[k], m & ~masks[k]) for k in kids))
    root = new[-1]
    if complete and not b.is_false(root):
        full = (1 << len(c.scope)) - 1
        root = pad(root, full & ~masks[c.root])
    return b.build(root)


def condition(c: NnfCircuit, term: t.Iterable[Literal]) -> NnfCircuit:
    """Substitute constants for the variables of ``term``; they leave the scope."""
    term = term if isinstance(term, Term) else Term(term)
    fixed = term.as_dict()
    if not fixed.keys() & set(c.scope):
        return c
    scope = [v for v in c.scope if v not in fixed]

    def leaf(b, lit):
        if lit.var in fixed:
            return b.const(fixed[lit.var] == lit.positive)
        return b.lit(lit.var, lit.positive)

    return c.rebuild(scope, leaf)


def forget(c: NnfCircuit, variables: t.Iterable[str]) -> NnfCircuit:
    """Existentially quantify ``variables`` by replacing their leaves with ``true``.

    Only sound on decomposable circuits.
    """
    _require_decomposable(c)
    gone = set(variables) & set(c.scope)
    if not gone:
        return c
    scope = [v for v in c.scope if v not in gone]

    def leaf(b, lit):
        if lit.var in gone:
            return b.true()
        return b.lit(lit.var, lit.positive)

    return c.rebuild(scope, leaf)


def entails_clause(c: NnfCircuit, clause: t.Iterable[Literal]) -> bool:
    """Whether ``c`` entails the disjunction of ``clause``.

    Conditions on the negated clause and tests the result for inconsistency in
    one pass.  Literals over variables the circuit does not mention are
    irrelevant and skipped.
    """
    _require_decomposable(c)
    clause = frozenset(clause)
    if _is_tautology(clause):
        return True
    values = np.full(len(c.scope), -1, dtype=np.int8)
    index = {v: i for i, v in enumerate(c.scope)}
    for lit in clause:
        i = index.get(lit.var)
        if i is not None:
            values[i] = 0 if lit.positive else 1
    return bool(c.values_under(values)[c.root] == np.inf)


def entails_cnf(c: NnfCircuit, cnf: t.Iterable[Clause]) -> bool:
    return all(entails_clause(c, cl) for cl in cnf)


def enumerate_models(c: NnfCircuit, stats: dict | None = None) -> t.Iterator[dict[str, bool]]:
    """Yield each model of a smooth DNNF over its full scope exactly once.

    Worlds come out in lexicographic order over the scope with ``True``
    before ``False``.  The search only descends into satisfiable partial
    assignments, so between two consecutive models it runs at most
    ``2 * len(scope)`` passes over the node table.  Scope variables the
    circuit does not mention are expanded both ways without a pass.

    ``stats``, if given, receives ``passes`` and ``models`` counters.
    """
    _require_smooth(c)
    if stats is not None:
        stats.setdefault("passes", 0)
        stats.setdefault("models", 0)
    n = len(c.scope)
    root_mask = c.masks[c.root]
    values = np.full(n, -1, dtype=np.int8)
    root = c.root

    def sat():
        if stats is not None:
            stats["passes"] += 1
        return c.values_under(values)[root] < np.inf

    if not sat():
        return

    def rec(i):
        if i == n:
            if stats is not None:
                stats["models"] += 1
            yield {v: bool(values[j]) for j, v in enumerate(c.scope)}
            return
        if not root_mask >> i & 1:
            for val in (1, 0):
                values[i] = val
                yield from rec(i + 1)
            values[i] = -1
            return
        values[i] = 1
        pos_ok = sat()
        if pos_ok:
            yield from rec(i + 1)
        values[i] = 0
        if not pos_ok or sat():
            yield from rec(i + 1)
        values[i] = -1

    yield from rec(0)


# -- .nnf files ---------------------------------------------------------------

def dumps_nnf(c: NnfCircuit) -> str:
    """c2d-style text with ``c var <index> <name>`` comments ahead of the header."""
    lines = [f"c var {i} {v}" for i, v in enumerate(c.scope, 1)]
    lines.append(f"nnf {c.node_count} {c.edge_count} {len(c.scope)}")
    for kind, lit, kids in zip(c.kinds, c.lits, c.children):
        ids = "".join(f" {k}" for k in kids)
        if kind == LIT:
            lines.append(f"L {lit}")
        elif kind == AND:
            lines.append(f"A {len(kids)}{ids}")
        else:
            lines.append(f"O 0 {len(kids)}{ids}")
    return "\n".join(lines) + "\n"


def loads_nnf(text: str) -> NnfCircuit:
    """Parse c2d ``.nnf`` text.  Without ``c var`` comments variables are named ``v<i>``.

    The last node is the root.  Nodes pass through :class:`Builder`, so
    constants are propagated and duplicates merged.
    """
    names: dict[int, str] = {}
    header = None
    rows = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        parts = raw.split()
        if not parts:
            continue
        if parts[0] == "c":
            if len(parts) == 4 and parts[1] == "var":
                names[int(parts[2])] = parts[3]
            continue
        if parts[0] == "nnf":
            header = tuple(int(x) for x in parts[1:4])
            continue
        if header is None:
            raise CircuitError(f"line {lineno}: node before 'nnf' header")
        rows.append((lineno, parts))
    if header is None:
        raise CircuitError("missing 'nnf' header")
    nvars = header[2]
    scope = [names.get(i, f"v{i}") for i in range(1, nvars + 1)]
    if len(rows) != header[0]:
        raise CircuitError(f"header announces {header[0]} nodes, found {len(rows)}")
    b = Builder(scope)
    new = []
    try:
        for lineno, parts in rows:
            tag = parts[0]
            if tag == "L":
                lit = int(parts[1])
                if lit == 0 or abs(lit) > nvars:
                    raise CircuitError(f"line {lineno}: bad literal {lit}")
                new.append(b.signed(lit))
                continue
            if tag == "A":
                k, ids = int(parts[1]), parts[2:]
            elif tag == "O":
                k, ids = int(parts[2]), parts[3:]
            else:
                raise CircuitError(f"line {lineno}: unknown node type {tag!r}")
            kids = [int(x) for x in ids]
            if len(kids) != k or any(not 0 <= x < len(new) for x in kids):
                raise CircuitError(f"line {lineno}: bad child list")
            mapped = [new[x] for x in kids]
            new.append(b.conj(mapped) if tag == "A" else b.disj(mapped))
    except (ValueError, IndexError) as exc:
        if isinstance(exc, CircuitError):
            raise
        raise CircuitError(f"malformed node line: {exc}") from None
    if not new:
        raise CircuitError("no nodes")
    return b.build(new[-1])


def circuit_from_literal_tree(scope, tree) -> NnfCircuit:
    """Build a circuit from nested tuples: ``("and", ...)``, ``("or", ...)``, a
    :class:`Literal`, or a bool.  Meant for tests and small hand-made examples.
    """
    b = Builder(scope)

    def go(node):
        if isinstance(node, bool):
            return b.const(node)
        if isinstance(node, Literal):
            return b.lit(node.var, node.positive)
        op, *kids = node
        ids = [go(k) for k in kids]
        return b.conj(ids) if op == "and" else b.disj(ids)

    return b.build(go(tree))
