"""CNF to DNNF compilation: exhaustive DPLL with component decomposition and caching.

Procedure for a clause set:

1. unit-propagate; implied literals become And-conjuncts;
2. split the residual clauses into variable-disjoint components, compile each
   independently and conjoin the results;
3. inside a component branch on the variable with the most occurrences (ties
   go to the smaller scope index): ``(x & C|x) | (~x & C|~x)``;
4. memoize components keyed by their sorted clause lists.

Every And node joins variable-disjoint parts, so the output is decomposable.
No preprocessing (subsumption, pure literals) is done.
"""
from __future__ import annotations

import collections
import sys
import typing as t
from dataclasses import dataclass

from .logic import Cnf, ParseError
from .nnf import Builder, NnfCircuit, smooth as smooth_circuit

# incremented once per compile_cnf / compile_clauses call
counters: collections.Counter = collections.Counter()


@dataclass
class CompileStats:
    decisions: int = 0
    cache_hits: int = 0
    components: int = 0
    unit_literals: int = 0


def _propagate(clauses):
    """Unit propagation.  Returns ``(units, residual)`` or ``None`` on conflict."""
    units: dict[int, bool] = {}
    clauses = list(clauses)
    if any(not c for c in clauses):
        return None
    while True:
        unit = next((c[0] for c in clauses if len(c) == 1), None)
        if unit is None:
            return units, clauses
        units[abs(unit)] = unit > 0
        nxt = []
        for c in clauses:
            if unit in c:
                continue
            if -unit in c:
                c = tuple(l for l in c if l != -unit)
                if not c:
                    return None
            nxt.append(c)
        clauses = nxt


def _components(clauses):
    parent: dict[int, int] = {}

    def find(x):
        while parent.setdefault(x, x) != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for c in clauses:
        r = find(abs(c[0]))
        for l in c[1:]:
            s = find(abs(l))
            if s != r:
                parent[s] = r
    groups: dict[int, list] = {}
    for c in clauses:
        groups.setdefault(find(abs(c[0])), []).append(c)
    return [tuple(sorted(g)) for g in groups.values()]


def _assign(clauses, lit):
    out = []
    for c in clauses:
        if lit in c:
            continue
        if -lit in c:
            c = tuple(l for l in c if l != -lit)
        out.append(c)
    return out


class _Compiler:
    def __init__(self, builder: Builder, use_cache: bool, stats: CompileStats):
        self.b = builder
        self.use_cache = use_cache
        self.cache: dict[tuple, int] = {}
        self.stats = stats

    def clauses(self, clauses) -> int:
        b = self.b
        res = _propagate(clauses)
        if res is None:
            return b.false()
        units, residual = res
        self.stats.unit_literals += len(units)
        parts = [b.signed(v if val else -v) for v, val in sorted(units.items())]
        if residual:
            comps = sorted(_components(residual))
            if len(comps) > 1:
                self.stats.components += len(comps)
            for comp in comps:
                node = self.component(comp)
                if b.is_false(node):
                    return node
                parts.append(node)
        return b.conj(parts)

    def component(self, comp: tuple) -> int:
        if self.use_cache:
            hit = self.cache.get(comp)
            if hit is not None:
                self.stats.cache_hits += 1
                return hit
        counts: collections.Counter = collections.Counter()
        for c in comp:
            for l in c:
                counts[abs(l)] += 1
        var = min(counts, key=lambda v: (-counts[v], v))
        self.stats.decisions += 1
        b = self.b
        branches = []
        for lit in (var, -var):
            sub = self.clauses(_assign(comp, lit))
            branches.append(b.conj([b.signed(lit), sub]))
        node = b.disj(branches)
        if self.use_cache:
            self.cache[comp] = node
        return node


def compile_clauses(nvars: int, clauses: t.Iterable[t.Sequence[int]],
                    names: t.Sequence[str] | None = None, smooth: bool = True,
                    use_cache: bool = True, stats: CompileStats | None = None) -> NnfCircuit:
    """Compile DIMACS-style integer clauses over variables ``1..nvars``."""
    counters["compile"] += 1
    names = list(names) if names is not None else [f"v{i}" for i in range(1, nvars + 1)]
    if len(names) != nvars:
        raise ValueError("names must list one name per variable")
    stats = stats if stats is not None else CompileStats()
    norm = set()
    for c in clauses:
        lits = set(int(l) for l in c)
        if any(l == 0 or abs(l) > nvars for l in lits):
            raise ValueError(f"literal out of range in clause {tuple(c)}")
        if any(-l in lits for l in lits):
            continue
        norm.add(tuple(sorted(lits, key=lambda l: (abs(l), l))))
    b = Builder(names)
    comp = _Compiler(b, use_cache, stats)
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 10 * nvars + 1000))
    try:
        root = comp.clauses(sorted(norm))
    finally:
        sys.setrecursionlimit(limit)
    circuit = b.build(root)
    if smooth:
        circuit = smooth_circuit(circuit, complete=True)
    return circuit


def compile_cnf(cnf: Cnf, scope: t.Sequence[str] | None = None, smooth: bool = True,
                use_cache: bool = True, stats: CompileStats | None = None) -> NnfCircuit:
    """Compile a CNF of :class:`Literal` clauses into a decomposable circuit.

    ``scope`` fixes the variable order (and may add variables the CNF does not
    mention); by default the CNF's variables are sorted by name.  Unsatisfiable
    input yields the ``false`` circuit.
    """
    mentioned = {l.var for c in cnf for l in c}
    if scope is None:
        scope = sorted(mentioned)
    missing = mentioned.difference(scope)
    if missing:
        raise ValueError(f"variables {sorted(missing)} are not in the scope")
    index = {v: i for i, v in enumerate(scope, 1)}
    clauses = [[index[l.var] if l.positive else -index[l.var] for l in c] for c in cnf]
    return compile_clauses(len(scope), clauses, scope, smooth, use_cache, stats)


# -- DIMACS -------------------------------------------------------------------

def loads_dimacs(text: str) -> tuple[int, list[tuple[int, ...]], list[str]]:
    """Parse DIMACS CNF.  Returns ``(nvars, clauses, names)``.

    ``c var <i> <name>`` comments name variables; others default to ``v<i>``.
    """
    nvars = None
    declared = None
    names: dict[int, str] = {}
    clauses = []
    current: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        parts = raw.split()
        if not parts or parts[0] in ("%",):
            continue
        if parts[0] == "c":
            if len(parts) == 4 and parts[1] == "var":
                names[int(parts[2])] = parts[3]
            continue
        if parts[0] == "p":
            if len(parts) != 4 or parts[1] != "cnf":
                raise ParseError("expected 'p cnf <vars> <clauses>'", lineno, 1)
            nvars, declared = int(parts[2]), int(parts[3])
            continue
        if nvars is None:
            raise ParseError("clause before problem line", lineno, 1)
        for tok in parts:
            try:
                lit = int(tok)
            except ValueError:
                raise ParseError(f"bad literal {tok!r}", lineno, 1) from None
            if abs(lit) > nvars:
                raise ParseError(f"literal {lit} exceeds declared variable count", lineno, 1)
            if lit == 0:
                clauses.append(tuple(current))
                current = []
            else:
                current.append(lit)
    if nvars is None:
        raise ParseError("missing problem line", 1, 1)
    if current:
        clauses.append(tuple(current))
    if declared is not None and declared != len(clauses):
        raise ParseError(f"problem line announces {declared} clauses, found {len(clauses)}", 1, 1)
    return nvars, clauses, [names.get(i, f"v{i}") for i in range(1, nvars + 1)]


def dumps_dimacs(cnf: Cnf, scope: t.Sequence[str]) -> str:
    index = {v: i for i, v in enumerate(scope, 1)}
    rows = sorted(sorted(index[l.var] if l.positive else -index[l.var] for l in c) for c in cnf)
    lines = [f"c var {i} {v}" for v, i in index.items()]
    lines.append(f"p cnf {len(scope)} {len(rows)}")
    lines += [" ".join(map(str, r + [0])) for r in rows]
    return "\n".join(lines) + "\n"


def compile_base(base, use_cache: bool = True,
                 stats: CompileStats | None = None):
    """Normalize, conjoin the hard part, convert to CNF and compile.

    Returns a :class:`~penaltydnnf.engine.CompiledBase`.
    """
    from .base import hard_part
    from .engine import CompiledBase
    from .logic import to_cnf
    from .normalform import normalize

    nf = normalize(base)
    cnf = to_cnf(hard_part(nf.base))
    circuit = compile_cnf(cnf, nf.base.variables, smooth=True, use_cache=use_cache, stats=stats)
    return CompiledBase(circuit, nf.penalties, nf.original_vars)


__all__ = ["CompileStats", "compile_cnf", "compile_clauses", "compile_base",
           "loads_dimacs", "dumps_dimacs", "counters"]
