"""Weight propagation and minimization on smooth DNNF compilations of weighted bases.

The weight of a node is computed bottom-up: ``true`` is 0, ``false`` is inf, a
negative ``holds`` literal costs its penalty, other literals cost 0, And sums
and Or takes the minimum.  Minimization keeps, at every Or node, only the
children that reach the node's weight.  On a smooth circuit the root weight is
the base weight and the minimized circuit's models are the preferred worlds.
"""
from __future__ import annotations

import logging
import math
import typing as t
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import kernels
from .base import format_weight, parse_weight
from .kernels import AND, LIT
from .logic import Cnf, Literal, Term
from .nnf import (
    Builder, CircuitError, NnfCircuit, NotSmoothError, dumps_nnf, entails_clause,
    enumerate_models, forget, loads_nnf, smooth, condition,
)

log = logging.getLogger(__name__)

# var -> (cost of positive literal, cost of negative literal)
LiteralCosts = t.Mapping[str, tuple[float, float]]


class InconsistentError(ValueError):
    """The hard part has no model, so minimization is undefined."""


class UnknownVariableError(ValueError):
    pass


def _require_smooth(c: NnfCircuit):
    rep = c.check()
    if not (rep.decomposable and rep.smooth):
        raise NotSmoothError("weight propagation needs a smooth decomposable circuit")


def leaf_costs(c: NnfCircuit, costs: LiteralCosts) -> tuple[np.ndarray, np.ndarray]:
    pos = np.zeros(len(c.scope))
    neg = np.zeros(len(c.scope))
    for i, v in enumerate(c.scope):
        if v in costs:
            pos[i], neg[i] = costs[v]
    return pos, neg


def annotate(c: NnfCircuit, costs: LiteralCosts) -> np.ndarray:
    """Per-node weights of a smooth circuit under per-literal ``costs``."""
    _require_smooth(c)
    pos, neg = leaf_costs(c, costs)
    return kernels.minsum(c.layout, pos, neg)


def minimize_circuit(c: NnfCircuit, costs: LiteralCosts, epsilon: float = 0.0,
                     weights: np.ndarray | None = None) -> NnfCircuit:
    """Prune every Or child whose weight exceeds its parent's.

    ``epsilon`` widens the retention test to ``w(child) <= w(or) + epsilon``;
    the default 0 is exact equality.
    """
    if weights is None:
        weights = annotate(c, costs)
    if weights[c.root] == math.inf:
        raise InconsistentError("no model of finite weight")
    b = Builder(c.scope)
    new = []
    for i, (kind, kids) in enumerate(zip(c.kinds, c.children)):
        if kind == LIT:
            new.append(b.signed(c.lits[i]))
        elif kind == AND:
            new.append(b.conj(new[k] for k in kids))
        else:
            w = weights[i]
            if epsilon:
                keep = [k for k in kids if weights[k] <= w + epsilon]
            else:
                keep = [k for k in kids if weights[k] == w]
            new.append(b.disj(new[k] for k in keep))
    return b.build(new[-1])


@dataclass(frozen=True)
class Inference:
    """Answer of :func:`infer`; ``inconsistent`` marks a vacuous ``True``."""

    entailed: bool
    inconsistent: bool = False
    weight: float = 0.0

    def __bool__(self):
        return self.entailed


class CompiledBase:
    """Smooth DNNF of a normalized hard part plus the ``holds`` penalties."""

    def __init__(self, circuit: NnfCircuit, penalties: t.Mapping[str, float],
                 original_vars: t.Sequence[str]):
        self.circuit = circuit
        self.penalties = dict(penalties)
        self.original_vars = tuple(original_vars)
        scope = set(circuit.scope)
        stray = [h for h in self.penalties if h not in scope]
        if stray:
            raise CircuitError(f"penalty variables {stray} missing from circuit scope")
        if not set(self.original_vars) <= scope:
            raise CircuitError("original variables missing from circuit scope")
        _require_smooth(circuit)
        self._weights = None

    @property
    def holds_vars(self) -> tuple[str, ...]:
        return tuple(self.penalties)

    @property
    def costs(self) -> dict[str, tuple[float, float]]:
        return {h: (0.0, k) for h, k in self.penalties.items()}

    @property
    def consistent(self) -> bool:
        return base_weight(self) < math.inf

    def __repr__(self):
        return (f"<CompiledBase {self.circuit!r}, {len(self.penalties)} penalties, "
                f"vars={list(self.original_vars)}>")


def annotate_weights(cb: CompiledBase) -> np.ndarray:
    if cb._weights is None:
        cb._weights = annotate(cb.circuit, cb.costs)
    return cb._weights


def base_weight(cb: CompiledBase) -> float:
    """Minimum world weight; inf when the hard part is inconsistent."""
    return float(annotate_weights(cb)[cb.circuit.root])


def minimize(cb: CompiledBase, epsilon: float = 0.0) -> NnfCircuit:
    return minimize_circuit(cb.circuit, cb.costs, epsilon, annotate_weights(cb))


def preferred_models(cb: CompiledBase, epsilon: float = 0.0,
                     stats: dict | None = None) -> t.Iterator[dict[str, bool]]:
    """Minimum-weight worlds over the original variables, each exactly once.

    Yields nothing (and logs a warning) when the hard part is inconsistent;
    check :attr:`CompiledBase.consistent` to tell that apart from no output.
    """
    if not cb.consistent:
        log.warning("hard constraints are inconsistent; no preferred models")
        return iter(())
    projected = forget(minimize(cb, epsilon), cb.holds_vars)
    projected = smooth(projected, complete=True)
    return enumerate_models(projected, stats)


def infer(cb: CompiledBase, query: Cnf, evidence: Term | t.Iterable[Literal] = (),
          epsilon: float = 0.0) -> Inference:
    """Does every minimum-weight model of ``evidence`` satisfy ``query``?

    ``evidence`` is restricted to a term.  If it contradicts the hard part the
    answer is a vacuous ``True`` with ``inconsistent`` set.  ``weight`` on the
    result is the minimum weight among the models of ``evidence``.
    """
    evidence = evidence if isinstance(evidence, Term) else Term(evidence)
    known = set(cb.original_vars)
    used = {l.var for c in query for l in c} | evidence.variables()
    unknown = sorted(used - known)
    if unknown:
        raise UnknownVariableError(f"variables {unknown} are not in the base")
    circuit = condition(cb.circuit, evidence)
    weights = annotate(circuit, cb.costs)
    k = float(weights[circuit.root])
    if k == math.inf:
        return Inference(True, inconsistent=True, weight=k)
    best = minimize_circuit(circuit, cb.costs, epsilon, weights)
    best = forget(best, cb.holds_vars)
    # literals over evidence variables are already decided
    fixed = evidence.as_dict()
    residual = []
    for cl in query:
        if any(fixed.get(l.var) == l.positive for l in cl):
            continue
        residual.append([l for l in cl if l.var not in fixed])
    return Inference(all(entails_clause(best, cl) for cl in residual), weight=k)


# -- bundles ------------------------------------------------------------------

MODEL_FILE, PENALTY_FILE, MANIFEST_FILE = "model.nnf", "penalties.txt", "manifest.txt"


def save_bundle(cb: CompiledBase, directory: str | Path) -> None:
    """Write ``model.nnf``, ``penalties.txt`` and ``manifest.txt`` into ``directory``."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    (d / MODEL_FILE).write_text(dumps_nnf(cb.circuit))
    (d / PENALTY_FILE).write_text(
        "".join(f"{h} {format_weight(k)}\n" for h, k in cb.penalties.items()))
    (d / MANIFEST_FILE).write_text(
        "format penaltydnnf-bundle 1\n"
        "original_vars " + " ".join(cb.original_vars) + "\n")


def load_bundle(directory: str | Path) -> CompiledBase:
    d = Path(directory)
    circuit = loads_nnf((d / MODEL_FILE).read_text())
    penalties = {}
    for line in (d / PENALTY_FILE).read_text().splitlines():
        if line.strip():
            name, weight = line.split()
            penalties[name] = parse_weight(weight)
    original: list[str] = []
    for line in (d / MANIFEST_FILE).read_text().splitlines():
        parts = line.split()
        if parts and parts[0] == "original_vars":
            original = parts[1:]
    return CompiledBase(circuit, penalties, original)
