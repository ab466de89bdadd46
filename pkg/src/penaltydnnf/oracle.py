"""Brute-force reference semantics by exhaustive world enumeration.

Nothing here touches circuits: formulas are evaluated directly and weights
are summed locally.  Scopes are capped at 24 variables.
"""
from __future__ import annotations

import math
import typing as t
from dataclasses import dataclass

from .logic import (
    TRUE, Formula, all_worlds, cnf_to_formula, evaluate, ordered_variables,
)

MAX_SCOPE = 24


class ScopeTooLargeError(ValueError):
    pass


def _check_scope(scope):
    if len(scope) > MAX_SCOPE:
        raise ScopeTooLargeError(f"oracle scope has {len(scope)} variables (cap {MAX_SCOPE})")


def _weight(base, world) -> float:
    total = 0.0
    for c in base.constraints:
        if not evaluate(c.formula, world):
            total = total + c.weight
    return total


def _as_formula(x) -> Formula:
    if isinstance(x, Formula):
        return x
    return cnf_to_formula(x)


@dataclass
class OracleReport:
    K: float
    preferred: list[dict[str, bool]]
    table: list[tuple[dict[str, bool], float]]


def oracle_scan(base, scope: t.Sequence[str] | None = None) -> OracleReport:
    """Weight of every world over ``scope`` (default: the base's variables)."""
    scope = tuple(base.variables if scope is None else scope)
    _check_scope(scope)
    table = [(w, _weight(base, w)) for w in all_worlds(scope)]
    k = min((x for _, x in table), default=0.0)
    preferred = [w for w, x in table if x == k] if k < math.inf else []
    return OracleReport(k, preferred, table)


def oracle_infer(base, query, evidence=TRUE, scope: t.Sequence[str] | None = None) -> bool:
    """Do all minimum-weight models of ``evidence`` satisfy ``query``?

    ``query`` and ``evidence`` may be any formula (or a CNF of literals).
    When every model of ``evidence`` has infinite weight (or there is none)
    the answer is vacuously ``True``.
    """
    query, evidence = _as_formula(query), _as_formula(evidence)
    if scope is None:
        extra = sorted(set(ordered_variables(query)) | set(ordered_variables(evidence)))
        scope = list(base.variables) + [v for v in extra if v not in base.variables]
    _check_scope(scope)
    best = math.inf
    best_worlds: list = []
    for w in all_worlds(scope):
        if not evaluate(evidence, w):
            continue
        x = _weight(base, w)
        if x < best:
            best, best_worlds = x, [w]
        elif x == best:
            best_worlds.append(w)
    if best == math.inf:
        return True
    return all(evaluate(query, w) for w in best_worlds)


def lex_preferred(strat, scope: t.Sequence[str] | None = None) -> list[dict[str, bool]]:
    """Worlds whose per-stratum violation counts are lexicographically minimal."""
    scope = tuple(strat.variables if scope is None else scope)
    _check_scope(scope)
    scored = []
    for w in all_worlds(scope):
        vec = tuple(sum(1 for f in stratum if not evaluate(f, w)) for stratum in strat.strata)
        scored.append((vec, w))
    best = min(v for v, _ in scored)
    return [w for v, w in scored if v == best]


def oracle_lex(strat, query, scope: t.Sequence[str] | None = None) -> bool:
    """Skeptical lexicographic inference from a stratified base."""
    query = _as_formula(query)
    if scope is None:
        scope = list(strat.variables)
        scope += [v for v in sorted(set(ordered_variables(query))) if v not in scope]
    return all(evaluate(query, w) for w in lex_preferred(strat, scope))


def oracle_diagnoses(sd: Formula, ok: t.Sequence[tuple[str, float]], obs, mode: str = "exact"):
    """All consistent complete OK-terms, ranked by penalty then OK-term.

    Returns ``[(term_dict, penalty, probability), ...]``.  Penalties: ``-log p``
    per faulty component in ``paper`` mode; ``-log p`` faulty and ``-log(1-p)``
    healthy in ``exact`` mode.
    """
    ok_names = [v for v, _ in ok]
    fixed = {l.var: l.positive for l in obs}
    others = [v for v in sorted(set(ordered_variables(sd))) if v not in fixed and v not in ok_names]
    _check_scope(ok_names + others)
    out = []
    for okw in all_worlds(ok_names):
        consistent = False
        for rest in all_worlds(others):
            world = {**rest, **fixed, **okw}
            if evaluate(sd, world):
                consistent = True
                break
        if not consistent:
            continue
        terms, prob = [], 1.0
        for v, p in ok:
            if okw[v]:
                if mode == "exact":
                    terms.append(-math.log1p(-p))
                    prob *= 1 - p
            else:
                terms.append(-math.log(p))
                prob *= p
        out.append((okw, math.fsum(terms), prob))
    out.sort(key=lambda r: (r[1], tuple(not r[0][v] for v in ok_names)))
    return out
