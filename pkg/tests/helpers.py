"""Random instance generators and independent reference evaluators for tests."""
import itertools
import random
from pathlib import Path

from penaltydnnf.base import WeightedBase
from penaltydnnf.logic import (
    FALSE, TRUE, Iff, Implies, Literal, Not, Var, conj, disj, evaluate,
)
from penaltydnnf.nnf import Builder

FIXTURES = Path(__file__).parent / "fixtures"


def var_names(n):
    return [f"x{i}" for i in range(n)]


def random_formula(rng: random.Random, names, depth=3):
    if depth == 0 or rng.random() < 0.25:
        r = rng.random()
        if r < 0.05:
            return TRUE if rng.random() < 0.5 else FALSE
        v = Var(rng.choice(names))
        return Not(v) if rng.random() < 0.4 else v
    op = rng.choice(["and", "or", "not", "imp", "iff", "and", "or"])
    if op == "not":
        return Not(random_formula(rng, names, depth - 1))
    if op in ("imp", "iff"):
        a = random_formula(rng, names, depth - 1)
        b = random_formula(rng, names, depth - 1)
        return Implies(a, b) if op == "imp" else Iff(a, b)
    kids = [random_formula(rng, names, depth - 1) for _ in range(rng.randint(2, 3))]
    return conj(*kids) if op == "and" else disj(*kids)


def random_base(rng, nvars=None, nsoft=None, max_weight=10, hard_prob=0.3, depth=2):
    nvars = nvars if nvars is not None else rng.randint(1, 8)
    names = var_names(nvars)
    nsoft = nsoft if nsoft is not None else rng.randint(0, 5)
    pairs = [(random_formula(rng, names, depth), rng.randint(1, max_weight)) for _ in range(nsoft)]
    if rng.random() < hard_prob:
        pairs.append((random_formula(rng, names, depth), float("inf")))
    return WeightedBase.of(pairs, declared_vars=names)


def random_clause(rng, names, maxlen=3):
    k = rng.randint(1, min(maxlen, len(names)))
    chosen = rng.sample(names, k)
    return frozenset(Literal(v, rng.random() < 0.5) for v in chosen)


def random_cnf(rng, names, nclauses, maxlen=3):
    return frozenset(random_clause(rng, names, maxlen) for _ in range(nclauses))


def cnf_holds(cnf, world):
    return all(any(world[l.var] == l.positive for l in c) for c in cnf)


def worlds(scope):
    for values in itertools.product((True, False), repeat=len(scope)):
        yield dict(zip(scope, values))


def world_key(w, scope):
    return tuple(w[v] for v in scope)


def eval_circuit_py(c, world):
    """Recursive evaluation straight from the node table (no kernels)."""
    vals = []
    for i, (kind, kids) in enumerate(zip(c.kinds, c.children)):
        if kind == 0:
            lit = c.literal(i)
            vals.append(world[lit.var] == lit.positive)
        elif kind == 1:
            vals.append(all(vals[k] for k in kids))
        else:
            vals.append(any(vals[k] for k in kids))
    return vals[-1]


def circuit_models_py(c, scope=None):
    scope = list(c.scope if scope is None else scope)
    return {world_key(w, scope) for w in worlds(scope) if eval_circuit_py(c, w)}


def formula_models(f, scope):
    return {world_key(w, scope) for w in worlds(scope) if evaluate(f, w)}


def random_dnnf(rng, names, smooth_bias=0.0, max_depth=4):
    """Random decomposable circuit over ``names`` (usually not smooth)."""
    b = Builder(names)

    def gen(pool, depth):
        if not pool or depth == 0 or (len(pool) == 1 and rng.random() < 0.7):
            if not pool:
                return b.const(rng.random() < 0.8)
            v = rng.choice(pool)
            return b.lit(v, rng.random() < 0.5)
        if rng.random() < 0.5:
            shuffled = pool[:]
            rng.shuffle(shuffled)
            cut = rng.randint(1, len(shuffled))
            parts = [shuffled[:cut], shuffled[cut:]]
            return b.conj(gen(p, depth - 1) for p in parts if p)
        kids = []
        for _ in range(rng.randint(2, 3)):
            sub = pool if rng.random() < smooth_bias else rng.sample(pool, rng.randint(1, len(pool)))
            kids.append(gen(sub, depth - 1))
        return b.disj(kids)

    return b.build(gen(list(names), max_depth))
