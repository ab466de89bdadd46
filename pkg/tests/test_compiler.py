import random

import pytest
from hypothesis import given, settings, strategies as st

from penaltydnnf.base import INF, WeightedBase, load_base
from penaltydnnf.compiler import (
    CompileStats, compile_base, compile_clauses, compile_cnf, counters, dumps_dimacs, loads_dimacs,
)
from penaltydnnf.engine import base_weight
from penaltydnnf.logic import Literal, ParseError, parse_formula, to_cnf
from penaltydnnf.nnf import dumps_nnf

from helpers import FIXTURES, circuit_models_py, cnf_holds, formula_models, random_cnf, var_names, world_key, worlds

x = Literal("x")


def test_contradiction_gives_false():
    c = compile_cnf(frozenset({frozenset({x}), frozenset({~x})}))
    assert c.is_const(False)


def test_empty_cnf_gives_true():
    c = compile_cnf(frozenset(), smooth=False)
    assert c.is_const(True)
    assert c.scope == ()


def test_empty_clause_gives_false():
    assert compile_cnf(frozenset({frozenset()}), scope=["x"]).is_const(False)


def test_example_hard_part_has_seven_models():
    cnf = to_cnf(parse_formula("(holds1 -> a & b) & (holds2 -> ~b)"))
    scope = ["a", "b", "holds1", "holds2"]
    c = compile_cnf(cnf, scope)
    assert c.decomposable and c.smooth_flag
    assert len(circuit_models_py(c)) == 7


def test_scope_must_cover_cnf():
    with pytest.raises(ValueError):
        compile_cnf(frozenset({frozenset({x})}), scope=["y"])


def test_tautological_clauses_dropped():
    c = compile_clauses(2, [(1, -1), (2,)], smooth=False)
    assert circuit_models_py(c, ["v1", "v2"]) == {(True, True), (False, True)}


def test_literal_out_of_range():
    with pytest.raises(ValueError):
        compile_clauses(1, [(2,)])


def test_stats_are_filled():
    stats = CompileStats()
    cnf = to_cnf(parse_formula("(a | b) & (c | d) & (~a | ~b)"))
    compile_cnf(cnf, stats=stats)
    assert stats.decisions > 0
    assert stats.components >= 2


def test_compile_counter():
    before = counters["compile"]
    compile_cnf(frozenset())
    assert counters["compile"] == before + 1


def test_compile_base_example():
    cb = compile_base(load_base(FIXTURES / "ex11.wb"))
    assert base_weight(cb) == 1
    assert cb.original_vars == ("a", "b")
    assert cb.penalties == {"holds1": 2.0, "holds2": 1.0}


def test_compile_base_all_hard():
    assert base_weight(compile_base(load_base(FIXTURES / "hardonly.wb"))) == 0


def test_compile_base_lex_example():
    # value confirmed against the brute-force scan before being fixed here
    assert base_weight(compile_base(load_base(FIXTURES / "ex12.wb"))) == 1


def test_compile_base_inconsistent():
    cb = compile_base(WeightedBase.of([("x", INF), ("~x", INF), ("y", 1)]))
    assert not cb.consistent
    assert base_weight(cb) == INF


# -- DIMACS ---------------------------------------------------------------------

def test_dimacs_fixture():
    nvars, clauses, names = loads_dimacs((FIXTURES / "small.cnf").read_text())
    assert nvars == len(names)
    c = compile_clauses(nvars, clauses, names)
    for w in worlds(names):
        row = [w[v] for v in names]
        holds = all(any(row[abs(l) - 1] == (l > 0) for l in cl) for cl in clauses)
        assert c.evaluate(w) == holds


def test_dimacs_contradiction_fixture():
    nvars, clauses, names = loads_dimacs((FIXTURES / "contradiction.cnf").read_text())
    assert compile_clauses(nvars, clauses, names).is_const(False)


def test_dimacs_defaults_and_multiline_clause():
    nvars, clauses, names = loads_dimacs("p cnf 3 2\n1 -2\n3 0\n-1 0\n")
    assert names == ["v1", "v2", "v3"]
    assert clauses == [(1, -2, 3), (-1,)]


@pytest.mark.parametrize("text", [
    "1 2 0\n", "p cnf 2\n", "p cnf 2 1\n1 3 0\n", "p cnf 2 1\n1 x 0\n", "p cnf 2 2\n1 0\n", "",
])
def test_dimacs_errors(text):
    with pytest.raises(ParseError):
        loads_dimacs(text)


def test_dimacs_round_trip():
    cnf = to_cnf(parse_formula("(a | ~b) & (b | c)"))
    nvars, clauses, names = loads_dimacs(dumps_dimacs(cnf, ["a", "b", "c"]))
    assert names == ["a", "b", "c"]
    assert {frozenset(Literal(names[abs(l) - 1], l > 0) for l in cl) for cl in clauses} == cnf


# -- properties -----------------------------------------------------------------

def _cnf(s):
    rng = random.Random(s)
    names = var_names(rng.randint(1, 12))
    return names, random_cnf(rng, names, rng.randint(0, 30))


@settings(max_examples=120, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_compiled_models_match_cnf(s):
    names, cnf = _cnf(s)
    c = compile_cnf(cnf, names)
    assert c.decomposable and c.smooth_flag
    expected = {world_key(w, names) for w in worlds(names) if cnf_holds(cnf, w)}
    assert circuit_models_py(c) == expected


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_unsmoothed_output_is_decomposable(s):
    names, cnf = _cnf(s)
    assert compile_cnf(cnf, names, smooth=False).decomposable


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_output_is_deterministic(s):
    names, cnf = _cnf(s)
    assert dumps_nnf(compile_cnf(cnf, names)) == dumps_nnf(compile_cnf(set(cnf), names))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_cache_off_is_equivalent(s):
    names, cnf = _cnf(s)
    with_cache = compile_cnf(cnf, names)
    without = compile_cnf(cnf, names, use_cache=False)
    assert circuit_models_py(with_cache) == circuit_models_py(without)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_formula_compilation(s):
    from helpers import random_formula
    rng = random.Random(s)
    names = var_names(rng.randint(1, 6))
    f = random_formula(rng, names, 3)
    c = compile_cnf(to_cnf(f), names)
    assert circuit_models_py(c) == formula_models(f, names)
