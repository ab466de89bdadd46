import math

import pytest

from penaltydnnf.base import INF, WeightedBase
from penaltydnnf.logic import Literal, Var, parse_formula, to_cnf
from penaltydnnf.normalform import StratifiedBase, normalize
from penaltydnnf.oracle import (
    ScopeTooLargeError, lex_preferred, oracle_diagnoses, oracle_infer, oracle_lex, oracle_scan,
)

EX11 = WeightedBase.of([("a & b", 2), ("~b", 1)])


def test_example_table():
    report = oracle_scan(EX11)
    assert [x for _, x in report.table] == [1, 2, 3, 2]
    assert report.K == 1
    assert report.preferred == [{"a": True, "b": True}]


def test_normal_form_table():
    report = oracle_scan(normalize(EX11).base)
    assert [x for _, x in report.table] == [
        INF, 1, INF, 3, INF, INF, 2, 3, INF, INF, INF, 3, INF, INF, 2, 3]
    assert report.K == 1
    assert report.preferred == [{"a": True, "b": True, "holds1": True, "holds2": False}]


def test_inconsistent_scan():
    report = oracle_scan(WeightedBase.of([("x", INF), ("~x", INF)]))
    assert report.K == INF and report.preferred == []


def test_empty_base():
    report = oracle_scan(WeightedBase.of([]))
    assert report.K == 0 and report.preferred == [{}]


def test_oracle_infer_examples():
    assert oracle_infer(EX11, parse_formula("a"))
    assert not oracle_infer(EX11, parse_formula("~b"))
    assert oracle_infer(EX11, to_cnf(parse_formula("a & b")))
    assert not oracle_infer(EX11, parse_formula("a"), parse_formula("~b"))


def test_oracle_infer_vacuous():
    assert oracle_infer(EX11, parse_formula("~a"), parse_formula("b & ~b"))
    w = WeightedBase.of([("x", INF)])
    assert oracle_infer(w, Var("y"), parse_formula("~x"))


def test_oracle_infer_extends_scope():
    assert not oracle_infer(EX11, Var("fresh"))


def test_scope_cap():
    w = WeightedBase.of([], declared_vars=[f"v{i}" for i in range(25)])
    with pytest.raises(ScopeTooLargeError):
        oracle_scan(w)


def test_lex_preferred_example():
    strat = StratifiedBase.of([["a | b | c"], ["~a & c", "~b & c", "~c"]])
    assert lex_preferred(strat) == [{"a": False, "b": False, "c": True}]
    assert oracle_lex(strat, parse_formula("c"))
    assert not oracle_lex(strat, parse_formula("a"))


def test_diagnoses_two_inverters():
    sd = parse_formula("(ok1 -> (y <-> ~x)) & (ok2 -> (z <-> ~y))")
    ok = [("ok1", 0.1), ("ok2", 0.2)]
    obs = [Literal("x"), Literal("z", False)]
    ranked = oracle_diagnoses(sd, ok, obs, "exact")
    assert [tuple(t.values()) for t, _, _ in ranked] == [(True, False), (False, True), (False, False)]
    assert [p for _, _, p in ranked] == pytest.approx([0.18, 0.08, 0.02])
    for _, penalty, prob in ranked:
        assert penalty == pytest.approx(-math.log(prob))
    paper = oracle_diagnoses(sd, ok, obs, "paper")
    assert [tuple(t.values()) for t, _, _ in paper][0] == (True, False)
    assert paper[0][1] == pytest.approx(-math.log(0.2))
