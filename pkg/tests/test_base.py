import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from penaltydnnf.base import (
    INF, WeightedBase, dumps_base, format_weight, hard_part, load_base, loads_base,
    parse_weight, world_weight,
)
from penaltydnnf.logic import TRUE, ParseError, UnassignedVariableError, Var, evaluate

from helpers import FIXTURES, random_base, random_formula, worlds

EX11 = WeightedBase.of([("a & b", 2), ("~b", 1)])


@pytest.mark.parametrize("world,expected", [
    ({"a": True, "b": True}, 1),
    ({"a": True, "b": False}, 2),
    ({"a": False, "b": True}, 3),
    ({"a": False, "b": False}, 2),
])
def test_world_weights_example(world, expected):
    assert world_weight(EX11, world) == expected


def test_world_weight_zero_when_everything_holds():
    w = WeightedBase.of([("a | b", 5), ("a -> b", 2)])
    assert world_weight(w, {"a": True, "b": True}) == 0


def test_world_weight_unassigned():
    with pytest.raises(UnassignedVariableError):
        world_weight(EX11, {"a": True})


def test_hard_part():
    assert hard_part(EX11) == TRUE
    assert hard_part(WeightedBase.of([("x", INF), ("y", 2)])) == Var("x")


def test_hard_and_soft_partition():
    w = WeightedBase.of([("x", INF), ("y", 2), ("z", INF)])
    assert len(w.hard) == 2 and len(w.soft) == 1
    assert len(w.hard) + len(w.soft) == len(w)


def test_zero_weight_dropped_with_warning(caplog):
    w = WeightedBase.of([("x", 0), ("y", 1)])
    assert [c.formula for c in w] == [Var("y")]
    assert "zero-weight" in caplog.text


def test_negative_weight_rejected():
    with pytest.raises(ValueError):
        WeightedBase.of([("x", -1)])
    with pytest.raises(ValueError):
        parse_weight("-2")


def test_variable_scope_order():
    w = loads_base("vars c a\n1 ; b & a\n1 ; d")
    assert w.variables == ("c", "a", "b", "d")


def test_load_fixture():
    w = load_base(FIXTURES / "ex11.wb")
    assert [(c.formula, c.weight) for c in w] == [(c.formula, c.weight) for c in EX11]


def test_weight_format_round_trip():
    for x in (0.0, 1.0, 2.5, INF, 1e-3):
        assert parse_weight(format_weight(x)) == x


def test_dump_load_round_trip():
    w = loads_base("vars p q\ninf ; p -> q\n3 ; ~q\n0.5 ; p")
    again = loads_base(dumps_base(w))
    assert again == w


def test_bad_line_reports_position():
    with pytest.raises(ParseError) as exc:
        loads_base("1 ; a\n2 ; a & & b\n")
    assert exc.value.line == 2
    with pytest.raises(ParseError):
        loads_base("1 a")
    with pytest.raises(ParseError):
        loads_base("lots ; a")


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_weight_monotone_under_addition(s):
    rng = random.Random(s)
    w = random_base(rng, nvars=4)
    extra = (random_formula(rng, list(w.variables) or ["x0"], 2), rng.choice([1, 3, INF]))
    bigger = WeightedBase.of([(c.formula, c.weight) for c in w] + [extra], w.variables)
    for world in worlds(bigger.variables):
        assert world_weight(bigger, world) >= world_weight(w, world)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_infinite_iff_hard_violated(s):
    rng = random.Random(s)
    w = random_base(rng, nvars=4, hard_prob=0.8)
    for world in worlds(w.variables):
        violated = any(not evaluate(c.formula, world) for c in w.hard)
        assert (world_weight(w, world) == math.inf) == violated
