"""Weighted bases (penalty logic) and their direct semantics.

Weights are plain floats; ``math.inf`` marks a hard constraint.  Finite
weights are compared exactly, so ties between float sums need bit-equal
values.  Integer weights are exact up to 2**53.
"""
from __future__ import annotations

import logging
import math
import typing as t
from dataclasses import dataclass, field
from pathlib import Path

from .logic import (
    Formula, ParseError, conj, evaluate, ordered_variables, parse_formula, to_text,
)

log = logging.getLogger(__name__)

INF = math.inf
Weight = float


def parse_weight(text: str) -> Weight:
    text = text.strip()
    if text.lower() in ("inf", "+inf", "infinity"):
        return INF
    try:
        value = float(text)
    except ValueError:
        raise ValueError(f"bad weight {text!r}") from None
    if math.isnan(value) or value < 0:
        raise ValueError(f"weight must be nonnegative, got {text!r}")
    return value


def format_weight(w: Weight) -> str:
    if w == INF:
        return "inf"
    if float(w).is_integer():
        return str(int(w))
    return repr(float(w))


@dataclass(frozen=True)
class WeightedConstraint:
    formula: Formula
    weight: Weight

    @property
    def hard(self) -> bool:
        return self.weight == INF


@dataclass(frozen=True)
class WeightedBase:
    """A finite list of ``(formula, weight)`` pairs plus a variable scope.

    ``declared_vars`` lists explicitly declared variables first; the remaining
    variables of the constraints follow in lexicographic order (see
    :attr:`variables`).
    """

    constraints: tuple[WeightedConstraint, ...]
    declared_vars: tuple[str, ...] = ()
    _vars: tuple[str, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        mentioned = set()
        for c in self.constraints:
            mentioned.update(ordered_variables(c.formula))
        seen = dict.fromkeys(self.declared_vars)
        rest = sorted(mentioned.difference(seen))
        object.__setattr__(self, "_vars", tuple(seen) + tuple(rest))

    @classmethod
    def of(cls, pairs: t.Iterable[tuple[Formula | str, float]],
           declared_vars: t.Iterable[str] = ()) -> WeightedBase:
        """Build from ``(formula, weight)`` pairs, dropping zero-weight entries."""
        out = []
        for formula, weight in pairs:
            if isinstance(formula, str):
                formula = parse_formula(formula)
            weight = float(weight)
            if weight < 0 or math.isnan(weight):
                raise ValueError(f"negative or NaN weight {weight!r}")
            if weight == 0:
                log.warning("dropping zero-weight constraint %s", to_text(formula))
                continue
            out.append(WeightedConstraint(formula, weight))
        return cls(tuple(out), tuple(declared_vars))

    @property
    def variables(self) -> tuple[str, ...]:
        """The declared scope followed by any other constraint variables (sorted)."""
        return self._vars

    @property
    def hard(self) -> list[WeightedConstraint]:
        return [c for c in self.constraints if c.hard]

    @property
    def soft(self) -> list[WeightedConstraint]:
        return [c for c in self.constraints if not c.hard]

    def __len__(self):
        return len(self.constraints)

    def __iter__(self):
        return iter(self.constraints)


def world_weight(base: WeightedBase, world: t.Mapping[str, bool]) -> Weight:
    """Sum of the weights of the constraints violated by ``world``."""
    total = 0.0
    for c in base.constraints:
        if not evaluate(c.formula, world):
            total += c.weight
    return total


def hard_part(base: WeightedBase) -> Formula:
    """Conjunction of the hard constraints (``true`` if there are none)."""
    return conj(*(c.formula for c in base.constraints if c.hard))


# -- .wb files ----------------------------------------------------------------

def _strip_comment(line: str) -> str:
    return line.split("#", 1)[0].strip()


def loads_base(text: str) -> WeightedBase:
    """Parse the line-oriented ``.wb`` format.

    ``vars a b c`` may appear as the first non-comment line; every other line
    is ``<weight> ; <formula>`` with weight ``inf`` or a nonnegative decimal.
    """
    declared: list[str] = []
    pairs = []
    first = True
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw)
        if not line:
            continue
        if first and line.split()[0] == "vars":
            declared = line.split()[1:]
            first = False
            continue
        first = False
        if ";" not in line:
            raise ParseError("expected '<weight> ; <formula>'", lineno, 1)
        w_text, f_text = line.split(";", 1)
        try:
            weight = parse_weight(w_text)
        except ValueError as exc:
            raise ParseError(str(exc), lineno, 1) from None
        try:
            formula = parse_formula(f_text)
        except ParseError as exc:
            raise ParseError(str(exc).split(": ", 1)[-1], lineno, exc.column + len(w_text) + 1) from None
        pairs.append((formula, weight))
    return WeightedBase.of(pairs, declared)


def load_base(path: str | Path) -> WeightedBase:
    return loads_base(Path(path).read_text())


def dumps_base(base: WeightedBase) -> str:
    lines = []
    if base.declared_vars:
        lines.append("vars " + " ".join(base.declared_vars))
    for c in base.constraints:
        lines.append(f"{format_weight(c.weight)} ; {to_text(c.formula)}")
    return "\n".join(lines) + "\n"
