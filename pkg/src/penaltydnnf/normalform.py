"""Normal form of weighted bases and the stratified-base encoding."""
from __future__ import annotations

import itertools
import typing as t
from dataclasses import dataclass
from pathlib import Path

from .base import INF, WeightedBase, WeightedConstraint, world_weight
from .logic import Formula, Implies, ParseError, Var, parse_formula

MAX_EXACT = 2 ** 53


@dataclass(frozen=True)
class NormalFormBase:
    """A base whose soft constraints are all bare ``holds`` variables.

    ``holds_map`` maps each fresh variable to ``(soft index, weight)`` where the
    index is 1-based among the soft constraints of the original base.
    """

    base: WeightedBase
    holds_map: dict[str, tuple[int, float]]
    original_vars: tuple[str, ...]

    @property
    def holds_vars(self) -> tuple[str, ...]:
        return tuple(self.holds_map)

    @property
    def penalties(self) -> dict[str, float]:
        return {h: w for h, (_, w) in self.holds_map.items()}


def _fresh(stem: str, taken: set[str]) -> str:
    name = stem
    while name in taken:
        name += "_"
    taken.add(name)
    return name


def normalize(base: WeightedBase) -> NormalFormBase:
    """Replace every soft ``<phi, k>`` by ``<holds_i -> phi, inf>`` and ``<holds_i, k>``.

    Hard constraints are copied first, then the guarded implications, then the
    ``holds`` units.  Soft constraints that already are bare symbols are
    re-encoded too, so penalties always live on fresh variables.
    """
    taken = set(base.variables)
    hard = [c for c in base.constraints if c.hard]
    guards, units = [], []
    holds_map: dict[str, tuple[int, float]] = {}
    for i, c in enumerate(base.soft, 1):
        h = _fresh(f"holds{i}", taken)
        holds_map[h] = (i, c.weight)
        guards.append(WeightedConstraint(Implies(Var(h), c.formula), INF))
        units.append(WeightedConstraint(Var(h), c.weight))
    scope = base.variables + tuple(holds_map)
    nf = WeightedBase(tuple(hard + guards + units), scope)
    return NormalFormBase(nf, holds_map, base.variables)


def projected_world_weight(nf: NormalFormBase, world: t.Mapping[str, bool]) -> float:
    """Minimum weight, in the normalized base, over all ``holds`` completions of ``world``."""
    holds = nf.holds_vars
    best = INF
    for values in itertools.product((True, False), repeat=len(holds)):
        w = dict(world)
        w.update(zip(holds, values))
        best = min(best, world_weight(nf.base, w))
    return best


@dataclass(frozen=True)
class StratifiedBase:
    """Strata ``B_1 .. B_k``, most reliable first."""

    strata: tuple[tuple[Formula, ...], ...]

    def __post_init__(self):
        if not self.strata:
            raise ValueError("a stratified base needs at least one stratum")

    @classmethod
    def of(cls, strata: t.Iterable[t.Iterable[Formula | str]]) -> StratifiedBase:
        return cls(tuple(
            tuple(parse_formula(f) if isinstance(f, str) else f for f in stratum)
            for stratum in strata))

    @property
    def variables(self) -> tuple[str, ...]:
        return WeightedBase.of((f, 1) for s in self.strata for f in s).variables


def lex_encode(strat: StratifiedBase) -> WeightedBase:
    """Weighted base whose ``true``-inference coincides with lexicographic inference.

    Every formula of stratum ``i`` (1-based, of ``k``) gets weight ``(m+1)**(k-i)``
    where ``m`` is the largest stratum size.
    """
    k = len(strat.strata)
    m = max(len(s) for s in strat.strata)
    top = (m + 1) ** (k - 1)
    if top > MAX_EXACT:
        raise OverflowError(f"stratum weight {top} exceeds the exact float range")
    pairs = []
    for i, stratum in enumerate(strat.strata, 1):
        weight = (m + 1) ** (k - i)
        pairs.extend((f, weight) for f in stratum)
    return WeightedBase.of(pairs)


def loads_strat(text: str, allow_empty: bool = False) -> StratifiedBase:
    """Parse a ``.strat`` file: ``stratum:`` headers, one formula per line."""
    strata: list[list[Formula]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line == "stratum:":
            strata.append([])
            continue
        if not strata:
            raise ParseError("formula before first 'stratum:' header", lineno, 1)
        try:
            strata[-1].append(parse_formula(line))
        except ParseError as exc:
            raise ParseError(str(exc).split(": ", 1)[-1], lineno, exc.column) from None
    if not allow_empty and any(not s for s in strata):
        raise ValueError("empty stratum (pass allow_empty=True to accept)")
    return StratifiedBase(tuple(tuple(s) for s in strata))


def load_strat(path: str | Path, allow_empty: bool = False) -> StratifiedBase:
    return loads_strat(Path(path).read_text(), allow_empty)
