"""Most probable consistency-based diagnoses from a compiled system description.

The system description is compiled once.  Each observation only conditions
the compiled circuit, so changing observations never triggers a new
compilation.

Penalty modes for component ``i`` with failure probability ``p``:

``paper``
    ``-log p`` when the component is faulty, 0 when healthy.  Ranks diagnoses
    by the product of the failure probabilities of the faulty components.
``exact`` (default)
    ``-log p`` when faulty and ``-log(1-p)`` when healthy, so the summed
    penalty is the negative log of the full prior
    ``prod(p_faulty) * prod(1 - p_healthy)``.
"""
from __future__ import annotations

import hashlib
import math
import typing as t
from dataclasses import dataclass, field
from pathlib import Path

from .base import INF, loads_base
from .compiler import compile_cnf
from .engine import InconsistentError, annotate, minimize_circuit
from .logic import Formula, ParseError, Term, conj, ordered_variables, to_cnf, to_text
from .nnf import NnfCircuit, condition, dumps_nnf, enumerate_models, forget, loads_nnf, smooth

MODES = ("exact", "paper")
DEFAULT_EPSILON = 1e-9


@dataclass(frozen=True)
class DiagnosticProblem:
    sd: Formula
    ok: tuple[tuple[str, float], ...]
    obs: Term = field(default_factory=Term)

    def __post_init__(self):
        object.__setattr__(self, "ok", tuple((v, float(p)) for v, p in self.ok))
        object.__setattr__(self, "obs", self.obs if isinstance(self.obs, Term) else Term(self.obs))
        _validate(self.sd, self.ok, self.obs)

    @property
    def ok_vars(self) -> tuple[str, ...]:
        return tuple(v for v, _ in self.ok)


def _validate(sd, ok, obs):
    sd_vars = set(ordered_variables(sd))
    for v, p in ok:
        if v not in sd_vars:
            raise ValueError(f"ok variable {v!r} does not occur in the system description")
        if not 0 < p < 1:
            raise ValueError(f"failure probability of {v!r} must lie in (0, 1), got {p}")
    names = [v for v, _ in ok]
    if len(set(names)) != len(names):
        raise ValueError("duplicate ok variable")
    clash = sorted(obs.variables() & set(names))
    if clash:
        raise ValueError(f"observations may not fix ok variables: {clash}")


@dataclass(frozen=True)
class Diagnosis:
    term: dict[str, bool]
    penalty: float
    probability: float

    @property
    def faulty(self) -> list[str]:
        return [v for v, healthy in self.term.items() if not healthy]

    def __str__(self):
        return " ".join(v if h else "~" + v for v, h in self.term.items())


@dataclass
class DiagnosisResult:
    diagnoses: list[Diagnosis]
    penalty: float
    mode: str
    consistent: bool = True

    @property
    def log_probability(self) -> float:
        """Log of the probability of any most probable diagnosis."""
        return -self.penalty


def literal_costs(ok: t.Sequence[tuple[str, float]], mode: str) -> dict[str, tuple[float, float]]:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    costs = {}
    for v, p in ok:
        healthy = -math.log1p(-p) if mode == "exact" else 0.0
        costs[v] = (healthy, -math.log(p))
    return costs


def score(term: t.Mapping[str, bool], ok: t.Sequence[tuple[str, float]], mode: str):
    """``(penalty, probability)`` of a complete OK-term.

    The penalty is an exactly rounded sum, so terms with the same multiset of
    per-component costs tie exactly whatever their order.
    """
    costs, prob = [], 1.0
    for v, p in ok:
        if term[v]:
            if mode == "exact":
                costs.append(-math.log1p(-p))
                prob *= 1 - p
        else:
            costs.append(-math.log(p))
            prob *= p
    return math.fsum(costs), prob


def _sort_key(ok_names):
    return lambda d: (d.penalty, tuple(not d.term[v] for v in ok_names))


def load_system(path: str | Path) -> tuple[Formula, list[tuple[str, float]]]:
    """Read a ``.sys`` file: ``inf ; <formula>`` lines plus ``ok <var> <p>`` lines."""
    return loads_system(Path(path).read_text())


def loads_system(text: str) -> tuple[Formula, list[tuple[str, float]]]:
    ok = []
    rest = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        parts = raw.split("#", 1)[0].split()
        if parts and parts[0] == "ok":
            if len(parts) != 3:
                raise ParseError("expected 'ok <var> <probability>'", lineno, 1)
            try:
                ok.append((parts[1], float(parts[2])))
            except ValueError:
                raise ParseError(f"bad probability {parts[2]!r}", lineno, 1) from None
            rest.append("")
        else:
            rest.append(raw)
    base = loads_base("\n".join(rest))
    soft = [c for c in base.constraints if c.weight != INF]
    if soft:
        raise ParseError("system descriptions only take hard ('inf') constraints", 1, 1)
    return conj(*(c.formula for c in base.constraints)), ok


class CompiledSystem:
    """A compiled system description, reusable across observations."""

    def __init__(self, sd: Formula, ok: t.Sequence[tuple[str, float]], circuit: NnfCircuit):
        self.sd = sd
        self.ok = tuple((v, float(p)) for v, p in ok)
        self.circuit = circuit
        _validate(sd, self.ok, Term())

    @property
    def ok_vars(self) -> tuple[str, ...]:
        return tuple(v for v, _ in self.ok)

    def diagnose(self, obs: Term | t.Iterable = (), mode: str = "exact",
                 epsilon: float = DEFAULT_EPSILON) -> DiagnosisResult:
        return recondition(self, obs, mode, epsilon)

    def rank(self, obs: Term | t.Iterable = (), mode: str = "exact") -> list[Diagnosis]:
        return rank_diagnoses(self, obs, mode)


def system_scope(sd: Formula, ok_vars: t.Iterable[str] = ()) -> list[str]:
    ok_vars = list(ok_vars)
    return ok_vars + sorted(set(ordered_variables(sd)).difference(ok_vars))


def compile_system(sd: Formula, ok_vars: t.Iterable[str] = (),
                   cache_dir: str | Path | None = None) -> NnfCircuit:
    """Smooth DNNF of ``sd``; with ``cache_dir`` the result is cached by content hash."""
    scope = system_scope(sd, ok_vars)
    path = None
    if cache_dir is not None:
        key = hashlib.sha256((to_text(sd) + "\n" + " ".join(scope)).encode()).hexdigest()
        path = Path(cache_dir) / f"{key}.nnf"
        if path.exists():
            return loads_nnf(path.read_text())
    circuit = compile_cnf(to_cnf(sd), scope, smooth=True)
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(dumps_nnf(circuit))
    return circuit


def compile_problem(sd: Formula, ok: t.Sequence[tuple[str, float]],
                    cache_dir: str | Path | None = None) -> CompiledSystem:
    return CompiledSystem(sd, ok, compile_system(sd, [v for v, _ in ok], cache_dir))


def _consistent_ok_circuit(system: CompiledSystem, obs: Term):
    conditioned = condition(system.circuit, obs)
    others = [v for v in conditioned.scope if v not in system.ok_vars]
    return conditioned, others


def recondition(system: CompiledSystem, obs: Term | t.Iterable = (), mode: str = "exact",
                epsilon: float = DEFAULT_EPSILON) -> DiagnosisResult:
    """Most probable diagnoses for new observations, without recompiling.

    ``epsilon`` is the Or-retention tolerance used during minimization; log
    penalties summed in different orders may differ in the last bits.
    """
    obs = obs if isinstance(obs, Term) else Term(obs)
    _validate(system.sd, system.ok, obs)
    costs = literal_costs(system.ok, mode)
    conditioned, others = _consistent_ok_circuit(system, obs)
    weights = annotate(conditioned, costs)
    if weights[conditioned.root] == math.inf:
        return DiagnosisResult([], INF, mode, consistent=False)
    try:
        best = minimize_circuit(conditioned, costs, epsilon, weights)
    except InconsistentError:  # pragma: no cover - guarded above
        return DiagnosisResult([], INF, mode, consistent=False)
    best = smooth(forget(best, others), complete=True)
    names = system.ok_vars
    found = []
    for world in enumerate_models(best):
        term = {v: world[v] for v in names}
        found.append(Diagnosis(term, *score(term, system.ok, mode)))
    found.sort(key=_sort_key(names))
    k = found[0].penalty if found else INF
    return DiagnosisResult(found, k, mode, consistent=bool(found))


def rank_diagnoses(system: CompiledSystem, obs: Term | t.Iterable = (),
                   mode: str = "exact") -> list[Diagnosis]:
    """Every consistent complete OK-term, best first."""
    obs = obs if isinstance(obs, Term) else Term(obs)
    _validate(system.sd, system.ok, obs)
    conditioned, others = _consistent_ok_circuit(system, obs)
    projected = smooth(forget(conditioned, others), complete=True)
    names = system.ok_vars
    out = []
    for world in enumerate_models(projected):
        term = {v: world[v] for v in names}
        out.append(Diagnosis(term, *score(term, system.ok, mode)))
    out.sort(key=_sort_key(names))
    return out


def diagnose(problem: DiagnosticProblem, mode: str = "exact",
             epsilon: float = DEFAULT_EPSILON, cache_dir: str | Path | None = None) -> DiagnosisResult:
    """Compile the system description and return its most probable diagnoses."""
    system = compile_problem(problem.sd, problem.ok, cache_dir)
    return recondition(system, problem.obs, mode, epsilon)
