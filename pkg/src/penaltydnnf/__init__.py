"""Penalty-logic weighted bases compiled to smooth DNNF.

Typical use::

    from penaltydnnf import WeightedBase, compile_base, base_weight, preferred_models

    cb = compile_base(WeightedBase.of([("a & b", 2), ("~b", 1)]))
    base_weight(cb)              # 1.0
    list(preferred_models(cb))   # [{'a': True, 'b': True}]
"""
__version__ = "0.1.0"

from .base import INF, WeightedBase, WeightedConstraint, hard_part, load_base, loads_base, world_weight
from .compiler import compile_base, compile_clauses, compile_cnf, loads_dimacs
from .diagnosis import DiagnosticProblem, compile_problem, compile_system, diagnose, recondition
from .engine import (
    CompiledBase, InconsistentError, annotate_weights, base_weight, infer, load_bundle,
    minimize, preferred_models, save_bundle,
)
from .logic import Literal, Term, parse_formula, parse_literals, to_cnf, to_text
from .nnf import (
    NnfCircuit, check, condition, dumps_nnf, entails_clause, enumerate_models, forget,
    loads_nnf, smooth,
)
from .normalform import StratifiedBase, lex_encode, normalize, projected_world_weight
from .oracle import oracle_diagnoses, oracle_infer, oracle_lex, oracle_scan

__all__ = [
    "INF", "WeightedBase", "WeightedConstraint", "hard_part", "load_base", "loads_base",
    "world_weight", "compile_base", "compile_clauses", "compile_cnf", "loads_dimacs",
    "DiagnosticProblem", "compile_problem", "compile_system", "diagnose", "recondition",
    "CompiledBase", "InconsistentError", "annotate_weights", "base_weight", "infer",
    "load_bundle", "minimize", "preferred_models", "save_bundle", "Literal", "Term",
    "parse_formula", "parse_literals", "to_cnf", "to_text", "NnfCircuit", "check", "condition",
    "dumps_nnf", "entails_clause", "enumerate_models", "forget", "loads_nnf", "smooth",
    "StratifiedBase", "lex_encode", "normalize", "projected_world_weight", "oracle_diagnoses",
    "oracle_infer", "oracle_lex", "oracle_scan",
]
