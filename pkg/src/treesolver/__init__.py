"""A complete solver for first-order constraints over finite or infinite
trees.

``solve(p)`` turns any first-order formula over equations and the
``finite`` predicate into ``true``, ``false`` or a disjunction of explicit
solved forms whose free-variable solutions can be read off directly.
"""

from .answer import Answer, ExplicitSolvedForm, GeneralSolvedFormula, InvalidSolvedForm, check_solution
from .engine import (
    Engine,
    EngineLimits,
    EngineStats,
    InvariantViolation,
    NodeLimitExceeded,
    ResourceLimit,
    TimeoutExceeded,
)
from .normalizer import NormalizedFormula, normalize
from .parsing import ArityError, ParseError, parse, parse_term, print_formula, print_term
from .solver import SolveResult, solve
from .syntax import FunctionSymbol, Variable

__all__ = [
    "Answer",
    "ArityError",
    "Engine",
    "EngineLimits",
    "EngineStats",
    "ExplicitSolvedForm",
    "FunctionSymbol",
    "GeneralSolvedFormula",
    "InvalidSolvedForm",
    "InvariantViolation",
    "NodeLimitExceeded",
    "NormalizedFormula",
    "ParseError",
    "ResourceLimit",
    "SolveResult",
    "TimeoutExceeded",
    "Variable",
    "check_solution",
    "normalize",
    "parse",
    "parse_term",
    "print_formula",
    "print_term",
    "solve",
]
