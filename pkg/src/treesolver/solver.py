"""The solving pipeline: normalize ~p, saturate, read off the answer."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .answer import Answer, assemble
from .engine import Engine, EngineLimits, EngineStats
from .normalizer import normalize
from .syntax import Fresh, Not, all_vars, free_vars


@dataclass
class SolveResult:
    answer: Answer
    stats: EngineStats
    forest: list


def solve(
    p,
    limits: EngineLimits | None = None,
    check: bool = False,
    trace: Callable[[str], None] | None = None,
    compact: bool = True,
) -> SolveResult:
    """Solve p in the theory of trees.

    Raises NodeLimitExceeded or TimeoutExceeded (both carry partial
    statistics) when the limits are hit.  With ``check`` every rule
    application is verified against the termination measure and the
    working-formula conditions.  ``compact=False`` keeps the disjuncts
    exactly as the rules leave them.
    """
    fresh = Fresh()
    fresh.observe(all_vars(p))
    p1 = normalize(Not(p), fresh)
    engine = Engine(limits, fresh, check=check, trace=trace)
    engine.init_working(p1)
    forest = engine.saturate()
    return SolveResult(assemble(forest, free_vars(p), compact), engine.stats, forest)
