from fractions import Fraction

import pytest

from treesolver.syntax import FunctionSymbol, Variable


def ordered(*names: str) -> dict:
    """Variables keyed so that the first name is the largest."""
    n = len(names)
    return {name: Variable(name, Fraction(n - i)) for i, name in enumerate(names)}


def sym(name: str, arity: int) -> FunctionSymbol:
    return FunctionSymbol(name, arity)


@pytest.fixture
def V():
    return ordered
