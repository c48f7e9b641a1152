"""Benchmark formula generators: the two-player game and random normalized
formulas."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .basics import TRUE_ATOM, BasicFormula, EqApp, EqVar, FiniteAtom, atom_vars
from .normalizer import NormalizedFormula, from_formula
from .parsing import parse
from .syntax import FunctionSymbol, Variable, apply_discipline

# ---------------------------------------------------------------- the game

_PRED = (
    "((ex j. {A} = f(j) & ((ex k. j = g(k) & {B} = j) | (~(ex k. j = g(k)) & {B} = {A})))"
    " | (ex j. {A} = g(j) & ((ex k. j = g(k) & {B} = {A}) | (~(ex k. j = g(k)) & {B} = j)))"
    " | (~(ex j. {A} = f(j)) & ~(ex j. {A} = g(j)) & ~({A} = 0) & {B} = {A}))"
)

_TRANSITION = (
    "(ex u1, v1, u2, v2. {X} = c(u1, v1) & {Y} = c(u2, v2) & ("
    "(v1 = 0 & v2 = v1 & {PRED})"
    " | (v1 = 1 & ((ex w. u1 = g(w) & ((u2 = f(u1) & v2 = v1) | (u2 = u1 & v2 = 0)))"
    " | (~(ex w. u1 = g(w)) & u2 = g(u1) & (v2 = v1 | v2 = 0))))"
    " | (~(v1 = 0) & ~(v1 = 1) & u2 = u1 & v2 = v1)))"
)


def move_text(x: str, y: str) -> str:
    pred = _PRED.format(A="u1", B="u2")
    transition = _TRANSITION.format(X=x, Y=y, PRED=pred)
    return f"({transition} | (~(ex u, v. {x} = c(u, v)) & {x} = {y}))"


def winning_text(k: int) -> str:
    """Text of winning_k(x): 2k alternating quantifier blocks around false."""
    if k < 1:
        raise ValueError("k must be positive")
    inner = "false"
    for _ in range(k):
        inner = f"ex y. {move_text('x', 'y')} & ~(ex x. {move_text('y', 'x')} & ~({inner}))"
    return inner


def gen_winning(k: int):
    return parse(winning_text(k))


# ---------------------------------------------------------------- random formulas

RANDOM_SYMBOLS = (
    FunctionSymbol("f0", 0),
    FunctionSymbol("f1", 1),
    FunctionSymbol("f2", 2),
    FunctionSymbol("g0", 0),
    FunctionSymbol("g1", 1),
    FunctionSymbol("g2", 2),
)


@dataclass(frozen=True)
class RandomSpec:
    depth: int
    seed: int
    n_children: tuple = (0, 4)
    atoms_per_basic: tuple = (1, 8)
    n_vars: int = 10
    max_quant: int = 3
    closed: bool = False

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("depth must be at least 1")


def gen_random(spec: RandomSpec) -> NormalizedFormula:
    """A random normalized formula of exactly the requested depth.

    One child per level is forced to continue down to the target depth and
    every node at the target depth is a leaf.  With ``closed`` every
    variable is quantified at the top.
    """
    rng = random.Random(spec.seed)
    pool = [Variable(f"v{i}", i + 1) for i in range(spec.n_vars)]

    def atom(has_true: list):
        r = rng.random()
        if r < 0.08 and not has_true[0]:
            has_true[0] = True
            return TRUE_ATOM
        if r < 0.25:
            return FiniteAtom(rng.choice(pool))
        if r < 0.5:
            return EqVar(rng.choice(pool), rng.choice(pool))
        sym = rng.choice(RANDOM_SYMBOLS)
        return EqApp(rng.choice(pool), sym, tuple(rng.choice(pool) for _ in range(sym.arity)))

    def node(level: int, spine: bool) -> NormalizedFormula:
        n_atoms = rng.randint(*spec.atoms_per_basic)
        flag = [False]
        atoms = [atom(flag) for _ in range(n_atoms)]
        quant = tuple(rng.sample(pool, rng.randint(0, spec.max_quant)))
        if level == spec.depth:
            kids = []
        else:
            n = rng.randint(*spec.n_children)
            if spine:
                n = max(n, 1)
            kids = [node(level + 1, spine and i == 0) for i in range(n)]
        return NormalizedFormula(quant, BasicFormula(atoms), tuple(kids))

    root = node(1, True)
    if spec.closed:
        free = root.free_vars()
        root = NormalizedFormula(tuple(sorted(set(root.quant) | free)), root.basic, root.children)
    return from_formula(apply_discipline(root.to_formula()))


def gen_exists_conjunction(seed: int, max_atoms: int = 8, max_vars: int = 6):
    """A random existential conjunction of flat atoms: (quant, atoms)."""
    rng = random.Random(seed)
    pool = [Variable(f"v{i}", i + 1) for i in range(rng.randint(1, max_vars))]
    syms = RANDOM_SYMBOLS
    atoms = []
    for _ in range(rng.randint(1, max_atoms)):
        r = rng.random()
        if r < 0.2:
            atoms.append(FiniteAtom(rng.choice(pool)))
        elif r < 0.45:
            atoms.append(EqVar(rng.choice(pool), rng.choice(pool)))
        else:
            sym = rng.choice(syms)
            atoms.append(EqApp(rng.choice(pool), sym, tuple(rng.choice(pool) for _ in range(sym.arity))))
    used = sorted({v for a in atoms for v in atom_vars(a)})
    return tuple(used), atoms

