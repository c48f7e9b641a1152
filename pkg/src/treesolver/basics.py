"""Flat atoms and basic formulas (conjunctions of flat atoms)."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Union

from .syntax import TRUE, App, Eq, Finite, FunctionSymbol, Variable, conj


@dataclass(frozen=True, slots=True)
class TrueAtom:
    def __repr__(self):
        return "true"


TRUE_ATOM = TrueAtom()


@dataclass(frozen=True, slots=True)
class EqVar:
    lhs: Variable
    rhs: Variable

    def __repr__(self):
        return f"{self.lhs.name}={self.rhs.name}"


@dataclass(frozen=True, slots=True)
class EqApp:
    lhs: Variable
    sym: FunctionSymbol
    args: tuple

    def __post_init__(self):
        if len(self.args) != self.sym.arity:
            raise ValueError(f"{self.sym.name} expects {self.sym.arity} arguments")

    def __repr__(self):
        return f"{self.lhs.name}={self.sym.name}({','.join(a.name for a in self.args)})"


@dataclass(frozen=True, slots=True)
class FiniteAtom:
    var: Variable

    def __repr__(self):
        return f"finite({self.var.name})"


FlatAtom = Union[TrueAtom, EqVar, EqApp, FiniteAtom]
Equation = Union[EqVar, EqApp]


def is_eq(a) -> bool:
    return type(a) is EqVar or type(a) is EqApp


def rhs_vars(a) -> tuple:
    if type(a) is EqVar:
        return (a.rhs,)
    if type(a) is EqApp:
        return a.args
    return ()


def atom_vars(a) -> tuple:
    t = type(a)
    if t is EqVar:
        return (a.lhs, a.rhs)
    if t is EqApp:
        return (a.lhs,) + a.args
    if t is FiniteAtom:
        return (a.var,)
    return ()


def rename_atom(a, env: dict):
    t = type(a)
    if t is EqVar:
        return EqVar(env.get(a.lhs, a.lhs), env.get(a.rhs, a.rhs))
    if t is EqApp:
        return EqApp(env.get(a.lhs, a.lhs), a.sym, tuple(env.get(x, x) for x in a.args))
    if t is FiniteAtom:
        return FiniteAtom(env.get(a.var, a.var))
    return a


def atom_to_formula(a):
    t = type(a)
    if t is EqVar:
        return Eq(a.lhs, a.rhs)
    if t is EqApp:
        return Eq(a.lhs, App(a.sym, a.args))
    if t is FiniteAtom:
        return Finite(a.var)
    return TRUE


@dataclass(frozen=True)
class BasicFormula:
    """Multiset of flat atoms; the empty multiset is true."""

    atoms: tuple = ()

    def __init__(self, atoms: Iterable = ()):
        object.__setattr__(self, "atoms", tuple(a for a in atoms if type(a) is not TrueAtom))

    def __iter__(self):
        return iter(self.atoms)

    def __len__(self):
        return len(self.atoms)

    def equations(self) -> list:
        return [a for a in self.atoms if is_eq(a)]

    def finites(self) -> list:
        return [a for a in self.atoms if type(a) is FiniteAtom]

    def variables(self) -> set:
        out = set()
        for a in self.atoms:
            out.update(atom_vars(a))
        return out

    def same_atoms(self, other: "BasicFormula") -> bool:
        return Counter(self.atoms) == Counter(other.atoms)

    def to_formula(self):
        return conj(atom_to_formula(a) for a in self.atoms)

    def __repr__(self):
        return " & ".join(map(repr, self.atoms)) or "true"


def lhs_set(b: Iterable) -> set:
    return {a.lhs for a in b if is_eq(a)}


def fini_set(b: Iterable) -> set:
    return {a.var for a in b if type(a) is FiniteAtom}


@dataclass(frozen=True)
class Violation:
    kind: str  # duplicate-lhs, misordered-var-eq, lhs-in-FINI, duplicate-finite
    var: Variable


@dataclass(frozen=True)
class SolvednessReport:
    solved: bool
    violations: tuple = field(default=())


def check_solved(b: Iterable) -> SolvednessReport:
    violations = []
    lhs_seen, fin_seen = set(), set()
    for a in b:
        t = type(a)
        if t is EqVar or t is EqApp:
            if a.lhs in lhs_seen:
                violations.append(Violation("duplicate-lhs", a.lhs))
            lhs_seen.add(a.lhs)
            if t is EqVar and not a.lhs.key > a.rhs.key:
                violations.append(Violation("misordered-var-eq", a.lhs))
        elif t is FiniteAtom:
            if a.var in fin_seen:
                violations.append(Violation("duplicate-finite", a.var))
            fin_seen.add(a.var)
    for v in sorted(lhs_seen & fin_seen):
        violations.append(Violation("lhs-in-FINI", v))
    return SolvednessReport(not violations, tuple(violations))


def is_solved(b: Iterable) -> bool:
    return check_solved(b).solved


def eq_index(b: Iterable) -> dict:
    """lhs -> list of equations with that lhs."""
    index: dict = {}
    for a in b:
        if is_eq(a):
            index.setdefault(a.lhs, []).append(a)
    return index


def reachable(b: Iterable, seeds: Iterable, bound: Iterable | None = None):
    """Variables reachable from seeds by following equations lhs -> rhs.

    Returns (vars, eqs, finis): the reachable variables, the equations whose
    lhs is reachable, and the finite atoms that count as reachable: those on
    a reachable variable or on a variable outside ``bound``.  Without
    ``bound``, every variable that is neither a seed nor reached counts as
    bound.
    """
    atoms = list(b)
    index = eq_index(atoms)
    seen = set(seeds)
    stack = list(seen)
    while stack:
        v = stack.pop()
        for e in index.get(v, ()):
            for w in rhs_vars(e):
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
    eqs = [a for a in atoms if is_eq(a) and a.lhs in seen]
    bound_set = None if bound is None else set(bound)
    finis = [
        a
        for a in atoms
        if type(a) is FiniteAtom and (a.var in seen or (bound_set is not None and a.var not in bound_set))
    ]
    return seen, eqs, finis


def reachable_in(quant: Iterable, b: Iterable):
    """Reachability in the formula ex quant. b: seeds are its free variables."""
    atoms = list(b)
    quant = set(quant)
    seeds = set()
    for a in atoms:
        seeds.update(v for v in atom_vars(a) if v not in quant)
    return reachable(atoms, seeds, quant)


def self_reachable(u: Variable, b: Iterable) -> bool:
    """True iff u can be reached from u by following at least one equation."""
    index = eq_index(b)
    seen = set()
    stack = [w for e in index.get(u, ()) for w in rhs_vars(e)]
    while stack:
        v = stack.pop()
        if v == u:
            return True
        if v in seen:
            continue
        seen.add(v)
        for e in index.get(v, ()):
            stack.extend(rhs_vars(e))
    return False
