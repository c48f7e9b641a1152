"""Variables, terms and the first-order formula AST.

Variables carry an exact rational key; the strict order on keys is the
variable order used throughout the solver.  Two variables are the same
variable iff their keys are equal, names only matter for printing.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union


@dataclass(frozen=True, eq=False, slots=True)
class Variable:
    name: str
    key: Fraction

    def __post_init__(self):
        # integral keys are kept as ints: same order and hash, far cheaper
        k = self.key
        if type(k) is not int and k.denominator == 1:
            object.__setattr__(self, "key", int(k.numerator))

    def __eq__(self, other):
        if not isinstance(other, Variable):
            return NotImplemented
        return self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __lt__(self, other: "Variable") -> bool:
        return self.key < other.key

    def __repr__(self):
        return f"{self.name}@{self.key}"


@dataclass(frozen=True, slots=True)
class FunctionSymbol:
    name: str
    arity: int

    def __repr__(self):
        return f"{self.name}/{self.arity}"


@dataclass(frozen=True, slots=True)
class App:
    sym: FunctionSymbol
    args: tuple

    def __post_init__(self):
        if len(self.args) != self.sym.arity:
            raise ValueError(f"{self.sym.name} expects {self.sym.arity} arguments, got {len(self.args)}")


Term = Union[Variable, App]


def order_gt(u: Variable, v: Variable) -> bool:
    return u.key > v.key


class Fresh:
    """Source of fresh variables for one solve.

    Keeps a high-water mark so that every variable it hands out is above
    everything seen so far, including its own earlier results.
    """

    def __init__(self, floor: Fraction | int = 0):
        self.top = Fraction(floor)
        self.count = 0

    def observe(self, variables: Iterable[Variable]) -> None:
        for v in variables:
            if v.key > self.top:
                self.top = v.key

    def var_above(self, context: Iterable[Variable] = (), hint: str = "w") -> Variable:
        self.observe(context)
        self.top = Fraction(self.top.numerator // self.top.denominator + 1)
        self.count += 1
        return Variable(hint, self.top)


def fresh_var_above(context: Iterable[Variable], name_hint: str = "w", fresh: Fresh | None = None) -> Variable:
    if fresh is None:
        fresh = Fresh()
    return fresh.var_above(context, name_hint)


def key_between(low: Fraction, high: Fraction) -> Fraction:
    return (Fraction(low) + Fraction(high)) / 2


# ---------------------------------------------------------------- formulas


@dataclass(frozen=True, slots=True)
class TrueF:
    def __repr__(self):
        return "TRUE"


@dataclass(frozen=True, slots=True)
class FalseF:
    def __repr__(self):
        return "FALSE"


TRUE = TrueF()
FALSE = FalseF()


@dataclass(frozen=True, slots=True)
class Eq:
    lhs: Term
    rhs: Term


@dataclass(frozen=True, slots=True)
class Finite:
    arg: Term


@dataclass(frozen=True, slots=True)
class Not:
    body: "Formula"


@dataclass(frozen=True, slots=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True, slots=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True, slots=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True, slots=True)
class Iff:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True, slots=True)
class Exists:
    vars: tuple
    body: "Formula"

    def __post_init__(self):
        if len(set(self.vars)) != len(self.vars):
            raise ValueError("duplicate variable in quantifier")


@dataclass(frozen=True, slots=True)
class Forall:
    vars: tuple
    body: "Formula"

    def __post_init__(self):
        if len(set(self.vars)) != len(self.vars):
            raise ValueError("duplicate variable in quantifier")


Formula = Union[TrueF, FalseF, Eq, Finite, Not, And, Or, Implies, Iff, Exists, Forall]
BINARY = (And, Or, Implies, Iff)
QUANTIFIERS = (Exists, Forall)


def conj(parts: Iterable[Formula]) -> Formula:
    parts = list(parts)
    if not parts:
        return TRUE
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def disj(parts: Iterable[Formula]) -> Formula:
    parts = list(parts)
    if not parts:
        return FALSE
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


def conjuncts(f: Formula) -> list:
    out, stack = [], [f]
    while stack:
        g = stack.pop()
        if isinstance(g, And):
            stack.append(g.right)
            stack.append(g.left)
        else:
            out.append(g)
    return out


# ---------------------------------------------------------------- variables


def term_vars(t: Term, acc: set | None = None) -> set:
    if acc is None:
        acc = set()
    stack = [t]
    while stack:
        s = stack.pop()
        if isinstance(s, Variable):
            acc.add(s)
        else:
            stack.extend(s.args)
    return acc


def free_vars(f: Formula) -> set:
    match f:
        case TrueF() | FalseF():
            return set()
        case Eq(lhs, rhs):
            return term_vars(rhs, term_vars(lhs))
        case Finite(arg):
            return term_vars(arg)
        case Not(body):
            return free_vars(body)
        case And(l, r) | Or(l, r) | Implies(l, r) | Iff(l, r):
            return free_vars(l) | free_vars(r)
        case Exists(vs, body) | Forall(vs, body):
            return free_vars(body) - set(vs)
    raise TypeError(f"not a formula: {f!r}")


def all_vars(f: Formula) -> set:
    """Every variable occurring in f, bound or free."""
    match f:
        case TrueF() | FalseF():
            return set()
        case Eq(lhs, rhs):
            return term_vars(rhs, term_vars(lhs))
        case Finite(arg):
            return term_vars(arg)
        case Not(body):
            return all_vars(body)
        case And(l, r) | Or(l, r) | Implies(l, r) | Iff(l, r):
            return all_vars(l) | all_vars(r)
        case Exists(vs, body) | Forall(vs, body):
            return all_vars(body) | set(vs)
    raise TypeError(f"not a formula: {f!r}")


def bound_vars(f: Formula) -> list:
    """Binder occurrences in preorder (with repetitions)."""
    out = []

    def go(g):
        match g:
            case Not(body):
                go(body)
            case And(l, r) | Or(l, r) | Implies(l, r) | Iff(l, r):
                go(l)
                go(r)
            case Exists(vs, body) | Forall(vs, body):
                out.extend(vs)
                go(body)

    go(f)
    return out


def subst_term(t: Term, env: dict) -> Term:
    if isinstance(t, Variable):
        return env.get(t, t)
    return App(t.sym, tuple(subst_term(a, env) for a in t.args))


def rename(f: Formula, env: dict) -> Formula:
    """Replace variables (free and binders alike) according to env."""
    match f:
        case TrueF() | FalseF():
            return f
        case Eq(lhs, rhs):
            return Eq(subst_term(lhs, env), subst_term(rhs, env))
        case Finite(arg):
            return Finite(subst_term(arg, env))
        case Not(body):
            return Not(rename(body, env))
        case And(l, r) | Or(l, r) | Implies(l, r) | Iff(l, r):
            return type(f)(rename(l, env), rename(r, env))
        case Exists(vs, body) | Forall(vs, body):
            return type(f)(tuple(env.get(v, v) for v in vs), rename(body, env))
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------- discipline


def _max_key(vs) -> Fraction | None:
    best = None
    for v in vs:
        if best is None or v.key > best:
            best = v.key
    return best


def apply_discipline(f: Formula, fresh: Fresh | None = None) -> Formula:
    """Rename bound variables so that they are pairwise distinct, distinct
    from the free variables, and every bound variable is above every
    variable free in any subformula containing its binder.

    A binder keeps its variable when that already holds, so the function
    is idempotent.
    """
    if fresh is None:
        fresh = Fresh()
    fresh.observe(all_vars(f))
    globally_free = free_vars(f)
    used: set = set()
    fv_memo: dict = {}

    def fv(g):
        k = id(g)
        hit = fv_memo.get(k)
        if hit is None:
            hit = (g, free_vars(g))
            fv_memo[k] = hit
        return hit[1]

    def go(g, env: dict, ceiling):
        # ceiling: max key of the (renamed) free variables of g's ancestors
        local = _max_key(env.get(v, v) for v in fv(g))
        if local is not None and (ceiling is None or local > ceiling):
            ceiling = local
        match g:
            case TrueF() | FalseF():
                return g
            case Eq(lhs, rhs):
                return Eq(subst_term(lhs, env), subst_term(rhs, env))
            case Finite(arg):
                return Finite(subst_term(arg, env))
            case Not(body):
                return Not(go(body, env, ceiling))
            case And(l, r) | Or(l, r) | Implies(l, r) | Iff(l, r):
                return type(g)(go(l, env, ceiling), go(r, env, ceiling))
            case Exists(vs, body) | Forall(vs, body):
                inner = dict(env)
                out = []
                for v in vs:
                    ok = v not in used and v not in globally_free and (ceiling is None or v.key > ceiling)
                    w = v if ok else fresh.var_above((), v.name)
                    used.add(w)
                    inner[v] = w
                    out.append(w)
                return type(g)(tuple(out), go(body, inner, ceiling))
        raise TypeError(f"not a formula: {g!r}")

    return go(f, {}, None)


def satisfies_discipline(f: Formula) -> bool:
    """Direct check of the two discipline conditions."""
    binders = bound_vars(f)
    if len(set(binders)) != len(binders):
        return False
    if set(binders) & free_vars(f):
        return False
    top: dict = {}  # id(subformula) -> max key of its free variables

    def fv(g) -> set:
        match g:
            case TrueF() | FalseF():
                out = set()
            case Eq(lhs, rhs):
                out = term_vars(rhs, term_vars(lhs))
            case Finite(arg):
                out = term_vars(arg)
            case Not(body):
                out = fv(body)
            case And(l, r) | Or(l, r) | Implies(l, r) | Iff(l, r):
                out = fv(l) | fv(r)
            case Exists(vs, body) | Forall(vs, body):
                out = fv(body) - set(vs)
            case _:
                raise TypeError(f"not a formula: {g!r}")
        top[id(g)] = _max_key(out)
        return out

    fv(f)

    def go(g, ceiling):
        local = top[id(g)]
        if local is not None and (ceiling is None or local > ceiling):
            ceiling = local
        match g:
            case Not(body):
                return go(body, ceiling)
            case And(l, r) | Or(l, r) | Implies(l, r) | Iff(l, r):
                return go(l, ceiling) and go(r, ceiling)
            case Exists(vs, body) | Forall(vs, body):
                if ceiling is not None and any(v.key <= ceiling for v in vs):
                    return False
                return go(body, ceiling)
        return True

    return go(f, None)
