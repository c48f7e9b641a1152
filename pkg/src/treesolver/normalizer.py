"""Turn arbitrary formulas into normalized formulas.

A normalized formula is ``~(ex xs. basic & child_1 & ... & child_n)`` where
each child is again normalized.  ``normalize`` runs eight steps: flatten
atoms, reduce to ~/&/ex, wrap the top in a negation, rename for the
variable discipline, lift quantifiers over conjunctions, group nested
quantifiers, read off the nested structure, and rename once more.
"""

from __future__ import annotations

from dataclasses import dataclass

from .basics import (
    TRUE_ATOM,
    BasicFormula,
    EqApp,
    EqVar,
    FiniteAtom,
    atom_to_formula,
    atom_vars,
)
from .syntax import (
    TRUE,
    And,
    App,
    Eq,
    Exists,
    FalseF,
    Finite,
    Forall,
    Fresh,
    Iff,
    Implies,
    Not,
    Or,
    TrueF,
    Variable,
    all_vars,
    apply_discipline,
    conj,
    conjuncts,
)


@dataclass(frozen=True)
class NormalizedFormula:
    quant: tuple
    basic: BasicFormula
    children: tuple = ()

    @property
    def depth(self) -> int:
        return 1 + max((c.depth for c in self.children), default=0)

    def size(self) -> int:
        return 1 + len(self.quant) + len(self.basic) + sum(c.size() for c in self.children)

    def to_formula(self):
        body = conj([atom_to_formula(a) for a in self.basic] + [c.to_formula() for c in self.children])
        if self.quant:
            body = Exists(tuple(self.quant), body)
        return Not(body)

    def variables(self) -> set:
        out = set(self.quant) | self.basic.variables()
        for c in self.children:
            out |= c.variables()
        return out

    def free_vars(self) -> set:
        inner = self.basic.variables()
        for c in self.children:
            inner |= c.free_vars()
        return inner - set(self.quant)


# ---------------------------------------------------------------- step 1


def _name_term(t, fresh: Fresh, hint: str, out_vars: list, out_atoms: list) -> Variable:
    """Return a variable standing for t, emitting flat equations for it."""
    if isinstance(t, Variable):
        return t
    u = fresh.var_above((), hint)
    out_vars.append(u)
    _define(u, t, fresh, out_vars, out_atoms)
    return u


def _define(x: Variable, t: App, fresh: Fresh, out_vars: list, out_atoms: list) -> None:
    args = tuple(_name_term(a, fresh, "u", out_vars, out_atoms) for a in t.args)
    out_atoms.insert(0, Eq(x, App(t.sym, args)))


def _flatten_atom(f, fresh: Fresh):
    new_vars: list = []
    atoms: list = []
    match f:
        case Eq(Variable() as x, Variable() as y):
            return f
        case Eq(Variable() as x, App() as t) | Eq(App() as t, Variable() as x):
            if all(isinstance(a, Variable) for a in t.args):
                return Eq(x, t)
            _define(x, t, fresh, new_vars, atoms)
        case Eq(App() as s, App() as t):
            u = fresh.var_above((), "u")
            new_vars.append(u)
            second: list = []
            _define(u, t, fresh, new_vars, second)
            _define(u, s, fresh, new_vars, atoms)
            atoms.extend(second)
        case Finite(Variable()):
            return f
        case Finite(App() as t):
            u = fresh.var_above((), "u")
            new_vars.append(u)
            _define(u, t, fresh, new_vars, atoms)
            atoms.append(Finite(u))
        case _:
            raise TypeError(f"not an atom: {f!r}")
    new_vars.sort()
    return Exists(tuple(new_vars), conj(atoms))


def flatten(f, fresh: Fresh | None = None):
    """Make every atom flat, naming nested terms with new existential
    variables placed right at the atom."""
    if fresh is None:
        fresh = Fresh()
        fresh.observe(all_vars(f))
    match f:
        case TrueF() | FalseF():
            return f
        case Eq() | Finite():
            return _flatten_atom(f, fresh)
        case Not(body):
            return Not(flatten(body, fresh))
        case And(l, r) | Or(l, r) | Implies(l, r) | Iff(l, r):
            return type(f)(flatten(l, fresh), flatten(r, fresh))
        case Exists(vs, body) | Forall(vs, body):
            return type(f)(vs, flatten(body, fresh))
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------- step 2


def to_core_connectives(f):
    """Express everything with ~, & and ex; false becomes ~true."""
    match f:
        case TrueF() | Eq() | Finite():
            return f
        case FalseF():
            return Not(TRUE)
        case Not(body):
            return Not(to_core_connectives(body))
        case And(l, r):
            return And(to_core_connectives(l), to_core_connectives(r))
        case Or(l, r):
            return Not(And(Not(to_core_connectives(l)), Not(to_core_connectives(r))))
        case Implies(l, r):
            return Not(And(to_core_connectives(l), Not(to_core_connectives(r))))
        case Iff(l, r):
            a, b = to_core_connectives(l), to_core_connectives(r)
            return And(Not(And(a, Not(b))), Not(And(b, Not(a))))
        case Exists(vs, body):
            return Exists(vs, to_core_connectives(body))
        case Forall(vs, body):
            return Not(Exists(vs, Not(to_core_connectives(body))))
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------- step 3


def wrap(f):
    if isinstance(f, Not):
        return f
    return Not(And(TRUE, Not(f)))


# ---------------------------------------------------------------- steps 5, 6


def _peel(f):
    vs = []
    while isinstance(f, Exists):
        vs.extend(f.vars)
        f = f.body
    return vs, f


def lift_quantifiers(f):
    """phi & (ex xs. psi) becomes ex xs. (phi & psi), bottom-up."""
    match f:
        case Not(body):
            return Not(lift_quantifiers(body))
        case Exists(vs, body):
            return Exists(vs, lift_quantifiers(body))
        case And(l, r):
            l, r = lift_quantifiers(l), lift_quantifiers(r)
            if not isinstance(l, Exists) and not isinstance(r, Exists):
                return And(l, r)
            out = And(_peel(l)[1], _peel(r)[1])
            # rebuild the prefixes, left operand's quantifiers outermost
            for part in (r, l):
                blocks = []
                while isinstance(part, Exists):
                    blocks.append(part.vars)
                    part = part.body
                for vs in reversed(blocks):
                    out = Exists(vs, out)
            return out
    return f


def group_quantifiers(f):
    match f:
        case Not(body):
            return Not(group_quantifiers(body))
        case Exists():
            vs, body = _peel(f)
            return Exists(tuple(vs), group_quantifiers(body))
        case And(l, r):
            return And(group_quantifiers(l), group_quantifiers(r))
    return f


# ---------------------------------------------------------------- step 7


def flat_atom(f):
    match f:
        case TrueF():
            return TRUE_ATOM
        case Eq(Variable() as x, Variable() as y):
            return EqVar(x, y)
        case Eq(Variable() as x, App() as t):
            return EqApp(x, t.sym, t.args)
        case Finite(Variable() as x):
            return FiniteAtom(x)
    return None


def insert_empty(f) -> NormalizedFormula:
    """Read a ~(ex xs. atoms & ~... & ~...) tree, filling in empty vectors
    and empty basic formulas where they are missing."""
    if not isinstance(f, Not):
        raise ValueError("normalized formulas start with a negation")
    vs, body = _peel(f.body)
    atoms, children = [], []
    for part in conjuncts(body):
        a = flat_atom(part)
        if a is not None:
            atoms.append(a)
        elif isinstance(part, Not):
            children.append(insert_empty(part))
        else:
            raise ValueError(f"unexpected conjunct {part!r}")
    return NormalizedFormula(tuple(vs), BasicFormula(atoms), tuple(children))


def from_formula(f) -> NormalizedFormula:
    return insert_empty(f)


# ---------------------------------------------------------------- pipeline


def normalize(f, fresh: Fresh | None = None, steps: list | None = None) -> NormalizedFormula:
    """Equivalent normalized formula without new free variables.

    When ``steps`` is a list, the intermediate formula of every step is
    appended to it.
    """
    if fresh is None:
        fresh = Fresh()
    fresh.observe(all_vars(f))

    def record(g):
        if steps is not None:
            steps.append(g)
        return g

    g = record(flatten(f, fresh))
    g = record(to_core_connectives(g))
    g = record(wrap(g))
    g = record(apply_discipline(g, fresh))
    g = record(lift_quantifiers(g))
    g = record(group_quantifiers(g))
    n = record(insert_empty(g))
    n = from_formula(apply_discipline(n.to_formula(), fresh))
    record(n)
    return n


def rename_normalized(n: NormalizedFormula, env: dict) -> NormalizedFormula:
    from .basics import rename_atom

    return NormalizedFormula(
        tuple(env.get(v, v) for v in n.quant),
        BasicFormula(rename_atom(a, env) for a in n.basic),
        tuple(rename_normalized(c, env) for c in n.children),
    )


def basic_atoms_vars(n: NormalizedFormula) -> set:
    out = set()
    for a in n.basic:
        out.update(atom_vars(a))
    return out
