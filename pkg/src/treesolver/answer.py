"""Solved forms and the solver's final answer.

A final working tree ~(ex xs. alpha & ~(ex ys_1. beta_1) & ...) becomes a
general solved formula once each beta_i forgets the equations it shares
with alpha.  The answer to p is the disjunction of the un-negated general
solved formulas obtained from ~p.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .basics import (
    BasicFormula,
    EqApp,
    EqVar,
    atom_to_formula,
    atom_vars,
    check_solved,
    eq_index,
    fini_set,
    is_eq,
    lhs_set,
    reachable,
    rename_atom,
)
from .syntax import FALSE, TRUE, Exists, Not, Variable, conj, disj


class InvalidSolvedForm(Exception):
    pass


def _exists(quant, body):
    return Exists(tuple(quant), body) if quant else body


@dataclass(frozen=True)
class GeneralSolvedFormula:
    """~(ex quant. alpha & ~(ex ys_1. beta_1) & ... & ~(ex ys_n. beta_n))"""

    quant: tuple
    alpha: BasicFormula
    negparts: tuple = ()  # pairs (ys, beta)

    def to_formula(self):
        return Not(self.explicit().to_formula())

    def explicit(self) -> "ExplicitSolvedForm":
        return ExplicitSolvedForm(self.quant, self.alpha, self.negparts)

    def free_vars(self) -> set:
        out = self.alpha.variables()
        for ys, beta in self.negparts:
            out |= beta.variables() - set(ys)
        return out - set(self.quant)

    def to_boolean_combination(self):
        """(~ex xs. alpha) | (ex xs ys_1. alpha & beta_1) | ..."""
        parts = [Not(_exists(self.quant, self.alpha.to_formula()))]
        for ys, beta in self.negparts:
            body = conj([self.alpha.to_formula(), beta.to_formula()])
            parts.append(_exists(tuple(self.quant) + tuple(ys), body))
        return disj(parts)


@dataclass(frozen=True)
class ExplicitSolvedForm:
    """ex quant. alpha & ~(ex ys_1. beta_1) & ... ; its negation is a
    general solved formula."""

    quant: tuple
    alpha: BasicFormula
    negparts: tuple = ()

    def to_formula(self):
        body = conj(
            [atom_to_formula(a) for a in self.alpha]
            + [Not(_exists(ys, beta.to_formula())) for ys, beta in self.negparts]
        )
        return _exists(self.quant, body)

    def negation(self) -> GeneralSolvedFormula:
        return GeneralSolvedFormula(self.quant, self.alpha, self.negparts)

    def free_vars(self) -> set:
        return self.negation().free_vars()


# ---------------------------------------------------------------- validation


def solved_form_violations(g: GeneralSolvedFormula) -> list[str]:
    """Independent check of the six conditions on general solved formulas.

    Returns the list of failed conditions (empty when g is valid).
    """
    out = []
    alpha = list(g.alpha)
    alpha_eqs = [a for a in alpha if is_eq(a)]
    if not check_solved(alpha).solved:
        out.append("1: alpha not solved")
    for i, (ys, beta) in enumerate(g.negparts):
        if not check_solved(list(beta)).solved:
            out.append(f"1: beta_{i + 1} not solved")
        if not check_solved(alpha_eqs + list(beta)).solved:
            out.append(f"2: alpha equations & beta_{i + 1} not solved")
    if not _all_reachable(g.quant, alpha):
        out.append("3: unreachable variable in alpha's quantifier")
    for i, (ys, beta) in enumerate(g.negparts):
        if not _all_reachable(ys, list(beta)):
            out.append(f"4: unreachable variable in quantifier {i + 1}")
    for u in fini_set(alpha):
        for i, (ys, beta) in enumerate(g.negparts):
            both = alpha + list(beta)
            fin_b = fini_set(beta)
            if u in fin_b:
                continue
            lhs = lhs_set(both)
            reach, _, _ = reachable(both, {u})
            if not any(v in fin_b and v not in lhs for v in reach):
                out.append(f"5: finite({u.name}) not propagated into beta_{i + 1}")
    alpha_set = set(alpha)
    for i, (ys, beta) in enumerate(g.negparts):
        if all(a in alpha_set for a in beta):
            out.append(f"6: beta_{i + 1} adds nothing to alpha")
    return out


def _all_reachable(quant, atoms) -> bool:
    bound = set(quant)
    seeds = {v for a in atoms for v in atom_vars(a)} - bound
    reach, _, _ = reachable(atoms, seeds, bound)
    return bound <= reach


def validate(g: GeneralSolvedFormula) -> None:
    problems = solved_form_violations(g)
    if problems:
        raise InvalidSolvedForm("; ".join(problems))


# ---------------------------------------------------------------- extraction


def final_to_general(node) -> GeneralSolvedFormula:
    """Read a final working tree (depth <= 2, all levels 5)."""
    if node.level != 5 or any(c.level != 5 or c.children for c in node.children):
        raise InvalidSolvedForm("not a final working formula")
    alpha_eqs = {a for a in node.basic if is_eq(a)}
    negparts = tuple(
        (tuple(c.quant), BasicFormula(a for a in c.basic if a not in alpha_eqs)) for c in node.children
    )
    return GeneralSolvedFormula(tuple(node.quant), BasicFormula(node.basic), negparts)


# ---------------------------------------------------------------- canonical form


def _rank_vars(start: list, atoms: list, order: dict) -> None:
    """Depth-first numbering along equations from the start variables."""
    index = eq_index(atoms)

    def visit(v):
        if v in order:
            return
        order[v] = len(order)
        for e in index.get(v, ()):
            for w in (e.rhs,) if type(e) is EqVar else e.args:
                visit(w)

    for v in start:
        visit(v)
    for a in atoms:  # variables only reachable through finite atoms etc.
        for v in atom_vars(a):
            visit(v)


def _sort_atoms(atoms, order: dict) -> list:
    def key(a):
        if is_eq(a):
            return (0, order[a.lhs])
        return (1, order[a.var])

    return sorted(atoms, key=key)


def canonical(forms, first_index: int = 1) -> list:
    """Rename bound variables u1, u2, ... in traversal order and sort atoms.

    The counter runs on across the given forms, which keep their order.
    """
    out = []
    counter = first_index
    for e in forms:
        free = sorted(e.free_vars(), key=lambda v: (v.name, v.key))
        order: dict = {}
        _rank_vars(free, list(e.alpha), order)
        for ys, beta in e.negparts:
            local = sorted(beta.variables() - set(ys), key=lambda v: order.get(v, len(order)))
            _rank_vars(local, list(beta), order)
        env = {}
        bound = set(e.quant)
        for ys, _ in e.negparts:
            bound |= set(ys)
        for v in sorted(bound, key=lambda v: order.get(v, len(order))):
            env[v] = Variable(f"u{counter}", v.key)
            counter += 1
        alpha = BasicFormula(rename_atom(a, env) for a in _sort_atoms(e.alpha, order))
        quant = tuple(env[v] for v in sorted(e.quant, key=lambda v: order[v]))
        negparts = []
        for ys, beta in e.negparts:
            negparts.append(
                (
                    tuple(env[v] for v in sorted(ys, key=lambda v: order[v])),
                    BasicFormula(rename_atom(a, env) for a in _sort_atoms(beta, order)),
                )
            )
        out.append(type(e)(quant, alpha, tuple(negparts)))
    return out


# ---------------------------------------------------------------- compaction


def compact(e: ExplicitSolvedForm) -> ExplicitSolvedForm:
    """An equivalent, smaller explicit solved form.

    Two equivalences are used on variables of ``e.quant``:
    ex u. u = v & p  is  p[v/u], and two variables defined by the same
    term denote the same tree, so one can replace the other.  The result
    is re-validated; if it is not a solved form, ``e`` comes back as is.
    """
    bound = set(e.quant)
    alpha = list(e.alpha)
    negs = [(ys, list(beta)) for ys, beta in e.negparts]

    def subst(env):
        nonlocal alpha, negs
        alpha = _dedupe(rename_atom(a, env) for a in alpha)
        negs = [(ys, _dedupe(rename_atom(a, env) for a in beta)) for ys, beta in negs]

    while True:
        link = next((a for a in alpha if type(a) is EqVar and a.lhs in bound), None)
        if link is not None:
            alpha.remove(link)
            bound.discard(link.lhs)
            subst({link.lhs: link.rhs})
            continue
        pointed = {a.rhs for a in alpha if type(a) is EqVar}
        for _, beta in negs:
            pointed |= {a.rhs for a in beta if type(a) is EqVar}
        seen: dict = {}
        twin = None
        for a in sorted((a for a in alpha if type(a) is EqApp), key=lambda a: a.lhs):
            if a.lhs not in bound or a.lhs in pointed:
                continue
            k = (a.sym, a.args)
            if k in seen:
                twin = (a, seen[k])
                break
            seen[k] = a.lhs
        if twin is None:
            break
        gone, keep = twin
        alpha.remove(gone)
        bound.discard(gone.lhs)
        subst({gone.lhs: keep})
    quant = tuple(v for v in e.quant if v in bound)
    out = ExplicitSolvedForm(quant, BasicFormula(alpha), tuple((ys, BasicFormula(b)) for ys, b in negs))
    if solved_form_violations(out.negation()):
        return e
    return out


def _dedupe(atoms) -> list:
    return list(dict.fromkeys(atoms))


# ---------------------------------------------------------------- the answer


@dataclass(frozen=True)
class Answer:
    kind: str  # "true", "false" or "disjunction"
    disjuncts: tuple = field(default=())

    def __post_init__(self):
        if self.kind not in ("true", "false", "disjunction"):
            raise ValueError(self.kind)
        if (self.kind == "disjunction") != bool(self.disjuncts):
            raise ValueError("only a disjunction has disjuncts")

    def to_formula(self):
        if self.kind == "true":
            return TRUE
        if self.kind == "false":
            return FALSE
        return disj(d.to_formula() for d in self.disjuncts)

    def text(self) -> str:
        from .parsing import print_formula

        if self.kind != "disjunction":
            return self.kind
        return "\n| ".join(print_formula(d.to_formula()) for d in self.disjuncts)

    def to_json(self) -> dict:
        if self.kind != "disjunction":
            return {"kind": self.kind, "disjuncts": []}
        return {"kind": self.kind, "disjuncts": [_form_json(d) for d in self.disjuncts]}


def _atom_json(a) -> str:
    from .parsing import print_formula

    return print_formula(atom_to_formula(a))


def _form_json(e: ExplicitSolvedForm) -> dict:
    return {
        "quant": [v.name for v in e.quant],
        "alpha": [_atom_json(a) for a in e.alpha],
        "negparts": [
            {"quant": [v.name for v in ys], "beta": [_atom_json(a) for a in beta]} for ys, beta in e.negparts
        ],
    }


def _text(e) -> str:
    from .parsing import print_formula

    return print_formula(e.to_formula())


def assemble(forest, original_free: set, compact_forms: bool = True) -> Answer:
    """Turn the final forest obtained from ~p into the answer for p.

    With ``compact_forms`` each disjunct goes through ``compact``.
    """
    generals = [final_to_general(n) for n in forest]
    for g in generals:
        validate(g)
    if not generals:
        return Answer("false")
    explicit = [g.explicit() for g in generals]
    if any(not e.free_vars() for e in explicit):
        # a closed general solved formula is ~(ex. true): p holds outright
        for e in explicit:
            if not e.free_vars() and (e.quant or len(e.alpha) or e.negparts):
                raise InvalidSolvedForm("closed general solved formula is not ~true")
        return Answer("true")
    if any(not (e.free_vars() <= set(original_free)) for e in explicit):
        raise InvalidSolvedForm("answer has new free variables")
    if compact_forms:
        explicit = [compact(e) for e in explicit]
    # collapse duplicates, order by size then printed form, then number
    # bound variables
    unique = {}
    for e in explicit:
        alone = canonical([e])[0]
        unique.setdefault((len(alone.quant), len(alone.alpha), len(alone.negparts), _text(alone)), e)
    ordered = [unique[k] for k in sorted(unique)]
    return Answer("disjunction", tuple(canonical(ordered)))


# ---------------------------------------------------------------- reading values


def ground_value(e: ExplicitSolvedForm, v: Variable):
    """The finite tree that e forces on v, as a term, or None when e leaves
    some freedom (a negated part, a cycle or an undefined variable)."""
    from .syntax import App

    if e.negparts:
        return None
    index = eq_index(list(e.alpha))
    visiting: set = set()

    def build(u):
        eqs = index.get(u)
        if not eqs or u in visiting:
            return None
        visiting.add(u)
        a = eqs[0]
        if type(a) is EqVar:
            t = build(a.rhs)
        else:
            args = [build(w) for w in a.args]
            t = None if any(x is None for x in args) else App(a.sym, tuple(args))
        visiting.discard(u)
        return t

    return build(v)


# ---------------------------------------------------------------- checking solutions


def check_solution(e: ExplicitSolvedForm, assignment: dict) -> bool:
    """Does the assignment of rational trees to the free variables of e
    satisfy e?"""
    from .oracle import decide_exists

    missing = [v for v in e.free_vars() if v not in assignment]
    if missing:
        raise KeyError(f"no value for {', '.join(sorted(v.name for v in missing))}")
    enc = _encode_assignment(assignment, e)
    if not decide_exists(e.quant, list(e.alpha) + enc):
        return False
    for ys, beta in e.negparts:
        if decide_exists(tuple(e.quant) + tuple(ys), list(e.alpha) + list(beta) + enc):
            return False
    return True


def _encode_assignment(assignment: dict, e) -> list:
    """Equations pinning each variable to its tree, over new variables."""
    used = set(e.alpha.variables())
    used |= set(e.quant)
    for ys, beta in e.negparts:
        used |= beta.variables() | set(ys)
    top = max((v.key for v in used), default=0)
    atoms = []
    for v, tree in assignment.items():
        names = {}
        for nid in tree.nodes:
            top += 1
            names[nid] = Variable(f"t{nid}", top)
        for nid, (sym, kids) in tree.nodes.items():
            atoms.append(EqApp(names[nid], sym, tuple(names[k] for k in kids)))
        atoms.append(EqVar(v, names[tree.root]))
    return atoms

