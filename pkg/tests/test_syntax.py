from fractions import Fraction

import pytest
from hypothesis import given

from treesolver.parsing import ArityError, ParseError, parse, parse_term, print_formula, print_term
from treesolver.syntax import (
    And,
    App,
    Eq,
    Exists,
    Finite,
    Forall,
    Fresh,
    FalseF,
    Iff,
    Implies,
    Not,
    Or,
    TrueF,
    Variable,
    apply_discipline,
    bound_vars,
    free_vars,
    key_between,
    order_gt,
    satisfies_discipline,
)

from conftest import ordered
from strategies import formulas


def alpha_equal(f, g, env_f=None, env_g=None, depth=0) -> bool:
    """Structural equality up to renaming of bound variables."""
    env_f, env_g = env_f or {}, env_g or {}

    def term(s, t):
        if isinstance(s, Variable) and isinstance(t, Variable):
            return env_f.get(s, ("free", s)) == env_g.get(t, ("free", t))
        if isinstance(s, App) and isinstance(t, App):
            return s.sym == t.sym and all(term(a, b) for a, b in zip(s.args, t.args))
        return False

    match f, g:
        case (TrueF(), TrueF()) | (FalseF(), FalseF()):
            return True
        case Eq(a, b), Eq(c, d):
            return term(a, c) and term(b, d)
        case Finite(a), Finite(b):
            return term(a, b)
        case Not(a), Not(b):
            return alpha_equal(a, b, env_f, env_g, depth)
        case (And(a, b), And(c, d)) | (Or(a, b), Or(c, d)) | (Implies(a, b), Implies(c, d)) | (Iff(a, b), Iff(c, d)):
            return type(f) is type(g) and alpha_equal(a, c, env_f, env_g, depth) and alpha_equal(b, d, env_f, env_g, depth)
        case (Exists(vs, a), Exists(ws, b)) | (Forall(vs, a), Forall(ws, b)):
            if type(f) is not type(g) or len(vs) != len(ws):
                return False
            ef, eg = dict(env_f), dict(env_g)
            for i, (v, w) in enumerate(zip(vs, ws)):
                ef[v] = eg[w] = ("bound", depth, i)
            return alpha_equal(a, b, ef, eg, depth + 1)
    return False


def test_order_is_strict_on_keys():
    x, y = Variable("x", 3), Variable("y", 1)
    assert order_gt(x, y) and not order_gt(y, x) and not order_gt(x, x)
    assert Variable("other", 3) == x


def test_key_between_is_dense():
    low, high = Fraction(1), Fraction(2)
    mid = key_between(low, high)
    assert low < mid < high
    assert low < key_between(low, mid) < mid


def test_fresh_variables_climb_above_context():
    fresh = Fresh()
    ctx = [Variable("a", Fraction(7, 2)), Variable("b", 2)]
    w1 = fresh.var_above(ctx)
    w2 = fresh.var_above()
    assert all(w1.key > v.key for v in ctx)
    assert w2.key > w1.key


def test_parse_existential():
    f = parse("ex y. x = f(y)")
    x, y = sorted(free_vars(f) | set(bound_vars(f)))
    assert f == Exists((y,), Eq(x, App(f.body.rhs.sym, (y,))))
    assert x.name == "x" and y.name == "y" and y.key > x.key


def test_parse_intro_formula():
    f = parse("~(ex y. x = f(y) & ~(ex z, w. x = f(z) & w = f(w)))")
    assert {v.name for v in free_vars(f)} == {"x"}
    assert [v.name for v in bound_vars(f)] == ["y", "z", "w"]
    assert satisfies_discipline(f)


def test_parse_precedence():
    f = parse("~x = y & x = z | finite(x) -> true <-> false")
    assert isinstance(f, Iff)
    assert isinstance(f.left, Implies)
    assert isinstance(f.left.left, Or)
    assert isinstance(f.left.left.left, And)
    assert isinstance(f.left.left.left.left, Not)


def test_constants():
    t = parse_term("f(a, 0, b())")
    assert isinstance(t.args[0], Variable)
    assert t.args[1].sym.arity == 0 and t.args[2].sym.arity == 0
    assert print_term(t) == "f(a, 0, b())"
    # once applied anywhere, a name is a constant everywhere
    assert not isinstance(parse_term("f(a, a())").args[0], Variable)


def test_unbalanced_parenthesis_is_reported():
    with pytest.raises(ParseError) as err:
        parse("f(x")
    assert str(err.value).startswith("1:4:")


def test_inconsistent_arity_is_reported():
    with pytest.raises(ArityError):
        parse("x = f(y) & y = f(x, x)")


def test_pinned_variables_keep_their_keys():
    V = ordered("w", "x")
    f = parse("ex w. x = w", V)
    assert f.vars == (V["w"],)


def test_free_vars_examples():
    f = parse("(ex x. x = y) & finite(x)")
    assert {v.name for v in free_vars(f)} == {"x", "y"}
    assert free_vars(parse("all x. x = x")) == set()


def test_discipline_renames_captured_binder():
    V = ordered("y", "x")
    f = Exists((V["x"],), Eq(V["x"], V["y"]))
    assert not satisfies_discipline(f)
    g = apply_discipline(f)
    assert satisfies_discipline(g)
    (w,) = g.vars
    assert w.key > V["y"].key
    assert free_vars(g) == {V["y"]}


@given(formulas)
def test_print_then_parse_round_trips(f):
    g = apply_discipline(f)
    names = {v.name: v for v in free_vars(g)}
    back = parse(print_formula(g), names)
    assert alpha_equal(g, back)


@given(formulas)
def test_discipline_is_a_renaming(f):
    g = apply_discipline(f)
    assert satisfies_discipline(g)
    assert free_vars(g) == free_vars(f)
    assert alpha_equal(f, g)


@given(formulas)
def test_discipline_is_idempotent(f):
    g = apply_discipline(f)
    assert apply_discipline(g) == g
