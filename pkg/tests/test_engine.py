from copy import copy

import pytest

from treesolver.basics import BasicFormula, EqApp, EqVar, FiniteAtom
from treesolver.engine import Engine, EngineLimits, InvariantViolation, NodeLimitExceeded
from treesolver.generators import gen_winning
from treesolver.normalizer import NormalizedFormula, from_formula, normalize
from treesolver.parsing import parse
from treesolver.solver import solve
from treesolver.syntax import Not, free_vars

from conftest import ordered, sym

f1, f2, g1, g3, s, zero, a0 = sym("f", 1), sym("f", 2), sym("g", 1), sym("g", 3), sym("s", 1), sym("0", 0), sym("a", 0)


def run(root_factory, check=True):
    """Saturate the forest built by root_factory(engine); return (engine, final, rules)."""
    rules = []

    def trace(line):
        rule = line.split()[1]
        rules.append(int(rule) if rule.isdigit() else rule)

    engine = Engine(check=check, trace=trace)
    engine.load(root_factory(engine))
    final = engine.saturate()
    return engine, final, rules


def test_clashing_symbols_make_the_child_true():
    V = ordered("x", "y")
    x, y = V["x"], V["y"]
    engine, final, rules = run(lambda e: [e.node(4, (), [], [e.node(0, (), [EqApp(x, f1, (y,)), EqApp(x, g1, (y,))])])])
    assert 4 in rules
    (root,) = final
    assert root.level == 5 and root.children == [] and root.basic == []


def test_cyclic_finite_variable_makes_the_child_true():
    V = ordered("x")
    x = V["x"]
    _, final, rules = run(lambda e: [e.node(4, (), [], [e.node(0, (), [EqApp(x, f1, (x,)), FiniteAtom(x)])])])
    assert 9 in rules
    assert final[0].children == []


def test_finite_constant_disappears():
    V = ordered("u")
    u = V["u"]
    _, final, rules = run(lambda e: [e.node(4, (), [], [e.node(0, (), [EqApp(u, a0, ()), FiniteAtom(u)])])])
    assert 10 in rules
    (child,) = final[0].children
    assert child.basic == [EqApp(u, a0, ())]


def test_self_equation_is_dropped():
    V = ordered("u", "v")
    u, v = V["u"], V["v"]
    _, final, rules = run(lambda e: [e.node(4, (), [], [e.node(0, (), [EqVar(u, u), EqApp(u, f1, (v,))])])])
    assert rules[:3] == [12, 1, 6]
    (child,) = final[0].children
    assert child.basic == [EqApp(u, f1, (v,))]


def test_child_equal_to_parent_makes_the_parent_true():
    V = ordered("x", "y")
    x, y = V["x"], V["y"]
    _, final, rules = run(lambda e: [e.node(4, (), [EqApp(x, f1, (y,))], [e.node(0, (), [])])])
    assert final == []
    assert 14 in rules


def test_different_finite_atoms_keep_the_parent():
    V = ordered("x", "y")
    x, y = V["x"], V["y"]
    _, final, rules = run(lambda e: [e.node(4, (), [EqApp(x, f1, (y,))], [e.node(0, (), [FiniteAtom(y)])])])
    assert 14 not in rules
    (child,) = final[0].children
    assert BasicFormula(child.basic).same_atoms(BasicFormula([EqApp(x, f1, (y,)), FiniteAtom(y)]))


def test_quantifier_elimination_splits_three_ways():
    V = ordered("w", "z", "y", "x", "v")
    x, y, z, w, v = (V[n] for n in "xyzwv")
    _, final, rules = run(
        lambda e: [e.node(4, (x, y, z, w), [EqApp(v, f2, (x, x)), EqApp(w, g3, (y, z, x)), FiniteAtom(x), FiniteAtom(y)])]
    )
    assert rules == [15]
    (root,) = final
    assert root.level == 5 and root.quant == [x]
    assert BasicFormula(root.basic).same_atoms(BasicFormula([EqApp(v, f2, (x, x)), FiniteAtom(x)]))


CHAIN = (
    "~(ex v1. v1 = f(u1, u2) & u2 = g(u1) & ~(ex w1. v1 = g(w1))"
    " & ~(ex w2. u2 = g(w2) & w2 = g(u3) & finite(w2)))"
)


def test_chain_example_follows_the_level_strategy():
    V = ordered("w1", "w2", "v1", "u1", "u2", "u3")
    nf = from_formula(parse(CHAIN, V))
    engine, final, rules = run(lambda e: [_tree(e, nf)])
    # the worked sequence; rule 2 orients w2 = u1 after decomposition
    assert rules == [12, 4, 12, 5, 2, 3, 6, 8, 10, 11, 13, 15, 15]
    (root,) = final
    u1, u2, u3 = V["u1"], V["u2"], V["u3"]
    assert root.quant == [] and root.basic == [EqApp(u2, g1, (u1,))]
    (child,) = root.children
    assert BasicFormula(child.basic).same_atoms(
        BasicFormula([EqApp(u2, g1, (u1,)), EqApp(u1, g1, (u3,)), FiniteAtom(u3)])
    )


def _tree(engine, nf: NormalizedFormula, level=4):
    kids = [_tree(engine, c, 0) for c in nf.children]
    return engine.node(level, nf.quant, list(nf.basic), kids)


def test_distribution_over_grandchildren():
    V = ordered("w1", "w2", "v", "u")
    w1, w2, v, u = (V[n] for n in ["w1", "w2", "v", "u"])
    snapshot = []

    def build(e):
        def trace(line):
            if line.startswith("rule 16"):
                snapshot.extend(_copy(n) for n in e.forest)

        e.trace = trace
        N = e.node
        return [
            N(4, (), [], [
                N(5, (), [EqApp(u, s, (v,))]),
                N(5, (w1,), [EqApp(u, s, (w1,)), EqApp(w1, s, (v,))]),
                N(5, (), [EqVar(v, u)], [
                    N(5, (), [EqVar(v, u), EqApp(u, zero, ())]),
                    N(5, (w2,), [EqVar(v, u), EqApp(u, s, (w2,))]),
                ]),
            ])
        ]

    run(build, check=False)
    first, second, third = snapshot
    assert first.level == 4 and [c.level for c in first.children] == [5, 5, 5]
    assert first.children[2].basic == [EqVar(v, u)] and first.children[2].children == []
    assert second.level == 4 and second.quant == [] and second.basic == [EqVar(v, u), EqApp(u, zero, ())]
    assert [c.level for c in second.children] == [0, 0]
    # the grandchild's binder is moved above everything, keeping its order
    (w2_new,) = third.quant
    assert w2_new.name == "w2" and w2_new > w1
    assert third.basic == [EqVar(v, u), EqApp(u, s, (w2_new,))]
    w11 = second.children[1].quant[0]
    w12 = third.children[1].quant[0]
    assert len({w1, w11, w12}) == 3 and w11 > w1 and w12 > w1
    assert second.children[1].basic == [EqApp(u, s, (w11,)), EqApp(w11, s, (v,))]


def _copy(n):
    c = copy(n)
    c.quant, c.basic = list(n.quant), list(n.basic)
    c.children = [_copy(k) for k in n.children]
    return c


def test_empty_tree_is_already_final():
    _, final, rules = run(lambda e: [e.node(4, (), [])])
    assert rules == [15]
    assert final[0].level == 5


def test_initial_working_formula_shape():
    engine = Engine()
    nf = NormalizedFormula((), BasicFormula())
    root = engine.init_working(nf)
    assert root.level == 4 and root.depth() == nf.depth + 2
    (inner,) = root.children
    assert inner.level == 0 and inner.basic == []
    (leaf,) = inner.children
    assert leaf.level == 0 and leaf.basic == [] and leaf.children == []


def test_identical_final_siblings_collapse():
    V = ordered("y", "x")
    x, y = V["x"], V["y"]
    _, final, rules = run(
        lambda e: [e.node(4, (y,), [EqApp(x, f1, (y,))], [e.node(0, (), [FiniteAtom(y)]), e.node(0, (), [FiniteAtom(y)])])]
    )
    assert "dup" in rules
    assert len(final[0].children) == 1


def test_saturation_output_is_final_and_keeps_free_variables():
    p = parse("all y. ~(x = f(y, z)) | (ex w. y = g(w) & finite(w))")
    engine = Engine(check=True)
    engine.init_working(normalize(Not(p), engine.fresh))
    final = engine.saturate()
    for root in final:
        assert root.depth() <= 2
        assert all(n.level == 5 for n in root.walk())
    fv = set()
    for root in final:
        fv |= free_vars(root.to_formula())
    assert fv <= free_vars(p)


def test_node_limit_reports_partial_statistics():
    with pytest.raises(NodeLimitExceeded) as err:
        solve(gen_winning(2), limits=EngineLimits(max_nodes=500))
    assert err.value.stats.peak_nodes == 501
    assert err.value.stats.total_rules() > 0


def test_limits_must_be_positive():
    with pytest.raises(ValueError):
        EngineLimits(max_nodes=0)


def test_check_mode_rejects_a_broken_working_formula():
    V = ordered("x", "y")
    x, y = V["x"], V["y"]
    engine = Engine(check=True)
    # level 2 claims oriented equations, but y = x is not
    engine.load([engine.node(4, (), [], [engine.node(2, (), [EqVar(y, x)])])])
    with pytest.raises(InvariantViolation):
        engine.saturate()
