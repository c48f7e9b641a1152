import pytest

from treesolver.answer import (
    Answer,
    ExplicitSolvedForm,
    GeneralSolvedFormula,
    InvalidSolvedForm,
    check_solution,
    compact,
    final_to_general,
    ground_value,
    solved_form_violations,
)
from treesolver.basics import BasicFormula, EqApp, EqVar, FiniteAtom
from treesolver.engine import Engine
from treesolver.generators import gen_winning
from treesolver.oracle import RationalTree
from treesolver.parsing import parse_term, print_formula
from treesolver.solver import solve
from treesolver.syntax import Variable

from conftest import ordered, sym

f1, s = sym("f", 1), sym("s", 1)


def test_empty_final_tree():
    engine = Engine()
    assert final_to_general(engine.node(5, (), [])) == GeneralSolvedFormula((), BasicFormula(), ())


def test_children_without_shared_equations_are_kept_whole():
    V = ordered("x", "y")
    x, y = V["x"], V["y"]
    engine = Engine()
    top = engine.node(5, (), [FiniteAtom(y)], [engine.node(5, (), [EqApp(x, f1, (y,)), FiniteAtom(y)])])
    g = final_to_general(top)
    assert g.negparts == (((), BasicFormula([EqApp(x, f1, (y,)), FiniteAtom(y)])),)


def test_not_final_is_rejected():
    engine = Engine()
    with pytest.raises(InvalidSolvedForm):
        final_to_general(engine.node(4, (), []))


def test_misoriented_binder_is_not_solved():
    V = ordered("u4", "w", "v")
    u4, w, v = V["u4"], V["w"], V["v"]
    g = GeneralSolvedFormula((), BasicFormula([FiniteAtom(w)]), (((u4,), BasicFormula([EqVar(w, u4), FiniteAtom(v)])),))
    problems = solved_form_violations(g)
    assert any(p.startswith("1:") for p in problems)


def test_valid_general_solved_formula():
    V = ordered("w", "v", "u1", "u2", "u3")
    w, v, u1, u2, u3 = (V[n] for n in ["w", "v", "u1", "u2", "u3"])
    g = GeneralSolvedFormula(
        (v,),
        BasicFormula([EqApp(u1, f1, (v,)), EqVar(v, u2), FiniteAtom(u2)]),
        (((w,), BasicFormula([EqApp(u2, f1, (w,)), FiniteAtom(w), FiniteAtom(u3)])),),
    )
    assert solved_form_violations(g) == []


def test_child_adding_nothing_is_rejected():
    V = ordered("x", "y")
    x, y = V["x"], V["y"]
    a = BasicFormula([EqApp(x, f1, (y,))])
    assert any(p.startswith("6:") for p in solved_form_violations(GeneralSolvedFormula((), a, (((), a),))))


def _tree(text):
    return RationalTree.from_term(parse_term(text))


def test_checking_candidate_solutions():
    (d,) = solve(gen_winning(1)).answer.disjuncts
    x = Variable("x", 1)
    assert check_solution(d, {x: _tree("c(g(0), 0)")})
    assert not check_solution(d, {x: _tree("c(0, 0)")})
    assert not check_solution(d, {x: _tree("c(g(0), 1)")})
    with pytest.raises(KeyError):
        check_solution(d, {})


def test_checking_against_a_negated_part():
    V = ordered("y", "x")
    x, y = V["x"], V["y"]
    # ~(x = s(y)) for some y: x is not a successor
    e = ExplicitSolvedForm((), BasicFormula(), (((y,), BasicFormula([EqApp(x, s, (y,))])),))
    assert check_solution(e, {x: _tree("0")})
    assert not check_solution(e, {x: _tree("s(0)")})
    assert not check_solution(e, {x: RationalTree.cycle(s)})


def test_compaction_removes_chains_and_shares_constants():
    res = solve(gen_winning(1), compact=False)
    (raw,) = res.answer.disjuncts
    assert len(raw.quant) == 4
    small = compact(raw)
    assert print_formula(small.to_formula()).count("=") == 3
    assert solved_form_violations(small.negation()) == []


def test_ground_values():
    (d,) = solve(gen_winning(1)).answer.disjuncts
    x = Variable("x", 1)
    assert ground_value(d, x) == parse_term("c(g(0), 0)")
    V = ordered("y", "x")
    cyc = ExplicitSolvedForm((), BasicFormula([EqApp(V["x"], f1, (V["x"],))]))
    assert ground_value(cyc, V["x"]) is None
    assert ground_value(ExplicitSolvedForm((), BasicFormula()), V["y"]) is None


def test_answer_kinds():
    with pytest.raises(ValueError):
        Answer("disjunction", ())
    with pytest.raises(ValueError):
        Answer("maybe")
    assert Answer("true").text() == "true"
    assert Answer("false").to_json() == {"kind": "false", "disjuncts": []}


def test_every_disjunct_has_free_variables():
    res = solve(gen_winning(2))
    assert res.answer.kind == "disjunction"
    for d in res.answer.disjuncts:
        assert {v.name for v in d.free_vars()} == {"x"}
