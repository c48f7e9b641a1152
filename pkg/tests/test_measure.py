from hypothesis import given
from hypothesis import strategies as st

from treesolver.basics import EqApp, FiniteAtom
from treesolver.engine import Engine
from treesolver.measure import ONE, ZERO, HNat, alpha_conj, lam, measure

from conftest import ordered, sym

f2 = sym("f", 2)


def test_finite_weights_add_up():
    V = ordered("z", "x", "y")
    x, y, z = V["x"], V["y"], V["z"]
    atoms = [EqApp(x, f2, (x, z)), EqApp(z, f2, (y, y)), FiniteAtom(x), FiniteAtom(x), FiniteAtom(z)]
    assert lam(x, atoms) == 1
    assert lam(z, atoms) == 4
    engine = Engine()
    node = engine.node(2, (z,), atoms)
    assert measure([node]).n8 == 6


def test_alpha_of_small_conjunctions():
    engine = Engine()
    assert alpha_conj([]) == ZERO
    leaf = engine.node(4, (), [])
    assert alpha_conj([leaf]) == ONE
    assert alpha_conj([engine.node(4, (), [], [engine.node(0, (), [])])]).to_int() == 2
    assert alpha_conj([engine.node(4, (), []), engine.node(4, (), [])]).to_int() == 2


def test_level_counts():
    engine = Engine()
    forest = [engine.node(4, (), [], [engine.node(0, (), []), engine.node(3, (), []), engine.node(5, (), [])])]
    m = measure(forest)
    assert (m.n2, m.n3, m.n7, m.n9, m.n10) == (1, 0, 0, 1, 1)


def test_towers_stay_symbolic():
    tower = ZERO
    for _ in range(6):
        tower = HNat.pow2(tower)
    assert tower > HNat.from_int(2**64)
    assert "2^(" in repr(tower) or "HNat(" in repr(tower)


naturals = st.integers(min_value=0, max_value=10**6)


@given(naturals)
def test_hnat_round_trip(n):
    assert HNat.from_int(n).to_int() == n


@given(naturals, naturals)
def test_hnat_addition(a, b):
    assert (HNat.from_int(a) + HNat.from_int(b)).to_int() == a + b


@given(naturals, naturals)
def test_hnat_order(a, b):
    assert (HNat.from_int(a) < HNat.from_int(b)) == (a < b)
    assert (HNat.from_int(a) == HNat.from_int(b)) == (a == b)
