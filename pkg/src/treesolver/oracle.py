"""Independent ground truth: rational trees, unification, finiteness,
entailment between basic formulas, and the integer game.

Nothing in here is used by the solver itself.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

from .basics import BasicFormula, EqApp, EqVar, FiniteAtom, is_eq
from .syntax import App, FunctionSymbol, Variable


# ---------------------------------------------------------------- trees


@dataclass(frozen=True)
class RationalTree:
    """A possibly infinite tree given as a finite rooted graph.

    nodes maps a node id to (symbol, child ids).
    """

    nodes: dict
    root: object

    def __post_init__(self):
        for nid, (sym, kids) in self.nodes.items():
            if len(kids) != sym.arity:
                raise ValueError(f"node {nid!r}: {sym.name} expects {sym.arity} children")
            for k in kids:
                if k not in self.nodes:
                    raise ValueError(f"node {nid!r}: dangling child {k!r}")
        if self.root not in self.nodes:
            raise ValueError("root is not a node")

    @classmethod
    def from_term(cls, t) -> "RationalTree":
        nodes: dict = {}

        def go(s):
            if isinstance(s, Variable):
                raise ValueError("ground terms only")
            nid = len(nodes)
            nodes[nid] = None
            nodes[nid] = (s.sym, tuple(go(a) for a in s.args))
            return nid

        root = go(t)
        return cls(nodes, root)

    @classmethod
    def cycle(cls, sym: FunctionSymbol) -> "RationalTree":
        """The tree f(f(f(...))) for a symbol of positive arity."""
        return cls({0: (sym, (0,) * sym.arity)}, 0)

    def reachable_nodes(self) -> set:
        seen, stack = set(), [self.root]
        while stack:
            n = stack.pop()
            if n not in seen:
                seen.add(n)
                stack.extend(self.nodes[n][1])
        return seen

    def is_finite(self) -> bool:
        return is_finite(self)


def is_finite(t: RationalTree) -> bool:
    """No cycle reachable from the root."""
    WHITE, GREY, BLACK = 0, 1, 2
    color: dict = {}
    stack = [(t.root, iter(t.nodes[t.root][1]))]
    color[t.root] = GREY
    while stack:
        node, kids = stack[-1]
        nxt = next(kids, None)
        if nxt is None:
            color[node] = BLACK
            stack.pop()
            continue
        c = color.get(nxt, WHITE)
        if c == GREY:
            return False
        if c == WHITE:
            color[nxt] = GREY
            stack.append((nxt, iter(t.nodes[nxt][1])))
    return True


# ---------------------------------------------------------------- unification


@dataclass(frozen=True)
class Unsat:
    pass


@dataclass(frozen=True)
class Sat:
    solved: BasicFormula


class _Classes:
    """Union-find over variables with an optional structure per class."""

    def __init__(self):
        self.parent: dict = {}
        self.struct: dict = {}  # root -> (sym, args as variables)

    def find(self, v):
        self.parent.setdefault(v, v)
        root = v
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[v] != root:
            self.parent[v], v = root, self.parent[v]
        return root

    def run(self, equations) -> bool:
        work = []
        for e in equations:
            if type(e) is EqVar:
                work.append((e.lhs, e.rhs))
            else:
                work.append((e.lhs, (e.sym, e.args)))
        while work:
            x, t = work.pop()
            rx = self.find(x)
            if isinstance(t, Variable):
                ry = self.find(t)
                if rx == ry:
                    continue
                sx, sy = self.struct.pop(rx, None), self.struct.pop(ry, None)
                self.parent[ry] = rx
                s = sx or sy
                if s is not None:
                    self.struct[rx] = s
                if sx is not None and sy is not None:
                    if not self._merge(sx, sy, work):
                        return False
            else:
                old = self.struct.get(rx)
                if old is None:
                    self.struct[rx] = t
                    for a in t[1]:
                        self.find(a)
                elif not self._merge(old, t, work):
                    return False
        return True

    @staticmethod
    def _merge(s, t, work) -> bool:
        if s[0] != t[0]:
            return False
        work.extend(zip(s[1], t[1]))
        return True

    def members(self) -> dict:
        out: dict = {}
        for v in list(self.parent):
            out.setdefault(self.find(v), []).append(v)
        return out


def unify(b: Iterable) -> Unsat | Sat:
    """Rational-tree unification of the equations of b (no occurs check)."""
    atoms = [a for a in b if is_eq(a)]
    cls = _Classes()
    for a in atoms:
        cls.find(a.lhs)
    if not cls.run(atoms):
        return Unsat()
    out = []
    members = cls.members()
    rep = {root: min(vs) for root, vs in members.items()}
    for root, vs in members.items():
        r = rep[root]
        for v in sorted(vs):
            if v != r:
                out.append(EqVar(v, r))
        s = cls.struct.get(root)
        if s is not None:
            out.append(EqApp(r, s[0], tuple(rep[cls.find(a)] for a in s[1])))
    return Sat(BasicFormula(out))


# ---------------------------------------------------------------- satisfiability


def _graph(b: Iterable):
    """Union-find the equations; return (classes, roots of finite atoms) or None."""
    atoms = list(b)
    cls = _Classes()
    for a in atoms:
        if is_eq(a):
            cls.find(a.lhs)
        elif type(a) is FiniteAtom:
            cls.find(a.var)
    if not cls.run([a for a in atoms if is_eq(a)]):
        return None
    fin = {cls.find(a.var) for a in atoms if type(a) is FiniteAtom}
    return cls, fin


def _children(cls: _Classes, root) -> tuple:
    s = cls.struct.get(root)
    return () if s is None else tuple(cls.find(a) for a in s[1])


def _on_cycle_below(cls: _Classes, starts) -> bool:
    """Is some cycle reachable from any of the start classes?"""
    WHITE, GREY, BLACK = 0, 1, 2
    color: dict = {}
    for s in starts:
        if color.get(s, WHITE) != WHITE:
            continue
        color[s] = GREY
        stack = [(s, iter(_children(cls, s)))]
        while stack:
            node, kids = stack[-1]
            nxt = next(kids, None)
            if nxt is None:
                color[node] = BLACK
                stack.pop()
                continue
            c = color.get(nxt, WHITE)
            if c == GREY:
                return True
            if c == WHITE:
                color[nxt] = GREY
                stack.append((nxt, iter(_children(cls, nxt))))
    return False


def decide_exists(quant: Iterable, b: Iterable) -> bool:
    """Satisfiability of ex quant. b over rational trees with finite.

    Variables not otherwise constrained can always be given fresh finite
    values, so the answer only depends on b.
    """
    g = _graph(b)
    if g is None:
        return False
    cls, fin = g
    # a finite class must not reach a cycle; finiteness is inherited downwards
    return not _on_cycle_below(cls, fin)


# ---------------------------------------------------------------- entailment


def entail_basic(a: Iterable, a2: Iterable) -> bool:
    """Does a imply every atom of a2 in the theory of trees?"""
    a, a2 = list(a), list(a2)
    g = _graph(a)
    if g is None or _on_cycle_below(g[0], g[1]):
        return True  # a is unsatisfiable
    cls, fin = g
    for atom in a2:
        for v in (atom.lhs,) if is_eq(atom) else (atom.var,):
            cls.find(v)
        if is_eq(atom):
            for v in (atom.rhs,) if type(atom) is EqVar else atom.args:
                cls.find(v)

    # Nodes: class roots, plus one extra node per structured right-hand side.
    roots = set(cls.find(v) for v in list(cls.parent))
    label: dict = {}
    kids: dict = {}
    for r in roots:
        s = cls.struct.get(r)
        if s is None:
            label[r] = ("free", r)
            kids[r] = ()
        else:
            label[r] = ("sym", s[0])
            kids[r] = tuple(cls.find(x) for x in s[1])
    extra = {}
    for i, atom in enumerate(a2):
        if type(atom) is EqApp:
            node = ("rhs", i)
            label[node] = ("sym", atom.sym)
            kids[node] = tuple(cls.find(x) for x in atom.args)
            extra[i] = node
    block = _bisimulation(label, kids)

    def forced_finite(r, stack=()):
        if r in below_fin:
            return True
        if cls.struct.get(r) is None or r in stack:
            return False
        return all(forced_finite(k, stack + (r,)) for k in kids[r])

    below_fin = set()
    todo = list(fin)
    while todo:
        r = todo.pop()
        if r not in below_fin:
            below_fin.add(r)
            todo.extend(kids[r])

    for i, atom in enumerate(a2):
        t = type(atom)
        if t is EqVar:
            if block[cls.find(atom.lhs)] != block[cls.find(atom.rhs)]:
                return False
        elif t is EqApp:
            if block[cls.find(atom.lhs)] != block[extra[i]]:
                return False
        elif t is FiniteAtom:
            if not forced_finite(cls.find(atom.var)):
                return False
    return True


def _bisimulation(label: dict, kids: dict) -> dict:
    """Coarsest partition respecting labels and children blocks."""
    nodes = list(label)
    ids: dict = {}
    block = {n: ids.setdefault(label[n], len(ids)) for n in nodes}
    while True:
        ids = {}
        new = {n: ids.setdefault((block[n], tuple(block[k] for k in kids[n])), len(ids)) for n in nodes}
        if len(set(new.values())) == len(set(block.values())):
            return new
        block = new


# ---------------------------------------------------------------- the game


def game_moves(i: int, j: int) -> list:
    """Legal successors of position (i, j) on the integer game graph."""
    if j == 0:
        return [(i - 1, 0)] if i >= 1 else []
    if i % 2 == 1:
        return [(i + 1, 1), (i, 0)]
    return [(i + 1, 0), (i + 1, 1)]


def k_winning_positions(k: int, i_bound: int) -> set:
    """Positions (i, j), i <= i_bound, from which the player to move can
    force a win within k of their own moves.

    A player with no legal move loses.  The recursion only looks 2k moves
    ahead and each move changes i by at most one, so it is exact for any
    bound; a bound of at least 2k + 2 covers every winning position since
    only (i, 0) with odd i <= 2k - 1 can win.
    """
    if k < 1:
        raise ValueError("k must be positive")

    @lru_cache(maxsize=None)
    def win(n: int, pos: tuple) -> bool:
        if n == 0:
            return False
        for reply_pos in game_moves(*pos):
            if all(win(n - 1, nxt) for nxt in game_moves(*reply_pos)):
                return True
        return False

    return {(i, j) for i in range(i_bound + 1) for j in (0, 1) if win(k, (i, j))}


GAME_SYMBOLS = {
    "0": FunctionSymbol("0", 0),
    "1": FunctionSymbol("1", 0),
    "f": FunctionSymbol("f", 1),
    "g": FunctionSymbol("g", 1),
    "c": FunctionSymbol("c", 2),
}


def _encode_index(i: int):
    s = GAME_SYMBOLS
    if i % 2 == 1:
        return App(s["g"], (_encode_index(i - 1),))
    t = App(s["0"], ())
    for _ in range(i // 2):
        t = App(s["f"], (App(s["g"], (t,)),))
    return t


def encode_position(i: int, j: int):
    if i < 0 or j not in (0, 1):
        raise ValueError("position out of range")
    return App(GAME_SYMBOLS["c"], (_encode_index(i), App(GAME_SYMBOLS["1" if j else "0"], ())))


def _decode_index(t):
    depth = 0
    odd = False
    if isinstance(t, App) and t.sym.name == "g" and t.sym.arity == 1:
        odd, t = True, t.args[0]
    while isinstance(t, App) and t.sym.name == "f" and t.sym.arity == 1:
        inner = t.args[0]
        if not (isinstance(inner, App) and inner.sym.name == "g" and inner.sym.arity == 1):
            return None
        depth += 1
        t = inner.args[0]
    if not (isinstance(t, App) and t.sym.name == "0" and t.sym.arity == 0):
        return None
    return 2 * depth + (1 if odd else 0)


def decode_position(t):
    if not (isinstance(t, App) and t.sym.name == "c" and t.sym.arity == 2):
        return None
    i = _decode_index(t.args[0])
    j = t.args[1]
    if i is None or not (isinstance(j, App) and j.sym.arity == 0 and j.sym.name in ("0", "1")):
        return None
    return (i, int(j.sym.name))
