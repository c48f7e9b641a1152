"""Working formulas and the sixteen rewriting rules.

A working tree is a ``Node`` ~k(ex quant. basic & children) whose level k
records which well-formedness conditions already hold.  The global state
is a forest: the conjunction of its trees.

The strategy is fixed.  A level-4 node pushes its atoms into each level-0
child (12), solves the child's equations (1-5, then 6) and finiteness
constraints (9, 7, 8, 10, then 11), restores the parent's equations (13)
and recurses.  Once every child is final it either dies (14), splits off a
deep grandchild (16) or eliminates quantifiers (15).
"""

from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable

from .basics import (
    EqApp,
    EqVar,
    FiniteAtom,
    atom_to_formula,
    atom_vars,
    check_solved,
    eq_index,
    fini_set,
    is_eq,
    lhs_set,
    reachable,
    rename_atom,
    self_reachable,
)
from .measure import measure, variable_ranks
from .normalizer import NormalizedFormula
from .syntax import Exists, Fresh, Not, conj, free_vars, satisfies_discipline


class InvariantViolation(Exception):
    pass


@dataclass
class EngineStats:
    rules_fired: Counter = field(default_factory=Counter)
    peak_nodes: int = 0
    live_nodes: int = 0
    wall_ms: float = 0.0
    forest_size: int = 0
    # rule -> Counter of the measure component that decreased first
    decrease_index: dict = field(default_factory=dict)

    def total_rules(self) -> int:
        return sum(self.rules_fired.values())


class ResourceLimit(Exception):
    def __init__(self, message: str, stats: EngineStats):
        super().__init__(message)
        self.stats = stats


class NodeLimitExceeded(ResourceLimit):
    pass


class TimeoutExceeded(ResourceLimit):
    pass


@dataclass(frozen=True)
class EngineLimits:
    max_nodes: int = 10**6
    timeout_ms: int = 60_000

    def __post_init__(self):
        if self.max_nodes <= 0 or self.timeout_ms <= 0:
            raise ValueError("limits must be positive")


@dataclass(eq=False)
class Node:
    id: int
    level: int
    quant: list
    basic: list
    children: list
    parent: "Node | None" = None
    dead: bool = False
    # cached variable sets, used only when checking invariants
    fv: set | None = field(default=None, repr=False)
    body: set | None = field(default=None, repr=False)

    def to_formula(self, marks: bool = False):
        body = conj([atom_to_formula(a) for a in self.basic] + [c.to_formula() for c in self.children])
        if self.quant:
            body = Exists(tuple(self.quant), body)
        return Not(body)

    def depth(self) -> int:
        return 1 + max((c.depth() for c in self.children), default=0)

    def walk(self):
        stack = [self]
        while stack:
            n = stack.pop()
            yield n
            stack.extend(reversed(n.children))

    def __repr__(self):
        inner = " & ".join(map(repr, self.basic)) or "true"
        q = ",".join(v.name for v in self.quant)
        kids = "".join(f" & {c!r}" for c in self.children)
        return f"~{self.level}(ex {q}. {inner}{kids})"


@dataclass(frozen=True)
class _Snap:
    level: int
    quant: tuple
    basic: tuple
    children: tuple


def _snap(nodes) -> tuple:
    return tuple(_Snap(n.level, tuple(n.quant), tuple(n.basic), _snap(n.children)) for n in nodes)


def forest_formula(forest):
    return conj([n.to_formula() for n in forest])


class Engine:
    def __init__(
        self,
        limits: EngineLimits | None = None,
        fresh: Fresh | None = None,
        check: bool = False,
        trace: Callable[[str], None] | None = None,
    ):
        self.limits = limits or EngineLimits()
        self.fresh = fresh or Fresh()
        self.check = check
        self.trace = trace
        self.stats = EngineStats()
        self.forest: list[Node] = []
        self._next_id = 0
        self._deadline = None
        self._started = None
        self._before = None
        self._free0 = None
        self._entail_memo: dict = {}

    # ------------------------------------------------------------ building

    def _new(self, level, quant, basic, children=(), parent=None) -> Node:
        n = Node(self._next_id, level, list(quant), list(basic), list(children), parent)
        self._next_id += 1
        for c in n.children:
            c.parent = n
        self.stats.live_nodes += 1
        if self.stats.live_nodes > self.stats.peak_nodes:
            self.stats.peak_nodes = self.stats.live_nodes
        if self.stats.live_nodes > self.limits.max_nodes:
            self._finish_stats()
            raise NodeLimitExceeded(f"more than {self.limits.max_nodes} live nodes", self.stats)
        return n

    def _from_normalized(self, nf: NormalizedFormula, level: int) -> Node:
        kids = [self._from_normalized(c, level) for c in nf.children]
        return self._new(level, nf.quant, nf.basic.atoms, kids)

    def init_working(self, p1: NormalizedFormula) -> Node:
        """~4(ex. true & ~0(ex. true & p1)) with p1's negations at level 0."""
        inner = self._new(0, (), (), [self._from_normalized(p1, 0)])
        root = self._new(4, (), (), [inner])
        self.fresh.observe(v for n in root.walk() for v in list(n.quant) + [w for a in n.basic for w in atom_vars(a)])
        self.forest = [root]
        return root

    def working(self, nf: NormalizedFormula, level: int = 4) -> Node:
        """A single working tree: the top negation at ``level``, the rest at 0."""
        root = self._from_normalized(nf, 0)
        root.level = level
        self.load([root])
        return root

    def load(self, forest: list[Node]) -> None:
        """Start from an explicit forest (levels as given)."""
        for root in forest:
            for n in root.walk():
                for c in n.children:
                    c.parent = n
                self.fresh.observe(n.quant)
                for a in n.basic:
                    self.fresh.observe(atom_vars(a))
        self.forest = list(forest)

    def node(self, level, quant=(), basic=(), children=()) -> Node:
        """Build a node by hand (tests and examples)."""
        return self._new(level, quant, basic, children)

    # ------------------------------------------------------------ bookkeeping

    def _container(self, n: Node) -> list:
        return self.forest if n.parent is None else n.parent.children

    def _delete(self, n: Node) -> None:
        box = self._container(n)
        for i, m in enumerate(box):
            if m is n:
                del box[i]
                break
        for m in n.walk():
            m.dead = True
            self.stats.live_nodes -= 1

    def _finish_stats(self):
        if self._started is not None:
            self.stats.wall_ms = (time.monotonic() - self._started) * 1000
        self.stats.forest_size = len(self.forest)

    def _begin(self, n: Node, whole: bool = False) -> None:
        """Remember the part of the state the next rule may change.

        ``whole`` covers n's subtree and any new siblings of n; otherwise
        only n's own quantifier, atoms and level change.
        """
        if not self.check:
            return
        box = self._container(n)
        self._scope = (n, whole, box, {id(m) for m in box} if whole else None)
        self._before = _snap([n]) if whole else (_Snap(n.level, tuple(n.quant), tuple(n.basic), ()),)
        top = n.parent if whole else n
        self._path_before = [(m, m.id, _max_key(self._body_fv(m))) for m in _ancestors(top)]
        self._top_before = _max_key(self._forest_fv())
        self._binders_before = [v for m in (n.walk() if whole else [n]) for v in m.quant]

    def _fired(self, rule, n: Node) -> None:
        self.stats.rules_fired[rule] += 1
        if self._deadline is not None and time.monotonic() > self._deadline:
            self._finish_stats()
            raise TimeoutExceeded(f"more than {self.limits.timeout_ms} ms", self.stats)
        if self.check:
            self._check_step(rule)
        if self.trace is not None:
            self.trace(f"rule {rule} node {n.id} measure {measure(self.forest).short()}")

    def _check_step(self, rule) -> None:
        """Measure decrease and well-formedness of the region a rule touched.

        Comparing only the touched siblings is enough: the first measure
        component is a sum over siblings pushed through strictly monotone
        maps up to the root, and the others are plain sums.
        """
        n, whole, box, ids = self._scope
        if whole:
            after = [m for m in box if m is n or id(m) not in ids]
            after_snap = _snap(after)
        else:
            after = [n]
            after_snap = (_Snap(n.level, tuple(n.quant), tuple(n.basic), ()),)
        ranks = variable_ranks(self._before, after_snap)
        before_m = measure(self._before, ranks)
        after_m = measure(after_snap, ranks)
        if not after_m < before_m:
            raise InvariantViolation(f"rule {rule} did not decrease the measure: {before_m} -> {after_m}")
        idx = next(i for i, (x, y) in enumerate(zip(before_m.as_tuple(), after_m.as_tuple())) if x != y) + 1
        self.stats.decrease_index.setdefault(rule, Counter())[idx] += 1

        touched = [m for r in after for m in r.walk()] if whole else [n] + list(n.children)
        owner = n.parent if whole else n.parent
        for m in touched:
            for c in m.children:
                if c.parent is not m:
                    raise InvariantViolation(f"node {c.id}: stale parent link")
            m.fv = m.body = None
        if owner is not None:
            touched.append(owner)
        for m in _ancestors(n.parent):
            m.fv = m.body = None
        for m in touched:
            if not m.dead:
                _check_node(m, self._entail)
        self._check_binders([v for r in after for m in (r.walk() if whole else [r]) for v in m.quant])
        self._check_discipline(after if whole else [n])
        if not self._forest_fv() <= self._free0:
            raise InvariantViolation("new free variables appeared")

    def _entail(self, a, a2) -> bool:
        from .oracle import entail_basic

        key = (frozenset(a), frozenset(a2))
        hit = self._entail_memo.get(key)
        if hit is None:
            hit = self._entail_memo[key] = entail_basic(a, a2)
        return hit

    # ------------------------------------------------------------ discipline bookkeeping

    def _body_fv(self, m: Node) -> set:
        """Free variables of m's body (its quantified variables included)."""
        if m.body is None:
            body = set()
            for a in m.basic:
                body.update(atom_vars(a))
            for c in m.children:
                self._body_fv(c)
                body |= c.fv
            m.body = body
            m.fv = body - set(m.quant)
        return m.body

    def _forest_fv(self) -> set:
        out = set()
        for r in self.forest:
            self._body_fv(r)
            out |= r.fv
        return out

    def _check_binders(self, after: list) -> None:
        for v in self._binders_before:
            self._binders[v] -= 1
        for v in after:
            self._binders[v] += 1
        for v in after:
            if self._binders[v] > 1 or v in self._free0:
                raise InvariantViolation(f"variable {v.name} bound twice or also free")

    def _check_discipline(self, region: list) -> None:
        """Every bound variable must lie above the free variables of every
        enclosing subformula.  Only binders whose context may have changed
        are re-examined: those in the touched region, or below an ancestor
        whose body gained a larger free variable."""
        top = _max_key(self._forest_fv())
        if _gt(top, self._top_before):
            region = list(self.forest)
        else:
            for m, _, old in reversed(self._path_before):
                if not m.dead and _gt(_max_key(self._body_fv(m)), old):
                    region = [m]
                    break
        for r in region:
            ceiling = top
            for m in _ancestors(r.parent):
                ceiling = _kmax(ceiling, _max_key(self._body_fv(m)))
            stack = [(r, ceiling)]
            while stack:
                m, ceil = stack.pop()
                for v in m.quant:
                    if ceil is not None and not v.key > ceil:
                        raise InvariantViolation(f"variable discipline broken at {v.name} in node {m.id}")
                inner = _kmax(ceil, _max_key(self._body_fv(m)))
                stack.extend((c, inner) for c in m.children)

    # ------------------------------------------------------------ driver

    def saturate(self) -> list[Node]:
        self._started = time.monotonic()
        self._deadline = self._started + self.limits.timeout_ms / 1000
        if self.check:
            self._free0 = free_vars(forest_formula(self.forest))
            self._binders = Counter(v for r in self.forest for m in r.walk() for v in m.quant)
            self.validate()
        while True:
            todo = next((r for r in self.forest if r.level != 5), None)
            if todo is None:
                break
            if todo.level != 4:
                raise InvariantViolation(f"root at level {todo.level}")
            self._reduce(todo)
            if not todo.dead:
                self._collapse(self.forest, todo)
        self._finish_stats()
        if self.check:
            self.validate()
        return self.forest

    def _reduce(self, n: Node) -> None:
        """Bring a level-4 node to level 5 or delete it.

        Rule 14 does not care about the levels of the other children, so it
        fires as soon as one child is final.
        """
        while not n.dead:
            dup = next(
                (c for c in n.children if c.level == 5 and not c.children and set(c.basic) == set(n.basic)),
                None,
            )
            if dup is not None:
                self._rule14(n)
                return
            child = next((c for c in n.children if c.level != 5), None)
            if child is not None:
                self._process(n, child)
                if not child.dead and child.level == 5:
                    self._collapse(n.children, child)
                continue
            deep = next((c for c in n.children if c.level == 5 and c.children), None)
            if deep is not None:
                self._rule16(n, deep)
                continue
            self._rule15(n)
            return

    def _process(self, parent: Node, child: Node) -> None:
        if child.level == 0:
            self._rule12(parent, child)
            if not self._solve_equations(child):
                return
            if not self._solve_finite(child):
                return
            self._rule13(parent, child)
        if child.level == 4:
            self._reduce(child)
        elif child.level != 5:
            raise InvariantViolation(f"unexpected child level {child.level}")

    # ------------------------------------------------------------ rules 1-6

    def _solve_equations(self, n: Node) -> bool:
        """Rules 1-5 to a fixpoint, then 6.  False if the node died."""
        while True:
            step = _find_eq_step(n.basic)
            if step is None:
                break
            rule, i, j = step
            self._begin(n, whole=rule == 4)
            b = n.basic
            if rule == 1:
                del b[i]
            elif rule == 2:
                b[i] = EqVar(b[i].rhs, b[i].lhs)
            elif rule == 3:
                e = b[j]
                v = b[i].rhs
                b[j] = EqVar(v, e.rhs) if type(e) is EqVar else EqApp(v, e.sym, e.args)
            elif rule == 4:
                self._delete(n)
                self._fired(4, n)
                return False
            elif rule == 5:
                e1, e2 = b[i], b[j]
                del b[j]
                b.extend(EqVar(v, w) for v, w in zip(e1.args, e2.args))
            self._fired(rule, n)
        self._begin(n)
        n.level = 2
        self._fired(6, n)
        return True

    # ------------------------------------------------------------ rules 7-11

    def _solve_finite(self, n: Node) -> bool:
        while True:
            step = _find_fin_step(n.basic)
            if step is None:
                break
            rule, i, j = step
            self._begin(n, whole=rule == 9)
            b = n.basic
            if rule == 9:
                self._delete(n)
                self._fired(9, n)
                return False
            if rule == 7:
                del b[j]
            elif rule == 8:
                b[i] = FiniteAtom(b[j].rhs)
            elif rule == 10:
                args = b[j].args
                del b[i]
                b.extend(FiniteAtom(v) for v in args)
            self._fired(rule, n)
        self._begin(n)
        n.level = 3
        self._fired(11, n)
        return True

    # ------------------------------------------------------------ rules 12, 13

    def _rule12(self, parent: Node, child: Node) -> None:
        self._begin(child)
        child.basic = list(parent.basic) + child.basic
        child.level = 1
        self._fired(12, child)

    def _rule13(self, parent: Node, child: Node) -> None:
        self._begin(child)
        parent_eqs = [a for a in parent.basic if is_eq(a)]
        plhs = lhs_set(parent_eqs)
        clhs = lhs_set(child.basic)
        if not plhs <= clhs:
            raise InvariantViolation("restoring equations: parent left-hand sides missing in child")
        rest = [a for a in child.basic if not (is_eq(a) and a.lhs in plhs)]
        child.basic = parent_eqs + rest
        child.level = 4
        self._fired(13, child)

    # ------------------------------------------------------------ duplicates

    def _collapse(self, box: list, n: Node) -> None:
        """Drop the final node n if an earlier final sibling in box is the
        same formula up to renaming of bound variables (p & p is p)."""
        shape = None
        for m in box:
            if m is n:
                continue
            if m.level != 5 or len(m.children) != len(n.children) or len(m.basic) != len(n.basic):
                continue
            if shape is None:
                shape = _shape(n)
            if _shape(m) == shape:
                self._begin(n, whole=True)
                self._delete(n)
                self._fired("dup", n)
                return

    # ------------------------------------------------------------ rule 14

    def _rule14(self, n: Node) -> None:
        self._begin(n, whole=True)
        self._delete(n)
        self._fired(14, n)

    # ------------------------------------------------------------ rule 15

    def _rule15(self, n: Node) -> None:
        self._begin(n, whole=True)
        a = n.basic
        xs = set(n.quant)
        seeds = {v for at in a for v in atom_vars(at)} - xs
        reach, _, _ = reachable(a, seeds, xs)
        a1 = [at for at in a if _kept(at, reach, xs)]
        a2 = {at for at in a if type(at) is FiniteAtom and not _kept(at, reach, xs)}
        alhs = lhs_set(a)
        x1 = [x for x in n.quant if x in reach]
        x2 = {x for x in n.quant if x not in reach and x not in alhs}
        x3 = [x for x in n.quant if x not in reach and x in alhs]

        kept = []
        for c in n.children:
            b_star = [at for at in c.basic if not (type(at) is FiniteAtom and at in a2)]
            quant, b1 = _restrict(list(c.quant) + x3, b_star)
            if any(v in x2 for at in b1 for v in atom_vars(at)):
                self.stats.live_nodes -= 1
                c.dead = True
                continue
            env = self._monotone_fresh(quant)
            quant = [env[v] for v in quant]
            b1 = [rename_atom(at, env) for at in b1]
            if any(type(at) is EqVar and not at.lhs > at.rhs for at in b1):
                b1 = _resolve(b1, a1)
                if b1 is None:
                    self.stats.live_nodes -= 1
                    c.dead = True
                    continue
                quant, b1 = _restrict(quant, b1)
                if any(v in x2 for at in b1 for v in atom_vars(at)):
                    self.stats.live_nodes -= 1
                    c.dead = True
                    continue
            if set(b1) <= set(a1):
                # the child is implied by the node, so the node is true
                kept = None
                break
            c.quant, c.basic = quant, b1
            kept.append(c)
        if kept is None:
            self._delete(n)
            self._fired(15, n)
            return
        n.quant, n.basic, n.children = x1, a1, kept
        n.level = 5
        self._fired(15, n)
        for c in list(n.children):
            if not c.dead:
                self._collapse(n.children, c)

    def _monotone_fresh(self, vs) -> dict:
        return {v: self.fresh.var_above((), v.name) for v in sorted(vs)}

    # ------------------------------------------------------------ rule 16

    def _rule16(self, n: Node, child: Node) -> None:
        self._begin(n, whole=True)
        grand = child.children
        child.children = []
        others = [c for c in n.children if c is not child]
        box = self._container(n)
        pos = next(i for i, m in enumerate(box) if m is n) + 1
        created = []
        for g in grand:
            block = list(n.quant) + list(child.quant) + list(g.quant)
            env = self._monotone_fresh(block)
            binders = sorted({v for o in others for m in o.walk() for v in m.quant})
            env.update(self._monotone_fresh(binders))
            q0 = [self._copy_level0(o, env) for o in others]
            root = self._new(4, [env[v] for v in sorted(block)], [rename_atom(at, env) for at in g.basic], q0)
            root.parent = n.parent
            created.append(root)
            g.dead = True
            self.stats.live_nodes -= 1
        box[pos:pos] = created
        self._fired(16, n)

    def _copy_level0(self, n: Node, env: dict) -> Node:
        kids = [self._copy_level0(c, env) for c in n.children]
        return self._new(0, [env.get(v, v) for v in n.quant], [rename_atom(a, env) for a in n.basic], kids)

    # ------------------------------------------------------------ checking

    def validate(self) -> None:
        """Check the syntactic working-formula conditions of every node,
        the variable discipline and free-variable preservation."""
        from .oracle import entail_basic

        for root in self.forest:
            if root.parent is not None:
                raise InvariantViolation("root with a parent")
            for n in root.walk():
                for c in n.children:
                    if c.parent is not n:
                        raise InvariantViolation(f"node {c.id}: stale parent link")
                _check_node(n, entail_basic)
        f = forest_formula(self.forest)
        if not satisfies_discipline(f):
            raise InvariantViolation("variable discipline broken")
        if self._free0 is not None and not free_vars(f) <= self._free0:
            raise InvariantViolation("new free variables appeared")


# ---------------------------------------------------------------- helpers


def _ancestors(n: Node | None):
    while n is not None:
        yield n
        n = n.parent


def _max_key(vs):
    return max((v.key for v in vs), default=None)


def _gt(a, b) -> bool:
    return a is not None and (b is None or a > b)


def _kmax(a, b):
    return b if _gt(b, a) else a


def _shape(n: Node, env: dict | None = None) -> tuple:
    """Structural key of a subtree, invariant under renaming bound variables
    in an order-preserving way."""
    env = dict(env or {})
    for v in sorted(n.quant):
        env[v] = ("bound", len(env))

    def var(v):
        return env.get(v, ("free", v.key))

    atoms = []
    for a in n.basic:
        if type(a) is EqVar:
            atoms.append(("=", var(a.lhs), var(a.rhs)))
        elif type(a) is EqApp:
            atoms.append(("=", var(a.lhs), a.sym.name, a.sym.arity, tuple(var(w) for w in a.args)))
        else:
            atoms.append(("finite", var(a.var)))
    kids = frozenset(_shape(c, env) for c in n.children)
    return (len(n.quant), frozenset(atoms), kids)


def _find_eq_step(b: list):
    """First applicable rule among 1-5 as (rule, i, j), or None."""
    for i, a in enumerate(b):
        if type(a) is EqVar and a.lhs == a.rhs:
            return (1, i, i)
    for i, a in enumerate(b):
        if type(a) is EqVar and a.rhs > a.lhs:
            return (2, i, i)
    index: dict = {}
    for i, a in enumerate(b):
        if is_eq(a):
            index.setdefault(a.lhs, []).append(i)
    for i, a in enumerate(b):
        if type(a) is EqVar and a.lhs > a.rhs:
            for j in index[a.lhs]:
                if j != i:
                    return (3, i, j)
    for idxs in index.values():
        apps = [k for k in idxs if type(b[k]) is EqApp]
        for x in range(len(apps)):
            for y in range(x + 1, len(apps)):
                if b[apps[x]].sym != b[apps[y]].sym:
                    return (4, apps[x], apps[y])
    for idxs in index.values():
        apps = [k for k in idxs if type(b[k]) is EqApp]
        if len(apps) > 1:
            return (5, apps[0], apps[1])
    return None


def _find_fin_step(b: list):
    """First applicable rule among 9, 7, 8, 10 as (rule, i, j), or None.

    i is the position of the finite atom, j of its partner.
    """
    fins = [(i, a) for i, a in enumerate(b) if type(a) is FiniteAtom]
    for i, a in fins:
        if self_reachable(a.var, b):
            return (9, i, i)
    seen: dict = {}
    for i, a in fins:
        if a.var in seen:
            return (7, seen[a.var], i)
        seen[a.var] = i
    index = {}
    for j, a in enumerate(b):
        if is_eq(a):
            index.setdefault(a.lhs, j)
    for i, a in fins:
        j = index.get(a.var)
        if j is not None and type(b[j]) is EqVar:
            return (8, i, j)
    for i, a in fins:
        j = index.get(a.var)
        if j is not None and type(b[j]) is EqApp:
            return (10, i, j)
    return None


def _kept(at, reach: set, bound: set) -> bool:
    """Is the atom reachable in ex bound. (...) given its reachable variables?"""
    if is_eq(at):
        return at.lhs in reach
    if type(at) is FiniteAtom:
        return at.var in reach or at.var not in bound
    return False


def _restrict(quant: list, b: list):
    """Keep the reachable part of ex quant. b."""
    bound = set(quant)
    seeds = {v for at in b for v in atom_vars(at)} - bound
    reach, _, _ = reachable(b, seeds, bound)
    return [v for v in quant if v in reach], [at for at in b if _kept(at, reach, bound)]


def _resolve(b: list, a1: list):
    """Re-solve a basic formula after renaming, then put the node's own
    equations back as rule 13 does.  None if it became false."""
    b = list(b)
    while True:
        step = _find_eq_step(b)
        if step is None:
            break
        rule, i, j = step
        if rule == 1:
            del b[i]
        elif rule == 2:
            b[i] = EqVar(b[i].rhs, b[i].lhs)
        elif rule == 3:
            e = b[j]
            v = b[i].rhs
            b[j] = EqVar(v, e.rhs) if type(e) is EqVar else EqApp(v, e.sym, e.args)
        elif rule == 4:
            return None
        elif rule == 5:
            e1, e2 = b[i], b[j]
            del b[j]
            b.extend(EqVar(v, w) for v, w in zip(e1.args, e2.args))
    while True:
        step = _find_fin_step(b)
        if step is None:
            break
        rule, i, j = step
        if rule == 9:
            return None
        if rule == 7:
            del b[j]
        elif rule == 8:
            b[i] = FiniteAtom(b[j].rhs)
        elif rule == 10:
            args = b[j].args
            del b[i]
            b.extend(FiniteAtom(v) for v in args)
    a_eqs = [a for a in a1 if is_eq(a)]
    alhs = lhs_set(a_eqs)
    if not alhs <= lhs_set(b):
        raise InvariantViolation("re-solved child lost a left-hand side of its parent")
    return a_eqs + [at for at in b if not (is_eq(at) and at.lhs in alhs)]


def _check_node(n: Node, entail) -> None:
    k = n.level
    p = n.parent
    b = n.basic
    where = f"node {n.id} at level {k}"
    if k >= 1 and p is not None:
        if not (lhs_set(p.basic) | fini_set(p.basic)) <= (lhs_set(b) | fini_set(b)):
            raise InvariantViolation(f"{where}: lost a constrained variable of its parent")
        if not entail(b, p.basic):
            raise InvariantViolation(f"{where}: does not entail its parent")
        if not entail([a for a in b if is_eq(a)], [a for a in p.basic if is_eq(a)]):
            raise InvariantViolation(f"{where}: equations do not entail the parent's")
    if k >= 2:
        idx = eq_index(b)
        if any(len(v) > 1 for v in idx.values()):
            raise InvariantViolation(f"{where}: repeated left-hand side")
        if any(type(a) is EqVar and not a.lhs > a.rhs for a in b):
            raise InvariantViolation(f"{where}: misordered variable equation")
    if k >= 3:
        rep = check_solved(b)
        if not rep.solved:
            raise InvariantViolation(f"{where}: not solved {rep.violations}")
    if k >= 4 and p is not None:
        mine = set(a for a in b if is_eq(a))
        if not all(a in mine for a in p.basic if is_eq(a)):
            raise InvariantViolation(f"{where}: missing a parent equation")
    if k >= 5:
        quant, kept = _restrict(list(n.quant), list(b))
        if len(quant) != len(n.quant) or len(kept) != len(b):
            raise InvariantViolation(f"{where}: unreachable quantifier or atom")
        mine = set(b)
        for c in n.children:
            if set(c.basic) <= mine:
                raise InvariantViolation(f"{where}: child {c.id} adds nothing")
