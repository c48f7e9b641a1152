"""The 10-component termination measure of the rewriting engine.

The first component is a tower of powers of two, so it is kept in
hereditary base-2 form instead of as a machine integer.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import total_ordering

from .basics import EqApp, EqVar, FiniteAtom, atom_vars, eq_index, self_reachable


@total_ordering
class HNat:
    """Natural number as a set of exponents, each itself an HNat.

    ``exps`` is strictly decreasing, so comparison is lexicographic.
    """

    __slots__ = ("exps", "_hash")

    def __init__(self, exps: tuple = ()):
        self.exps = exps
        self._hash = None

    @staticmethod
    def pow2(e: "HNat") -> "HNat":
        return HNat((e,))

    @classmethod
    def from_int(cls, n: int) -> "HNat":
        if n < 0:
            raise ValueError("negative")
        exps, bit = [], 0
        while n:
            if n & 1:
                exps.append(cls.from_int(bit))
            n >>= 1
            bit += 1
        return cls(tuple(reversed(exps)))

    def to_int(self, limit_bits: int = 4096) -> int:
        out = 0
        for e in self.exps:
            k = e.to_int(limit_bits)
            if k > limit_bits:
                raise OverflowError("too large to materialize")
            out += 1 << k
        return out

    def _cmp(self, other: "HNat") -> int:
        for a, b in zip(self.exps, other.exps):
            c = a._cmp(b)
            if c:
                return c
        return (len(self.exps) > len(other.exps)) - (len(self.exps) < len(other.exps))

    def __eq__(self, other):
        return isinstance(other, HNat) and self._cmp(other) == 0

    def __lt__(self, other: "HNat") -> bool:
        return self._cmp(other) < 0

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple(hash(e) for e in self.exps))
        return self._hash

    def add_pow2(self, e: "HNat") -> "HNat":
        exps = list(self.exps)
        while True:
            # find position of e in the decreasing list
            i = 0
            while i < len(exps) and exps[i] > e:
                i += 1
            if i < len(exps) and exps[i] == e:
                del exps[i]
                e = e + ONE  # carry
                continue
            exps.insert(i, e)
            return HNat(tuple(exps))

    def __add__(self, other: "HNat") -> "HNat":
        out = self
        for e in other.exps:
            out = out.add_pow2(e)
        return out

    def __repr__(self):
        try:
            return f"HNat({self.to_int(64)})"
        except OverflowError:
            return "HNat(2^(" + " + ".join(repr(e) for e in self.exps) + "))"


ZERO = HNat()
ONE = HNat((ZERO,))


# exponents below this stay machine integers
_INT_BITS = 4096


def _as_hnat(a) -> HNat:
    return a if isinstance(a, HNat) else HNat.from_int(a)


def _alpha(nodes):
    """alpha as an int while it fits, as an HNat beyond that."""
    total = 0
    for n in nodes:
        e = _alpha(n.children)
        if type(e) is int and e < _INT_BITS:
            term = 1 << e
        else:
            term = HNat.pow2(_as_hnat(e))
        if type(total) is int and type(term) is int:
            total += term
        else:
            total = _as_hnat(total) + _as_hnat(term)
    return total


def alpha_conj(nodes) -> HNat:
    """Sum over the conjunction of 2^(alpha of each node's children)."""
    return _as_hnat(_alpha(nodes))


def lam(u, atoms, memo=None) -> int:
    """Weight of a finite(u) constraint inside the basic formula ``atoms``."""
    atoms = list(atoms)
    index = eq_index(atoms)
    for lhs, eqs in index.items():
        if len(eqs) > 1:
            return 0
    for a in atoms:
        if type(a) is EqVar and a.rhs.key > a.lhs.key:
            return 0
    if memo is None:
        memo = {}

    def go(v) -> int:
        hit = memo.get(v)
        if hit is not None:
            return hit
        eqs = index.get(v)
        if not eqs or self_reachable(v, atoms):
            r = 1
        elif type(eqs[0]) is EqVar:
            r = 1 + go(eqs[0].rhs)
        else:
            r = 2 + sum(go(w) for w in eqs[0].args)
        memo[v] = r
        return r

    return go(u)


@dataclass(frozen=True, order=True)
class MeasureTuple:
    n1: HNat
    n2: int
    n3: int
    n4: int
    n5: int
    n6: int
    n7: int
    n8: int
    n9: int
    n10: int

    def as_tuple(self) -> tuple:
        return (self.n1, self.n2, self.n3, self.n4, self.n5, self.n6, self.n7, self.n8, self.n9, self.n10)

    def short(self) -> str:
        """Printable form; n1 is shown as its structure when it is huge."""
        try:
            first = str(self.n1.to_int(256))
        except OverflowError:
            first = "big"
        return "(" + ",".join([first] + [str(x) for x in self.as_tuple()[1:]]) + ")"


def _walk(nodes):
    stack = list(nodes)
    while stack:
        n = stack.pop()
        yield n
        stack.extend(n.children)


def variable_ranks(*forests) -> dict:
    """Number every variable so that the numbering agrees with the order."""
    seen = set()
    for forest in forests:
        for n in _walk(forest):
            seen.update(n.quant)
            for a in n.basic:
                seen.update(atom_vars(a))
    return {v: i + 1 for i, v in enumerate(sorted(seen))}


def measure(forest, ranks: dict | None = None) -> MeasureTuple:
    """Measure of a conjunction of working trees.

    ``ranks`` numbers the variables; pass a common numbering when two
    states are compared.  By default only the variables under level-1
    negations, the only ones the numbering is used for, are numbered.
    """
    counts = [0] * 6
    n4 = n6 = n8 = 0
    level1 = []
    for n in _walk(forest):
        counts[n.level] += 1
        if n.level == 1:
            for a in n.basic:
                level1.extend(atom_vars(a))
                if type(a) is EqApp:
                    n4 += 1
                elif type(a) is EqVar and a.rhs.key > a.lhs.key:
                    n6 += 1
        elif n.level == 2:
            memo: dict = {}
            for a in n.basic:
                if type(a) is FiniteAtom:
                    n8 += lam(a.var, n.basic, memo)
    if ranks is None:
        ranks = {v: i + 1 for i, v in enumerate(sorted(set(level1)))}
    n5 = sum(ranks[v] for v in level1)
    return MeasureTuple(
        alpha_conj(forest), counts[0], counts[1], n4, n5, n6, counts[2], n8, counts[3], counts[4]
    )
