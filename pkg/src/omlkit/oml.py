"""Finite orthomodular lattices.

Elements are dense integer ids ``0..n-1``.  The order is stored as up-set
bitmasks, so ``a <= b`` is a single bit test.  Constructors never check the
ortholattice axioms; use :func:`validate_ortholattice` and
:func:`verify_orthomodularity` for that.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence


class LatticeError(ValueError):
    """The supplied order is not a bounded lattice."""


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True, eq=False)
class FiniteOML:
    labels: tuple[str, ...]
    up: tuple[int, ...]
    comp: tuple[int, ...]
    join: tuple[tuple[int, ...], ...]
    meet: tuple[tuple[int, ...], ...]
    zero: int
    one: int
    _index: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", {lab: i for i, lab in enumerate(self.labels)})

    # construction -------------------------------------------------------

    @classmethod
    def from_order(
        cls,
        labels: Sequence[str],
        leq_pairs: Iterable[tuple[int, int]],
        comp: Sequence[int],
    ) -> FiniteOML:
        """Build from generating order pairs (reflexive-transitive closure is taken)."""
        n = len(labels)
        up = [1 << i for i in range(n)]
        for a, b in leq_pairs:
            up[a] |= 1 << b
        # transitive closure on bitmasks
        changed = True
        while changed:
            changed = False
            for i in range(n):
                m = up[i]
                acc = m
                for j in _bits(m):
                    acc |= up[j]
                if acc != m:
                    up[i] = acc
                    changed = True
        return cls.from_upsets(labels, up, comp)

    @classmethod
    def from_upsets(cls, labels: Sequence[str], up: Sequence[int], comp: Sequence[int]) -> FiniteOML:
        n = len(labels)
        if len(set(labels)) != n:
            raise LatticeError("duplicate element labels")
        if len(comp) != n or any(not 0 <= c < n for c in comp):
            raise LatticeError("orthocomplement table is not a total map on the elements")
        full = (1 << n) - 1
        down = [0] * n
        for i in range(n):
            for j in _bits(up[i]):
                down[j] |= 1 << i
        zeros = [i for i in range(n) if up[i] == full]
        ones = [i for i in range(n) if down[i] == full]
        if len(zeros) != 1 or len(ones) != 1:
            raise LatticeError("order has no unique bottom and top element")
        join = [[0] * n for _ in range(n)]
        meet = [[0] * n for _ in range(n)]
        for a in range(n):
            for b in range(a, n):
                ub = up[a] & up[b]
                j = next((u for u in _bits(ub) if up[u] == ub), None)
                lb = down[a] & down[b]
                m = next((w for w in _bits(lb) if down[w] == lb), None)
                if j is None or m is None:
                    kind = "least upper bound" if j is None else "greatest lower bound"
                    raise LatticeError(f"{labels[a]} and {labels[b]} have no {kind}")
                join[a][b] = join[b][a] = j
                meet[a][b] = meet[b][a] = m
        return cls(
            tuple(labels),
            tuple(up),
            tuple(comp),
            tuple(map(tuple, join)),
            tuple(map(tuple, meet)),
            zeros[0],
            ones[0],
        )

    # basic queries ------------------------------------------------------

    def __len__(self):
        return len(self.labels)

    def __repr__(self):
        return f"FiniteOML({len(self)} elements)"

    @property
    def elements(self) -> range:
        return range(len(self.labels))

    def index(self, label: str) -> int:
        return self._index[label]

    def leq(self, a: int, b: int) -> bool:
        return bool(self.up[a] >> b & 1)

    def orthogonal(self, a: int, b: int) -> bool:
        return self.leq(a, self.comp[b])

    def join_all(self, xs: Iterable[int]) -> int:
        acc = self.zero
        for x in xs:
            acc = self.join[acc][x]
        return acc

    def meet_all(self, xs: Iterable[int]) -> int:
        acc = self.one
        for x in xs:
            acc = self.meet[acc][x]
        return acc

    def atoms(self) -> list[int]:
        """Elements covering zero."""
        z = self.zero
        return [
            x
            for x in self.elements
            if x != z and all(y in (z, x) for y in self.elements if self.leq(y, x))
        ]

    def atoms_below(self, x: int) -> list[int]:
        return [a for a in self.atoms() if self.leq(a, x)]

    def height_profile(self, x: int) -> tuple[int, int]:
        """(number of elements below, number above); an isomorphism invariant."""
        down = sum(1 for y in self.elements if self.leq(y, x))
        return down, bin(self.up[x]).count("1")

    def is_boolean_subset(self, subset: Iterable[int]) -> bool:
        s = list(subset)
        return _distributive_on(self, s)


# canonical small lattices ----------------------------------------------------


def bound_labels(names: Iterable[str]) -> tuple[str, str]:
    """Labels for bottom and top that do not clash with the given atom names."""
    names = set(names)
    for lo, hi in (("0", "1"), ("bot", "top"), ("_0", "_1")):
        if lo not in names and hi not in names:
            return lo, hi
    raise ValueError("cannot pick bottom/top labels")


def boolean_lattice(atoms: Sequence[str]) -> FiniteOML:
    """The powerset algebra on ``atoms`` as a FiniteOML; element id = atom bitmask."""
    n = len(atoms)
    size = 1 << n
    full = size - 1
    bounds = bound_labels(atoms)
    labels = [_subset_label(atoms, m, full, bounds) for m in range(size)]
    up = []
    for m in range(size):
        up.append(sum(1 << s for s in range(size) if s & m == m))
    comp = [full ^ m for m in range(size)]
    return FiniteOML.from_upsets(labels, up, comp)


def _subset_label(atoms: Sequence[str], mask: int, full: int, bounds=("0", "1")) -> str:
    if mask == 0:
        return bounds[0]
    if mask == full:
        return bounds[1]
    return "+".join(a for i, a in enumerate(atoms) if mask >> i & 1)


def mo(n: int) -> FiniteOML:
    """MO_n: 0, 1 and ``n`` incomparable complement pairs (horizontal sum of n copies of B_4)."""
    names = "abcdefghij"
    labels = ["0"]
    for k in range(n):
        labels += [names[k], names[k] + "*"]
    labels.append("1")
    one = len(labels) - 1
    pairs = [(0, i) for i in range(len(labels))] + [(i, one) for i in range(len(labels))]
    comp = [one] + [i + 1 if i % 2 else i - 1 for i in range(1, one)] + [0]
    return FiniteOML.from_order(labels, pairs, comp)


def hexagon() -> FiniteOML:
    """O6: 0 < a < b < 1 and 0 < b* < a* < 1; an ortholattice that is not orthomodular."""
    labels = ["0", "a", "b", "b*", "a*", "1"]
    pairs = [(0, 1), (1, 2), (2, 5), (0, 3), (3, 4), (4, 5)]
    comp = [5, 4, 3, 2, 1, 0]
    return FiniteOML.from_order(labels, pairs, comp)


# validators ------------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    axiom: str
    witness: tuple[str, ...]

    def __str__(self):
        return f"{self.axiom}: ({', '.join(self.witness)})"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def valid(self) -> bool:
        return not self.violations

    def axioms_failed(self) -> set[str]:
        return {v.axiom for v in self.violations}


def validate_ortholattice(L: FiniteOML) -> ValidationReport:
    """Check every ortholattice axiom; one report entry (first witness) per failed axiom."""
    E = L.elements
    lab = L.labels
    found: dict[str, tuple[str, ...]] = {}

    def fail(axiom, *w):
        found.setdefault(axiom, tuple(lab[x] for x in w))

    for a in E:
        if not L.leq(a, a):
            fail("reflexivity", a)
        if not L.leq(L.zero, a):
            fail("bottom", a)
        if not L.leq(a, L.one):
            fail("top", a)
    for a, b in combinations(E, 2):
        if L.leq(a, b) and L.leq(b, a):
            fail("antisymmetry", a, b)
    for a in E:
        for b in _bits(L.up[a]):
            if L.up[b] & ~L.up[a]:
                c = next(_bits(L.up[b] & ~L.up[a]))
                fail("transitivity", a, b, c)
    for a in E:
        for b in E:
            j, m = L.join[a][b], L.meet[a][b]
            ub = L.up[a] & L.up[b]
            if not (ub >> j & 1 and L.up[j] == ub):
                fail("join is least upper bound", a, b)
            if not (L.leq(m, a) and L.leq(m, b)) or any(
                L.leq(c, a) and L.leq(c, b) and not L.leq(c, m) for c in E
            ):
                fail("meet is greatest lower bound", a, b)
    for a in E:
        c = L.comp[a]
        if L.comp[c] != a:
            fail("involution", a)
        if L.join[a][c] != L.one:
            fail("complement join is one", a)
        if L.meet[a][c] != L.zero:
            fail("complement meet is zero", a)
    for a in E:
        for b in _bits(L.up[a]):
            if not L.leq(L.comp[b], L.comp[a]):
                fail("order reversing", a, b)
    for a in E:
        for b in E:
            if L.comp[L.join[a][b]] != L.meet[L.comp[a]][L.comp[b]]:
                fail("de morgan", a, b)
    order = [
        "reflexivity", "antisymmetry", "transitivity", "bottom", "top",
        "join is least upper bound", "meet is greatest lower bound",
        "involution", "order reversing", "complement join is one",
        "complement meet is zero", "de morgan",
    ]
    return ValidationReport(tuple(Violation(ax, found[ax]) for ax in order if ax in found))


def verify_orthomodularity(L: FiniteOML) -> tuple[int, int] | None:
    """First pair ``a <= b`` (by id) with ``b != a v (a* ^ b)``, or None if orthomodular."""
    for a in L.elements:
        ca = L.comp[a]
        for b in _bits(L.up[a]):
            if L.join[a][L.meet[ca][b]] != b:
                return a, b
    return None


def is_orthomodular_lattice(L: FiniteOML) -> bool:
    return validate_ortholattice(L).valid and verify_orthomodularity(L) is None


# compatibility and closure -----------------------------------------------------


def compatible(L: FiniteOML, a: int, b: int) -> bool:
    """Commutativity identity ``a = (a ^ b) v (a ^ b*)``."""
    return L.join[L.meet[a][b]][L.meet[a][L.comp[b]]] == a


def compatible_by_closure(L: FiniteOML, a: int, b: int) -> bool:
    """Compatibility as Booleanity of the sub-ortholattice generated by a and b."""
    return _distributive_on(L, sorted(generated_subalgebra(L, {a, b})))


def generated_subalgebra(L: FiniteOML, S: Iterable[int]) -> frozenset[int]:
    closed = set(S) | {L.zero, L.one}
    frontier = list(closed)
    while frontier:
        new = set()
        for x in frontier:
            c = L.comp[x]
            if c not in closed:
                new.add(c)
            for y in closed:
                for z in (L.join[x][y], L.meet[x][y]):
                    if z not in closed:
                        new.add(z)
        closed |= new
        frontier = list(new)
    return frozenset(closed)


def _distributive_on(L: FiniteOML, S: Sequence[int]) -> bool:
    J, M = L.join, L.meet
    for x in S:
        for y in S:
            for z in S:
                if M[x][J[y][z]] != J[M[x][y]][M[x][z]]:
                    return False
    return True
