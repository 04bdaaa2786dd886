"""Boolean subalgebras, Boolean frames and the presheaf of frames of a finite OML.

A Boolean algebra is presented by its atoms; its elements are atom bitmasks.
A frame ``B -> L`` is fixed by the images of the atoms of ``B``; the image of
an arbitrary element is the join of the images of the atoms below it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Hashable, Sequence

import networkx as nx

from .oml import FiniteOML, _bits, boolean_lattice, bound_labels, compatible, generated_subalgebra


@dataclass(frozen=True)
class BooleanAlgebra:
    name: str
    atoms: tuple[str, ...]

    def __post_init__(self):
        if not self.atoms:
            raise ValueError("a Boolean algebra needs at least one atom")
        if len(set(self.atoms)) != len(self.atoms):
            raise ValueError(f"duplicate atom names in {self.name}")

    @property
    def full(self) -> int:
        return (1 << len(self.atoms)) - 1

    @property
    def size(self) -> int:
        return 1 << len(self.atoms)

    @property
    def elements(self) -> range:
        return range(self.size)

    def label(self, mask: int) -> str:
        bottom, top = bound_labels(self.atoms)
        if mask == 0:
            return bottom
        if mask == self.full:
            return top
        return "+".join(a for i, a in enumerate(self.atoms) if mask >> i & 1)

    def as_oml(self) -> FiniteOML:
        # element id == atom bitmask
        return _boolean_oml(self.atoms)


_OML_CACHE: dict[tuple[str, ...], FiniteOML] = {}


def _boolean_oml(atoms):
    if atoms not in _OML_CACHE:
        _OML_CACHE[atoms] = boolean_lattice(atoms)
    return _OML_CACHE[atoms]


def boolean_algebra(n: int, prefix: str = "x") -> BooleanAlgebra:
    """The abstract Boolean algebra with ``n`` atoms (``2**n`` elements)."""
    return BooleanAlgebra(f"B{1 << n}", tuple(f"{prefix}{k + 1}" for k in range(n)))


@dataclass(frozen=True)
class BoolHom:
    """Boolean homomorphism given by the images (bitmasks) of the source atoms."""

    source: BooleanAlgebra
    target: BooleanAlgebra
    images: tuple[int, ...]

    def __post_init__(self):
        if len(self.images) != len(self.source.atoms):
            raise ValueError("one image per source atom required")
        acc = 0
        for m in self.images:
            if acc & m:
                raise ValueError("atom images of a Boolean homomorphism must be disjoint")
            acc |= m
        if acc != self.target.full:
            raise ValueError("atom images of a Boolean homomorphism must cover the target")

    def __call__(self, mask: int) -> int:
        acc = 0
        for k in _bits(mask):
            acc |= self.images[k]
        return acc

    def then(self, g: BoolHom) -> BoolHom:
        """``g . self``"""
        if g.source != self.target:
            raise ValueError(f"cannot compose {self.source.name}->{self.target.name} with {g.source.name}->{g.target.name}")
        return BoolHom(self.source, g.target, tuple(g(m) for m in self.images))

    @property
    def is_identity(self) -> bool:
        return self.source == self.target and all(m == 1 << k for k, m in enumerate(self.images))

    def __str__(self):
        maps = ", ".join(f"{a}->{self.target.label(m)}" for a, m in zip(self.source.atoms, self.images))
        return f"{self.source.name}->{self.target.name} [{maps}]"


def identity(B: BooleanAlgebra) -> BoolHom:
    return BoolHom(B, B, tuple(1 << k for k in range(len(B.atoms))))


def enumerate_homs(C: BooleanAlgebra, B: BooleanAlgebra) -> list[BoolHom]:
    """All Boolean homomorphisms C -> B (ordered assignments of disjoint covering masks)."""
    out = []
    n = len(C.atoms)

    def rec(k, used, imgs):
        if k == n - 1:
            out.append(BoolHom(C, B, tuple(imgs + [B.full ^ used])))
            return
        free = B.full ^ used
        sub = free
        while True:
            rec(k + 1, used | sub, imgs + [sub])
            if sub == 0:
                break
            sub = (sub - 1) & free

    rec(0, 0, [])
    out.sort(key=lambda h: h.images)
    return out


# frames ------------------------------------------------------------------------


@dataclass(frozen=True)
class BooleanFrame:
    source: BooleanAlgebra
    target: FiniteOML = field(compare=False, hash=False)
    images: tuple[int, ...]

    def __call__(self, mask: int) -> int:
        L = self.target
        acc = L.zero
        for k in _bits(mask):
            acc = L.join[acc][self.images[k]]
        return acc

    @cached_property
    def injective(self) -> bool:
        return self.target.zero not in self.images

    def image(self) -> frozenset[int]:
        return frozenset(self(m) for m in self.source.elements)

    def describe(self) -> str:
        lab = self.target.labels
        return ", ".join(f"{a}->{lab[x]}" for a, x in zip(self.source.atoms, self.images))


def frame_violations(psi: BooleanFrame) -> list[str]:
    """Full morphism check: 0, 1, complement, every binary meet and join of the source."""
    B, L = psi.source, psi.target
    errs = []
    for i, j in combinations(range(len(psi.images)), 2):
        if not L.orthogonal(psi.images[i], psi.images[j]):
            errs.append(f"images of {B.atoms[i]} and {B.atoms[j]} are not orthogonal")
    if psi(0) != L.zero:
        errs.append("0 not preserved")
    if psi(B.full) != L.one:
        errs.append("1 not preserved")
    h = [psi(m) for m in B.elements]
    for m in B.elements:
        if h[B.full ^ m] != L.comp[h[m]]:
            errs.append(f"complement of {B.label(m)} not preserved")
        for m2 in B.elements:
            if h[m | m2] != L.join[h[m]][h[m2]]:
                errs.append(f"join of {B.label(m)} and {B.label(m2)} not preserved")
            if h[m & m2] != L.meet[h[m]][h[m2]]:
                errs.append(f"meet of {B.label(m)} and {B.label(m2)} not preserved")
    return errs


def is_frame(psi: BooleanFrame) -> bool:
    return not frame_violations(psi)


def enumerate_frames(B: BooleanAlgebra, L: FiniteOML, injective_only: bool = False) -> list[BooleanFrame]:
    """All frames B -> L: pairwise orthogonal atom images joining to 1, each
    kept only if it passes the full morphism check."""
    n = len(B.atoms)
    out = []
    candidates = [x for x in L.elements if not (injective_only and x == L.zero)]

    def rec(k, acc, imgs):
        if k == n:
            if acc == L.one:
                out.append(BooleanFrame(B, L, tuple(imgs)))
            return
        room = L.comp[acc]
        for x in candidates:
            if L.leq(x, room):
                rec(k + 1, L.join[acc][x], imgs + [x])

    rec(0, L.zero, [])
    # in an OML every candidate passes; in a mere ortholattice some do not
    out = [psi for psi in out if not frame_violations(psi)]
    out.sort(key=lambda f: f.images)
    return out


def restrict_frame(psi: BooleanFrame, f: BoolHom) -> BooleanFrame:
    """``psi . f`` for ``f: C -> B``."""
    if f.target != psi.source:
        raise ValueError(f"ill-typed restriction: frame source {psi.source.name}, morphism target {f.target.name}")
    return BooleanFrame(f.source, psi.target, tuple(psi(m) for m in f.images))


# subalgebras -----------------------------------------------------------------


@dataclass(frozen=True)
class Subalgebra:
    algebra: BooleanAlgebra
    elements: frozenset[int]
    frame: BooleanFrame

    @property
    def atoms(self) -> tuple[int, ...]:
        return self.frame.images


def _subalgebra(L: FiniteOML, atoms: Sequence[int]) -> Subalgebra:
    atoms = tuple(sorted(atoms))
    labels = tuple(L.labels[a] for a in atoms)
    B = BooleanAlgebra("{" + ",".join(labels) + "}", labels)
    psi = BooleanFrame(B, L, atoms)
    return Subalgebra(B, psi.image(), psi)


def _sort_key(s: Subalgebra):
    return len(s.atoms), s.atoms


def enumerate_boolean_subalgebras(L: FiniteOML) -> list[Subalgebra]:
    """Every Boolean subalgebra, found as a decomposition of 1 into pairwise
    orthogonal nonzero elements (its atoms)."""
    out = []
    nonzero = [x for x in L.elements if x != L.zero]

    def rec(start, acc, chosen):
        if acc == L.one:
            out.append(_subalgebra(L, chosen))
            return
        room = L.comp[acc]
        for k in range(start, len(nonzero)):
            x = nonzero[k]
            if L.leq(x, room):
                rec(k + 1, L.join[acc][x], chosen + [x])

    rec(0, L.zero, [])
    out.sort(key=_sort_key)
    return out


def enumerate_subalgebras_exhaustive(L: FiniteOML) -> list[frozenset[int]]:
    """Oracle: every subset closed under meet, join, complement containing 0, 1
    that is distributive.  Exponential; small lattices only."""
    inner = [x for x in L.elements if x not in (L.zero, L.one)]
    found = set()
    for mask in range(1 << len(inner)):
        S = {inner[k] for k in _bits(mask)} | {L.zero, L.one}
        if generated_subalgebra(L, S) != S:
            continue
        if L.is_boolean_subset(sorted(S)):
            found.add(frozenset(S))
    return sorted(found, key=lambda s: (len(s), sorted(s)))


def _atoms_of(L: FiniteOML, S: frozenset[int]) -> list[int]:
    nz = [x for x in S if x != L.zero]
    return [x for x in nz if not any(y != x and L.leq(y, x) for y in nz)]


def enumerate_blocks(L: FiniteOML) -> list[Subalgebra]:
    """Maximal Boolean subalgebras via maximal cliques of the compatibility graph."""
    inner = [x for x in L.elements if x not in (L.zero, L.one)]
    G = nx.Graph()
    G.add_nodes_from(inner)
    G.add_edges_from((a, b) for a, b in combinations(inner, 2) if compatible(L, a, b))
    seen = set()
    out = []
    cliques = list(nx.find_cliques(G)) if inner else [[]]
    for clique in cliques:
        S = generated_subalgebra(L, clique)
        if S in seen:
            continue
        seen.add(S)
        out.append(_subalgebra(L, _atoms_of(L, S)))
    out.sort(key=_sort_key)
    return out


def maximal_subalgebras(subs: Sequence[Subalgebra]) -> list[Subalgebra]:
    return [s for s in subs if not any(s.elements < t.elements for t in subs)]


# base categories and presheaves ------------------------------------------------


@dataclass(frozen=True)
class BaseCategory:
    objects: tuple[BooleanAlgebra, ...]
    morphisms: tuple[BoolHom, ...]

    def __post_init__(self):
        if len(set(self.objects)) != len(self.objects):
            raise ValueError("duplicate base object")
        objs = set(self.objects)
        for f in self.morphisms:
            if f.source not in objs or f.target not in objs:
                raise ValueError(f"morphism {f} leaves the base")
        if len(set(self.morphisms)) != len(self.morphisms):
            raise ValueError("duplicate base morphism")

    @cached_property
    def _mor_index(self) -> dict[BoolHom, int]:
        return {f: i for i, f in enumerate(self.morphisms)}

    @cached_property
    def _obj_index(self) -> dict[BooleanAlgebra, int]:
        return {B: i for i, B in enumerate(self.objects)}

    def obj_index(self, B: BooleanAlgebra) -> int:
        return self._obj_index[B]

    def mor_index(self, f: BoolHom) -> int:
        return self._mor_index[f]

    def identity_index(self, B: BooleanAlgebra) -> int:
        return self._mor_index[identity(B)]

    def category_violations(self) -> list[str]:
        errs = []
        for B in self.objects:
            if identity(B) not in self._mor_index:
                errs.append(f"identity of {B.name} missing")
        for f in self.morphisms:
            for g in self.morphisms:
                if f.target == g.source and f.then(g) not in self._mor_index:
                    errs.append(f"composite of {f} and {g} missing")
        return errs


def finite_category(objects: Sequence[BooleanAlgebra], morphisms: Sequence[BoolHom]) -> BaseCategory:
    """Base category with identities added; raises if not closed under composition."""
    mors = list(morphisms)
    for B in objects:
        if identity(B) not in mors:
            mors.append(identity(B))
    base = BaseCategory(tuple(objects), tuple(dict.fromkeys(mors)))
    errs = base.category_violations()
    if errs:
        raise ValueError(f"base not closed under composition: {errs[0]}")
    return base


def subalgebra_base(L: FiniteOML, subs: Sequence[Subalgebra] | None = None) -> tuple[BaseCategory, list[Subalgebra]]:
    """All Boolean subalgebras of L as abstract algebras, with inclusions."""
    subs = list(subs) if subs is not None else enumerate_boolean_subalgebras(L)
    mors = []
    for C in subs:
        for B in subs:
            if C.elements <= B.elements:
                imgs = tuple(
                    sum(1 << k for k, b in enumerate(B.atoms) if L.leq(b, c)) for c in C.atoms
                )
                mors.append(BoolHom(C.algebra, B.algebra, imgs))
    return finite_category([s.algebra for s in subs], mors), subs


@dataclass(frozen=True, eq=False)
class Presheaf:
    """A contravariant set-valued functor on a finite base of Boolean algebras.

    ``restrictions[i][k]`` is the index (in the source object's section list)
    of section ``k`` of the target of morphism ``i`` restricted along it.
    """

    base: BaseCategory
    sections: tuple[tuple[Hashable, ...], ...]
    restrictions: tuple[tuple[int, ...], ...]

    def section_set(self, B: BooleanAlgebra) -> tuple[Hashable, ...]:
        return self.sections[self.base.obj_index(B)]

    def restrict(self, f: BoolHom, p: Hashable) -> Hashable:
        mi = self.base.mor_index(f)
        src = self.base.obj_index(f.source)
        tgt = self.base.obj_index(f.target)
        k = self.sections[tgt].index(p)
        return self.sections[src][self.restrictions[mi][k]]

    def sizes(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.sections)


def functor_law_violations(P: Presheaf) -> list[str]:
    base = P.base
    errs = []
    for mi, f in enumerate(base.morphisms):
        s, t = base.obj_index(f.source), base.obj_index(f.target)
        r = P.restrictions[mi]
        if len(r) != len(P.sections[t]) or any(not 0 <= x < len(P.sections[s]) for x in r):
            errs.append(f"restriction along {f} is not a map P({f.target.name}) -> P({f.source.name})")
    if errs:
        return errs
    for mi, f in enumerate(base.morphisms):
        if f.is_identity and P.restrictions[mi] != tuple(range(len(P.sections[base.obj_index(f.source)]))):
            errs.append(f"restriction along identity of {f.source.name} is not the identity")
    for fi, f in enumerate(base.morphisms):
        for gi, g in enumerate(base.morphisms):
            if f.target != g.source:
                continue
            gf = base.mor_index(f.then(g))
            # P(g.f) = P(f) . P(g)
            for k in range(len(P.sections[base.obj_index(g.target)])):
                if P.restrictions[gf][k] != P.restrictions[fi][P.restrictions[gi][k]]:
                    errs.append(f"composition law fails for {f} then {g} at section {k}")
                    break
    return errs


def make_presheaf(base: BaseCategory, sections, restrict_fn) -> Presheaf:
    """Presheaf from section lists and a function ``(f, p) -> p . f``."""
    sections = tuple(tuple(s) for s in sections)
    lookup = [{p: k for k, p in enumerate(s)} for s in sections]
    restrictions = []
    for f in base.morphisms:
        s, t = base.obj_index(f.source), base.obj_index(f.target)
        restrictions.append(tuple(lookup[s][restrict_fn(f, p)] for p in sections[t]))
    return Presheaf(base, sections, tuple(restrictions))


@dataclass(frozen=True, eq=False)
class FramePresheaf(Presheaf):
    target: FiniteOML = None


def build_presheaf(L: FiniteOML, base: BaseCategory) -> FramePresheaf:
    """The functor of Boolean frames of L restricted to a finite base."""
    errs = base.category_violations()
    if errs:
        raise ValueError(f"base not closed under composition: {errs[0]}")
    sections = [enumerate_frames(B, L) for B in base.objects]
    P = make_presheaf(base, sections, lambda f, psi: restrict_frame(psi, f))
    R = FramePresheaf(P.base, P.sections, P.restrictions, L)
    errs = functor_law_violations(R)
    if errs:
        raise AssertionError(errs[0])
    return R


# category of elements ------------------------------------------------------------


@dataclass(frozen=True)
class ElementCategory:
    """Objects are (object index, section index); morphisms are
    (base morphism index, source object, target object) over the base."""

    base: BaseCategory
    objects: tuple[tuple[int, int], ...]
    morphisms: tuple[tuple[int, int, int], ...]

    def projection(self, m: tuple[int, int, int]) -> BoolHom:
        return self.base.morphisms[m[0]]


def category_of_elements(P: Presheaf) -> ElementCategory:
    objects = tuple((i, k) for i in range(len(P.base.objects)) for k in range(len(P.sections[i])))
    index = {o: n for n, o in enumerate(objects)}
    morphisms = []
    for mi, u in enumerate(P.base.morphisms):
        s, t = P.base.obj_index(u.source), P.base.obj_index(u.target)
        for k in range(len(P.sections[t])):
            morphisms.append((mi, index[s, P.restrictions[mi][k]], index[t, k]))
    return ElementCategory(P.base, objects, tuple(morphisms))


def element_category_violations(EC: ElementCategory) -> list[str]:
    """Identities present and closure under composition."""
    errs = []
    ms = set(EC.morphisms)
    for n, (i, _) in enumerate(EC.objects):
        idm = EC.base.identity_index(EC.base.objects[i])
        if (idm, n, n) not in ms:
            errs.append(f"identity missing at object {n}")
    for f in EC.morphisms:
        for g in EC.morphisms:
            if f[2] == g[1]:
                comp = EC.base.mor_index(EC.projection(f).then(EC.projection(g)))
                if (comp, f[1], g[2]) not in ms:
                    errs.append(f"composite of {f} and {g} missing")
    return errs


UNIFORMITY_NOTE = (
    "uniformity is not checked: no finite criterion distinguishes it from discreteness and splitness"
)


@dataclass(frozen=True)
class FibrationReport:
    discrete: bool
    discrete_witnesses: tuple
    split_lifts: bool
    lift_witnesses: tuple
    notes: str = UNIFORMITY_NOTE

    @property
    def ok(self) -> bool:
        return self.discrete and self.split_lifts


def check_discrete_fibration(EC: ElementCategory) -> FibrationReport:
    base = EC.base
    bad_fiber = []
    for m in EC.morphisms:
        if EC.projection(m).is_identity and m[1] != m[2]:
            bad_fiber.append(m)
    lifts: dict[tuple[int, int], list] = {}
    for m in EC.morphisms:
        lifts.setdefault((m[0], m[2]), []).append(m)
    bad_lift = []
    for n, (i, _) in enumerate(EC.objects):
        B = base.objects[i]
        for mi, u in enumerate(base.morphisms):
            if u.target == B:
                found = lifts.get((mi, n), [])
                if len(found) != 1:
                    bad_lift.append((n, mi, len(found)))
    return FibrationReport(not bad_fiber, tuple(bad_fiber), not bad_lift, tuple(bad_lift))
