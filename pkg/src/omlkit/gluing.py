"""Overlaps of Boolean frames, gluing isomorphisms and their cocycle laws."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Sequence

from .frames import BooleanAlgebra, BooleanFrame, BoolHom


class GluingError(ValueError):
    pass


@dataclass(frozen=True)
class PullbackAlgebra:
    """Pairs ``(b, b')`` of elements (bitmasks) with ``left(b) == right(b')`` in L."""

    left: BooleanFrame
    right: BooleanFrame
    carrier: frozenset[tuple[int, int]]

    def proj_left(self, pair: tuple[int, int]) -> int:
        return pair[0]

    def proj_right(self, pair: tuple[int, int]) -> int:
        return pair[1]

    def left_image(self) -> frozenset[int]:
        return frozenset(b for b, _ in self.carrier)

    def right_image(self) -> frozenset[int]:
        return frozenset(b for _, b in self.carrier)

    def image_in_target(self) -> frozenset[int]:
        return frozenset(self.left(b) for b, _ in self.carrier)

    def atoms(self) -> list[tuple[int, int]]:
        nz = [p for p in self.carrier if p != (0, 0)]
        return sorted(
            p for p in nz if not any(q != p and q[0] & p[0] == q[0] and q[1] & p[1] == q[1] for q in nz)
        )

    def nontrivial(self) -> bool:
        """Shares an element of L other than 0 and 1."""
        L = self.left.target
        return bool(self.image_in_target() - {L.zero, L.one})


def _closure_violations(pb: PullbackAlgebra) -> list[str]:
    fl, fr = pb.left.source.full, pb.right.source.full
    C = pb.carrier
    errs = []
    if (0, 0) not in C or (fl, fr) not in C:
        errs.append("carrier misses (0,0) or (1,1)")
    for b, c in C:
        if (fl ^ b, fr ^ c) not in C:
            errs.append(f"not closed under complement at {(b, c)}")
        if pb.left(b) != pb.right(c):
            errs.append(f"square does not commute at {(b, c)}")
    for (b, c), (b2, c2) in product(C, C):
        if (b | b2, c | c2) not in C or (b & b2, c & c2) not in C:
            errs.append(f"not closed under meet/join at {(b, c)}, {(b2, c2)}")
            break
    return errs


def _distributive(pb: PullbackAlgebra) -> bool:
    C = list(pb.carrier)
    for (x1, x2), (y1, y2), (z1, z2) in product(C, C, C):
        if (x1 & (y1 | z1), x2 & (y2 | z2)) != ((x1 & y1) | (x1 & z1), (x2 & y2) | (x2 & z2)):
            return False
    return True


def pullback(psi: BooleanFrame, psi2: BooleanFrame) -> PullbackAlgebra:
    if psi.target is not psi2.target:
        raise GluingError("frames have different targets")
    right_by_image: dict[int, list[int]] = {}
    for c in psi2.source.elements:
        right_by_image.setdefault(psi2(c), []).append(c)
    carrier = frozenset((b, c) for b in psi.source.elements for c in right_by_image.get(psi(b), ()))
    pb = PullbackAlgebra(psi, psi2, carrier)
    errs = _closure_violations(pb)
    if errs:
        raise AssertionError(f"pullback carrier invalid: {errs[0]}")
    return pb


def pullback_is_boolean(pb: PullbackAlgebra) -> bool:
    return not _closure_violations(pb) and _distributive(pb) and len(pb.carrier) == 1 << len(pb.atoms())


def check_intersection(psi: BooleanFrame, psi2: BooleanFrame) -> bool:
    """For injective frames: image of the pullback in L equals the intersection of the images."""
    if not (psi.injective and psi2.injective):
        raise GluingError("check_intersection requires injective frames")
    pb = pullback(psi, psi2)
    via_left = pb.image_in_target()
    via_right = frozenset(psi2(c) for _, c in pb.carrier)
    return via_left == via_right == psi.image() & psi2.image()


@dataclass(frozen=True)
class GluingIso:
    """``Omega_{B,B'}``: from the overlap's copy in B' to its copy in B."""

    codomain_frame: BooleanFrame
    domain_frame: BooleanFrame
    mapping: tuple[tuple[int, int], ...]

    def __call__(self, x: int) -> int:
        return dict(self.mapping)[x]

    @property
    def domain(self) -> frozenset[int]:
        return frozenset(x for x, _ in self.mapping)

    @property
    def codomain(self) -> frozenset[int]:
        return frozenset(y for _, y in self.mapping)

    def as_dict(self) -> dict[int, int]:
        return dict(self.mapping)


def gluing_iso(psi: BooleanFrame, psi2: BooleanFrame) -> GluingIso:
    """``Omega = proj_left . proj_right^-1`` on the pullback images."""
    if not (psi.injective and psi2.injective):
        raise GluingError("gluing isomorphisms need injective frames")
    pb = pullback(psi, psi2)
    omega: dict[int, int] = {}
    for b, c in pb.carrier:
        if c in omega and omega[c] != b:
            raise AssertionError("right projection is not invertible on the overlap")
        omega[c] = b
    if len(set(omega.values())) != len(omega):
        raise AssertionError("gluing map is not injective")
    fl, fr = psi.source.full, psi2.source.full
    for c, b in omega.items():
        if omega.get(fr ^ c) != fl ^ b:
            raise AssertionError("gluing map does not preserve complement")
        for c2, b2 in omega.items():
            if omega.get(c | c2) != b | b2 or omega.get(c & c2) != b & b2:
                raise AssertionError("gluing map does not preserve meet/join")
    return GluingIso(psi, psi2, tuple(sorted(omega.items())))


@dataclass(frozen=True)
class CocycleReport:
    identity_law: bool
    symmetry_law: bool
    triangle_law: bool
    identity_witnesses: tuple
    symmetry_witnesses: tuple
    triangle_witnesses: tuple
    frames: int
    pairs: int
    triples: int
    nontrivial_triples: int

    @property
    def ok(self) -> bool:
        return self.identity_law and self.symmetry_law and self.triangle_law


def verify_cocycles(frames: Sequence[BooleanFrame]) -> CocycleReport:
    """Identity, inverse-symmetry and triangle laws of the gluing isomorphisms.

    Triples are checked on the common domain of the composite; every triple
    shares at least the unit, so all are checked, and those sharing an element
    other than 0 and 1 are counted separately.
    """
    frames = list(frames)
    if frames and any(f.target is not frames[0].target for f in frames):
        raise GluingError("frames have different targets")
    n = len(frames)
    omega = {(i, j): gluing_iso(frames[i], frames[j]) for i in range(n) for j in range(n)}
    id_w, sym_w, tri_w = [], [], []
    for i in range(n):
        if any(x != y for x, y in omega[i, i].mapping) or omega[i, i].domain != set(frames[i].source.elements):
            id_w.append(i)
    pairs = 0
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            pairs += 1
            fwd, back = omega[i, j].as_dict(), omega[j, i].as_dict()
            if {v: k for k, v in fwd.items()} != back:
                sym_w.append((i, j))
    triples = nontrivial = 0
    L = frames[0].target if frames else None
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if len({i, j, k}) < 3:
                    continue
                triples += 1
                shared = frames[i].image() & frames[j].image() & frames[k].image()
                if shared - {L.zero, L.one}:
                    nontrivial += 1
                o_ij, o_jk, o_ik = omega[i, j].as_dict(), omega[j, k].as_dict(), omega[i, k].as_dict()
                for x, y in o_jk.items():
                    if y in o_ij and o_ik.get(x) != o_ij[y]:
                        tri_w.append((i, j, k, x))
                        break
    return CocycleReport(
        not id_w, not sym_w, not tri_w,
        tuple(id_w), tuple(sym_w), tuple(tri_w),
        n, pairs, triples, nontrivial,
    )


def verify_pullback_universality(pb: PullbackAlgebra, test: BooleanAlgebra, h: BoolHom, g: BoolHom) -> bool:
    """Exactly one mediating map ``u: test -> carrier`` with ``proj_left.u = h`` and ``proj_right.u = g``."""
    if h.source != test or g.source != test:
        raise GluingError("h and g must start at the test algebra")
    if h.target != pb.left.source or g.target != pb.right.source:
        raise GluingError("h and g must land in the pullback's factors")
    for x in test.elements:
        if pb.left(h(x)) != pb.right(g(x)):
            raise GluingError(f"outer square does not commute at {test.label(x)}")
    # candidates for each atom of the test algebra
    for k in range(len(test.atoms)):
        x = 1 << k
        cands = [p for p in pb.carrier if p[0] == h(x) and p[1] == g(x)]
        if len(cands) != 1:
            return False
    u = {x: (h(x), g(x)) for x in test.elements}
    return all(v in pb.carrier for v in u.values())
