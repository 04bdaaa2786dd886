"""Colimit pasting of Boolean diagrams and finite checks of the frames/lattice adjunction."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Hashable, Sequence

from .frames import (
    BaseCategory,
    BooleanAlgebra,
    BooleanFrame,
    BoolHom,
    FramePresheaf,
    Presheaf,
    build_presheaf,
    category_of_elements,
    enumerate_blocks,
    enumerate_frames,
    finite_category,
    functor_law_violations,
    make_presheaf,
    restrict_frame,
    subalgebra_base,
)
from .oml import FiniteOML, LatticeError, _bits, is_orthomodular_lattice
from .scenario import _UnionFind

BooleanDiagram = Presheaf


class PastingError(ValueError):
    pass


# pasting -----------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PastedStructure:
    labels: tuple[str, ...]
    up: tuple[int, ...]
    comp: tuple[int, ...]
    # legs[(object index, section index)][mask] = class id
    legs: dict = field(repr=False)
    lattice: FiniteOML | None
    orthomodular: bool
    reason: str = ""

    def __len__(self):
        return len(self.labels)

    @property
    def lattice_flag(self) -> bool:
        return self.lattice is not None and self.orthomodular

    def leq(self, a: int, b: int) -> bool:
        return bool(self.up[a] >> b & 1)


def _node_label(B: BooleanAlgebra, section: Hashable, mask: int) -> str:
    if isinstance(section, BooleanFrame):
        return section.target.labels[section(mask)]
    if isinstance(section, BoolHom):
        return section.target.label(section(mask))
    return f"{B.name}:{B.label(mask)}"


def paste_colimit(P: BooleanDiagram) -> PastedStructure:
    """Disjoint union of the algebras over the category of elements of P,
    quotiented by ``(B', p.u, b') ~ (B, p, u(b'))``."""
    errs = functor_law_violations(P)
    if errs:
        raise PastingError(f"diagram violates functor laws: {errs[0]}")
    base = P.base
    EC = category_of_elements(P)
    nodes: list[tuple[int, int]] = []  # (element-object index, mask)
    start = []
    for n, (i, _) in enumerate(EC.objects):
        start.append(len(nodes))
        nodes.extend((n, m) for m in base.objects[i].elements)

    def node(n, m):
        return start[n] + m

    uf = _UnionFind(len(nodes))
    for mi, s, t in EC.morphisms:
        u = base.morphisms[mi]
        for m in u.source.elements:
            uf.union(node(s, m), node(t, u(m)))

    roots = sorted({uf.find(x) for x in range(len(nodes))})
    members: dict[int, list[int]] = {r: [] for r in roots}
    for x in range(len(nodes)):
        members[uf.find(x)].append(x)

    def algebra(n):
        return base.objects[EC.objects[n][0]]

    # complement must be independent of the representative
    comp_root = {}
    for r in roots:
        targets = set()
        for x in members[r]:
            n, m = nodes[x]
            targets.add(uf.find(node(n, algebra(n).full ^ m)))
        if len(targets) != 1:
            n, m = nodes[members[r][0]]
            raise PastingError(f"ill-defined complement on the class of {algebra(n).name}:{algebra(n).label(m)}")
        comp_root[r] = targets.pop()

    idx = {r: k for k, r in enumerate(roots)}
    size = len(roots)
    up = [1 << k for k in range(size)]
    for n in range(len(EC.objects)):
        B = algebra(n)
        for m in B.elements:
            c = idx[uf.find(node(n, m))]
            for m2 in B.elements:
                if m2 & m == m:
                    up[c] |= 1 << idx[uf.find(node(n, m2))]
    changed = True
    while changed:
        changed = False
        for a in range(size):
            acc = up[a]
            for b in _bits(up[a]):
                acc |= up[b]
            if acc != up[a]:
                up[a] = acc
                changed = True
    for a, b in combinations(range(size), 2):
        if up[a] >> b & 1 and up[b] >> a & 1:
            raise PastingError(f"pasting collapse: classes {a} and {b} are mutually below each other")

    # canonical element order: by down-set size, then label
    def raw_label(r):
        n, m = nodes[members[r][0]]
        i, k = EC.objects[n]
        return _node_label(algebra(n), P.sections[i][k], m)

    labels_raw = [raw_label(r) for r in roots]
    if len(set(labels_raw)) != size:
        labels_raw = []
        for r in roots:
            n, m = nodes[members[r][0]]
            labels_raw.append(f"{algebra(n).name}:{algebra(n).label(m)}")
        if len(set(labels_raw)) != size:
            labels_raw = [f"e{k}" for k in range(size)]
    downs = [sum(1 for b in range(size) if up[b] >> a & 1) for a in range(size)]
    order = sorted(range(size), key=lambda a: (downs[a], labels_raw[a]))
    pos = {a: k for k, a in enumerate(order)}
    labels = tuple(labels_raw[a] for a in order)
    new_up = [0] * size
    for a in range(size):
        new_up[pos[a]] = sum(1 << pos[b] for b in _bits(up[a]))
    comp = [0] * size
    for r in roots:
        comp[pos[idx[r]]] = pos[idx[comp_root[r]]]
    legs = {}
    for n, obj in enumerate(EC.objects):
        legs[obj] = tuple(pos[idx[uf.find(node(n, m))]] for m in algebra(n).elements)

    try:
        K = FiniteOML.from_upsets(labels, new_up, comp)
    except LatticeError as e:
        return PastedStructure(labels, tuple(new_up), tuple(comp), legs, None, False, str(e))
    om = is_orthomodular_lattice(K)
    return PastedStructure(labels, tuple(new_up), tuple(comp), legs, K, om, "" if om else "not orthomodular")


def blocks_diagram(L: FiniteOML) -> BooleanDiagram:
    """All Boolean subalgebras of L with inclusions; one section each (the canonical injection)."""
    base, subs = subalgebra_base(L)
    sections = [(s.frame,) for s in subs]
    return make_presheaf(base, sections, lambda f, psi: restrict_frame(psi, f))


def representable(base: BaseCategory, B: BooleanAlgebra) -> BooleanDiagram:
    """``C |-> Hom_base(C, B)`` with restriction by precomposition."""
    homs = [[f for f in base.morphisms if f.source == C and f.target == B] for C in base.objects]
    return make_presheaf(base, homs, lambda f, g: f.then(g))


def probe_base(B: BooleanAlgebra) -> BaseCategory:
    """{B_2, B} with the unique inclusion of B_2 (or just {B} when B is B_2)."""
    if len(B.atoms) == 1:
        return finite_category([B], [])
    trivial = BooleanAlgebra("B2", ("1",))
    return finite_category([trivial, B], [BoolHom(trivial, B, (B.full,))])


# isomorphisms -------------------------------------------------------------------


@dataclass(frozen=True)
class IsoResult:
    isomorphic: bool
    mapping: tuple[int, ...] | None = None
    invariant: str = ""


def _atom_signature(L: FiniteOML, atoms, blocks):
    out = {}
    for a in atoms:
        sizes = tuple(sorted(len(b.atoms) for b in blocks if a in b.elements))
        orth = sum(1 for b in atoms if b != a and L.orthogonal(a, b))
        out[a] = (sizes, orth)
    return out


def find_isomorphism(K: FiniteOML, L: FiniteOML) -> IsoResult:
    """Backtracking over atom bijections, pruned by block-size signatures."""
    if len(K) != len(L):
        return IsoResult(False, None, f"element count {len(K)} != {len(L)}")
    AK, AL = K.atoms(), L.atoms()
    if len(AK) != len(AL):
        return IsoResult(False, None, f"atom count {len(AK)} != {len(AL)}")
    bK, bL = enumerate_blocks(K), enumerate_blocks(L)
    msK = sorted(len(b.atoms) for b in bK)
    msL = sorted(len(b.atoms) for b in bL)
    if msK != msL:
        return IsoResult(False, None, f"block-size multiset {msK} != {msL}")
    sigK, sigL = _atom_signature(K, AK, bK), _atom_signature(L, AL, bL)
    if sorted(sigK.values()) != sorted(sigL.values()):
        return IsoResult(False, None, "atom signatures differ")
    below = {x: [a for a in AK if K.leq(a, x)] for x in K.elements}

    def extend(assign):
        h = []
        for x in K.elements:
            h.append(L.join_all(assign[a] for a in below[x]))
        if len(set(h)) != len(L):
            return None
        for x in K.elements:
            if h[K.comp[x]] != L.comp[h[x]]:
                return None
            for y in K.elements:
                if K.leq(x, y) != L.leq(h[x], h[y]):
                    return None
        return tuple(h)

    def rec(k, assign, used):
        if k == len(AK):
            return extend(assign)
        a = AK[k]
        for b in AL:
            if b in used or sigL[b] != sigK[a]:
                continue
            if any(K.orthogonal(a, a2) != L.orthogonal(b, b2) for a2, b2 in assign.items()):
                continue
            assign[a] = b
            used.add(b)
            res = rec(k + 1, assign, used)
            if res is not None:
                return res
            del assign[a]
            used.discard(b)
        return None

    h = rec(0, {}, set())
    if h is None:
        return IsoResult(False, None, "no atom bijection extends to an isomorphism")
    return IsoResult(True, h, "")


def reconstruct(L: FiniteOML) -> tuple[PastedStructure, IsoResult]:
    K = paste_colimit(blocks_diagram(L))
    if not K.lattice_flag:
        return K, IsoResult(False, None, f"pasting is not an orthomodular lattice: {K.reason}")
    return K, find_isomorphism(K.lattice, L)


# morphisms and natural transformations ------------------------------------------


def _orthogonal_decomposition(K: FiniteOML, x: int, atoms: Sequence[int]) -> list[int]:
    chosen: list[int] = []
    acc = K.zero
    for a in atoms:
        if K.leq(a, x) and K.leq(a, K.comp[acc]):
            chosen.append(a)
            acc = K.join[acc][a]
    return chosen


def is_quantum_morphism(K: FiniteOML, L: FiniteOML, h: Sequence[int]) -> bool:
    if h[K.zero] != L.zero or h[K.one] != L.one:
        return False
    for x in K.elements:
        if h[K.comp[x]] != L.comp[h[x]]:
            return False
    for x in K.elements:
        for y in K.elements:
            if K.orthogonal(x, y) and h[K.join[x][y]] != L.join[h[x]][h[y]]:
                return False
    return True


def enumerate_quantum_morphisms(K: FiniteOML, L: FiniteOML) -> list[tuple[int, ...]]:
    """All maps K -> L preserving 0, 1, complement and joins of orthogonal pairs.

    Each morphism is a tuple ``h`` with ``h[x]`` the image of element ``x``.
    """
    atoms = K.atoms()
    decomp = {x: _orthogonal_decomposition(K, x, atoms) for x in K.elements}
    out = []

    def rec(k, imgs):
        if k == len(atoms):
            img = dict(zip(atoms, imgs))
            h = tuple(L.join_all(img[a] for a in decomp[x]) for x in K.elements)
            if is_quantum_morphism(K, L, h):
                out.append(h)
            return
        a = atoms[k]
        for y in L.elements:
            if all(L.orthogonal(y, imgs[j]) for j in range(k) if K.orthogonal(a, atoms[j])):
                rec(k + 1, imgs + [y])

    rec(0, [])
    out = sorted(set(out))
    return out


@dataclass(frozen=True)
class NaturalTransformation:
    """``components[i][k]`` is the index in ``R.sections[i]`` of the image of ``P.sections[i][k]``."""

    components: tuple[tuple[int, ...], ...]


def enumerate_nat_transformations(P: BooleanDiagram, R: Presheaf) -> list[NaturalTransformation]:
    if P.base.objects != R.base.objects or set(P.base.morphisms) != set(R.base.morphisms):
        raise ValueError("presheaves live on different base categories")
    base = P.base
    rmi = {f: R.base.mor_index(f) for f in base.morphisms}
    variables = [
        (i, k)
        for i in sorted(range(len(base.objects)), key=lambda i: -len(base.objects[i].atoms))
        for k in range(len(P.sections[i]))
    ]
    pos = {v: n for n, v in enumerate(variables)}
    # naturality: tau_s(P(u)(k)) == R(u)(tau_t(k))
    constraints: list[list[tuple[int, int, tuple[int, ...]]]] = [[] for _ in variables]
    for mi, u in enumerate(base.morphisms):
        s, t = base.obj_index(u.source), base.obj_index(u.target)
        for k in range(len(P.sections[t])):
            a, b = pos[t, k], pos[s, P.restrictions[mi][k]]
            later = max(a, b)
            constraints[later].append((a, b, R.restrictions[rmi[u]]))
    out = []
    assign = [0] * len(variables)

    def rec(n):
        if n == len(variables):
            comps = [[0] * len(P.sections[i]) for i in range(len(base.objects))]
            for (i, k), v in zip(variables, assign):
                comps[i][k] = v
            out.append(NaturalTransformation(tuple(map(tuple, comps))))
            return
        i, _ = variables[n]
        for v in range(len(R.sections[i])):
            assign[n] = v
            if all(assign[b] == rmap[assign[a]] for a, b, rmap in constraints[n]):
                rec(n + 1)

    rec(0)
    return out


def canonical_morphism(K: PastedStructure, P: BooleanDiagram, R: FramePresheaf, tau: NaturalTransformation) -> tuple[int, ...]:
    """The morphism out of the colimit induced by the cocone ``tau``."""
    h: list[int | None] = [None] * len(K)
    for (i, k), leg in K.legs.items():
        psi = R.sections[i][tau.components[i][k]]
        for m, c in enumerate(leg):
            v = psi(m)
            if h[c] is None:
                h[c] = v
            elif h[c] != v:
                raise AssertionError("cocone does not factor through the colimit")
    return tuple(h)


@dataclass(frozen=True)
class AdjunctionReport:
    left_count: int
    right_count: int
    bijective: bool
    correspondence: tuple[tuple[int, int], ...]
    naturality_spot_checks: dict
    scope: str = (
        "naturality spot-checked along one endomorphism of L and one element of P (Yoneda reindexing)"
    )

    @property
    def ok(self) -> bool:
        return self.bijective and self.left_count == self.right_count and all(self.naturality_spot_checks.values())


def _compose_frame(phi: Sequence[int], L: FiniteOML, psi: BooleanFrame) -> BooleanFrame:
    return BooleanFrame(psi.source, L, tuple(phi[x] for x in psi.images))


def adjunction_check(P: BooleanDiagram, L: FiniteOML) -> AdjunctionReport:
    K = paste_colimit(P)
    if not K.lattice_flag:
        raise PastingError(f"left side undefined at desk scale for this diagram: {K.reason}")
    R = build_presheaf(L, P.base)
    nats = enumerate_nat_transformations(P, R)
    homs = enumerate_quantum_morphisms(K.lattice, L)
    hom_index = {h: n for n, h in enumerate(homs)}
    corr = []
    images = []
    for t, tau in enumerate(nats):
        h = canonical_morphism(K, P, R, tau)
        images.append(h)
        corr.append((t, hom_index.get(h, -1)))
    bijective = all(j >= 0 for _, j in corr) and len(set(images)) == len(nats) == len(homs)

    checks = {}
    # naturality in L: canonical(phi . tau) == phi . canonical(tau)
    endos = enumerate_quantum_morphisms(L, L)
    ident = tuple(L.elements)
    phi = next((e for e in endos if e != ident), ident)
    frame_index = [{psi: k for k, psi in enumerate(sec)} for sec in R.sections]
    ok = True
    for tau, h in zip(nats, images):
        comps = tuple(
            tuple(frame_index[i][_compose_frame(phi, L, R.sections[i][v])] for v in comp)
            for i, comp in enumerate(tau.components)
        )
        lhs = canonical_morphism(K, P, R, NaturalTransformation(comps))
        if lhs != tuple(phi[x] for x in h):
            ok = False
            break
    checks["natural_in_L"] = ok

    # naturality in P: precompose with the Yoneda map y(B) -> P picking one section
    target = next((i for i in range(len(P.base.objects)) if P.sections[i]), None)
    if target is not None:
        B = P.base.objects[target]
        Y = representable(P.base, B)
        KY = paste_colimit(Y)
        p0 = 0
        # sigma_C(g) = P(g)(p0): index of the restricted section
        sigma = [[P.restrictions[P.base.mor_index(g)][p0] for g in Y.sections[j]] for j in range(len(Y.sections))]
        ok = True
        for tau, h in zip(nats, images):
            comps = tuple(tuple(tau.components[j][sigma[j][q]] for q in range(len(Y.sections[j]))) for j in range(len(sigma)))
            hY = canonical_morphism(KY, Y, R, NaturalTransformation(comps))
            # L(sigma): class of (j, g, m) in KY -> class of (j, sigma(g), m) in K
            for (j, q), leg in KY.legs.items():
                target_leg = K.legs[j, sigma[j][q]]
                if any(hY[c] != h[target_leg[m]] for m, c in enumerate(leg)):
                    ok = False
                    break
            if not ok:
                break
        checks["natural_in_P"] = ok
    return AdjunctionReport(len(nats), len(homs), bijective, tuple(corr), checks)


def factorization_check(B: BooleanAlgebra, L: FiniteOML) -> bool:
    """Every frame ``B -> L`` is the morphism induced out of the colimit of the
    representable diagram at B, transported along ``colim y(B) ~= B``."""
    base = probe_base(B)
    Y = representable(base, B)
    K = paste_colimit(Y)
    if not K.lattice_flag:
        return False
    iso = find_isomorphism(B.as_oml(), K.lattice)
    if not iso.isomorphic:
        return False
    R = build_presheaf(L, base)
    frame_index = [{psi: k for k, psi in enumerate(sec)} for sec in R.sections]
    for psi in enumerate_frames(B, L):
        comps = tuple(
            tuple(frame_index[j][restrict_frame(psi, g)] for g in Y.sections[j]) for j in range(len(base.objects))
        )
        h = canonical_morphism(K, Y, R, NaturalTransformation(comps))
        if any(h[iso.mapping[m]] != psi(m) for m in B.elements):
            return False
    return True
