from itertools import product

import pytest

from omlkit.frames import (
    BaseCategory,
    BooleanAlgebra,
    BooleanFrame,
    BoolHom,
    ElementCategory,
    Presheaf,
    boolean_algebra,
    build_presheaf,
    category_of_elements,
    check_discrete_fibration,
    element_category_violations,
    enumerate_blocks,
    enumerate_boolean_subalgebras,
    enumerate_frames,
    enumerate_homs,
    enumerate_subalgebras_exhaustive,
    finite_category,
    frame_violations,
    functor_law_violations,
    identity,
    make_presheaf,
    maximal_subalgebras,
    restrict_frame,
    subalgebra_base,
)
from omlkit.oml import boolean_lattice, mo
from oracles import frames_brute, is_distributive, lattice_closed_sets

B2, B4, B8 = boolean_algebra(1), boolean_algebra(2), boolean_algebra(3)
MO2 = mo(2)


def labels(L, xs):
    return tuple(L.labels[x] for x in xs)


# subalgebras and blocks -----------------------------------------------------------


def test_subalgebra_counts():
    assert len(enumerate_boolean_subalgebras(MO2)) == 3
    assert len(enumerate_boolean_subalgebras(boolean_lattice("xyz"))) == 5
    assert len(enumerate_boolean_subalgebras(boolean_lattice("x"))) == 1


def test_subalgebras_match_exhaustive_oracle(catalog_lattices):
    for name, L in catalog_lattices.items():
        ours = sorted((s.elements for s in enumerate_boolean_subalgebras(L)), key=lambda s: (len(s), sorted(s)))
        assert ours == enumerate_subalgebras_exhaustive(L), name
        # second, independent oracle: closed sets that are distributive
        oracle = {S for S in lattice_closed_sets(L) if is_distributive(L, S)}
        assert set(ours) == oracle, name


def test_block_counts(catalog_lattices):
    assert len(enumerate_blocks(MO2)) == 2
    for n in range(1, 4):
        blocks = enumerate_blocks(boolean_lattice([f"x{k}" for k in range(n)]))
        assert len(blocks) == 1 and len(blocks[0].elements) == 1 << n
    blocks = enumerate_blocks(catalog_lattices["twoblocks"])
    L = catalog_lattices["twoblocks"]
    assert sorted(sorted(labels(L, b.atoms)) for b in blocks) == [["a", "b", "c"], ["c", "d", "e"]]


def test_blocks_are_the_maximal_subalgebras(catalog_lattices):
    for name, L in catalog_lattices.items():
        maxi = {s.elements for s in maximal_subalgebras(enumerate_boolean_subalgebras(L))}
        assert {b.elements for b in enumerate_blocks(L)} == maxi, name


# frames ----------------------------------------------------------------------------


def test_frame_counts():
    for L in (MO2, boolean_lattice("pq"), mo(3)):
        frames = enumerate_frames(B2, L)
        assert len(frames) == 1 and frames[0].images == (L.one,)
    f4 = enumerate_frames(B4, MO2)
    assert len(f4) == 6 and sum(f.injective for f in f4) == 4
    assert {labels(MO2, f.images) for f in f4} == {
        ("0", "1"), ("1", "0"), ("a", "a*"), ("a*", "a"), ("b", "b*"), ("b*", "b"),
    }
    assert len(enumerate_frames(B8, MO2)) == 15


def test_frames_match_brute_force(catalog_lattices):
    for L in list(catalog_lattices.values()) + [MO2]:
        for B in (B2, B4, B8):
            if len(L) ** len(B.atoms) > 5000:
                continue
            ours = sorted(f.images for f in enumerate_frames(B, L))
            assert ours == frames_brute(len(B.atoms), L)


def test_every_enumerated_frame_passes_full_check(catalog_lattices):
    for L in catalog_lattices.values():
        for B in (B2, B4, B8):
            for f in enumerate_frames(B, L):
                assert frame_violations(f) == []


def test_non_frame_is_rejected():
    a, b = MO2.index("a"), MO2.index("b")
    assert frame_violations(BooleanFrame(B4, MO2, (a, b)))


def test_restrict_examples():
    for f in enumerate_frames(B4, MO2):
        assert restrict_frame(f, identity(B4)) == f
        g = restrict_frame(f, BoolHom(B2, B4, (B4.full,)))
        assert g == enumerate_frames(B2, MO2)[0]
    L8 = boolean_lattice(["x1", "x2", "x3"])
    psi = BooleanFrame(B8, L8, (1, 2, 4))
    u = BoolHom(B4, B8, (0b011, 0b100))
    assert labels(L8, restrict_frame(psi, u).images) == ("x1+x2", "x3")
    with pytest.raises(ValueError, match="ill-typed"):
        restrict_frame(psi, BoolHom(B2, B4, (3,)))


def test_restriction_stays_in_section_set(catalog_lattices):
    for L in catalog_lattices.values():
        sections = {B: set(enumerate_frames(B, L)) for B in (B2, B4, B8)}
        for C, B in product((B2, B4, B8), repeat=2):
            for u in enumerate_homs(C, B):
                for psi in sections[B]:
                    assert restrict_frame(psi, u) in sections[C]


def test_enumerate_homs_counts():
    # Boolean homomorphisms B_{2^m} -> B_{2^n}: ordered partitions of n atoms into m blocks (empty allowed)
    assert len(enumerate_homs(B2, B8)) == 1
    assert len(enumerate_homs(B4, B8)) == 2 ** 3
    assert len(enumerate_homs(B8, B4)) == 3 ** 2


# presheaves ------------------------------------------------------------------------


def test_build_presheaf_examples():
    P = build_presheaf(MO2, finite_category([B2], []))
    assert P.sizes() == (1,)
    base = finite_category([B2, B4], enumerate_homs(B2, B4))
    P = build_presheaf(MO2, base)
    assert P.sizes() == (1, 6)
    inc = base.mor_index(BoolHom(B2, B4, (B4.full,)))
    assert P.restrictions[inc] == (0,) * 6
    base, subs = subalgebra_base(MO2)
    P = build_presheaf(MO2, base)
    assert P.sizes() == (1, 6, 6)


def test_base_not_closed_is_rejected():
    u = BoolHom(B4, B8, (0b011, 0b100))
    with pytest.raises(ValueError, match="not closed"):
        finite_category([B2, B4, B8], [u, BoolHom(B2, B4, (3,))])


def test_functor_laws_on_catalog(catalog_lattices):
    for L in catalog_lattices.values():
        base, _ = subalgebra_base(L)
        assert functor_law_violations(build_presheaf(L, base)) == []
        # every homomorphism between B2, B4 and B8
        algebras = (B2, B4, B8)
        probe = finite_category(algebras, [u for C in algebras for B in algebras for u in enumerate_homs(C, B)])
        assert functor_law_violations(build_presheaf(L, probe)) == []


def test_corrupted_restriction_is_detected():
    base = finite_category([B2, B4], enumerate_homs(B2, B4))
    P = build_presheaf(MO2, base)
    mi = next(i for i, f in enumerate(base.morphisms) if f.is_identity and f.source == B4)
    bad = list(P.restrictions)
    r = list(bad[mi])
    r[0], r[1] = r[1], r[0]
    bad[mi] = tuple(r)
    errs = functor_law_violations(Presheaf(P.base, P.sections, tuple(bad)))
    assert any("identity" in e for e in errs)


def test_corrupted_composition_is_detected():
    # the swap of B4 makes every B4 -> B8 map a composite of another one
    homs = enumerate_homs(B2, B4) + enumerate_homs(B4, B4) + enumerate_homs(B4, B8) + enumerate_homs(B2, B8)
    base = finite_category([B2, B4, B8], homs)
    P = build_presheaf(MO2, base)
    f = next(
        i for i, u in enumerate(base.morphisms)
        if u.source == B4 and u.target == B8 and len(set(P.restrictions[i])) > 1
    )
    bad = list(P.restrictions)
    r = list(bad[f])
    k = next(k for k in range(len(r)) if r[k] != r[0])
    r[0] = r[k]
    bad[f] = tuple(r)
    errs = functor_law_violations(Presheaf(P.base, P.sections, tuple(bad)))
    assert any("composition" in e for e in errs)


# category of elements ----------------------------------------------------------------


def test_category_of_elements_examples():
    EC = category_of_elements(build_presheaf(MO2, finite_category([B2], [])))
    assert len(EC.objects) == 1 and len(EC.morphisms) == 1
    base = finite_category([B2, B4], enumerate_homs(B2, B4))
    EC = category_of_elements(build_presheaf(MO2, base))
    assert len(EC.objects) == 7
    b2_obj = EC.objects.index((base.obj_index(B2), 0))
    for n, (i, _) in enumerate(EC.objects):
        if base.objects[i] == B4:
            incoming = [m for m in EC.morphisms if m[2] == n and m[1] != n]
            # the unit map B2 -> B4 is the only Boolean homomorphism between them
            assert [m[1] for m in incoming] == [b2_obj]
    assert element_category_violations(EC) == []


def test_empty_section_set_gives_no_objects():
    base = finite_category([B2, B4], enumerate_homs(B2, B4))
    P = make_presheaf(base, [("p",), ()], lambda f, s: s)
    EC = category_of_elements(P)
    assert [base.objects[i] for i, _ in EC.objects] == [B2]


def test_fibration_on_built_presheaves(catalog_lattices):
    for L in catalog_lattices.values():
        base, _ = subalgebra_base(L)
        rep = check_discrete_fibration(category_of_elements(build_presheaf(L, base)))
        assert rep.ok and rep.discrete and rep.split_lifts
        assert "uniform" in rep.notes


def test_duplicated_lift_is_detected():
    base = finite_category([B2, B4], enumerate_homs(B2, B4))
    EC = category_of_elements(build_presheaf(MO2, base))
    m = next(m for m in EC.morphisms if not base.morphisms[m[0]].is_identity)
    other_source = next(n for n, (i, _) in enumerate(EC.objects) if n != m[1])
    bad = ElementCategory(EC.base, EC.objects, EC.morphisms + ((m[0], other_source, m[2]),))
    rep = check_discrete_fibration(bad)
    assert not rep.split_lifts
    assert (m[2], m[0], 2) in rep.lift_witnesses


def test_non_identity_in_fiber_is_detected():
    base = finite_category([B4], [])
    EC = category_of_elements(build_presheaf(MO2, base))
    idm = base.identity_index(B4)
    bad = ElementCategory(EC.base, EC.objects, EC.morphisms + ((idm, 0, 1),))
    rep = check_discrete_fibration(bad)
    assert not rep.discrete and rep.discrete_witnesses == ((idm, 0, 1),)


def test_empty_base_is_vacuous():
    base = BaseCategory((), ())
    EC = category_of_elements(make_presheaf(base, [], lambda f, s: s))
    assert check_discrete_fibration(EC).ok


def test_boolean_algebra_rejects_bad_input():
    with pytest.raises(ValueError):
        BooleanAlgebra("x", ())
    with pytest.raises(ValueError, match="disjoint"):
        BoolHom(B4, B8, (3, 1))
