from itertools import product

import pytest

from omlkit.formats import load, load_lattice
from omlkit.oml import (
    FiniteOML,
    LatticeError,
    boolean_lattice,
    compatible,
    compatible_by_closure,
    generated_subalgebra,
    hexagon,
    mo,
    validate_ortholattice,
    verify_orthomodularity,
)
from oracles import is_distributive, lattice_closed_sets, subspace_lattice


def idx(L, *names):
    return [L.index(n) for n in names]


def test_b4_valid():
    L = boolean_lattice(["p", "q"])
    assert validate_ortholattice(L).valid
    assert verify_orthomodularity(L) is None


def test_mo2_valid_and_orthomodular():
    L = mo(2)
    assert len(L) == 6
    assert validate_ortholattice(L).valid
    assert verify_orthomodularity(L) is None


def test_non_involutive_complement_is_reported():
    L = mo(2)
    a, a_, b, b_ = idx(L, "a", "a*", "b", "b*")
    comp = list(L.comp)
    comp[b_] = a  # now b** = a
    bad = FiniteOML.from_upsets(L.labels, L.up, comp)
    report = validate_ortholattice(bad)
    assert not report.valid
    inv = [v for v in report.violations if v.axiom == "involution"]
    assert inv and inv[0].witness == ("b",)


def test_o6_witness():
    L = hexagon()
    assert validate_ortholattice(L).valid
    w = verify_orthomodularity(L)
    assert w is not None
    assert tuple(L.labels[x] for x in w) == ("a", "b")


def test_o6_catalog_file_matches_constructor():
    L = load("catalog:o6").lattice
    assert tuple(L.labels[x] for x in verify_orthomodularity(L)) == ("a", "b")
    assert L.labels == hexagon().labels


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_boolean_algebras_pass(n):
    L = boolean_lattice([f"x{k}" for k in range(n)])
    assert validate_ortholattice(L).valid
    assert verify_orthomodularity(L) is None


def test_orthomodular_law_by_brute_force(catalog_lattices):
    # a <= b implies b = a v (a* ^ b), checked over every pair without the validator
    for name, L in catalog_lattices.items():
        for a, b in product(L.elements, repeat=2):
            if L.leq(a, b):
                assert L.join[a][L.meet[L.comp[a]][b]] == b, name


def test_compatible_examples():
    L = mo(2)
    a, a_, b = idx(L, "a", "a*", "b")
    assert compatible(L, a, a_)
    assert not compatible(L, a, b)
    B8 = boolean_lattice(["x", "y", "z"])
    assert all(compatible(B8, x, y) for x, y in product(B8.elements, repeat=2))


def test_compatible_agrees_with_closure_oracle(catalog_lattices):
    for name, L in catalog_lattices.items():
        for x, y in product(L.elements, repeat=2):
            assert compatible(L, x, y) == compatible_by_closure(L, x, y), (name, x, y)


def test_generated_subalgebra_examples():
    L = mo(2)
    a, a_, b = idx(L, "a", "a*", "b")
    assert generated_subalgebra(L, {a}) == {L.zero, a, a_, L.one}
    assert generated_subalgebra(L, {a, b}) == set(L.elements)
    assert generated_subalgebra(L, set()) == {L.zero, L.one}


def test_generated_subalgebra_is_least_closed_superset(catalog_lattices):
    L = catalog_lattices["twoblocks"]
    closed = lattice_closed_sets(L)
    for x, y in product(L.elements, repeat=2):
        g = generated_subalgebra(L, {x, y})
        assert g == min((S for S in closed if {x, y} <= S), key=len)


def test_orthogonal_implies_compatible(catalog_lattices):
    for L in catalog_lattices.values():
        for x, y in product(L.elements, repeat=2):
            if L.orthogonal(x, y):
                assert L.orthogonal(y, x)
                assert compatible(L, x, y)


def test_not_a_lattice_raises():
    # two incomparable upper bounds for x, y
    labels = ["0", "x", "y", "u", "v", "1"]
    pairs = [(0, 1), (0, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 5), (4, 5)]
    with pytest.raises(LatticeError, match="least upper bound"):
        FiniteOML.from_order(labels, pairs, [5, 2, 1, 4, 3, 0])


def test_lattice_file_errors():
    from omlkit.scenario import InputError

    with pytest.raises(InputError, match="unknown element") as e:
        load_lattice("elements 0 1\nleq 0 2\ncomp 0 1\n", "t.lattice")
    assert e.value.line == 2
    with pytest.raises(InputError, match="no complement"):
        load_lattice("elements 0 a 1\nleq 0 a\nleq a 1\ncomp 0 1\n")


def test_twoblocks_pasting_matches_subspace_oracle():
    # a, b, c and c, d, e realised as orthonormal-up-to-scale triads in R^3
    vectors = {"a": (1, 0, 0), "b": (0, 1, 0), "c": (0, 0, 1), "d": (1, 1, 0), "e": (1, -1, 0)}
    subspaces = subspace_lattice(vectors)
    L = load("catalog:twoblocks").lattice
    assert len(subspaces) == len(L) == 12
    ranks = sorted(r for _, r in subspaces)
    # rank profile: 0, five lines, five planes, the whole space
    assert ranks == [0, 1, 1, 1, 1, 1, 2, 2, 2, 2, 2, 3]
    # same elements, identified by the atoms (lines) below them, and same order
    ours = {frozenset(L.labels[a] for a in L.atoms_below(x)) for x in L.elements}
    assert ours == {s for s, _ in subspaces}
    for x, y in product(L.elements, repeat=2):
        below = lambda z: frozenset(L.labels[a] for a in L.atoms_below(z))
        assert L.leq(x, y) == (below(x) <= below(y))


def test_boolean_lattice_labels_avoid_atom_names():
    L = boolean_lattice(["1", "2"])
    assert L.labels[L.zero] != "1" and len(set(L.labels)) == 4


def test_every_constructor_output_is_distributive_or_orthomodular(catalog_lattices):
    for name, L in catalog_lattices.items():
        assert validate_ortholattice(L).valid, name
        assert verify_orthomodularity(L) is None, name
    assert is_distributive(boolean_lattice("xyz"), range(8))
