"""Bundled scenarios, addressed on the command line as ``catalog:<name>``."""

from __future__ import annotations

from importlib import resources

ENTRIES = {
    "b2": ("b2.blocks", "two-element Boolean algebra"),
    "b4": ("b4.blocks", "Boolean algebra with two atoms"),
    "b8": ("b8.blocks", "Boolean algebra with three atoms"),
    "mo2": ("mo2.blocks", "MO2, two disjoint two-atom blocks"),
    "mo3": ("mo3.blocks", "MO3, three disjoint two-atom blocks"),
    "twoblocks": ("twoblocks.blocks", "two three-atom blocks sharing one atom (12 elements)"),
    "o6": ("o6.lattice", "hexagon ortholattice, not orthomodular"),
    "cabello18": ("cabello18.rays", "18 rays, 9 bases in dimension 4"),
    "peres33": ("peres33.rays", "Peres' 33 rays in dimension 3 over Z[sqrt 2]"),
}

# catalog entries that are finite orthomodular lattices
LATTICES = ("b2", "b4", "b8", "mo2", "mo3", "twoblocks")


def names() -> list[str]:
    return list(ENTRIES)


def read(name: str) -> str:
    if name not in ENTRIES:
        raise KeyError(f"unknown catalog entry {name!r}; known: {', '.join(ENTRIES)}")
    return resources.files(__name__).joinpath(ENTRIES[name][0]).read_text()


def describe(name: str) -> str:
    return ENTRIES[name][1]
