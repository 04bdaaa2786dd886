"""Loading ray, block and lattice files (or ``catalog:`` entries)."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path

from . import catalog
from .oml import FiniteOML, LatticeError
from .scenario import (
    BlockScenario,
    InputError,
    OrthoposetOnly,
    RayScenario,
    _lines,
    load_block_scenario,
    load_ray_scenario,
    scenario_orthoposet,
)


def load_lattice(text: str, source: str | None = None) -> FiniteOML:
    """Abstract lattice file: ``elements``, ``leq x y`` (generating pairs) and
    ``comp x y`` (x* = y; y* = x unless given separately).

    The result is a well-formed lattice with total tables; the ortholattice
    axioms are not checked here.
    """
    elements = None
    index: dict[str, int] = {}
    pairs = []
    comp: dict[int, int] = {}
    explicit: set[int] = set()
    for lineno, raw, line in _lines(text):
        col = len(line) - len(line.lstrip()) + 1
        parts = line.split()
        kw = parts[0]
        if kw == "elements":
            if elements is not None:
                raise InputError("'elements' declared twice", lineno, col, source)
            elements = parts[1:]
            if len(set(elements)) != len(elements):
                raise InputError("duplicate element name", lineno, col, source)
            index = {e: k for k, e in enumerate(elements)}
            continue
        if elements is None:
            raise InputError("'elements' must come first", lineno, col, source)
        if kw not in ("leq", "comp") or len(parts) != 3:
            raise InputError(f"expected 'leq <x> <y>' or 'comp <x> <y>'", lineno, col, source)
        for name in parts[1:]:
            if name not in index:
                raise InputError(f"unknown element {name!r}", lineno, line.index(name) + 1, source)
        x, y = index[parts[1]], index[parts[2]]
        if kw == "leq":
            pairs.append((x, y))
        else:
            if x in explicit and comp[x] != y:
                raise InputError(f"complement of {parts[1]} given twice", lineno, col, source)
            comp[x] = y
            explicit.add(x)
            if y not in explicit:
                comp[y] = x
    if elements is None:
        raise InputError("missing 'elements' declaration", source=source)
    missing = [elements[k] for k in range(len(elements)) if k not in comp]
    if missing:
        raise InputError(f"no complement given for {', '.join(missing)}", source=source)
    try:
        return FiniteOML.from_order(elements, pairs, [comp[k] for k in range(len(elements))])
    except LatticeError as e:
        raise InputError(str(e), source=source) from None


@dataclass(frozen=True)
class Loaded:
    name: str
    kind: str  # "rays", "blocks" or "lattice"
    sha256: str
    scenario: RayScenario | BlockScenario | None
    lattice: FiniteOML | OrthoposetOnly | None

    def block_scenario(self) -> BlockScenario | None:
        if isinstance(self.scenario, RayScenario):
            return self.scenario.to_block_scenario()
        return self.scenario


def detect_kind(text: str) -> str:
    for _, _, line in _lines(text):
        kw = line.split()[0]
        if kw in ("dim", "radicand", "ray", "context"):
            return "rays"
        if kw in ("atoms", "block"):
            return "blocks"
        if kw in ("elements", "leq", "comp"):
            return "lattice"
        raise InputError(f"cannot determine file format from keyword {kw!r}")
    raise InputError("empty input")


def read_source(ref: str) -> tuple[str, str]:
    if ref.startswith("catalog:"):
        name = ref[len("catalog:"):]
        try:
            return ref, catalog.read(name)
        except KeyError as e:
            raise InputError(e.args[0], source=ref) from None
    try:
        return ref, Path(ref).read_text()
    except OSError as e:
        raise InputError(f"cannot read file: {e.strerror}", source=ref) from None


def load(ref: str, paste: bool = True) -> Loaded:
    """Parse a file or catalog entry; block and ray inputs are pasted into a lattice."""
    name, text = read_source(ref)
    digest = hashlib.sha256(text.encode()).hexdigest()
    kind = detect_kind(text)
    if kind == "lattice":
        return Loaded(name, kind, digest, None, load_lattice(text, name))
    if kind == "rays":
        scenario = load_ray_scenario(text, name)
    else:
        scenario = load_block_scenario(text, name)
    lattice = None
    if paste:
        blocks = scenario.to_block_scenario() if isinstance(scenario, RayScenario) else scenario
        try:
            lattice = scenario_orthoposet(blocks)
        except InputError as e:
            raise InputError(e.message, source=name) from None
    return Loaded(name, kind, digest, scenario, lattice)
