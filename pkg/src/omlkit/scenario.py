"""Ray and block presentations of event structures, their file formats, and
the pasting of block presentations into orthoposets / lattices."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import networkx as nx

from .oml import FiniteOML, LatticeError, bound_labels, verify_orthomodularity
from .qint import QuadraticInteger, is_square_free


class InputError(ValueError):
    """Malformed or inconsistent input; carries an optional source position."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None, source: str | None = None):
        self.message = message
        self.line = line
        self.column = column
        self.source = source
        super().__init__(str(self))

    def __str__(self):
        where = self.source or "<input>"
        if self.line is not None:
            where += f":{self.line}"
            if self.column is not None:
                where += f":{self.column}"
        return f"{where}: {self.message}"


# rays ------------------------------------------------------------------------


@dataclass(frozen=True)
class Ray:
    id: str
    coords: tuple[QuadraticInteger, ...]

    def __post_init__(self):
        if all(c.is_zero() for c in self.coords):
            raise ValueError(f"ray {self.id} is the zero vector")

    @property
    def dimension(self) -> int:
        return len(self.coords)


def inner(r1: Ray, r2: Ray) -> QuadraticInteger:
    if r1.dimension != r2.dimension:
        raise ValueError(f"dimension mismatch: {r1.id} has {r1.dimension}, {r2.id} has {r2.dimension}")
    acc = QuadraticInteger(0, 0, r1.coords[0].D)
    for x, y in zip(r1.coords, r2.coords):
        acc = acc + x * y
    return acc


def orthogonal(r1: Ray, r2: Ray) -> bool:
    """Exact inner product test in Z[sqrt(D)]."""
    return inner(r1, r2).is_zero()


def proportional(r1: Ray, r2: Ray) -> bool:
    c1, c2 = r1.coords, r2.coords
    if len(c1) != len(c2):
        return False
    return all((c1[i] * c2[j] - c1[j] * c2[i]).is_zero() for i, j in combinations(range(len(c1)), 2))


@dataclass(frozen=True)
class RayScenario:
    dimension: int
    radicand: int
    rays: tuple[Ray, ...]
    contexts: tuple[tuple[int, ...], ...]
    warnings: tuple[str, ...] = ()
    _orth: frozenset = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        pairs = frozenset(
            (i, j) for i, j in combinations(range(len(self.rays)), 2) if orthogonal(self.rays[i], self.rays[j])
        )
        object.__setattr__(self, "_orth", pairs)

    @property
    def names(self) -> list[str]:
        return [r.id for r in self.rays]

    def orthogonal_pairs(self) -> list[tuple[int, int]]:
        return sorted(self._orth)

    def context_names(self) -> list[list[str]]:
        return [[self.rays[i].id for i in c] for c in self.contexts]

    def to_block_scenario(self) -> BlockScenario:
        used = sorted({i for c in self.contexts for i in c})
        return BlockScenario(
            tuple(self.rays[i].id for i in used),
            tuple(tuple(self.rays[i].id for i in c) for c in self.contexts),
        )


_COORD = re.compile(
    r"""^(?:
        (?P<a>[+-]?\d+)(?:(?P<s>[+-])(?:(?P<b>\d+)\*)?rt)?    # a, a+b*rt, a-rt
      | (?P<s2>[+-]?)(?:(?P<b2>\d+)\*)?rt                     # rt, -2*rt
    )$""",
    re.X,
)


def parse_coordinate(text: str, radicand: int) -> QuadraticInteger:
    m = _COORD.match(text.replace(" ", ""))
    if not m:
        raise ValueError(f"bad coordinate {text!r}")
    if m.group("a") is not None:
        a = int(m.group("a"))
        b = 0
        if m.group("s"):
            b = int(m.group("b") or 1) * (-1 if m.group("s") == "-" else 1)
    else:
        a = 0
        b = int(m.group("b2") or 1) * (-1 if m.group("s2") == "-" else 1)
    if b and radicand == 1:
        raise ValueError(f"coordinate {text!r} uses rt but no radicand was declared")
    return QuadraticInteger(a, b, radicand)


_NAME = re.compile(r"^[A-Za-z0-9_][A-Za-z0-9_.'*+-]*$")


def _lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if line.strip():
            yield lineno, raw, line


def load_ray_scenario(text: str, source: str | None = None) -> RayScenario:
    dim = None
    radicand = 1
    rays: list[Ray] = []
    index: dict[str, int] = {}
    explicit: list[tuple[int, int, list[str]]] = []
    for lineno, raw, line in _lines(text):
        col = len(line) - len(line.lstrip()) + 1
        parts = line.split()
        kw = parts[0]
        if kw == "dim":
            if len(parts) != 2 or not parts[1].isdigit() or int(parts[1]) < 1:
                raise InputError("expected 'dim <positive integer>'", lineno, col, source)
            if rays:
                raise InputError("'dim' must precede all rays", lineno, col, source)
            dim = int(parts[1])
        elif kw == "radicand":
            if len(parts) != 2 or not parts[1].isdigit() or not is_square_free(int(parts[1])):
                raise InputError("expected 'radicand <square-free positive integer>'", lineno, col, source)
            if rays:
                raise InputError("'radicand' must precede all rays", lineno, col, source)
            radicand = int(parts[1])
        elif kw == "ray":
            m = re.match(r"^\s*ray\s+(\S+)\s*=\s*\((.*)\)\s*$", line)
            if not m:
                raise InputError("expected 'ray <name> = (<c>,...,<c>)'", lineno, col, source)
            if dim is None:
                raise InputError("'dim' must be declared before rays", lineno, col, source)
            name = m.group(1)
            if not _NAME.match(name):
                raise InputError(f"bad ray name {name!r}", lineno, line.index(name) + 1, source)
            if name in index:
                raise InputError(f"duplicate ray: {name} already defined", lineno, col, source)
            coord_col = line.index("(", m.start(2) - 1) + 2
            coords = []
            for tok in m.group(2).split(","):
                try:
                    coords.append(parse_coordinate(tok.strip(), radicand))
                except ValueError as e:
                    raise InputError(str(e), lineno, coord_col, source) from None
                coord_col += len(tok) + 1
            if len(coords) != dim:
                raise InputError(f"ray {name} has {len(coords)} coordinates, expected {dim}", lineno, col, source)
            try:
                ray = Ray(name, tuple(coords))
            except ValueError as e:
                raise InputError(str(e), lineno, col, source) from None
            for other in rays:
                if proportional(ray, other):
                    raise InputError(f"duplicate ray: {name} is proportional to {other.id}", lineno, col, source)
            index[name] = len(rays)
            rays.append(ray)
        elif kw == "context":
            explicit.append((lineno, col, parts[1:]))
        else:
            raise InputError(f"unknown keyword {kw!r}", lineno, col, source)
    if dim is None:
        raise InputError("missing 'dim' declaration", source=source)
    if not rays:
        raise InputError("no rays declared", source=source)

    warnings: list[str] = []
    if explicit:
        contexts = []
        for lineno, col, names in explicit:
            for nm in names:
                if nm not in index:
                    raise InputError(f"unknown ray {nm!r} in context", lineno, col, source)
            if len(set(names)) != len(names):
                raise InputError("repeated ray in context", lineno, col, source)
            if len(names) != dim:
                raise InputError(f"context of wrong size: {len(names)} rays, expected {dim}", lineno, col, source)
            ids = [index[nm] for nm in names]
            for i, j in combinations(ids, 2):
                if not orthogonal(rays[i], rays[j]):
                    raise InputError(
                        f"non-orthogonal explicit context: {rays[i].id} and {rays[j].id}", lineno, col, source
                    )
            contexts.append(tuple(sorted(ids)))
        if len(set(contexts)) != len(contexts):
            raise InputError("context listed twice", source=source)
        contexts = tuple(contexts)
    else:
        contexts, warnings = _contexts_from_cliques(rays, dim)
    return RayScenario(dim, radicand, tuple(rays), contexts, tuple(warnings))


def _contexts_from_cliques(rays: Sequence[Ray], dim: int):
    G = nx.Graph()
    G.add_nodes_from(range(len(rays)))
    G.add_edges_from((i, j) for i, j in combinations(range(len(rays)), 2) if orthogonal(rays[i], rays[j]))
    contexts, warnings = [], []
    for clique in nx.find_cliques(G):
        c = tuple(sorted(clique))
        if len(c) == dim:
            contexts.append(c)
        else:
            names = " ".join(rays[i].id for i in c)
            warnings.append(f"maximal orthogonal set of size {len(c)} < {dim} excluded from contexts: {names}")
    contexts.sort()
    warnings.sort()
    return tuple(contexts), warnings


# blocks ----------------------------------------------------------------------


@dataclass(frozen=True)
class BlockScenario:
    atoms: tuple[str, ...]
    blocks: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        if len(set(self.atoms)) != len(self.atoms):
            raise ValueError("duplicate atom")
        known = set(self.atoms)
        sets = [frozenset(b) for b in self.blocks]
        for b, s in zip(self.blocks, sets):
            if not b:
                raise ValueError("empty block")
            if len(s) != len(b):
                raise ValueError(f"repeated atom in block {' '.join(b)}")
            if not s <= known:
                raise ValueError(f"undeclared atom(s) {sorted(s - known)} in block")
        for i, j in combinations(range(len(sets)), 2):
            if sets[i] <= sets[j] or sets[j] <= sets[i]:
                raise ValueError(f"block {' '.join(self.blocks[i])} and block {' '.join(self.blocks[j])} are nested")
        covered = set().union(*sets) if sets else set()
        missing = [a for a in self.atoms if a not in covered]
        if missing:
            raise ValueError(f"atom(s) in no block: {' '.join(missing)}")


def load_block_scenario(text: str, source: str | None = None) -> BlockScenario:
    atoms: list[str] | None = None
    blocks = []
    for lineno, raw, line in _lines(text):
        col = len(line) - len(line.lstrip()) + 1
        parts = line.split()
        if parts[0] == "atoms":
            if atoms is not None:
                raise InputError("'atoms' declared twice", lineno, col, source)
            atoms = parts[1:]
            for a in atoms:
                if not _NAME.match(a):
                    raise InputError(f"bad atom name {a!r}", lineno, col, source)
        elif parts[0] == "block":
            if atoms is None:
                raise InputError("'atoms' must precede blocks", lineno, col, source)
            blocks.append((lineno, col, tuple(parts[1:])))
        else:
            raise InputError(f"unknown keyword {parts[0]!r}", lineno, col, source)
    if atoms is None:
        raise InputError("missing 'atoms' declaration", source=source)
    for lineno, col, b in blocks:
        for a in b:
            if a not in atoms:
                raise InputError(f"unknown atom {a!r} in block", lineno, col, source)
    try:
        return BlockScenario(tuple(atoms), tuple(b for _, _, b in blocks))
    except ValueError as e:
        raise InputError(str(e), source=source) from None


# pasting ---------------------------------------------------------------------


@dataclass(frozen=True)
class OrthoposetOnly:
    """A pasted structure that is an orthoposet but not a lattice."""

    labels: tuple[str, ...]
    up: tuple[int, ...]
    comp: tuple[int, ...]
    blocks: tuple[tuple[str, ...], ...]
    reason: str

    def __len__(self):
        return len(self.labels)


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if rb < ra:
            ra, rb = rb, ra
        self.parent[rb] = ra
        return True


def scenario_orthoposet(S: BlockScenario) -> FiniteOML | OrthoposetOnly:
    """Paste the Boolean algebras of the blocks along shared atoms.

    Within a block, an element is a subset of the block's atoms.  Two block
    elements are identified when they have the same atom set or the same
    block-complement atom set.  Raises InputError when the identifications
    collapse an element of some block onto another element of the same block.
    """
    nodes: list[tuple[int, int]] = []
    node_index: dict[tuple[int, int], int] = {}
    for bi, block in enumerate(S.blocks):
        for m in range(1 << len(block)):
            node_index[bi, m] = len(nodes)
            nodes.append((bi, m))

    def atomset(bi, m):
        block = S.blocks[bi]
        return frozenset(block[k] for k in range(len(block)) if m >> k & 1)

    def full(bi):
        return (1 << len(S.blocks[bi])) - 1

    uf = _UnionFind(len(nodes))
    by_set: dict[frozenset, int] = {}
    by_cset: dict[frozenset, int] = {}
    for idx, (bi, m) in enumerate(nodes):
        s, cs = atomset(bi, m), atomset(bi, full(bi) ^ m)
        uf.union(by_set.setdefault(s, idx), idx)
        uf.union(by_cset.setdefault(cs, idx), idx)

    # identifications must be compatible with complementation
    changed = True
    while changed:
        changed = False
        groups: dict[int, list[int]] = {}
        for idx in range(len(nodes)):
            groups.setdefault(uf.find(idx), []).append(idx)
        for members in groups.values():
            comps = [node_index[nodes[i][0], full(nodes[i][0]) ^ nodes[i][1]] for i in members]
            for c in comps[1:]:
                changed |= uf.union(comps[0], c)

    classes: dict[int, list[int]] = {}
    for idx in range(len(nodes)):
        classes.setdefault(uf.find(idx), []).append(idx)
    for members in classes.values():
        seen: dict[int, int] = {}
        for i in members:
            bi, m = nodes[i]
            if bi in seen and seen[bi] != m:
                a = "+".join(sorted(atomset(bi, seen[bi]))) or "0"
                b = "+".join(sorted(atomset(bi, m))) or "0"
                raise InputError(f"inconsistent block sharing: {a} and {b} of block {bi + 1} forced equal")
            seen[bi] = m
        singles = sorted({a for i in members for a in atomset(*nodes[i]) if bin(nodes[i][1]).count("1") == 1})
        if len(singles) > 1:
            raise InputError(f"inconsistent block sharing: atoms {' and '.join(singles)} forced equal")

    bottom, top = bound_labels(S.atoms)

    def label(members):
        best = min(members, key=lambda i: (bin(nodes[i][1]).count("1"), sorted(atomset(*nodes[i]))))
        bi, m = nodes[best]
        if m == 0:
            return bottom
        if m == full(bi):
            return top
        return "+".join(a for a in S.blocks[bi] if a in atomset(bi, m))

    # element ids: 0 first, then atoms in declaration order, then by size/label
    reps = list(classes)
    atom_rank = {a: k for k, a in enumerate(S.atoms)}

    def sort_key(root):
        members = classes[root]
        lab = label(members)
        if lab == bottom:
            return (0, 0, "")
        if lab == top:
            return (3, 0, "")
        size = min(bin(nodes[i][1]).count("1") for i in members)
        if size == 1:
            return (1, atom_rank[lab], "")
        return (2, size, lab)

    reps.sort(key=sort_key)
    cls_id = {root: k for k, root in enumerate(reps)}
    n = len(reps)
    labels = [label(classes[r]) for r in reps]
    if len(set(labels)) != n:
        raise InputError("pasting produced two classes with the same label")

    def cid(bi, m):
        return cls_id[uf.find(node_index[bi, m])]

    comp = [0] * n
    up = [1 << k for k in range(n)]
    for bi, m in nodes:
        c = cid(bi, m)
        comp[c] = cid(bi, full(bi) ^ m)
        for m2 in range(full(bi) + 1):
            if m2 & m == m:
                up[c] |= 1 << cid(bi, m2)
    changed = True
    while changed:
        changed = False
        for i in range(n):
            acc = up[i]
            for j in range(n):
                if acc >> j & 1:
                    acc |= up[j]
            if acc != up[i]:
                up[i] = acc
                changed = True
    for i in range(n):
        for j in range(i + 1, n):
            if up[i] >> j & 1 and up[j] >> i & 1:
                raise InputError(f"pasting collapses order: {labels[i]} <= {labels[j]} <= {labels[i]}")
    try:
        L = FiniteOML.from_upsets(labels, up, comp)
    except LatticeError as e:
        return OrthoposetOnly(tuple(labels), tuple(up), tuple(comp), S.blocks, str(e))
    witness = verify_orthomodularity(L)
    if witness is not None:
        a, b = witness
        reason = f"pasted lattice is not orthomodular at ({L.labels[a]}, {L.labels[b]})"
        return OrthoposetOnly(tuple(labels), tuple(up), tuple(comp), S.blocks, reason)
    return L
