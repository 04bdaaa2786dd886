"""Two-valued (Kochen-Specker) valuations: exact search with unit propagation."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .frames import enumerate_blocks
from .oml import FiniteOML
from .scenario import BlockScenario, OrthoposetOnly, RayScenario

DEFAULT_CAP = 10**6


@dataclass(frozen=True)
class Constraints:
    """Variables with exactly-one groups (contexts) and at-most-one pairs."""

    names: tuple[str, ...]
    exactly_one: tuple[tuple[int, ...], ...]
    at_most_one: tuple[tuple[int, int], ...] = ()


def constraints_of(S: RayScenario | BlockScenario) -> Constraints:
    if isinstance(S, RayScenario):
        in_context = {frozenset(p) for c in S.contexts for p in _pairs(c)}
        extra = tuple(p for p in S.orthogonal_pairs() if frozenset(p) not in in_context)
        return Constraints(tuple(S.names), tuple(S.contexts), extra)
    index = {a: k for k, a in enumerate(S.atoms)}
    return Constraints(S.atoms, tuple(tuple(sorted(index[a] for a in b)) for b in S.blocks))


def _pairs(c):
    return [(c[i], c[j]) for i in range(len(c)) for j in range(i + 1, len(c))]


@dataclass
class SearchStats:
    nodes: int = 0
    propagations: int = 0
    elapsed: float = 0.0


@dataclass(frozen=True)
class KSResult:
    outcome: str  # "SAT", "UNSAT" or "UNKNOWN" (node cap hit before a decision)
    valuation: dict[str, int] | None
    solutions: tuple[dict[str, int], ...] | None
    solution_count: int | None
    truncated: bool
    node_cap_hit: bool
    stats: SearchStats = field(compare=False)


class _Solver:
    def __init__(self, C: Constraints, order: Sequence[int] | None):
        n = len(C.names)
        self.C = C
        self.n = n
        self.order = list(order) if order is not None else list(range(n))
        if sorted(self.order) != list(range(n)):
            raise ValueError("branching order must be a permutation of the variables")
        self.groups_of = [[] for _ in range(n)]
        for g, grp in enumerate(C.exactly_one):
            for v in grp:
                self.groups_of[v].append(g)
        self.excl = [set() for _ in range(n)]
        for grp in C.exactly_one:
            for v in grp:
                self.excl[v].update(w for w in grp if w != v)
        for a, b in C.at_most_one:
            self.excl[a].add(b)
            self.excl[b].add(a)
        self.excl = [sorted(s) for s in self.excl]
        self.val = [-1] * n
        self.trail: list[int] = []
        self.stats = SearchStats()

    def assign(self, v: int, x: int) -> bool:
        """Set and propagate; False on conflict (trail keeps partial work for undo)."""
        queue = [(v, x)]
        val = self.val
        while queue:
            v, x = queue.pop()
            if val[v] != -1:
                if val[v] != x:
                    return False
                continue
            val[v] = x
            self.trail.append(v)
            self.stats.propagations += 1
            if x == 1:
                for w in self.excl[v]:
                    if val[w] == 1:
                        return False
                    if val[w] == -1:
                        queue.append((w, 0))
            else:
                for g in self.groups_of[v]:
                    free = None
                    nfree = 0
                    has_one = False
                    for w in self.C.exactly_one[g]:
                        if val[w] == 1:
                            has_one = True
                            break
                        if val[w] == -1:
                            nfree += 1
                            free = w
                    if has_one:
                        continue
                    if nfree == 0:
                        return False
                    if nfree == 1:
                        queue.append((free, 1))
        return True

    def undo(self, mark: int):
        while len(self.trail) > mark:
            self.val[self.trail.pop()] = -1

    def search(self, enumerate_all: bool, cap: int, max_nodes: int | None):
        solutions = []
        count = 0
        truncated = False
        node_cap_hit = False

        def rec() -> bool:
            """Returns True to stop the search."""
            nonlocal count, truncated, node_cap_hit
            self.stats.nodes += 1
            if max_nodes is not None and self.stats.nodes > max_nodes:
                node_cap_hit = True
                return True
            v = next((u for u in self.order if self.val[u] == -1), None)
            if v is None:
                count += 1
                solutions.append(tuple(self.val))
                if not enumerate_all:
                    return True
                if count >= cap:
                    truncated = True
                    return True
                return False
            for x in (1, 0):
                mark = len(self.trail)
                if self.assign(v, x) and rec():
                    return True
                self.undo(mark)
            return False

        # initial propagation: empty/singleton groups
        ok = True
        for grp in self.C.exactly_one:
            if not grp:
                ok = False
            elif len(grp) == 1:
                ok = ok and self.assign(grp[0], 1)
        if ok:
            rec()
        return solutions, count, truncated, node_cap_hit


def solve(
    C: Constraints,
    enumerate_all: bool = False,
    cap: int = DEFAULT_CAP,
    max_nodes: int | None = None,
    order: Sequence[int] | None = None,
) -> KSResult:
    t0 = time.perf_counter()
    solver = _Solver(C, order)
    sols, count, truncated, node_cap_hit = solver.search(enumerate_all, cap, max_nodes)
    solver.stats.elapsed = time.perf_counter() - t0
    named = [dict(zip(C.names, s)) for s in sols]
    for v in named:
        if not _check(C, v):
            raise AssertionError("search emitted an invalid valuation")
    if named:
        outcome = "SAT"
    elif node_cap_hit:
        outcome = "UNKNOWN"
    else:
        outcome = "UNSAT"
    return KSResult(
        outcome,
        named[0] if named else None,
        tuple(named) if enumerate_all else None,
        count if enumerate_all and not node_cap_hit else None,
        truncated,
        node_cap_hit,
        solver.stats,
    )


def ks_search(
    S: RayScenario | BlockScenario,
    enumerate_all: bool = False,
    cap: int = DEFAULT_CAP,
    max_nodes: int | None = None,
    order: Sequence[int] | None = None,
) -> KSResult:
    """Backtracking search for an assignment with exactly one 1 per context.

    For ray scenarios two orthogonal rays are never both 1, also when no
    listed context contains both.  Branching takes variables in ``order``
    (default: declaration order) and tries 1 before 0.
    """
    C = constraints_of(S)
    if not C.exactly_one:
        raise ValueError("scenario has no contexts")
    return solve(C, enumerate_all, cap, max_nodes, order)


def _check(C: Constraints, v: Mapping[str, int]) -> bool:
    vals = [v[n] for n in C.names]
    if any(x not in (0, 1) for x in vals):
        return False
    if any(sum(vals[k] for k in grp) != 1 for grp in C.exactly_one):
        return False
    return not any(vals[a] and vals[b] for a, b in C.at_most_one)


def verify_valuation(S: RayScenario | BlockScenario, v: Mapping[str, int]) -> bool:
    """Check every context (and orthogonal pair) directly, independent of the search."""
    C = constraints_of(S)
    missing = [n for n in C.names if n not in v]
    if missing:
        raise ValueError(f"partial assignment: no value for {', '.join(missing)}")
    return _check(C, v)


def parity_certificate(S: RayScenario | BlockScenario) -> bool:
    """True when the context count is odd and every variable lies in an even
    number of contexts: then no exactly-one assignment can exist."""
    C = constraints_of(S)
    counts = [0] * len(C.names)
    for grp in C.exactly_one:
        for v in grp:
            counts[v] += 1
    return len(C.exactly_one) % 2 == 1 and all(c % 2 == 0 for c in counts)


# lattice side ------------------------------------------------------------------


def atom_blocks(L: FiniteOML | OrthoposetOnly) -> BlockScenario:
    """The block structure of L as atom sets."""
    if isinstance(L, OrthoposetOnly):
        atoms = tuple(dict.fromkeys(a for b in L.blocks for a in b))
        return BlockScenario(atoms, tuple(L.blocks))
    blocks = enumerate_blocks(L)
    atoms = tuple(L.labels[a] for a in L.atoms())
    return BlockScenario(atoms, tuple(b.algebra.atoms for b in blocks))


def global_valuations(L: FiniteOML | OrthoposetOnly, cap: int = DEFAULT_CAP) -> list[dict[str, int]]:
    """Atom assignments that are a Boolean homomorphism to {0,1} on every block."""
    S = atom_blocks(L)
    res = ks_search(S, enumerate_all=True, cap=cap)
    for v in res.solutions:
        for b in S.blocks:
            if sum(v[a] for a in b) != 1:
                raise AssertionError("valuation fails on a block")
    return list(res.solutions)


@dataclass(frozen=True)
class NoninvertibilityReport:
    valuation_count: int
    no_global_section: bool
    scenario_outcome: str | None
    consistent: bool


def noninvertibility_witness(
    L: FiniteOML | OrthoposetOnly, scenario: RayScenario | BlockScenario | None = None
) -> NoninvertibilityReport:
    count = len(global_valuations(L))
    outcome = None
    consistent = True
    if scenario is not None:
        outcome = ks_search(scenario).outcome
        consistent = (outcome == "UNSAT") == (count == 0)
    return NoninvertibilityReport(count, count == 0, outcome, consistent)
