"""Graph conditions (LPA1-4, W1, W2, LV) and the structure theorems they feed."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .freealg import RewriteContext, Word, format_word
from .growth import enumerate_quasicycles, gk_dimension
from .wgraph import Edge, Letter, WeightedGraph, ensure_valid, tree

__all__ = [
    "Classification",
    "ConditionReport",
    "check_conditions",
    "classify",
    "cycle_vertices",
    "lpa_witness",
]


@dataclass(frozen=True)
class ConditionReport:
    lpa1: bool
    lpa2: bool
    lpa3: bool
    lpa4: bool
    w1: bool
    w2: bool
    lv: bool
    acyclic: bool
    aquasicyclic: bool
    witnesses: dict[str, str] = field(default_factory=dict, compare=False)
    lpa_witness: Word | None = None

    @property
    def lpa(self) -> bool:
        return self.lpa1 and self.lpa2 and self.lpa3 and self.lpa4

    @property
    def well_behaved(self) -> bool:
        return self.lpa1 and self.lpa2 and self.lpa3 and self.w1 and self.w2

    def as_dict(self) -> dict:
        return {
            "LPA1": self.lpa1,
            "LPA2": self.lpa2,
            "LPA3": self.lpa3,
            "LPA4": self.lpa4,
            "LPA": self.lpa,
            "W1": self.w1,
            "W2": self.w2,
            "LV": self.lv,
            "well_behaved": self.well_behaved,
            "acyclic": self.acyclic,
            "aquasicyclic": self.aquasicyclic,
            "witnesses": dict(self.witnesses),
            "lpa_witness": None if self.lpa_witness is None else format_word(self.lpa_witness),
        }


def _reaches_itself(g: WeightedGraph, v: str, skip: str | None = None) -> bool:
    """Is there a nonempty path v -> v avoiding edge ``skip``?"""
    seen: set[str] = set()
    queue = deque([v])
    while queue:
        x = queue.popleft()
        for e in g.out_edges(x):
            if e.id == skip:
                continue
            if e.target == v:
                return True
            if e.target not in seen:
                seen.add(e.target)
                queue.append(e.target)
    return False


def cycle_vertices(g: WeightedGraph) -> list[str]:
    """Vertices on at least one cycle."""
    return [v for v in g.vertices if _reaches_itself(g, v)]


def _in_line(g: WeightedGraph, e: Edge, f: Edge) -> bool:
    return e.id == f.id or f.source in tree(g, [e.target]) or e.source in tree(g, [f.target])


def _last_edges(g: WeightedGraph, first: Edge) -> set[str]:
    """Last letters of the paths that start with ``first``."""
    return {first.id} | {e.id for v in tree(g, [first.target]) for e in g.out_edges(v)}


def _w2_violation(g: WeightedGraph) -> list[str] | None:
    """A cycle a_1 -> ... -> a_n -> a_1 of the W2 relation, or None.

    a -> b when a path from a starting with a weighted edge and a path from b starting
    with an unweighted edge share their range but not their last letter.
    """
    ends: dict[str, tuple[set[str], set[str]]] = {}
    for v in g.vertices:
        weighted, unweighted = set(), set()
        for e in g.out_edges(v):
            (weighted if e.weight > 1 else unweighted).update(_last_edges(g, e))
        ends[v] = weighted, unweighted

    def related(a: str, b: str) -> bool:
        return any(
            p != q and g.edge(p).target == g.edge(q).target
            for p in ends[a][0]
            for q in ends[b][1]
        )

    succ = {a: [b for b in g.vertices if related(a, b)] for a in g.vertices}
    for start in g.vertices:
        parent: dict[str, str | None] = {start: None}
        queue = deque([start])
        while queue:
            a = queue.popleft()
            for b in succ[a]:
                if b == start:
                    cycle = [a]
                    while parent[cycle[-1]] is not None:
                        cycle.append(parent[cycle[-1]])
                    return cycle[::-1]
                if b not in parent:
                    parent[b] = a
                    queue.append(b)
    return None


def lpa_witness(ctx: RewriteContext) -> Word | None:
    """A shortest nod-path from e_2 to e_2^* for some weighted edge e, if one exists."""
    succ = ctx.nod_successors
    for e in ctx.graph.weighted_edges:
        start, goal = Letter.real(e.id, 2), Letter.ghost(e.id, 2)
        parent: dict[Letter, Letter | None] = {start: None}
        queue = deque([start])
        while queue:
            x = queue.popleft()
            if x == goal:
                path = [x]
                while parent[path[-1]] is not None:
                    path.append(parent[path[-1]])
                return tuple(reversed(path))
            for y in succ[x]:
                if y not in parent:
                    parent[y] = x
                    queue.append(y)
    return None


def check_conditions(g: WeightedGraph, ctx: RewriteContext | None = None) -> ConditionReport:
    ensure_valid(g)
    ctx = ctx or RewriteContext(g)
    wit: dict[str, str] = {}
    weighted = g.weighted_edges
    z = tree(g, [e.target for e in weighted])

    lpa1 = True
    for v in g.vertices:
        heavy = [e.id for e in g.out_edges(v) if e.weight > 1]
        if len(heavy) > 1:
            lpa1 = False
            wit["LPA1"] = f"{v} emits weighted edges {', '.join(heavy)}"
            break

    lpa2 = True
    for v in sorted(z, key=g.vertex_position):
        if len(g.out_edges(v)) > 1:
            lpa2 = False
            wit["LPA2"] = f"{v} in T(r(E_w)) emits {len(g.out_edges(v))} edges"
            break

    lpa3 = True
    for k, e in enumerate(weighted):
        for f in weighted[k + 1 :]:
            if not _in_line(g, e, f):
                common = tree(g, [e.target]) & tree(g, [f.target])
                if common:
                    lpa3 = False
                    wit["LPA3"] = (
                        f"{e.id} and {f.id} are not in line but both reach "
                        f"{min(common, key=g.vertex_position)}"
                    )
                    break
        if not lpa3:
            break

    lpa4 = True
    for e in weighted:
        for v in sorted(tree(g, [e.target]), key=g.vertex_position):
            if _reaches_itself(g, v, skip=e.id):
                lpa4 = False
                wit["LPA4"] = f"a cycle based at {v} in T(r({e.id})) avoids {e.id}"
                break
        if not lpa4:
            break

    on_cycle = cycle_vertices(g)
    w1_bad = [v for v in on_cycle if v in z]
    if w1_bad:
        wit["W1"] = f"a cycle is based at {w1_bad[0]} in T(r(E_w))"
    w2_cycle = _w2_violation(g)
    if w2_cycle:
        wit["W2"] = "path systems chain through " + " -> ".join(w2_cycle + w2_cycle[:1])

    lv = all(e.weight >= 2 for e in g.edges) and all(
        sum(1 for e in g.out_edges(v) if e.weight == g.vertex_weight(v)) >= 2
        for v in g.regular_vertices
    )
    quasicycles = enumerate_quasicycles(ctx)
    report = ConditionReport(
        lpa1=lpa1,
        lpa2=lpa2,
        lpa3=lpa3,
        lpa4=lpa4,
        w1=not w1_bad,
        w2=w2_cycle is None,
        lv=lv,
        acyclic=not on_cycle,
        aquasicyclic=not quasicycles,
        witnesses=wit,
    )
    if not report.lpa:
        report = ConditionReport(**{**report.__dict__, "lpa_witness": lpa_witness(ctx)})
    return report


@dataclass(frozen=True)
class Classification:
    """Structure of L(E, w).

    ``finite_dimensional`` lists n_i with L ≅ ⊕ M_{n_i}(K), or is None.
    ``noetherian`` is (sizes over K, sizes over K[x, x^-1]) or None.
    ``simple`` is False when Condition (LPA) fails and None (unknown) otherwise.
    """

    finite_dimensional: tuple[int, ...] | None
    noetherian: tuple[tuple[int, ...], tuple[int, ...]] | None
    von_neumann_regular: bool
    domain: bool
    locally_finite: bool
    gk_dimension: int | float
    simple: bool | None
    conditions: ConditionReport

    def as_dict(self) -> dict:
        gk = self.gk_dimension
        return {
            "finite_dimensional": self.finite_dimensional is not None,
            "matrix_sizes": None if self.finite_dimensional is None else list(self.finite_dimensional),
            "noetherian": self.noetherian is not None,
            "decomposition": None
            if self.noetherian is None
            else {"K": list(self.noetherian[0]), "laurent": list(self.noetherian[1])},
            "von_neumann_regular": self.von_neumann_regular,
            "domain": self.domain,
            "locally_finite": self.locally_finite,
            "gk_dimension": {"infinite": True} if gk == float("inf") else gk,
            "simple": "unknown" if self.simple is None else self.simple,
        }


def _paths_ending(g: WeightedGraph, v: str, memo: dict[str, int]) -> int:
    """Number of paths ending at v; v must not be downstream of a cycle."""
    if v not in memo:
        memo[v] = 1 + sum(_paths_ending(g, e.source, memo) for e in g.in_edges(v))
    return memo[v]


def _unweighted_blocks(f: WeightedGraph) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Matrix sizes of L(F) for an unweighted F in which no cycle has an exit."""
    on_cycle = set(cycle_vertices(f))
    if any(len(f.out_edges(v)) != 1 for v in on_cycle):
        raise ValueError("a cycle has an exit")
    memo: dict[str, int] = {}
    sinks = tuple(_paths_ending(f, s, memo) for s in f.sinks)
    laurent = []
    seen: set[str] = set()
    for v in f.vertices:
        if v not in on_cycle or v in seen:
            continue
        cycle = [v]
        while (nxt := f.out_edges(cycle[-1])[0].target) != v:
            cycle.append(nxt)
        seen.update(cycle)
        size = 0
        for c in cycle:
            size += 1 + sum(
                _paths_ending(f, e.source, memo) for e in f.in_edges(c) if e.source not in on_cycle
            )
        laurent.append(size)
    return sinks, tuple(laurent)


def classify(g: WeightedGraph, ctx: RewriteContext | None = None) -> Classification:
    from .transform import to_unweighted

    ensure_valid(g)
    ctx = ctx or RewriteContext(g)
    cond = check_conditions(g, ctx)
    gk = gk_dimension(ctx)

    exits = any(len(g.out_edges(v)) > 1 for v in cycle_vertices(g))
    noeth = None
    if cond.well_behaved and not exits:
        f, _ = to_unweighted(g)
        noeth = _unweighted_blocks(f)
    findim = noeth[0] if noeth is not None and cond.aquasicyclic else None
    domain = len(g.vertices) == 1 and (cond.lv or [e.weight for e in g.edges] == [1])
    return Classification(
        finite_dimensional=findim,
        noetherian=noeth,
        von_neumann_regular=cond.acyclic and cond.well_behaved,
        domain=domain,
        locally_finite=noeth is not None,
        gk_dimension=gk,
        simple=False if not cond.lpa else None,
        conditions=cond,
    )
