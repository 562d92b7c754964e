"""Quasicycles, chains of quasicycles and Gelfand-Kirillov dimension.

Nod-paths of positive length are exactly the walks in the *nod automaton*: its states
are the edge letters of Ê_d, and y may follow x when xy is a d-path with no forbidden
factor.  A nod²-path is then a closed walk.  A quasicycle is a closed walk such that no
window of its square shorter than itself closes up.  That makes it a chordless cycle
of the automaton (a self-loop counts as a chord on longer cycles), which is what
:func:`enumerate_quasicycles` searches for.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from functools import cached_property

from .freealg import RewriteContext, Word, format_word, is_nod_path, word_key
from .wgraph import Letter

__all__ = [
    "ChainReport",
    "QuasicycleClass",
    "SelfconnectedError",
    "all_quasicycles",
    "chain_report",
    "connects",
    "connects_nod",
    "count_nod_paths",
    "enumerate_quasicycles",
    "gk_dimension",
    "is_quasicycle",
    "is_selfconnected",
    "max_chain_length",
    "shifts",
]


class SelfconnectedError(ValueError):
    """Chain length is undefined because a quasicycle is selfconnected."""


def shifts(w: Word) -> list[Word]:
    return [w[k:] + w[:k] for k in range(len(w))]


@dataclass(frozen=True)
class QuasicycleClass:
    """All shifts of one quasicycle; ``canonical`` is the least in word order."""

    words: tuple[Word, ...]

    @property
    def canonical(self) -> Word:
        return self.words[0]

    @property
    def length(self) -> int:
        return len(self.words[0])

    def __str__(self) -> str:
        return format_word(self.canonical)


def _make_class(cycle: Word) -> QuasicycleClass:
    return QuasicycleClass(tuple(sorted(set(shifts(cycle)), key=word_key)))


def is_quasicycle(w: Word, ctx: RewriteContext) -> bool:
    """Test the definition directly: w² is nod and no shorter window of w² is nod²."""
    n = len(w)
    if n == 0 or any(a.is_vertex for a in w) or not is_nod_path(w + w, ctx):
        return False
    g = ctx.graph
    sq = w + w
    for length in range(1, n):
        for start in range(n):
            q = sq[start : start + length]
            if g.target(q[-1]) == g.source(q[0]) and not ctx.is_forbidden(q[-1], q[0]):
                return False
    return True


def enumerate_quasicycles(ctx: RewriteContext) -> tuple[QuasicycleClass, ...]:
    """Every quasicycle of ctx, grouped into shift classes, canonically ordered."""
    succ = ctx.nod_successors
    letters = sorted(succ, key=Letter.sort_key)
    index = {x: k for k, x in enumerate(letters)}
    arcs = {x: set(ys) for x, ys in succ.items()}
    looped = {x for x in letters if x in arcs[x]}
    found: list[Word] = [(x,) for x in letters if x in looped]

    def adjacent(a: Letter, b: Letter) -> bool:
        return b in arcs[a] or a in arcs[b]

    def extend(path: list[Letter]) -> None:
        start, last = path[0], path[-1]
        for y in arcs[last]:
            if index[y] <= index[start] or y in looped or y in path:
                continue
            # Chords from or to y are forbidden except the path arc and the closing arc.
            if any(adjacent(p, y) for p in path[1:-1]):
                continue
            if len(path) > 1 and (y in arcs[start] or last in arcs[y]):
                continue
            if start in arcs[y]:
                found.append(tuple(path) + (y,))
                continue
            path.append(y)
            extend(path)
            path.pop()

    for s in letters:
        if s not in looped:
            extend([s])
    return tuple(sorted((_make_class(c) for c in found), key=lambda c: word_key(c.canonical)))


def all_quasicycles(ctx: RewriteContext) -> list[Word]:
    return [w for c in enumerate_quasicycles(ctx) for w in c.words]


def _nod_followers(p: Word, ctx: RewriteContext) -> frozenset[Letter]:
    """First letters of the words q with p ⟹^nod q.

    Breadth-first search for the possible last letters of o, tracking the length of
    the prefix of p that o has matched so far (``None`` once o has left p).
    """
    succ = ctx.nod_successors
    n = len(p)

    def advance(j: int | None, y: Letter) -> int | None | bool:
        if j is None:
            return None
        if y == p[j]:
            return False if j + 1 == n else j + 1
        return None

    queue: deque[tuple[Letter, int | None]] = deque()
    seen: set[tuple[Letter, int | None]] = set()
    for y in succ[p[-1]]:
        j = advance(0, y)
        if j is not False and (y, j) not in seen:
            seen.add((y, j))
            queue.append((y, j))
    while queue:
        y, j = queue.popleft()
        for z in succ[y]:
            k = advance(j, z)
            if k is not False and (z, k) not in seen:
                seen.add((z, k))
                queue.append((z, k))
    return frozenset(z for y in {y for y, _ in seen} for z in succ[y])


def connects_nod(p: Word, q: Word, ctx: RewriteContext) -> bool:
    """p ⟹^nod q: some nontrivial nod-path o, not having p as a prefix, makes poq nod."""
    return q[0] in _nod_followers(p, ctx)


def connects(p: Word, q: Word, ctx: RewriteContext) -> bool:
    """p ⟹ q: pq is a nod-path or p ⟹^nod q."""
    return q[0] in ctx.nod_successors[p[-1]] or connects_nod(p, q, ctx)


def is_selfconnected(q: Word | QuasicycleClass, ctx: RewriteContext) -> bool:
    """Whether q ⟹^nod q.  For a class this is checked on every shift."""
    if isinstance(q, QuasicycleClass):
        return any(connects_nod(w, w, ctx) for w in q.words)
    return connects_nod(q, q, ctx)


@dataclass(frozen=True)
class ChainReport:
    classes: tuple[QuasicycleClass, ...]
    selfconnected: tuple[bool, ...]
    adjacency: frozenset[tuple[int, int]]
    length: int | None
    witness: tuple[Word, ...] = ()

    @cached_property
    def any_selfconnected(self) -> bool:
        return any(self.selfconnected)


def chain_report(ctx: RewriteContext) -> ChainReport:
    """Classes, selfconnectedness, the class-level ⟹ relation and a longest chain.

    The longest chain is searched over every shift representative; ``length`` is None
    when a selfconnected quasicycle exists.
    """
    classes = enumerate_quasicycles(ctx)
    nodes = [(k, w) for k, c in enumerate(classes) for w in c.words]
    nod = {w: _nod_followers(w, ctx) for _, w in nodes}
    follow = {w: nod[w] | frozenset(ctx.nod_successors[w[-1]]) for w in nod}
    selfc = tuple(any(w[0] in nod[w] for w in c.words) for c in classes)
    succ: dict[int, list[int]] = {a: [] for a in range(len(nodes))}
    adjacency = set()
    for a, (ka, wa) in enumerate(nodes):
        for b, (kb, wb) in enumerate(nodes):
            if ka != kb and wb[0] in follow[wa]:
                succ[a].append(b)
                adjacency.add((ka, kb))
    if any(selfc):
        return ChainReport(classes, selfc, frozenset(adjacency), None)

    best: list[int] = []

    def dfs(a: int, used: frozenset[int], chain: list[int]) -> None:
        nonlocal best
        if len(chain) > len(best):
            best = list(chain)
        if len(best) == len(classes):
            return
        for b in succ[a]:
            kb = nodes[b][0]
            if kb not in used:
                chain.append(b)
                dfs(b, used | {kb}, chain)
                chain.pop()

    for a, (ka, _) in enumerate(nodes):
        dfs(a, frozenset({ka}), [a])
    witness = tuple(nodes[a][1] for a in best)
    return ChainReport(classes, selfc, frozenset(adjacency), len(best), witness)


def max_chain_length(ctx: RewriteContext) -> int:
    report = chain_report(ctx)
    if report.length is None:
        raise SelfconnectedError("a selfconnected quasicycle exists; chain length is not defined")
    return report.length


def gk_dimension(ctx: RewriteContext) -> int | float:
    """GKdim L(E, w): ``math.inf`` if some quasicycle is selfconnected, else the chain length."""
    report = chain_report(ctx)
    return math.inf if report.length is None else report.length


def count_nod_paths(ctx: RewriteContext, n: int | None) -> int:
    """Number of nod-paths of length at most n, vertices included.

    ``n=None`` asks for the total, which exists only when there is no quasicycle;
    otherwise ValueError is raised.
    """
    succ = ctx.nod_successors
    total = len(ctx.graph.vertices)
    if n is None:
        order = _topological(succ)
        if order is None:
            raise ValueError("infinitely many nod-paths: a quasicycle exists")
        ending = dict.fromkeys(succ, 1)
        for x in order:
            for y in succ[x]:
                ending[y] += ending[x]
        return total + sum(ending.values())
    if n < 0:
        raise ValueError("length bound must be nonnegative")
    layer = dict.fromkeys(succ, 1)
    for _ in range(n):
        total += sum(layer.values())
        nxt = dict.fromkeys(succ, 0)
        for x, c in layer.items():
            if c:
                for y in succ[x]:
                    nxt[y] += c
        layer = nxt
    return total


def _topological(succ: dict[Letter, tuple[Letter, ...]]) -> list[Letter] | None:
    indeg = dict.fromkeys(succ, 0)
    for ys in succ.values():
        for y in ys:
            indeg[y] += 1
    queue = deque(x for x, d in indeg.items() if d == 0)
    order = []
    while queue:
        x = queue.popleft()
        order.append(x)
        for y in succ[x]:
            indeg[y] -= 1
            if indeg[y] == 0:
                queue.append(y)
    return order if len(order) == len(succ) else None
