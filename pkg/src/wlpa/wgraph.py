"""Finite weighted graphs, their letters, and the derived graphs Ê and Ê_d."""

from __future__ import annotations

import itertools
import re
from collections import deque
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from functools import cached_property

__all__ = [
    "Edge",
    "GraphError",
    "GraphParseError",
    "Letter",
    "SpecialEdgeAssignment",
    "UnweightedGraph",
    "ValidationReport",
    "WeightedGraph",
    "all_special_assignments",
    "double_graph",
    "ensure_valid",
    "format_graph",
    "hat_graph",
    "parse_graph",
    "rose",
    "special_edges",
    "tree",
    "validate",
]

IDENT = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")

VERTEX, REAL, GHOST = "vertex", "real", "ghost"
_KIND_ORDER = {VERTEX: 0, REAL: 1, GHOST: 2}


class GraphError(ValueError):
    """A graph violates a structural precondition."""


class GraphParseError(GraphError):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True, order=True)
class Edge:
    id: str
    source: str
    target: str
    weight: int = 1


@dataclass(frozen=True)
class Letter:
    """A generator of the free algebra: a vertex, a real edge e_i or a ghost edge e_i^*."""

    kind: str
    name: str
    tag: int = 0

    @classmethod
    def vertex(cls, v: str) -> Letter:
        return cls(VERTEX, v)

    @classmethod
    def real(cls, e: str, i: int) -> Letter:
        return cls(REAL, e, i)

    @classmethod
    def ghost(cls, e: str, i: int) -> Letter:
        return cls(GHOST, e, i)

    @property
    def is_vertex(self) -> bool:
        return self.kind == VERTEX

    @property
    def is_real(self) -> bool:
        return self.kind == REAL

    @property
    def is_ghost(self) -> bool:
        return self.kind == GHOST

    @property
    def star(self) -> Letter:
        if self.kind == VERTEX:
            return self
        return Letter(GHOST if self.kind == REAL else REAL, self.name, self.tag)

    def sort_key(self) -> tuple:
        return (_KIND_ORDER[self.kind], self.name, self.tag)

    def __str__(self) -> str:
        if self.kind == VERTEX:
            return self.name
        return f"{self.name}_{self.tag}" + ("^*" if self.kind == GHOST else "")


@dataclass(frozen=True)
class WeightedGraph:
    """A finite directed graph with a positive integer weight on every edge.

    Vertices and edges keep declaration order; every "first edge" tie-break uses it.
    ``declared_specials`` records ``special`` lines from a graph file.
    """

    vertices: tuple[str, ...]
    edges: tuple[Edge, ...]
    declared_specials: tuple[tuple[str, str], ...] = field(default=(), compare=False)

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "declared_specials", tuple(self.declared_specials))
        seen: set[str] = set()
        for v in self.vertices:
            if v in seen:
                raise GraphError(f"duplicate id {v!r}")
            seen.add(v)
        for e in self.edges:
            if e.id in seen:
                raise GraphError(f"duplicate id {e.id!r}")
            seen.add(e.id)
            for end in (e.source, e.target):
                if end not in self._vertex_index:
                    raise GraphError(f"edge {e.id!r} has unknown endpoint {end!r}")
            if e.weight < 1:
                raise GraphError(f"edge {e.id!r} has weight {e.weight} < 1")

    @cached_property
    def _vertex_index(self) -> dict[str, int]:
        return {v: k for k, v in enumerate(self.vertices)}

    @cached_property
    def _edge_index(self) -> dict[str, Edge]:
        return {e.id: e for e in self.edges}

    @cached_property
    def _out(self) -> dict[str, tuple[Edge, ...]]:
        out: dict[str, list[Edge]] = {v: [] for v in self.vertices}
        for e in self.edges:
            out[e.source].append(e)
        return {v: tuple(es) for v, es in out.items()}

    @cached_property
    def _in(self) -> dict[str, tuple[Edge, ...]]:
        inc: dict[str, list[Edge]] = {v: [] for v in self.vertices}
        for e in self.edges:
            inc[e.target].append(e)
        return {v: tuple(es) for v, es in inc.items()}

    def has_vertex(self, v: str) -> bool:
        return v in self._vertex_index

    def has_edge(self, e: str) -> bool:
        return e in self._edge_index

    def vertex_position(self, v: str) -> int:
        return self._vertex_index[v]

    def edge(self, e: str) -> Edge:
        return self._edge_index[e]

    def out_edges(self, v: str) -> tuple[Edge, ...]:
        return self._out[v]

    def in_edges(self, v: str) -> tuple[Edge, ...]:
        return self._in[v]

    def vertex_weight(self, v: str) -> int:
        """w(v): the largest weight of an edge leaving v, 0 for a sink."""
        return max((e.weight for e in self._out[v]), default=0)

    def is_sink(self, v: str) -> bool:
        return not self._out[v]

    @property
    def regular_vertices(self) -> tuple[str, ...]:
        return tuple(v for v in self.vertices if self._out[v])

    @property
    def sinks(self) -> tuple[str, ...]:
        return tuple(v for v in self.vertices if not self._out[v])

    @property
    def weighted_edges(self) -> tuple[Edge, ...]:
        return tuple(e for e in self.edges if e.weight > 1)

    @property
    def max_weight(self) -> int:
        """λ, the rank of the standard grading group."""
        return max((e.weight for e in self.edges), default=0)

    def source(self, x: Letter) -> str:
        if x.is_vertex:
            return x.name
        e = self._edge_index[x.name]
        return e.source if x.is_real else e.target

    def target(self, x: Letter) -> str:
        if x.is_vertex:
            return x.name
        e = self._edge_index[x.name]
        return e.target if x.is_real else e.source

    def is_letter(self, x: Letter) -> bool:
        if x.is_vertex:
            return x.name in self._vertex_index
        e = self._edge_index.get(x.name)
        return e is not None and 1 <= x.tag <= e.weight

    @cached_property
    def edge_letters(self) -> tuple[Letter, ...]:
        """Real letters of Ê followed by ghost letters, in declaration order."""
        real = [Letter.real(e.id, i) for e in self.edges for i in range(1, e.weight + 1)]
        return tuple(real) + tuple(x.star for x in real)

    @cached_property
    def generators(self) -> tuple[Letter, ...]:
        return tuple(Letter.vertex(v) for v in self.vertices) + self.edge_letters


class UnweightedGraph(WeightedGraph):
    """A weighted graph whose edges all have weight 1."""

    def __post_init__(self):
        super().__post_init__()
        for e in self.edges:
            if e.weight != 1:
                raise GraphError(f"edge {e.id!r} of an unweighted graph has weight {e.weight}")


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[str, ...] = ()
    components: tuple[tuple[str, ...], ...] = ()


def _components(g: WeightedGraph) -> list[list[str]]:
    adj: dict[str, set[str]] = {v: set() for v in g.vertices}
    for e in g.edges:
        adj[e.source].add(e.target)
        adj[e.target].add(e.source)
    seen: set[str] = set()
    comps = []
    for v in g.vertices:
        if v in seen:
            continue
        comp, queue = [], deque([v])
        seen.add(v)
        while queue:
            x = queue.popleft()
            comp.append(x)
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        comps.append(sorted(comp, key=g.vertex_position))
    return comps


def validate(g: WeightedGraph) -> ValidationReport:
    """Report emptiness and disconnectedness (connectedness of the double graph)."""
    if not g.vertices:
        return ValidationReport(False, ("empty: the graph has no vertices",))
    comps = _components(g)
    if len(comps) > 1:
        names = "; ".join("{" + ", ".join(c) + "}" for c in comps)
        return ValidationReport(
            False, (f"not connected: components {names}",), tuple(map(tuple, comps))
        )
    return ValidationReport(True, (), tuple(map(tuple, comps)))


def ensure_valid(g: WeightedGraph) -> None:
    report = validate(g)
    if not report.ok:
        raise GraphError("; ".join(report.violations))


def hat_graph(g: WeightedGraph) -> UnweightedGraph:
    """Ê: each edge e becomes w(e) parallel edges e_1..e_w(e)."""
    edges = [
        Edge(f"{e.id}_{i}", e.source, e.target, 1)
        for e in g.edges
        for i in range(1, e.weight + 1)
    ]
    return UnweightedGraph(g.vertices, tuple(edges))


@dataclass(frozen=True)
class Arrow:
    letter: Letter
    source: str
    target: str


def double_graph(g: WeightedGraph) -> tuple[Arrow, ...]:
    """Arrows of the double graph: every edge letter of Ê with its ghost reversed.

    For an unweighted graph the letters are ``e_1`` and ``e_1^*``.
    """
    return tuple(Arrow(x, g.source(x), g.target(x)) for x in g.edge_letters)


def tree(g: WeightedGraph, xs: Iterable[str]) -> frozenset[str]:
    """T(X): every vertex reachable from X by a directed path, X included."""
    start = list(xs)
    seen = set(start)
    queue = deque(start)
    while queue:
        v = queue.popleft()
        for e in g.out_edges(v):
            if e.target not in seen:
                seen.add(e.target)
                queue.append(e.target)
    return frozenset(seen)


class SpecialEdgeAssignment(Mapping):
    """Immutable map from each regular vertex v to its special edge e^v."""

    def __init__(self, g: WeightedGraph, choice: Mapping[str, str]):
        for v in g.regular_vertices:
            if v not in choice:
                raise GraphError(f"no special edge for regular vertex {v!r}")
        for v, e in choice.items():
            if not g.has_vertex(v) or g.is_sink(v):
                raise GraphError(f"{v!r} is not a regular vertex")
            if not g.has_edge(e) or g.edge(e).source != v:
                raise GraphError(f"special edge {e!r} is not in s^-1({v})")
            if g.edge(e).weight != g.vertex_weight(v):
                raise GraphError(f"special edge {e!r} at {v!r} does not have maximal weight")
        self._map = {v: choice[v] for v in g.regular_vertices}

    def __getitem__(self, v: str) -> str:
        return self._map[v]

    def __iter__(self) -> Iterator[str]:
        return iter(self._map)

    def __len__(self) -> int:
        return len(self._map)

    def __hash__(self) -> int:
        return hash(tuple(self._map.items()))

    def __eq__(self, other) -> bool:
        if isinstance(other, Mapping):
            return dict(self._map) == dict(other)
        return NotImplemented

    def __repr__(self) -> str:
        return f"SpecialEdgeAssignment({self._map!r})"


def special_edges(
    g: WeightedGraph, policy: str | Mapping[str, str] = "deterministic"
) -> SpecialEdgeAssignment:
    """Choose e^v per regular vertex.

    ``"deterministic"`` picks the first declared edge of maximal weight; ``"declared"``
    uses the graph file's ``special`` lines and falls back to the deterministic choice;
    a mapping is validated and completed the same way.
    """
    choice = {
        v: next(e.id for e in g.out_edges(v) if e.weight == g.vertex_weight(v))
        for v in g.regular_vertices
    }
    if policy == "deterministic":
        pass
    elif policy == "declared":
        choice.update(dict(g.declared_specials))
    elif isinstance(policy, Mapping):
        choice.update(policy)
    else:
        raise ValueError(f"unknown special-edge policy {policy!r}")
    return SpecialEdgeAssignment(g, choice)


def all_special_assignments(g: WeightedGraph) -> Iterator[SpecialEdgeAssignment]:
    regular = g.regular_vertices
    options = [
        [e.id for e in g.out_edges(v) if e.weight == g.vertex_weight(v)] for v in regular
    ]
    for combo in itertools.product(*options):
        yield SpecialEdgeAssignment(g, dict(zip(regular, combo)))


def rose(m: int, n: int) -> WeightedGraph:
    """One vertex ``v`` with n loops ``e1..en`` of weight m; its algebra is L(m, n)."""
    if m < 1 or n < 1:
        raise GraphError("rose(m, n) needs m, n >= 1")
    return WeightedGraph(("v",), tuple(Edge(f"e{k}", "v", "v", m) for k in range(1, n + 1)))


def parse_graph(text: str) -> WeightedGraph:
    vertices: list[str] = []
    edges: list[Edge] = []
    specials: list[tuple[str, str, int]] = []
    ids: set[str] = set()
    edge_lines: list[tuple[Edge, int, list[str], str]] = []

    def column(raw: str, tokens: list[str], k: int) -> int:
        pos = 0
        for tok in tokens[:k]:
            pos = raw.index(tok, pos) + len(tok)
        return raw.index(tokens[k], pos) + 1

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        tokens = line.split()
        if not tokens:
            continue
        kind = tokens[0]
        arity = {"vertex": 2, "edge": 5, "special": 3}.get(kind)
        if arity is None:
            raise GraphParseError(f"unknown directive {kind!r}", lineno, column(raw, tokens, 0))
        if len(tokens) != arity:
            raise GraphParseError(
                f"{kind!r} expects {arity - 1} arguments, got {len(tokens) - 1}",
                lineno,
                column(raw, tokens, min(len(tokens), arity) - 1),
            )
        if kind == "special":
            specials.append((tokens[1], tokens[2], lineno))
            continue
        ident = tokens[1]
        if not IDENT.match(ident):
            raise GraphParseError(f"invalid identifier {ident!r}", lineno, column(raw, tokens, 1))
        if ident in ids:
            raise GraphParseError(f"duplicate id {ident!r}", lineno, column(raw, tokens, 1))
        ids.add(ident)
        if kind == "vertex":
            vertices.append(ident)
            continue
        if not re.fullmatch(r"-?\d+", tokens[4]):
            raise GraphParseError(f"weight {tokens[4]!r} is not an integer", lineno, column(raw, tokens, 4))
        weight = int(tokens[4])
        if weight < 1:
            raise GraphParseError(f"weight {weight} < 1", lineno, column(raw, tokens, 4))
        edge = Edge(ident, tokens[2], tokens[3], weight)
        edges.append(edge)
        edge_lines.append((edge, lineno, tokens, raw))

    declared = set(vertices)
    for edge, lineno, tokens, raw in edge_lines:
        for k, end in ((2, edge.source), (3, edge.target)):
            if end not in declared:
                raise GraphParseError(f"unknown endpoint {end!r}", lineno, column(raw, tokens, k))

    g = WeightedGraph(tuple(vertices), tuple(edges))
    chosen: dict[str, str] = {}
    for v, e, lineno in specials:
        if v in chosen:
            raise GraphParseError(f"second special edge for {v!r}", lineno)
        try:
            SpecialEdgeAssignment(g, {**_first_max(g), v: e})
        except GraphError as exc:
            raise GraphParseError(str(exc), lineno) from None
        chosen[v] = e
    return WeightedGraph(g.vertices, g.edges, tuple(chosen.items()))


def _first_max(g: WeightedGraph) -> dict[str, str]:
    return dict(special_edges(g))


def format_graph(g: WeightedGraph) -> str:
    lines = [f"vertex {v}" for v in g.vertices]
    lines += [f"edge {e.id} {e.source} {e.target} {e.weight}" for e in g.edges]
    lines += [f"special {v} {e}" for v, e in g.declared_specials]
    return "\n".join(lines) + "\n"
