"""Representation graphs (F, φ) over Ê and the modules they induce.

A representation graph labels each vertex of F with a vertex of E and each edge with
a letter e_i of Ê.  Validity makes the labelled double graph F_d deterministic: from
any vertex, at most one arrow carries a given Ê_d letter.  That turns path-language
questions into automaton questions.
"""

from __future__ import annotations

import re
from collections import deque
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from functools import cached_property

from .freealg import AlgebraElement, Word
from .wgraph import GraphError, IDENT, Letter, WeightedGraph

__all__ = [
    "RepEdge",
    "RepresentationGraph",
    "RepParseError",
    "RepValidationReport",
    "UnfoldedFragment",
    "act",
    "format_repgraph",
    "is_admissible",
    "is_graded_module",
    "is_irreducible",
    "irreducible_quotient",
    "isomorphic",
    "parse_repgraph",
    "quotient",
    "simplicity_verdict",
    "unfold_universal",
    "validate_repgraph",
    "vertex_equivalence",
]

Partition = tuple[tuple[str, ...], ...]


@dataclass(frozen=True)
class RepEdge:
    id: str
    source: str
    target: str
    label: Letter  # a real letter e_i of Ê


@dataclass(frozen=True)
class RepresentationGraph:
    base: WeightedGraph
    vertices: tuple[tuple[str, str], ...]  # (id, base vertex)
    edges: tuple[RepEdge, ...]

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))
        ids: set[str] = set()
        for v, b in self.vertices:
            if v in ids:
                raise GraphError(f"duplicate id {v!r}")
            if not self.base.has_vertex(b):
                raise GraphError(f"{b!r} is not a vertex of the base graph")
            ids.add(v)
        for f in self.edges:
            if f.id in ids:
                raise GraphError(f"duplicate id {f.id!r}")
            ids.add(f.id)
            for end in (f.source, f.target):
                if end not in self.phi:
                    raise GraphError(f"edge {f.id!r} has unknown endpoint {end!r}")
            if not f.label.is_real or not self.base.is_letter(f.label):
                raise GraphError(f"edge {f.id!r} has invalid label {f.label}")

    @cached_property
    def phi(self) -> dict[str, str]:
        return dict(self.vertices)

    @property
    def vertex_ids(self) -> tuple[str, ...]:
        return tuple(v for v, _ in self.vertices)

    @cached_property
    def _position(self) -> dict[str, int]:
        return {v: k for k, (v, _) in enumerate(self.vertices)}

    @cached_property
    def transitions(self) -> dict[str, dict[Letter, str]]:
        """The labelled double graph: x --e_i--> target of the e_i edge out of x,
        x --e_i^*--> source of the e_i edge into x.  Later duplicates are ignored."""
        out: dict[str, dict[Letter, str]] = {v: {} for v in self.vertex_ids}
        for f in self.edges:
            out[f.source].setdefault(f.label, f.target)
            out[f.target].setdefault(f.label.star, f.source)
        return out

    def step(self, x: str, a: Letter) -> str | None:
        if a.is_vertex:
            return x if self.phi[x] == a.name else None
        return self.transitions[x].get(a)

    def walk(self, x: str, word: Iterable[Letter]) -> str | None:
        for a in word:
            x = self.step(x, a)
            if x is None:
                return None
        return x


@dataclass(frozen=True)
class RepValidationReport:
    ok: bool
    violations: tuple[str, ...] = ()


def validate_repgraph(r: RepresentationGraph) -> RepValidationReport:
    """Check that φ is a homomorphism, conditions (i) and (ii), and connectedness."""
    g = r.base
    problems: list[str] = []
    for f in r.edges:
        e = g.edge(f.label.name)
        if r.phi[f.source] != e.source or r.phi[f.target] != e.target:
            problems.append(f"edge {f.id} labelled {f.label} does not lie over {e.source} -> {e.target}")
    for x, base in r.vertices:
        out_tags: dict[int, int] = {}
        for f in r.edges:
            if f.source == x:
                out_tags[f.label.tag] = out_tags.get(f.label.tag, 0) + 1
        for i in range(1, g.vertex_weight(base) + 1):
            n = out_tags.get(i, 0)
            if n != 1:
                problems.append(f"vertex {x} has {n} outgoing edges with tag {i}")
        for i in out_tags:
            if i > g.vertex_weight(base):
                problems.append(f"vertex {x} has an outgoing edge with tag {i} > w({base})")
        incoming: dict[str, int] = {}
        for f in r.edges:
            if f.target == x:
                incoming[f.label.name] = incoming.get(f.label.name, 0) + 1
        for e in g.in_edges(base):
            n = incoming.get(e.id, 0)
            if n != 1:
                problems.append(f"vertex {x} has {n} incoming edges over {e.id}")
    if r.vertices and len(_components(r)) > 1:
        problems.append("not connected")
    return RepValidationReport(not problems, tuple(problems))


def _components(r: RepresentationGraph) -> list[set[str]]:
    adj: dict[str, set[str]] = {v: set() for v in r.vertex_ids}
    for f in r.edges:
        adj[f.source].add(f.target)
        adj[f.target].add(f.source)
    seen: set[str] = set()
    comps = []
    for v in r.vertex_ids:
        if v in seen:
            continue
        comp = {v}
        queue = deque([v])
        while queue:
            x = queue.popleft()
            for y in adj[x] - comp:
                comp.add(y)
                queue.append(y)
        seen |= comp
        comps.append(comp)
    return comps


def _canonical(r: RepresentationGraph, blocks: Iterable[Iterable[str]]) -> Partition:
    pos = r._position
    ordered = [tuple(sorted(b, key=pos.__getitem__)) for b in blocks]
    return tuple(sorted(ordered, key=lambda b: pos[b[0]]))


def vertex_equivalence(r: RepresentationGraph) -> Partition:
    """The relation ∼ (equal labelled path languages), by Moore partition refinement."""
    trans = r.transitions
    cls = {x: (r.phi[x], frozenset(trans[x])) for x in r.vertex_ids}
    while True:
        ids = {key: k for k, key in enumerate(sorted(set(cls.values()), key=repr))}
        current = {x: ids[cls[x]] for x in r.vertex_ids}
        refined = {
            x: (current[x], tuple(sorted((a.sort_key(), current[y]) for a, y in trans[x].items())))
            for x in r.vertex_ids
        }
        if len(set(refined.values())) == len(set(current.values())):
            break
        cls = refined
    blocks: dict[int, list[str]] = {}
    for x in r.vertex_ids:
        blocks.setdefault(current[x], []).append(x)
    return _canonical(r, blocks.values())


def _block_of(p: Sequence[Sequence[str]]) -> dict[str, int]:
    return {x: k for k, block in enumerate(p) for x in block}


def is_admissible(r: RepresentationGraph, p: Sequence[Sequence[str]]) -> bool:
    """(i) p refines ∼; (ii) matched labelled steps from related vertices stay related."""
    members = [x for block in p for x in block]
    if sorted(members) != sorted(r.vertex_ids):
        return False
    block = _block_of(p)
    fine = _block_of(vertex_equivalence(r))
    for b in p:
        if len({fine[x] for x in b}) > 1:
            return False
        head = b[0]
        for x in b[1:]:
            for a, y in r.transitions[head].items():
                z = r.transitions[x].get(a)
                if z is None or block[y] != block[z]:
                    return False
    return True


def quotient(r: RepresentationGraph, p: Sequence[Sequence[str]]) -> RepresentationGraph:
    """Vertices are the blocks (named by their first member); edges are (block, label) classes."""
    if not is_admissible(r, p):
        raise ValueError("partition is not admissible")
    canon = _canonical(r, p)
    rep = {x: b[0] for b in canon for x in b}
    vertices = tuple((b[0], r.phi[b[0]]) for b in canon)
    seen: set[tuple[str, Letter]] = set()
    edges = []
    for f in r.edges:
        key = (rep[f.source], f.label)
        if key not in seen:
            seen.add(key)
            edges.append(RepEdge(f.id, rep[f.source], rep[f.target], f.label))
    return RepresentationGraph(r.base, vertices, tuple(edges))


def is_irreducible(r: RepresentationGraph) -> bool:
    return all(len(b) == 1 for b in vertex_equivalence(r))


def irreducible_quotient(r: RepresentationGraph) -> RepresentationGraph:
    return quotient(r, vertex_equivalence(r))


def simplicity_verdict(r: RepresentationGraph) -> bool:
    """V_(F,φ) is simple exactly when (F, φ) is irreducible."""
    return is_irreducible(r)


def isomorphic(a: RepresentationGraph, b: RepresentationGraph) -> bool:
    """Labelled isomorphism of connected valid representation graphs.

    Determinism means an isomorphism is fixed by the image of one vertex, so each
    candidate image is propagated and checked.
    """
    if a.base != b.base or len(a.vertices) != len(b.vertices) or len(a.edges) != len(b.edges):
        return False
    if not a.vertices:
        return True

    def labelled(r: RepresentationGraph) -> dict[tuple[str, Letter], list[str]]:
        out: dict[tuple[str, Letter], list[str]] = {}
        for f in r.edges:
            out.setdefault((f.source, f.label), []).append(f.target)
        return out

    la, lb = labelled(a), labelled(b)
    root = a.vertex_ids[0]
    for cand in b.vertex_ids:
        if b.phi[cand] != a.phi[root]:
            continue
        m = {root: cand}
        queue = deque([root])
        ok = True
        while queue and ok:
            x = queue.popleft()
            for lab, y in a.transitions[x].items():
                z = b.transitions[m[x]].get(lab)
                if z is None or b.phi[z] != a.phi[y] or m.get(y, z) != z:
                    ok = False
                    break
                if y not in m:
                    m[y] = z
                    queue.append(y)
        if not ok or len(m) != len(a.vertices) or len(set(m.values())) != len(m):
            continue
        if all(
            sorted(m[t] for t in targets) == sorted(lb.get((m[s], lab), []))
            for (s, lab), targets in la.items()
        ):
            return True
    return False


@dataclass(frozen=True)
class UnfoldedFragment:
    """A truncation of the universal representation graph T_C.

    ``paths`` maps each vertex to its reduced label word (a vertex letter for the root);
    ``frontier`` holds the vertices at maximal depth, where conditions (i)/(ii) may fail.
    """

    graph: RepresentationGraph
    paths: Mapping[str, Word]
    frontier: frozenset[str]


def unfold_universal(r: RepresentationGraph, u: str, depth: int) -> UnfoldedFragment:
    """Vertices v_p for the reduced label words p of walks from u, |p| <= depth."""
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    root = "t0"
    paths: dict[str, Word] = {root: (Letter.vertex(r.phi[u]),)}
    vertices = [(root, r.phi[u])]
    edges = []
    layer = [(root, u, ())]
    for d in range(depth):
        nxt = []
        for vid, x, word in layer:
            for a, y in sorted(r.transitions[x].items(), key=lambda kv: kv[0].sort_key()):
                if word and a == word[-1].star:
                    continue
                cid = f"t{len(vertices)}"
                paths[cid] = word + (a,)
                vertices.append((cid, r.phi[y]))
                eid = f"s{len(edges)}"
                if a.is_real:
                    edges.append(RepEdge(eid, vid, cid, a))
                else:
                    edges.append(RepEdge(eid, cid, vid, a.star))
                nxt.append((cid, y, word + (a,)))
        layer = nxt
    frontier = frozenset(vid for vid, _, _ in layer)
    return UnfoldedFragment(RepresentationGraph(r.base, tuple(vertices), tuple(edges)), paths, frontier)


def act(r: RepresentationGraph, u: str, a: AlgebraElement) -> dict[str, object]:
    """u·a in V_(F,φ): each word acts by following its labelled walk from u, or by 0."""
    out: dict[str, object] = {}
    for word, c in a.terms.items():
        end = r.walk(u, word)
        if end is not None:
            out[end] = out.get(end, 0) + c
    return {x: c for x, c in out.items() if c}


def is_graded_module(r: RepresentationGraph) -> bool:
    """Every closed walk of F_d has standard degree 0, tested with degree potentials."""
    lam = r.base.max_weight
    pot: dict[str, tuple[int, ...]] = {}
    for start in r.vertex_ids:
        if start in pot:
            continue
        pot[start] = (0,) * lam
        queue = deque([start])
        while queue:
            x = queue.popleft()
            for a, y in r.transitions[x].items():
                sign = 1 if a.is_real else -1
                want = tuple(p + sign * int(k == a.tag) for k, p in enumerate(pot[x], start=1))
                if y not in pot:
                    pot[y] = want
                    queue.append(y)
                elif pot[y] != want:
                    return False
    # Transitions keep one arrow per label; parallel duplicates must agree too.
    for f in r.edges:
        want = tuple(p + int(k == f.label.tag) for k, p in enumerate(pot[f.source], start=1))
        if pot[f.target] != want:
            return False
    return True


class RepParseError(GraphError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


_LABEL = re.compile(r"(.+)_(\d+)\Z")


def parse_repgraph(text: str, base: WeightedGraph) -> RepresentationGraph:
    """``rvertex <id> <base-vertex>`` and ``redge <id> <src> <dst> <edge>_<tag>`` lines."""
    vertices: list[tuple[str, str]] = []
    edges: list[RepEdge] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split("#", 1)[0].split()
        if not tokens:
            continue
        kind = tokens[0]
        if kind == "rvertex" and len(tokens) == 3:
            vid, b = tokens[1:]
            if not IDENT.match(vid):
                raise RepParseError(f"invalid identifier {vid!r}", lineno)
            if not base.has_vertex(b):
                raise RepParseError(f"unknown base vertex {b!r}", lineno)
            vertices.append((vid, b))
        elif kind == "redge" and len(tokens) == 5:
            eid, s, t, lab = tokens[1:]
            if not IDENT.match(eid):
                raise RepParseError(f"invalid identifier {eid!r}", lineno)
            m = _LABEL.match(lab)
            if not m or not base.has_edge(m.group(1)):
                raise RepParseError(f"invalid edge label {lab!r}", lineno)
            letter = Letter.real(m.group(1), int(m.group(2)))
            if not base.is_letter(letter):
                raise RepParseError(f"tag out of range in {lab!r}", lineno)
            edges.append(RepEdge(eid, s, t, letter))
        else:
            raise RepParseError(f"cannot parse {raw.strip()!r}", lineno)
    try:
        return RepresentationGraph(base, tuple(vertices), tuple(edges))
    except GraphError as exc:
        raise RepParseError(str(exc), 0) from None


def format_repgraph(r: RepresentationGraph) -> str:
    lines = [f"rvertex {v} {b}" for v, b in r.vertices]
    lines += [f"redge {f.id} {f.source} {f.target} {f.label}" for f in r.edges]
    return "\n".join(lines) + "\n"
