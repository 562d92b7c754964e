"""Turning a weighted graph satisfying Condition (LPA) into an unweighted graph F.

``step1`` reverses every edge leaving T(r(E_w)); ``step2`` splits each range of a
weighted edge.  Each step returns the explicit images of the generators, and
:func:`verify_homomorphism` checks those images against every defining relation.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass

from .freealg import QQ, AlgebraElement, RewriteContext, defining_relations, involution, multiply, normal_form
from .wgraph import Edge, GraphError, Letter, UnweightedGraph, WeightedGraph, tree

__all__ = [
    "GeneratorMap",
    "PreconditionError",
    "VerificationResult",
    "apply_map",
    "compose",
    "step1",
    "step2",
    "to_unweighted",
    "verify_homomorphism",
]


class PreconditionError(GraphError):
    pass


@dataclass(frozen=True)
class GeneratorMap:
    """Images of the generators v, e_i, e_i^* of a source algebra over a target graph."""

    source: WeightedGraph
    target: WeightedGraph
    images: Mapping[Letter, AlgebraElement]

    def __getitem__(self, x: Letter) -> AlgebraElement:
        return self.images[x]

    def to_json(self) -> dict[str, str]:
        return {str(x): str(self.images[x]) for x in self.source.generators}


def _fresh(base: str, k: int, taken: set[str]) -> str:
    name = f"{base}__{k}"
    if name in taken:
        raise GraphError(f"fresh id {name!r} collides with an existing id")
    taken.add(name)
    return name


def _el(*terms: tuple[Letter, ...]) -> AlgebraElement:
    return AlgebraElement([(t, 1) for t in terms])


def _lpa_failure(g: WeightedGraph) -> str | None:
    from .classify import check_conditions

    report = check_conditions(g)
    for name in ("lpa1", "lpa2", "lpa3", "lpa4"):
        if not getattr(report, name):
            label = name.upper()
            return f"{label} fails: {report.witnesses.get(label, '')}".rstrip(": ")
    return None


def step1(g: WeightedGraph) -> tuple[WeightedGraph, GeneratorMap]:
    """Reverse each edge e with s(e) in Z = T(r(E_w)) into w(e) unweighted edges e__i."""
    failure = _lpa_failure(g)
    if failure:
        raise PreconditionError(f"Condition (LPA) is required: {failure}")
    z = tree(g, [e.target for e in g.weighted_edges])
    taken = set(g.vertices) | {e.id for e in g.edges}
    edges: list[Edge] = []
    images: dict[Letter, AlgebraElement] = {Letter.vertex(v): _el((Letter.vertex(v),)) for v in g.vertices}
    for e in g.edges:
        if e.source in z:
            for i in range(1, e.weight + 1):
                new = _fresh(e.id, i, taken)
                edges.append(Edge(new, e.target, e.source, 1))
                images[Letter.real(e.id, i)] = _el((Letter.ghost(new, 1),))
                images[Letter.ghost(e.id, i)] = _el((Letter.real(new, 1),))
        else:
            edges.append(e)
            for i in range(1, e.weight + 1):
                images[Letter.real(e.id, i)] = _el((Letter.real(e.id, i),))
                images[Letter.ghost(e.id, i)] = _el((Letter.ghost(e.id, i),))
    out = WeightedGraph(g.vertices, tuple(edges))
    return out, GeneratorMap(g, out, images)


def _step2_ready(g: WeightedGraph) -> str | None:
    for e in g.weighted_edges:
        if not g.is_sink(e.target):
            return f"range {e.target} of weighted edge {e.id} is not a sink"
    for v in g.vertices:
        if sum(1 for e in g.out_edges(v) if e.weight > 1) > 1:
            return f"{v} emits two weighted edges"
        if sum(1 for e in g.in_edges(v) if e.weight > 1) > 1:
            return f"{v} receives two weighted edges"
    return None


def step2(g: WeightedGraph) -> tuple[UnweightedGraph, GeneratorMap]:
    """Split every v in r(E_w) into v__1..v__k, k the weight of the weighted edge into v."""
    problem = _step2_ready(g)
    if problem:
        raise PreconditionError(f"step 2 precondition violated: {problem}")
    into = {e.target: e for e in g.weighted_edges}
    taken = set(g.vertices) | {e.id for e in g.edges}
    copies = {v: [_fresh(v, i, taken) for i in range(1, e.weight + 1)] for v, e in into.items()}
    vertices = []
    for v in g.vertices:
        vertices.extend(copies.get(v, [v]))
    V, R, G = Letter.vertex, Letter.real, Letter.ghost
    images: dict[Letter, AlgebraElement] = {
        V(v): _el(*[(V(c),) for c in copies.get(v, [v])]) for v in g.vertices
    }
    edges: list[Edge] = []
    for e in g.edges:
        if e.weight == 1 and e.target not in into:
            edges.append(e)
            images[R(e.id, 1)] = _el((R(e.id, 1),))
        elif e.weight == 1:
            new = []
            for i, c in enumerate(copies[e.target], start=1):
                new.append(_fresh(e.id, i, taken))
                edges.append(Edge(new[-1], e.source, c, 1))
            images[R(e.id, 1)] = _el(*[(R(n, 1),) for n in new])
        else:
            for i, c in enumerate(copies[e.target], start=1):
                new = _fresh(e.id, i, taken)
                if i == 1:
                    edges.append(Edge(new, e.source, c, 1))
                    images[R(e.id, 1)] = _el((R(new, 1),))
                else:
                    edges.append(Edge(new, c, e.source, 1))
                    images[R(e.id, i)] = _el((G(new, 1),))
    for e in g.edges:
        for i in range(1, e.weight + 1):
            images[G(e.id, i)] = involution(images[R(e.id, i)])
    out = UnweightedGraph(tuple(vertices), tuple(edges))
    return out, GeneratorMap(g, out, images)


def apply_map(m: GeneratorMap, x: AlgebraElement, ctx: RewriteContext) -> AlgebraElement:
    """The image of x under the algebra map determined by m, normalized over ctx."""
    field = x.field
    total = AlgebraElement.zero(field)
    for word, c in x.terms.items():
        acc = AlgebraElement(m[word[0]].terms, field)
        for a in word[1:]:
            acc = multiply(acc, AlgebraElement(m[a].terms, field), ctx)
        total = total + normal_form(acc, ctx).scale(c)
    return total


def compose(first: GeneratorMap, second: GeneratorMap, ctx: RewriteContext | None = None) -> GeneratorMap:
    """second ∘ first."""
    ctx = ctx or RewriteContext(second.target)
    images = {x: apply_map(second, first[x], ctx) for x in first.source.generators}
    return GeneratorMap(first.source, second.target, images)


def to_unweighted(g: WeightedGraph) -> tuple[UnweightedGraph, GeneratorMap]:
    mid, m1 = step1(g)
    f, m2 = step2(mid)
    return f, compose(m1, m2, RewriteContext(f))


@dataclass(frozen=True)
class VerificationResult:
    ok: bool
    failure: str | None = None

    def __bool__(self) -> bool:
        return self.ok


def verify_homomorphism(
    src: WeightedGraph, dst: WeightedGraph, m: GeneratorMap, ctx: RewriteContext | None = None
) -> VerificationResult:
    """Check that every defining relation of L(src) maps to 0 in L(dst) and that m commutes with *."""
    ctx = ctx or RewriteContext(dst)
    missing = [str(x) for x in src.generators if x not in m.images]
    if missing:
        return VerificationResult(False, f"no image for {', '.join(missing)}")
    for x in src.generators:
        lhs = normal_form(m[x.star], ctx)
        rhs = normal_form(involution(m[x]), ctx)
        if lhs != rhs:
            return VerificationResult(False, f"image of {x.star} is not the involution of the image of {x}")
    for label, rel in defining_relations(src, QQ):
        image = apply_map(m, rel, ctx)
        if image:
            return VerificationResult(False, f"relation {label} maps to {image}")
    return VerificationResult(True)
