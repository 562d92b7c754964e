"""Elements of the free algebra on {v, e_i, e_i^*} and their normal forms in L(E, w).

Words are tuples of :class:`~wlpa.wgraph.Letter`.  A vertex on its own is the length-0
path.  Reduction uses the length-2 rules below, keyed on adjacent letter pairs:

* vertex absorption and mismatched compositions (products that are 0 or collapse);
* ``e^v_i (e^v_j)^*  ->  delta_ij v - sum_{e != e^v} e_i e_j^*``;
* ``e_1^* f_1        ->  delta_ef r(e) - sum_{i >= 2} e_i^* f_i``.

Irreducible words are exactly the nod-paths, which form a basis.
"""

from __future__ import annotations

import math
import random
import re
from collections import defaultdict
from collections.abc import Iterable, Iterator, Mapping
from fractions import Fraction
from functools import cached_property
from typing import Union

from .wgraph import Letter, SpecialEdgeAssignment, WeightedGraph, special_edges

__all__ = [
    "QQ",
    "AlgebraElement",
    "ElementParseError",
    "PrimeField",
    "RationalField",
    "RewriteContext",
    "StepBudgetExceeded",
    "Word",
    "defining_relations",
    "degree",
    "format_element",
    "format_word",
    "involution",
    "is_d_path",
    "is_nod_path",
    "local_valuation",
    "multiply",
    "normal_form",
    "parse_element",
    "word_key",
    "word_length",
]

Word = tuple[Letter, ...]
Scalar = Union[int, Fraction]


class RationalField:
    """Exact rationals."""

    characteristic = 0

    def coerce(self, x) -> Fraction:
        return Fraction(x)

    def __eq__(self, other) -> bool:
        return isinstance(other, RationalField)

    def __hash__(self) -> int:
        return hash("QQ")

    def __repr__(self) -> str:
        return "QQ"


class PrimeField:
    """Integers modulo a prime p, stored as representatives in [0, p)."""

    def __init__(self, p: int):
        if p < 2 or any(p % d == 0 for d in range(2, math.isqrt(p) + 1)):
            raise ValueError(f"{p} is not prime")
        self.characteristic = p

    def coerce(self, x) -> int:
        p = self.characteristic
        x = Fraction(x)
        if x.denominator % p == 0:
            raise ZeroDivisionError(f"{x} has no image in GF({p})")
        return x.numerator * pow(x.denominator, -1, p) % p

    def __eq__(self, other) -> bool:
        return isinstance(other, PrimeField) and other.characteristic == self.characteristic

    def __hash__(self) -> int:
        return hash(("GF", self.characteristic))

    def __repr__(self) -> str:
        return f"GF({self.characteristic})"


QQ = RationalField()


def word_length(w: Word) -> int:
    """Path length: vertices contribute nothing."""
    return sum(1 for x in w if not x.is_vertex)


def word_key(w: Word) -> tuple:
    """Canonical order: length, then letterwise (vertex < real < ghost, then id, tag)."""
    return (word_length(w), len(w), tuple(x.sort_key() for x in w))


def format_word(w: Word) -> str:
    return "*".join(map(str, w))


class AlgebraElement:
    """A finite linear combination of words with exact coefficients.

    ``x * y`` is the free (concatenation) product; use :func:`multiply` for the
    product in L(E, w).  Instances are immutable.
    """

    __slots__ = ("_terms", "field")

    def __init__(self, terms: Mapping[Word, Scalar] | Iterable[tuple[Word, Scalar]] = (), field=QQ):
        self.field = field
        acc: dict[Word, Scalar] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for w, c in items:
            acc[w] = acc.get(w, 0) + c
        self._terms = {}
        for w, c in acc.items():
            c = field.coerce(c)
            if c:
                self._terms[tuple(w)] = c

    @classmethod
    def of(cls, *letters: Letter, coef: Scalar = 1, field=QQ) -> AlgebraElement:
        return cls({tuple(letters): coef}, field)

    @classmethod
    def zero(cls, field=QQ) -> AlgebraElement:
        return cls((), field)

    @property
    def terms(self) -> Mapping[Word, Scalar]:
        return dict(self._terms)

    def items(self) -> list[tuple[Word, Scalar]]:
        return sorted(self._terms.items(), key=lambda t: word_key(t[0]))

    @property
    def support(self) -> list[Word]:
        return sorted(self._terms, key=word_key)

    def coefficient(self, w: Word) -> Scalar:
        return self._terms.get(tuple(w), self.field.coerce(0))

    def __iter__(self) -> Iterator[tuple[Word, Scalar]]:
        return iter(self.items())

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def _check(self, other: AlgebraElement) -> None:
        if other.field != self.field:
            raise ValueError(f"field mismatch: {self.field!r} vs {other.field!r}")

    def __add__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        self._check(other)
        return AlgebraElement(list(self._terms.items()) + list(other._terms.items()), self.field)

    def __neg__(self):
        return AlgebraElement({w: -c for w, c in self._terms.items()}, self.field)

    def __sub__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self + (-other)

    def scale(self, c: Scalar) -> AlgebraElement:
        c = self.field.coerce(c)
        return AlgebraElement({w: c * a for w, a in self._terms.items()}, self.field)

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            self._check(other)
            out: dict[Word, Scalar] = defaultdict(int)
            for w1, c1 in self._terms.items():
                for w2, c2 in other._terms.items():
                    out[w1 + w2] += c1 * c2
            return AlgebraElement(out, self.field)
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __eq__(self, other) -> bool:
        if isinstance(other, AlgebraElement):
            return self.field == other.field and self._terms == other._terms
        if other == 0:
            return not self._terms
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.field, frozenset(self._terms.items())))

    def __str__(self) -> str:
        return format_element(self)

    def __repr__(self) -> str:
        return f"AlgebraElement({format_element(self)!r})"


def format_element(x: AlgebraElement) -> str:
    if not x:
        return "0"
    parts = []
    p = x.field.characteristic
    for k, (w, c) in enumerate(x.items()):
        negative = p == 0 and c < 0
        mag = -c if negative else c
        body = format_word(w)
        text = body if mag == 1 else f"{mag}*{body}"
        if k == 0:
            parts.append(("-" if negative else "") + text)
        else:
            parts.append((" - " if negative else " + ") + text)
    return "".join(parts)


class StepBudgetExceeded(RuntimeError):
    pass


Rule = tuple[tuple[int, Word], ...]


class RewriteContext:
    """A weighted graph with a fixed special-edge choice.

    The special edges determine the forbidden words and hence the normal form.
    Shareable across threads after construction (caches are filled idempotently).
    """

    def __init__(
        self,
        graph: WeightedGraph,
        specials: SpecialEdgeAssignment | Mapping[str, str] | str = "deterministic",
        step_budget: int = 10**6,
    ):
        self.graph = graph
        if not isinstance(specials, SpecialEdgeAssignment):
            specials = special_edges(graph, specials)
        self.specials = specials
        self.step_budget = step_budget
        self._rules: dict[tuple[Letter, Letter], Rule | None] = {}

    def __repr__(self) -> str:
        return f"RewriteContext(specials={dict(self.specials)!r})"

    def is_special(self, e: str) -> bool:
        src = self.graph.edge(e).source
        return self.specials.get(src) == e

    def is_forbidden(self, x: Letter, y: Letter) -> bool:
        """Whether xy is one of the forbidden words e^v_i (e^v_j)^* or e_1^* f_1."""
        g = self.graph
        if x.is_real and y.is_ghost:
            return x.name == y.name and self.is_special(x.name)
        if x.is_ghost and y.is_real:
            return x.tag == 1 and y.tag == 1 and g.edge(x.name).source == g.edge(y.name).source
        return False

    @cached_property
    def nod_successors(self) -> dict[Letter, tuple[Letter, ...]]:
        """The nod automaton: y follows x iff xy is a d-path with no forbidden factor."""
        g = self.graph
        by_source: dict[str, list[Letter]] = defaultdict(list)
        for y in g.edge_letters:
            by_source[g.source(y)].append(y)
        return {
            x: tuple(y for y in by_source[g.target(x)] if not self.is_forbidden(x, y))
            for x in g.edge_letters
        }

    def rule(self, x: Letter, y: Letter) -> Rule | None:
        """Replacement for the factor xy, or None if xy is irreducible.

        An empty tuple means xy reduces to 0.
        """
        key = (x, y)
        if key not in self._rules:
            self._rules[key] = self._compute_rule(x, y)
        return self._rules[key]

    def _compute_rule(self, x: Letter, y: Letter) -> Rule | None:
        g = self.graph
        if x.is_vertex or y.is_vertex:
            if g.target(x) != g.source(y):
                return ()
            return ((1, (y,)),) if x.is_vertex else ((1, (x,)),)
        if g.target(x) != g.source(y):
            return ()
        if x.is_real and y.is_ghost and self.is_forbidden(x, y):
            v = g.edge(x.name).source
            terms: list[tuple[int, Word]] = []
            if x.tag == y.tag:
                terms.append((1, (Letter.vertex(v),)))
            for e in g.out_edges(v):
                if e.id != x.name and x.tag <= e.weight and y.tag <= e.weight:
                    terms.append((-1, (Letter.real(e.id, x.tag), Letter.ghost(e.id, y.tag))))
            return tuple(terms)
        if x.is_ghost and y.is_real and self.is_forbidden(x, y):
            e, f = g.edge(x.name), g.edge(y.name)
            terms = []
            if e.id == f.id:
                terms.append((1, (Letter.vertex(e.target),)))
            for i in range(2, g.vertex_weight(e.source) + 1):
                if i <= e.weight and i <= f.weight:
                    terms.append((-1, (Letter.ghost(e.id, i), Letter.real(f.id, i))))
            return tuple(terms)
        return None

    def reducible_sites(self, w: Word) -> list[int]:
        return [k for k in range(len(w) - 1) if self.rule(w[k], w[k + 1]) is not None]

    def first_site(self, w: Word) -> int | None:
        for k in range(len(w) - 1):
            if self.rule(w[k], w[k + 1]) is not None:
                return k
        return None


def normal_form(
    x: AlgebraElement, ctx: RewriteContext, rng: random.Random | None = None
) -> AlgebraElement:
    """Reduce x to a combination of nod-paths.

    The default strategy rewrites the leftmost reducible factor of the largest pending
    word.  Passing ``rng`` picks the word and the site at random instead; by confluence
    the result is the same.
    """
    field = x.field
    pending: dict[Word, Scalar] = dict(x.terms)
    done: dict[Word, Scalar] = defaultdict(int)
    steps = 0
    while pending:
        if rng is None:
            w = max(pending, key=word_key)
            site = ctx.first_site(w)
        else:
            w = rng.choice(list(pending))
            sites = ctx.reducible_sites(w)
            site = rng.choice(sites) if sites else None
        c = pending.pop(w)
        if site is None:
            done[w] += c
            continue
        steps += 1
        if steps > ctx.step_budget:
            raise StepBudgetExceeded(f"normal form exceeded {ctx.step_budget} rewriting steps")
        for k, rep in ctx.rule(w[site], w[site + 1]):
            nw = w[:site] + rep + w[site + 2 :]
            nc = field.coerce(pending.get(nw, 0) + k * c)
            if nc:
                pending[nw] = nc
            else:
                pending.pop(nw, None)
    return AlgebraElement(done, field)


def multiply(x: AlgebraElement, y: AlgebraElement, ctx: RewriteContext) -> AlgebraElement:
    return normal_form(x * y, ctx)


def involution(x: AlgebraElement) -> AlgebraElement:
    return AlgebraElement(
        {tuple(a.star for a in reversed(w)): c for w, c in x.terms.items()}, x.field
    )


def degree(w: Word) -> dict[int, int]:
    """Standard degree as a sparse vector {tag: coefficient}; deg e_i = α_i."""
    out: dict[int, int] = defaultdict(int)
    for a in w:
        if a.is_real:
            out[a.tag] += 1
        elif a.is_ghost:
            out[a.tag] -= 1
    return {i: c for i, c in sorted(out.items()) if c}


def is_d_path(w: Word, g: WeightedGraph) -> bool:
    if not w or not all(g.is_letter(a) for a in w):
        return False
    if len(w) == 1:
        return True
    if any(a.is_vertex for a in w):
        return False
    return all(g.target(a) == g.source(b) for a, b in zip(w, w[1:]))


def is_nod_path(w: Word, ctx: RewriteContext) -> bool:
    return is_d_path(w, ctx.graph) and not any(
        ctx.is_forbidden(a, b) for a, b in zip(w, w[1:])
    )


def local_valuation(x: AlgebraElement, ctx: RewriteContext) -> float | int:
    """ν(x): the longest path in the support of the normal form, -inf for 0."""
    nf = normal_form(x, ctx)
    return max((word_length(w) for w in nf.terms), default=-math.inf)


def defining_relations(g: WeightedGraph, field=QQ) -> list[tuple[str, AlgebraElement]]:
    """Each defining relation of L(E, w) as a labelled element LHS - RHS."""

    def el(*words: tuple[int, Word]) -> AlgebraElement:
        return AlgebraElement([(w, c) for c, w in words], field)

    V, R, G = Letter.vertex, Letter.real, Letter.ghost
    rels: list[tuple[str, AlgebraElement]] = []
    for u in g.vertices:
        for v in g.vertices:
            rels.append((f"{u}*{v} = {'u' if u == v else '0'}",
                         el((1, (V(u), V(v))), *([(-1, (V(u),))] if u == v else []))))
    for e in g.edges:
        for i in range(1, e.weight + 1):
            ei, es = R(e.id, i), G(e.id, i)
            rels += [
                (f"s({e.id})*{ei} = {ei}", el((1, (V(e.source), ei)), (-1, (ei,)))),
                (f"{ei}*r({e.id}) = {ei}", el((1, (ei, V(e.target))), (-1, (ei,)))),
                (f"r({e.id})*{es} = {es}", el((1, (V(e.target), es)), (-1, (es,)))),
                (f"{es}*s({e.id}) = {es}", el((1, (es, V(e.source))), (-1, (es,)))),
            ]
    for v in g.regular_vertices:
        out = g.out_edges(v)
        wv = g.vertex_weight(v)
        for i in range(1, wv + 1):
            for j in range(1, wv + 1):
                terms = [(1, (R(e.id, i), G(e.id, j))) for e in out if i <= e.weight and j <= e.weight]
                if i == j:
                    terms.append((-1, (V(v),)))
                rels.append((f"sum over s^-1({v}) of e_{i}*e_{j}^* = {'v' if i == j else '0'}", el(*terms)))
        for e in out:
            for f in out:
                terms = [(1, (G(e.id, i), R(f.id, i))) for i in range(1, wv + 1)
                         if i <= e.weight and i <= f.weight]
                if e.id == f.id:
                    terms.append((-1, (V(e.target),)))
                rels.append((f"sum over i of {e.id}_i^*{f.id}_i", el(*terms)))
    return rels


class ElementParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"position {position + 1}: {message}")
        self.position = position


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z][A-Za-z0-9_]*)(\^\*)?|(.))")


def _tokens(text: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m.end() == pos:
            break
        num, ident, star, other = m.groups()
        if num is not None:
            out.append(("num", num, m.start(1)))
        elif ident is not None:
            out.append(("id", ident + (star or ""), m.start(2)))
        elif other is not None:
            if other not in "+-*/":
                raise ElementParseError(f"unexpected character {other!r}", m.start(4))
            out.append((other, other, m.start(4)))
        pos = m.end()
    return out


def _resolve(token: str, pos: int, g: WeightedGraph) -> Letter:
    star = token.endswith("^*")
    name = token[:-2] if star else token
    if not star and g.has_vertex(name):
        return Letter.vertex(name)
    if "_" in name:
        edge, _, tag = name.rpartition("_")
        if tag.isdigit() and g.has_edge(edge):
            i = int(tag)
            w = g.edge(edge).weight
            if not 1 <= i <= w:
                raise ElementParseError(f"tag {i} out of range for {edge!r}: w({edge}) = {w}", pos)
            return Letter.ghost(edge, i) if star else Letter.real(edge, i)
    if star and g.has_vertex(name):
        raise ElementParseError(f"vertex {name!r} cannot be starred", pos)
    raise ElementParseError(f"unknown vertex or edge letter {token!r}", pos)


def parse_element(text: str, g: WeightedGraph, field=QQ) -> AlgebraElement:
    """Parse ``term (('+'|'-') term)*`` with ``term := [scalar '*'] factor ('*' factor)*``."""
    toks = _tokens(text)
    if [t[0] for t in toks] == ["num"] and toks[0][1] == "0":
        return AlgebraElement.zero(field)
    k = 0
    end = len(text)

    def peek(kind: str) -> bool:
        return k < len(toks) and toks[k][0] == kind

    def expect(kind: str, what: str) -> tuple[str, str, int]:
        nonlocal k
        if k >= len(toks):
            raise ElementParseError(f"expected {what}, got end of input", end)
        if toks[k][0] != kind:
            raise ElementParseError(f"expected {what}, got {toks[k][1]!r}", toks[k][2])
        k += 1
        return toks[k - 1]

    terms: list[tuple[Word, Fraction]] = []
    sign = 1
    if peek("-"):
        sign, k = -1, k + 1
    elif peek("+"):
        k += 1
    while True:
        coef = Fraction(1)
        if peek("num"):
            num = int(expect("num", "integer")[1])
            den = 1
            if peek("/"):
                k += 1
                den = int(expect("num", "denominator")[1])
                if den == 0:
                    raise ElementParseError("zero denominator", toks[k - 1][2])
            coef = Fraction(num, den)
            expect("*", "'*' after scalar")
        word = [_resolve(*expect("id", "vertex or edge letter")[1:], g)]
        while peek("*"):
            k += 1
            word.append(_resolve(*expect("id", "vertex or edge letter")[1:], g))
        terms.append((tuple(word), sign * coef))
        if k == len(toks):
            break
        if peek("+"):
            sign = 1
        elif peek("-"):
            sign = -1
        else:
            raise ElementParseError(f"expected '+' or '-', got {toks[k][1]!r}", toks[k][2])
        k += 1
    return AlgebraElement(terms, field)
