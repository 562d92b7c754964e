"""V-monoid and K_0 presentations, θ-idempotents, corner matrices and Smith normal form."""

from __future__ import annotations

import itertools
from collections import Counter
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

from .freealg import AlgebraElement, RewriteContext, normal_form
from .wgraph import Edge, Letter, WeightedGraph, ensure_valid

__all__ = [
    "AbelianGroupReport",
    "CornerData",
    "GradedPresentation",
    "GradedRelation",
    "MonoidPresentation",
    "Relation",
    "ThetaIdempotent",
    "WeightMap",
    "corner_data",
    "graded_k0_presentation",
    "graded_monoid_presentation",
    "group_of_presentation",
    "k0",
    "matmul",
    "monoid_presentation",
    "parse_window",
    "smith_normal_form",
    "standard_weight_map",
    "theta_idempotents",
    "v_monoid_infinite_hint",
    "validate_weight_map",
]

Matrix = list[list[int]]


# --- Smith normal form ------------------------------------------------------


def _identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def smith_normal_form(m: Sequence[Sequence[int]]) -> tuple[Matrix, Matrix, Matrix]:
    """Return (U, D, V) with U·M·V = D, U and V unimodular, D diagonal with d_1 | d_2 | ...

    Entries of D are nonnegative.
    """
    a = [list(map(int, row)) for row in m]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    u, v = _identity(rows), _identity(cols)

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]

    def add_row(src, dst, k):  # row dst += k * row src
        a[dst] = [x + k * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x + k * y for x, y in zip(u[dst], u[src])]

    def add_col(src, dst, k):
        for r in a:
            r[dst] += k * r[src]
        for r in v:
            r[dst] += k * r[src]

    for t in range(min(rows, cols)):
        while True:
            nonzero = [(abs(a[i][j]), i, j) for i in range(t, rows) for j in range(t, cols) if a[i][j]]
            if not nonzero:
                return u, a, v
            _, i, j = min(nonzero)
            swap_rows(t, i)
            swap_cols(t, j)
            p = a[t][t]
            clean = True
            for i in range(t + 1, rows):
                q = a[i][t] // p
                if q:
                    add_row(t, i, -q)
                clean &= a[i][t] == 0
            for j in range(t + 1, cols):
                q = a[t][j] // p
                if q:
                    add_col(t, j, -q)
                clean &= a[t][j] == 0
            if not clean:
                continue
            bad = next(
                (i for i in range(t + 1, rows) for j in range(t + 1, cols) if a[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(bad, t, 1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
    return u, a, v


@dataclass(frozen=True)
class AbelianGroupReport:
    """Z^rank ⊕ Z/d_1 ⊕ ... with every d_i >= 2 and d_i | d_{i+1}."""

    rank: int
    torsion: tuple[int, ...] = ()

    def as_dict(self) -> dict:
        return {"rank": self.rank, "torsion": list(self.torsion)}

    def __str__(self) -> str:
        parts = [f"Z/{d}" for d in self.torsion]
        if self.rank == 1:
            parts.insert(0, "Z")
        elif self.rank > 1:
            parts.insert(0, f"Z^{self.rank}")
        return " + ".join(parts) if parts else "0"


def cokernel(m: Sequence[Sequence[int]], n_generators: int) -> AbelianGroupReport:
    """Z^n modulo the row span of m (one relation per row)."""
    if not m:
        return AbelianGroupReport(n_generators)
    _, d, _ = smith_normal_form(m)
    diag = [d[i][i] for i in range(min(len(d), n_generators)) if d[i][i]]
    return AbelianGroupReport(n_generators - len(diag), tuple(x for x in diag if x > 1))


def k0(g: WeightedGraph) -> AbelianGroupReport:
    """coker(Nᵗ - I_w) on Z^{E^0}."""
    ensure_valid(g)
    n = len(g.vertices)
    pos = g.vertex_position
    mat = [[0] * n for _ in range(n)]
    for e in g.edges:
        mat[pos(e.target)][pos(e.source)] += 1
    for v in g.vertices:
        mat[pos(v)][pos(v)] -= g.vertex_weight(v)
    # coker of a map Z^n -> Z^n is Z^n mod its column span, i.e. the row span of the transpose.
    return cokernel([list(col) for col in zip(*mat)], n)


# --- monoid presentations ----------------------------------------------------


@dataclass(frozen=True)
class Relation:
    lhs: Mapping[str, int]
    rhs: Mapping[str, int]

    @staticmethod
    def _side(ms: Mapping[str, int], order: Mapping[str, int]) -> str:
        items = sorted(ms.items(), key=lambda kv: order.get(kv[0], len(order)))
        text = " + ".join(name if c == 1 else f"{c}{name}" for name, c in items if c)
        return text or "0"

    def format(self, order: Mapping[str, int]) -> str:
        return f"{self._side(self.lhs, order)} = {self._side(self.rhs, order)}"

    def as_dict(self) -> dict:
        return {"lhs": dict(self.lhs), "rhs": dict(self.rhs)}


@dataclass(frozen=True)
class MonoidPresentation:
    generators: tuple[str, ...]
    relations: tuple[Relation, ...]

    def __str__(self) -> str:
        order = {g: k for k, g in enumerate(self.generators)}
        rels = ", ".join(r.format(order) for r in self.relations)
        return f"<{', '.join(self.generators)} | {rels}>"

    def as_dict(self) -> dict:
        return {"generators": list(self.generators), "relations": [r.as_dict() for r in self.relations]}


def _weights_ascending(g: WeightedGraph, v: str) -> list[int]:
    return sorted({e.weight for e in g.out_edges(v)})


def _edges_ascending(g: WeightedGraph, v: str) -> list[Edge]:
    return sorted(g.out_edges(v), key=lambda e: e.weight)


def monoid_presentation(g: WeightedGraph) -> MonoidPresentation:
    """Generators v and q_i^v; per regular v and 1 <= i <= k_v the relation
    q_{i-1} + (w_i - w_{i-1}) v = q_i + Σ_{w(e) = w_i} r(e), with q_0 = q_{k_v} = 0."""
    ensure_valid(g)
    gens = list(g.vertices)
    rels = []
    for v in g.regular_vertices:
        ws = _weights_ascending(g, v)
        k = len(ws)
        qs = [None] + [f"q{i}^{v}" for i in range(1, k)] + [None]
        gens += [q for q in qs if q]
        for i in range(1, k + 1):
            lhs, rhs = Counter(), Counter()
            if qs[i - 1]:
                lhs[qs[i - 1]] += 1
            lhs[v] += ws[i - 1] - (ws[i - 2] if i > 1 else 0)
            if qs[i]:
                rhs[qs[i]] += 1
            for e in g.out_edges(v):
                if e.weight == ws[i - 1]:
                    rhs[e.target] += 1
            rels.append(Relation(dict(lhs), dict(rhs)))
    return MonoidPresentation(tuple(gens), tuple(rels))


def v_monoid_infinite_hint(g: WeightedGraph) -> bool:
    """Some vertex emits edges of two different weights (then V(L(E, w)) is infinite)."""
    return any(len(_weights_ascending(g, v)) > 1 for v in g.vertices)


def group_of_presentation(p: MonoidPresentation) -> AbelianGroupReport:
    """Group completion: Tietze-eliminate generators with a unit coefficient, then SNF."""
    gens = list(p.generators)
    rows = []
    for r in p.relations:
        row = dict.fromkeys(gens, 0)
        for name, c in r.lhs.items():
            row[name] += c
        for name, c in r.rhs.items():
            row[name] -= c
        rows.append(row)
    eliminable = [x for x in gens if "^" in x]  # the q-generators
    for x in eliminable:
        pivot = next((r for r in rows if abs(r[x]) == 1), None)
        if pivot is None:
            continue
        rows.remove(pivot)
        sign = pivot[x]
        for r in rows:
            c = r[x]
            if c:
                for y in r:
                    r[y] -= c * sign * pivot[y]
        gens.remove(x)
        for r in rows:
            del r[x]
    return cokernel([[r[x] for x in gens] for r in rows], len(gens))


# --- θ-idempotents and corner matrices ---------------------------------------

AlgMatrix = list[list[AlgebraElement]]


def matmul(a: AlgMatrix, b: AlgMatrix, ctx: RewriteContext) -> AlgMatrix:
    out = []
    for row in a:
        new = []
        for j in range(len(b[0])):
            acc = AlgebraElement.zero()
            for k, x in enumerate(row):
                acc = acc + x * b[k][j]
            new.append(normal_form(acc, ctx))
        out.append(new)
    return out


def _star(a: AlgMatrix) -> AlgMatrix:
    from .freealg import involution

    return [[involution(a[i][j]) for i in range(len(a))] for j in range(len(a[0]))]


@dataclass(frozen=True)
class ThetaIdempotent:
    vertex: str
    level: int
    matrix: tuple[tuple[AlgebraElement, ...], ...]
    idempotent: bool


def theta_idempotents(g: WeightedGraph, ctx: RewriteContext | None = None) -> list[ThetaIdempotent]:
    """ε_{v,l} = X_{v,l} X_{v,l}^* for regular v and 1 <= l < k_v.

    X_v has entry e^{v,j}_i at (i, j) with s^{-1}(v) ordered by ascending weight.  X_{v,l}
    keeps the rows i <= w_l(v) and the columns of edges of weight > w_l(v).
    """
    ctx = ctx or RewriteContext(g)
    out = []
    for v in g.regular_vertices:
        ws = _weights_ascending(g, v)
        edges = _edges_ascending(g, v)
        for level in range(1, len(ws)):
            wl = ws[level - 1]
            cols = [e for e in edges if e.weight > wl]
            x = [[AlgebraElement.of(Letter.real(e.id, i)) for e in cols] for i in range(1, wl + 1)]
            eps = matmul(x, _star(x), ctx)
            sq = matmul(eps, eps, ctx)
            ok = all(normal_form(sq[i][j] - eps[i][j], ctx) == 0 for i in range(wl) for j in range(wl))
            out.append(ThetaIdempotent(v, level, tuple(map(tuple, eps)), ok))
    return out


@dataclass(frozen=True)
class CornerData:
    tag: int
    row: tuple[AlgebraElement, ...]
    column: tuple[AlgebraElement, ...]
    product: AlgebraElement
    holds: bool


def corner_data(g: WeightedGraph, ctx: RewriteContext | None = None) -> list[CornerData]:
    """Row T_i = (e_i) and column T_{-i} = (e_i^*) over all edges, with T_i·T_{-i} vs Σ v.

    Entries with i > w(e) are 0.  The identity holds for tag i exactly when every vertex
    has w(v) >= i.
    """
    if g.sinks:
        raise ValueError(f"corner data needs a graph without sinks; {', '.join(g.sinks)} are sinks")
    ctx = ctx or RewriteContext(g)
    ordered = [e for v in g.vertices for e in g.out_edges(v)]
    unit = AlgebraElement([((Letter.vertex(v),), 1) for v in g.vertices])
    out = []
    for i in range(1, g.max_weight + 1):
        row = tuple(
            AlgebraElement.of(Letter.real(e.id, i)) if i <= e.weight else AlgebraElement.zero()
            for e in ordered
        )
        col = tuple(
            AlgebraElement.of(Letter.ghost(e.id, i)) if i <= e.weight else AlgebraElement.zero()
            for e in ordered
        )
        prod = matmul([list(row)], [[c] for c in col], ctx)[0][0]
        out.append(CornerData(i, row, col, prod, prod == unit))
    return out


# --- weight maps and graded presentations -------------------------------------

Vector = tuple[int, ...]


@dataclass(frozen=True)
class WeightMap:
    """W: Ê^1 -> Z^d, keyed by (edge id, tag)."""

    dimension: int
    values: Mapping[tuple[str, int], Vector] = field(default_factory=dict)

    def __getitem__(self, key: tuple[str, int]) -> Vector:
        return self.values[key]

    def as_dict(self) -> dict:
        return {f"{e}_{i}": list(vec) for (e, i), vec in self.values.items()}


def standard_weight_map(g: WeightedGraph) -> WeightMap:
    lam = g.max_weight
    values = {
        (e.id, i): tuple(int(k == i) for k in range(1, lam + 1))
        for e in g.edges
        for i in range(1, e.weight + 1)
    }
    return WeightMap(lam, values)


def _add(*vs: Vector) -> Vector:
    return tuple(map(sum, zip(*vs)))


def _neg(v: Vector) -> Vector:
    return tuple(-x for x in v)


def validate_weight_map(
    g: WeightedGraph, w: WeightMap, ctx: RewriteContext | None = None
) -> tuple[bool, tuple[str, int] | None]:
    """Check W(e_i) = W(e^v_i) - W(e^v_1) + W(e_1) for every e and i, with v = s(e)."""
    ctx = ctx or RewriteContext(g)
    for e in g.edges:
        for i in range(1, e.weight + 1):
            if (e.id, i) not in w.values:
                return False, (e.id, i)
    for e in g.edges:
        sp = ctx.specials[e.source]
        for i in range(1, e.weight + 1):
            expected = _add(w[sp, i], _neg(w[sp, 1]), w[e.id, 1])
            if tuple(w[e.id, i]) != expected:
                return False, (e.id, i)
    return True, None


def parse_window(text: str) -> list[Vector]:
    """``a:b,c:d,...`` -> every integer point of the box, one range per coordinate."""
    ranges = []
    for part in text.split(","):
        lo, _, hi = part.strip().partition(":")
        lo_i = int(lo)
        hi_i = int(hi) if hi else lo_i
        ranges.append(range(lo_i, hi_i + 1))
    return [tuple(p) for p in itertools.product(*ranges)]


def _gen(v: str, gamma: Vector) -> str:
    return f"{v}^({','.join(map(str, gamma))})"


@dataclass(frozen=True)
class GradedRelation:
    vertex: str
    level: int | None
    base: Vector
    lhs: Mapping[str, int]
    rhs: Mapping[str, int]
    boundary: bool

    def __str__(self) -> str:
        side = lambda ms: " + ".join(n if c == 1 else f"{c}{n}" for n, c in ms.items()) or "0"  # noqa: E731
        return f"{side(self.lhs)} = {side(self.rhs)}"

    def as_dict(self) -> dict:
        return {
            "vertex": self.vertex,
            "level": self.level,
            "base": list(self.base),
            "lhs": dict(self.lhs),
            "rhs": dict(self.rhs),
            "boundary": self.boundary,
        }


@dataclass(frozen=True)
class GradedPresentation:
    generators: tuple[str, ...]
    boundary_generators: tuple[str, ...]
    relations: tuple[GradedRelation, ...]

    def as_dict(self) -> dict:
        return {
            "generators": list(self.generators),
            "boundary_generators": list(self.boundary_generators),
            "relations": [r.as_dict() for r in self.relations],
        }


def _index(name: str) -> Vector:
    inner = name[name.rindex("(") + 1 : name.rindex(")")]
    return tuple(int(x) for x in inner.split(",")) if inner else ()


def _assemble(rels: list[tuple[str, int | None, Vector, Counter, Counter]], window) -> GradedPresentation:
    inside = set(window)
    outside: dict[str, bool] = {}
    out = []
    for v, level, gamma, lhs, rhs in rels:
        for name in list(lhs) + list(rhs):
            outside[name] = _index(name) not in inside
        boundary = any(outside[n] for n in list(lhs) + list(rhs))
        out.append(GradedRelation(v, level, gamma, dict(lhs), dict(rhs), boundary))
    names = sorted(outside)
    return GradedPresentation(tuple(names), tuple(n for n in names if outside[n]), tuple(out))


def _check_window(w: WeightMap, window: Sequence[Vector]) -> None:
    for gamma in window:
        if len(gamma) != w.dimension:
            raise ValueError(f"window point {gamma} does not lie in Z^{w.dimension}")


def graded_monoid_presentation(
    g: WeightedGraph, w: WeightMap, window: Sequence[Vector], ctx: RewriteContext | None = None
) -> GradedPresentation:
    """Relations I_{l-1} + Σ v^(γ + W(e^v_i) - W(e^v_1)) = I_l + Σ r(e)^(γ - W(e_1)) per γ."""
    ctx = ctx or RewriteContext(g)
    ok, bad = validate_weight_map(g, w, ctx)
    if not ok:
        raise ValueError(f"weight map is not admissible at {bad[0]}_{bad[1]}")
    _check_window(w, window)
    rels = []
    for v in g.regular_vertices:
        ws = _weights_ascending(g, v)
        edges = _edges_ascending(g, v)
        sp = ctx.specials[v]
        k = len(ws)
        for gamma in window:
            def I(level: int) -> str | None:  # noqa: E743
                if level in (0, k):
                    return None
                return f"I{level}^{v},({','.join(map(str, gamma))})"

            for level in range(1, k + 1):
                lo = ws[level - 2] if level > 1 else 0
                lhs, rhs = Counter(), Counter()
                if I(level - 1):
                    lhs[I(level - 1)] += 1
                for i in range(lo + 1, ws[level - 1] + 1):
                    ix = _add(gamma, w[sp, i], _neg(w[sp, 1]))
                    lhs[_gen(v, ix)] += 1
                if I(level):
                    rhs[I(level)] += 1
                for e in edges:
                    if lo < e.weight <= ws[level - 1]:
                        ix = _add(gamma, _neg(w[e.id, 1]))
                        rhs[_gen(e.target, ix)] += 1
                rels.append((v, level, gamma, lhs, rhs))
    return _assemble(rels, window)


def graded_k0_presentation(
    g: WeightedGraph, w: WeightMap, window: Sequence[Vector], ctx: RewriteContext | None = None
) -> GradedPresentation:
    """Relations Σ_{i <= w(v)} v^(γ + W(e^v_i) - W(e^v_1)) = Σ_e r(e)^(γ - W(e_1)) per γ."""
    ctx = ctx or RewriteContext(g)
    ok, bad = validate_weight_map(g, w, ctx)
    if not ok:
        raise ValueError(f"weight map is not admissible at {bad[0]}_{bad[1]}")
    _check_window(w, window)
    rels = []
    for v in g.regular_vertices:
        sp = ctx.specials[v]
        for gamma in window:
            lhs, rhs = Counter(), Counter()
            for i in range(1, g.vertex_weight(v) + 1):
                lhs[_gen(v, _add(gamma, w[sp, i], _neg(w[sp, 1])))] += 1
            for e in g.out_edges(v):
                rhs[_gen(e.target, _add(gamma, _neg(w[e.id, 1])))] += 1
            rels.append((v, None, gamma, lhs, rhs))
    return _assemble(rels, window)
