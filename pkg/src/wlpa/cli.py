"""Command-line front end: ``wlpa <command> GRAPH.wg [options]``.

Exit codes: 0 on success, 1 when a precondition fails, 2 on a parse error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import growth, ktheory, repgraph, transform
from .classify import check_conditions, classify
from .freealg import (
    QQ,
    AlgebraElement,
    ElementParseError,
    PrimeField,
    RewriteContext,
    StepBudgetExceeded,
    format_element,
    format_word,
    local_valuation,
    multiply,
    normal_form,
    parse_element,
)
from .wgraph import GraphError, GraphParseError, WeightedGraph, ensure_valid, format_graph, parse_graph

__all__ = ["main", "run"]


class InputError(Exception):
    """Unreadable or unparsable input; exit code 2."""


class PreconditionFailure(Exception):
    """A module precondition does not hold; exit code 1."""


def _infinite(x):
    return {"infinite": True} if x == math.inf else x


def _text_number(x) -> str:
    return "infinity" if x == math.inf else str(x)


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _load_graph(path: str) -> WeightedGraph:
    try:
        g = parse_graph(_read(path))
    except GraphParseError as exc:
        raise InputError(f"{path}: {exc}") from None
    except GraphError as exc:
        raise InputError(f"{path}: {exc}") from None
    try:
        ensure_valid(g)
    except GraphError as exc:
        raise PreconditionFailure(str(exc)) from None
    return g


def _field(args):
    if args.field == "q":
        return QQ
    if args.prime is None:
        raise InputError("--field p needs --prime")
    try:
        return PrimeField(args.prime)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _ctx(args, g: WeightedGraph) -> RewriteContext:
    policy = "declared" if args.specials == "file" else "deterministic"
    try:
        return RewriteContext(g, policy)
    except GraphError as exc:
        raise PreconditionFailure(str(exc)) from None


def _element(text: str, g: WeightedGraph, field) -> AlgebraElement:
    try:
        return parse_element(text, g, field)
    except ElementParseError as exc:
        raise InputError(f"cannot parse element {text!r}: {exc}") from None


# Each handler returns (payload for JSON, text lines).


def cmd_check(args, g, ctx):
    report = check_conditions(g, ctx)
    d = report.as_dict()
    lines = [f"{k}: {'yes' if v else 'no'}" for k, v in d.items() if isinstance(v, bool)]
    lines += [f"{k} witness: {w}" for k, w in d["witnesses"].items()]
    if d["lpa_witness"]:
        lines.append(f"nod-path from e_2 to e_2^*: {d['lpa_witness']}")
    return d, lines


def cmd_classify(args, g, ctx):
    c = classify(g, ctx)
    d = c.as_dict()
    lines = []
    for k, v in d.items():
        if k == "gk_dimension":
            v = _text_number(c.gk_dimension)
        elif isinstance(v, bool):
            v = "yes" if v else "no"
        elif isinstance(v, dict):
            v = json.dumps(v)
        lines.append(f"{k}: {v}")
    return d, lines


def cmd_gkdim(args, g, ctx):
    gk = growth.gk_dimension(ctx)
    return {"gk_dimension": _infinite(gk)}, [_text_number(gk)]


def cmd_quasicycles(args, g, ctx):
    report = growth.chain_report(ctx)
    items = [
        {"quasicycle": str(c), "length": c.length, "selfconnected": s}
        for c, s in zip(report.classes, report.selfconnected)
    ]
    lines = [
        f"{it['quasicycle']}{'  (selfconnected)' if it['selfconnected'] else ''}" for it in items
    ]
    return {"classes": items, "chain_length": report.length}, lines


def cmd_count_paths(args, g, ctx):
    try:
        n = growth.count_nod_paths(ctx, args.n)
    except ValueError as exc:
        raise PreconditionFailure(str(exc)) from None
    return {"n": args.n, "count": n}, [str(n)]


def cmd_nf(args, g, ctx):
    x = normal_form(_element(args.element, g, _field(args)), ctx)
    return {"normal_form": format_element(x)}, [format_element(x)]


def cmd_mul(args, g, ctx):
    if len(args.element) != 2:
        raise InputError("mul needs exactly two -e arguments")
    field = _field(args)
    a, b = (_element(t, g, field) for t in args.element)
    x = normal_form(multiply(a, b, ctx), ctx)
    return {"product": format_element(x)}, [format_element(x)]


def cmd_valuation(args, g, ctx):
    if not check_conditions(g, ctx).lv:
        raise PreconditionFailure("the local valuation needs Condition (LV)")
    nu = local_valuation(_element(args.element, g, _field(args)), ctx)
    return {"valuation": None if nu == -math.inf else nu}, ["-infinity" if nu == -math.inf else str(nu)]


def cmd_transform(args, g, ctx):
    f, m = transform.to_unweighted(g)
    verdict = transform.verify_homomorphism(g, f, m)
    text = format_graph(f).rstrip("\n").splitlines()
    text += [f"{k} -> {v}" for k, v in m.to_json().items()]
    text.append("homomorphism verified" if verdict else f"verification failed: {verdict.failure}")
    payload = {
        "graph": format_graph(f),
        "map": m.to_json(),
        "verified": verdict.ok,
        "failure": verdict.failure,
    }
    return payload, text


def cmd_monoid(args, g, ctx):
    p = ktheory.monoid_presentation(g)
    return p.as_dict(), [str(p)]


def cmd_k0(args, g, ctx):
    k = ktheory.k0(g)
    return k.as_dict(), [str(k)]


def _weight_map(args, g) -> ktheory.WeightMap:
    if not getattr(args, "weightmap", None):
        return ktheory.standard_weight_map(g)
    try:
        data = json.loads(_read(args.weightmap))
        values = {}
        for key, vec in data.items():
            edge, _, tag = key.rpartition("_")
            values[edge, int(tag)] = tuple(int(c) for c in vec)
    except (ValueError, TypeError, AttributeError) as exc:
        raise InputError(f"{args.weightmap}: malformed weight map ({exc})") from None
    dims = {len(v) for v in values.values()}
    if len(dims) > 1:
        raise InputError(f"{args.weightmap}: vectors of different lengths")
    return ktheory.WeightMap(dims.pop() if dims else 0, values)


def _graded(builder, args, g, ctx):
    try:
        window = ktheory.parse_window(args.window)
    except ValueError:
        raise InputError(f"malformed window {args.window!r}") from None
    try:
        p = builder(g, _weight_map(args, g), window, ctx)
    except ValueError as exc:
        raise PreconditionFailure(str(exc)) from None
    lines = [str(r) + ("  [boundary]" if r.boundary else "") for r in p.relations]
    return p.as_dict(), lines


def cmd_graded_k0(args, g, ctx):
    return _graded(ktheory.graded_k0_presentation, args, g, ctx)


def cmd_graded_monoid(args, g, ctx):
    return _graded(ktheory.graded_monoid_presentation, args, g, ctx)


def _matrix(m) -> list[list[str]]:
    return [[format_element(x) for x in row] for row in m]


def cmd_theta(args, g, ctx):
    items = ktheory.theta_idempotents(g, ctx)
    payload = [
        {"vertex": t.vertex, "level": t.level, "matrix": _matrix(t.matrix), "idempotent": t.idempotent}
        for t in items
    ]
    lines = []
    for t in payload:
        lines.append(f"({t['vertex']}, {t['level']}): {'idempotent' if t['idempotent'] else 'NOT idempotent'}")
        lines += ["  [" + ", ".join(row) + "]" for row in t["matrix"]]
    return payload, lines


def cmd_corner(args, g, ctx):
    try:
        items = ktheory.corner_data(g, ctx)
    except ValueError as exc:
        raise PreconditionFailure(str(exc)) from None
    payload = [
        {
            "tag": c.tag,
            "row": [format_element(x) for x in c.row],
            "column": [format_element(x) for x in c.column],
            "product": format_element(c.product),
            "holds": c.holds,
        }
        for c in items
    ]
    lines = [f"T_{c['tag']} T_-{c['tag']} = {c['product']}  ({'= sum of vertices' if c['holds'] else 'differs from sum of vertices'})" for c in payload]
    return payload, lines


def cmd_weightmap(args, g, ctx):
    if args.action == "standard":
        w = ktheory.standard_weight_map(g)
        return w.as_dict(), [f"{k} -> {tuple(v)}" for k, v in w.as_dict().items()]
    if not args.weightmap:
        raise InputError("weightmap validate needs --weightmap FILE")
    ok, bad = ktheory.validate_weight_map(g, _weight_map(args, g), ctx)
    where = None if bad is None else f"{bad[0]}_{bad[1]}"
    return {"admissible": ok, "witness": where}, ["admissible" if ok else f"not admissible at {where}"]


def _load_rep(args, g):
    try:
        return repgraph.parse_repgraph(_read(args.repgraph), g)
    except GraphError as exc:
        raise InputError(f"{args.repgraph}: {exc}") from None


def _rep_payload(r) -> dict:
    return {
        "vertices": [{"id": v, "base": b} for v, b in r.vertices],
        "edges": [{"id": f.id, "source": f.source, "target": f.target, "label": str(f.label)} for f in r.edges],
    }


def cmd_rep(args, g, ctx):
    r = _load_rep(args, g)
    action = args.action
    if action == "validate":
        rep = repgraph.validate_repgraph(r)
        return {"valid": rep.ok, "violations": list(rep.violations)}, ["valid" if rep.ok else "invalid", *rep.violations]
    report = repgraph.validate_repgraph(r)
    if not report.ok:
        raise PreconditionFailure("invalid representation graph: " + "; ".join(report.violations))
    if action == "equiv":
        p = repgraph.vertex_equivalence(r)
        return {"classes": [list(b) for b in p]}, ["{" + ", ".join(b) + "}" for b in p]
    if action in ("quotient", "irreducible"):
        if action == "irreducible":
            verdict = repgraph.is_irreducible(r)
            q = repgraph.irreducible_quotient(r)
            payload = {"irreducible": verdict, "simple_module": verdict, "quotient": _rep_payload(q)}
            return payload, ["irreducible" if verdict else "reducible", repgraph.format_repgraph(q).rstrip("\n")]
        q = repgraph.irreducible_quotient(r)
        return _rep_payload(q), [repgraph.format_repgraph(q).rstrip("\n")]
    if action == "graded":
        graded = repgraph.is_graded_module(r)
        return {"graded": graded}, ["graded" if graded else "not graded"]
    if action == "act":
        if not args.vertex or args.element is None:
            raise InputError("rep act needs --vertex and -e")
        if args.vertex not in r.phi:
            raise InputError(f"unknown vertex {args.vertex!r}")
        a = _element(args.element, g, _field(args))
        out = repgraph.act(r, args.vertex, a)
        terms = {x: str(c) for x, c in out.items()}
        text = " + ".join(f"{c}*{x}" if c != "1" else x for x, c in terms.items()) or "0"
        return {"result": terms}, [text]
    if action == "unfold":
        if not args.vertex:
            raise InputError("rep unfold needs --vertex")
        if args.vertex not in r.phi:
            raise InputError(f"unknown vertex {args.vertex!r}")
        frag = repgraph.unfold_universal(r, args.vertex, args.depth)
        payload = _rep_payload(frag.graph)
        payload["paths"] = {v: format_word(p) for v, p in frag.paths.items()}
        payload["frontier"] = sorted(frag.frontier)
        lines = [repgraph.format_repgraph(frag.graph).rstrip("\n")]
        lines.append(f"{len(frag.graph.vertices)} vertices, {len(frag.frontier)} on the truncation frontier")
        return payload, lines
    raise InputError(f"unknown rep action {action!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--field", choices=("q", "p"), default="q", help="coefficients: rationals or GF(p)")
    common.add_argument("--prime", type=int, help="the prime for --field p")
    common.add_argument(
        "--specials",
        choices=("file", "deterministic"),
        default="file",
        help="special edges from the graph file's 'special' lines, or the first maximal edge",
    )

    parser = argparse.ArgumentParser(prog="wlpa", description="Computations in weighted Leavitt path algebras")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, handler, help_, graph=True):
        p = sub.add_parser(name, parents=[common], help=help_)
        if graph:
            p.add_argument("graph", help=".wg graph file")
        p.set_defaults(handler=handler)
        return p

    add("check", cmd_check, "graph conditions LPA, W1, W2, LV")
    add("classify", cmd_classify, "structure of the algebra")
    add("gkdim", cmd_gkdim, "Gelfand-Kirillov dimension")
    add("quasicycles", cmd_quasicycles, "quasicycles up to shift")
    add("count-paths", cmd_count_paths, "number of nod-paths").add_argument(
        "--n", type=int, default=None, help="length bound (omit for the total)"
    )
    add("nf", cmd_nf, "normal form of an element").add_argument("-e", dest="element", required=True)
    add("mul", cmd_mul, "product of two elements").add_argument(
        "-e", dest="element", action="append", required=True
    )
    add("valuation", cmd_valuation, "local valuation (needs LV)").add_argument("-e", dest="element", required=True)
    add("transform", cmd_transform, "isomorphic unweighted graph with generator map")
    add("monoid", cmd_monoid, "presentation of the V-monoid")
    add("k0", cmd_k0, "Grothendieck group K0")
    for name, handler in (("graded-k0", cmd_graded_k0), ("graded-monoid", cmd_graded_monoid)):
        p = add(name, handler, "graded presentation over a finite window")
        p.add_argument("--window", required=True, help="a:b,c:d,... one range per coordinate")
        p.add_argument("--weightmap", help="JSON weight map (default: the standard map)")
    add("theta", cmd_theta, "the idempotent matrices X X^*")
    add("corner", cmd_corner, "row/column identities T_i T_-i")
    p = add("weightmap", cmd_weightmap, "weight maps", graph=False)
    p.add_argument("action", choices=("validate", "standard"))
    p.add_argument("graph")
    p.add_argument("--weightmap", help="JSON file mapping 'e_i' to integer vectors")
    p = add("rep", cmd_rep, "representation graphs", graph=False)
    p.add_argument("action", choices=("validate", "equiv", "quotient", "irreducible", "act", "graded", "unfold"))
    p.add_argument("repgraph", help=".rg representation graph file")
    p.add_argument("--base", dest="graph", required=True, help=".wg base graph")
    p.add_argument("--vertex", help="F-vertex for act/unfold")
    p.add_argument("-e", dest="element", help="element for act")
    p.add_argument("--depth", type=int, default=2)
    return parser


def run(argv: list[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    # Windows such as "-1:1" look like options to argparse.
    for k in range(len(argv) - 1):
        if argv[k] == "--window":
            argv[k : k + 2] = [f"--window={argv[k + 1]}", ""]
    argv = [a for a in argv if a != ""]
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        g = _load_graph(args.graph)
        ctx = _ctx(args, g)
        payload, lines = args.handler(args, g, ctx)
    except InputError as exc:
        print(f"error: {exc}", file=err)
        return 2
    except (PreconditionFailure, transform.PreconditionError, StepBudgetExceeded) as exc:
        print(f"error: {exc}", file=err)
        return 1
    except GraphError as exc:
        print(f"error: {exc}", file=err)
        return 1
    if args.format == "json":
        json.dump(payload, out, indent=2, default=str)
        out.write("\n")
    else:
        for line in lines:
            print(line, file=out)
    return 0


def main() -> None:
    sys.exit(run())
