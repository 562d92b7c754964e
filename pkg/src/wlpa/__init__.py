"""Computations in weighted Leavitt path algebras L_K(E, w)."""

from .classify import Classification, ConditionReport, check_conditions, classify
from .freealg import (
    QQ,
    AlgebraElement,
    PrimeField,
    RewriteContext,
    defining_relations,
    involution,
    local_valuation,
    multiply,
    normal_form,
    parse_element,
)
from .growth import count_nod_paths, enumerate_quasicycles, gk_dimension, max_chain_length
from .ktheory import (
    graded_k0_presentation,
    graded_monoid_presentation,
    k0,
    monoid_presentation,
    smith_normal_form,
    standard_weight_map,
    theta_idempotents,
)
from .repgraph import RepresentationGraph, irreducible_quotient, is_irreducible, parse_repgraph
from .transform import to_unweighted, verify_homomorphism
from .wgraph import Letter, WeightedGraph, parse_graph, rose

__version__ = "0.1.0"

__all__ = [
    "AlgebraElement",
    "check_conditions",
    "Classification",
    "classify",
    "ConditionReport",
    "count_nod_paths",
    "defining_relations",
    "enumerate_quasicycles",
    "gk_dimension",
    "graded_k0_presentation",
    "graded_monoid_presentation",
    "involution",
    "irreducible_quotient",
    "is_irreducible",
    "k0",
    "Letter",
    "local_valuation",
    "max_chain_length",
    "monoid_presentation",
    "multiply",
    "normal_form",
    "parse_element",
    "parse_graph",
    "parse_repgraph",
    "PrimeField",
    "QQ",
    "RepresentationGraph",
    "RewriteContext",
    "rose",
    "smith_normal_form",
    "standard_weight_map",
    "theta_idempotents",
    "to_unweighted",
    "verify_homomorphism",
    "WeightedGraph",
]
