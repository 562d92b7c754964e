import math
import random

import pytest

from graphs import G1, G2, G3, G4, G5, G6, G8, TWO_CYCLE, random_graph
from wlpa.classify import check_conditions, classify, cycle_vertices, lpa_witness
from wlpa.freealg import RewriteContext, is_nod_path
from wlpa.growth import count_nod_paths, gk_dimension
from wlpa.wgraph import Edge, Letter, WeightedGraph, rose


def test_g1_fails_lpa2_with_witness():
    report = check_conditions(G1)
    assert not report.lpa2
    assert report.lpa1 and report.lpa3 and report.lpa4
    assert "LPA2" in report.witnesses
    w = report.lpa_witness
    assert w[0] == Letter.real("e", 2) and w[-1] == Letter.ghost("e", 2)
    assert is_nod_path(w, RewriteContext(G1))


def test_lpa1_fails_on_two_weighted_edges():
    report = check_conditions(G5)
    assert not report.lpa1
    assert "G5" not in report.witnesses.get("LPA1", "")
    assert "v" in report.witnesses["LPA1"]


def test_lpa_holds_on_examples():
    for g in (G3, G4, G6, TWO_CYCLE):
        assert check_conditions(g).lpa


def test_lpa3_fails_when_not_in_line():
    g = WeightedGraph(
        ("a", "b", "c", "d", "x"),
        (
            Edge("p", "a", "c", 2),
            Edge("q", "b", "d", 2),
            Edge("r", "c", "x", 1),
            Edge("s", "d", "x", 1),
        ),
    )
    report = check_conditions(g)
    assert not report.lpa3
    assert "x" in report.witnesses["LPA3"]


def test_lpa4_fails_on_cycle_avoiding_weighted_edge():
    g = WeightedGraph(("v", "u"), (Edge("e", "v", "u", 2), Edge("f", "u", "u", 1)))
    report = check_conditions(g)
    assert not report.lpa4
    assert lpa_witness(RewriteContext(g)) is not None


def test_w1_and_w2():
    assert not check_conditions(G6).w1
    assert not check_conditions(G2).w2
    assert check_conditions(G4).w1 and check_conditions(G4).w2


def test_lv():
    assert check_conditions(G8).lv
    assert check_conditions(rose(2, 3)).lv
    assert not check_conditions(G4).lv
    one_max = WeightedGraph(("v",), (Edge("e", "v", "v", 3), Edge("f", "v", "v", 2)))
    assert not check_conditions(one_max).lv


def test_cycle_vertices():
    assert cycle_vertices(G6) == ["t", "u", "v"]
    assert cycle_vertices(G4) == []


def test_classify_g4():
    c = classify(G4)
    assert sorted(c.finite_dimensional) == [3, 3]
    assert c.noetherian == ((3, 3), ())
    assert c.von_neumann_regular
    assert c.gk_dimension == 0
    assert c.simple is None


def test_finite_dimension_matches_nod_count():
    for g in (G3, G4):
        c = classify(g)
        assert sum(n * n for n in c.finite_dimensional) == count_nod_paths(RewriteContext(g), None)


def test_classify_single_loop_laurent():
    c = classify(rose(1, 1))
    assert c.noetherian == ((), (1,))
    assert c.finite_dimensional is None
    assert c.domain
    assert c.gk_dimension == 1
    assert not c.von_neumann_regular


def test_classify_lv_rose_is_domain():
    c = classify(rose(2, 3))
    assert c.domain
    assert c.gk_dimension == math.inf
    assert c.simple is False


def test_classify_json_infinity():
    d = classify(G8).as_dict()
    assert d["gk_dimension"] == {"infinite": True}
    assert classify(G4).as_dict()["simple"] == "unknown"


def test_classify_rejects_disconnected():
    with pytest.raises(ValueError):
        classify(WeightedGraph(("a", "b"), ()))


def test_noetherian_cycle_without_exit_and_tail():
    g = WeightedGraph(("a", "b", "c"), (Edge("t", "a", "b", 1), Edge("x", "b", "c", 1), Edge("y", "c", "b", 1)))
    c = classify(g)
    # One Laurent block: two cycle vertices plus one path entering from a.
    assert c.noetherian == ((), (3,))
    assert c.gk_dimension == 1


def test_theorem_equivalences_on_random_graphs():
    rng = random.Random(99)
    for _ in range(60):
        g = random_graph(rng, 4, 5, 3)
        c = classify(g)
        cond = c.conditions
        assert (cond.acyclic and cond.well_behaved) == cond.aquasicyclic
        assert (c.noetherian is not None) == (c.gk_dimension <= 1)
        assert (c.finite_dimensional is not None) == (gk_dimension(RewriteContext(g)) == 0)
        if cond.well_behaved:
            assert cond.lpa
