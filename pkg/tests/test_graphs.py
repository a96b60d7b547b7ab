"""Admissible graphs: validation, serialization, enumeration, canonical form."""

import pytest

from defquant.graphs import (AdmissibleGraph, Edge, enumerate_graphs,
                             fan_graph, cycle_graph, wheel_graph,
                             graph1_left, graph1_right, graph2)
from defquant.weight_mc import exact_zero_reason


NAMED = [fan_graph(1), fan_graph(2), fan_graph(3), cycle_graph(2),
         cycle_graph(3), wheel_graph(2), wheel_graph(3),
         graph1_left(), graph1_right(), graph2()]


@pytest.mark.parametrize("g", NAMED, ids=lambda g: g.to_text())
def test_text_roundtrip(g):
    assert AdmissibleGraph.from_text(g.to_text()) == g
    assert AdmissibleGraph.from_json(g.to_json()) == g


@pytest.mark.parametrize("bad", [
    "K(2)[...]",
    "garbage",
    "K(1,1)[2>b1#1]",        # source not aerial
    "K(1,2)[1>b1#1, 1>b2#3]",  # labels not 1..2
    "K(1,1)[1>1#1]",         # short loop
])
def test_rejects_malformed(bad):
    with pytest.raises(ValueError):
        AdmissibleGraph.from_text(bad)


def test_structure_queries():
    g = graph2()
    assert g.n_edges == 4
    assert g.dim_config() == 4
    assert g.out_degree(1) == g.out_degree(2) == 2
    assert g.in_degree(1) == g.in_degree(2) == 1
    assert g.unhit_ground() == []
    lonely = AdmissibleGraph(2, 2, [Edge(1, 2, 1), Edge(1, 3, 2),
                                    Edge(2, 1, 1), Edge(2, 3, 2)])
    assert lonely.unhit_ground() == [4]


@pytest.mark.parametrize("n,m,od,parallel,count", [
    (1, 1, 1, False, 1),
    (1, 2, 2, False, 2),    # two orders of hitting the two slots
    (2, 2, 2, False, 36),   # 6 ordered target pairs per aerial vertex
    (2, 2, 2, True, 81),    # 9 with repetition
    (3, 0, 1, False, 8),
])
def test_enumeration_counts(n, m, od, parallel, count):
    graphs = enumerate_graphs(n, m, od, allow_parallel=parallel)
    assert len(graphs) == count
    assert len(set(g.to_text() for g in graphs)) == count
    for g in graphs:
        assert all(g.out_degree(v) == od for v in range(1, n + 1))


def test_enumeration_empty_cases():
    assert enumerate_graphs(0, 2, 2) == []


def test_canonical_census_2_2():
    """The 36 labeled (2,2) out-degree-2 graphs pool into 6 classes."""
    classes = {}
    for g in enumerate_graphs(2, 2, 2):
        gc, par, cons = g.canonical_form()
        assert cons, g.to_text()
        classes.setdefault(gc.to_text(), []).append(par)
    assert len(classes) == 6
    assert sorted(len(v) for v in classes.values()) == [4, 4, 4, 8, 8, 8]


def test_canonical_form_idempotent():
    for g in enumerate_graphs(2, 2, 2):
        gc, _, _ = g.canonical_form()
        gc2, par2, _ = gc.canonical_form()
        assert gc2 == gc
        assert par2 == 1


def test_label_swap_is_odd():
    """Swapping the two edge labels at a star is an odd relabeling."""
    fan = fan_graph(2)
    swapped = AdmissibleGraph(1, 2, [Edge(1, 3, 1), Edge(1, 2, 2)])
    cf, pf, _ = fan.canonical_form()
    cs, ps, _ = swapped.canonical_form()
    assert cf == cs
    assert pf == -ps


def test_two_cycle_labelings_of_graph2():
    """graph2 with the other label order at vertex 1 sits in the same
    class with opposite parity."""
    flipped = AdmissibleGraph(2, 2, [Edge(1, 2, 1), Edge(1, 3, 2),
                                     Edge(2, 1, 1), Edge(2, 4, 2)])
    c1, p1, _ = graph2().canonical_form()
    c2, p2, _ = flipped.canonical_form()
    assert c1 == c2
    assert p1 == -p2


def test_aerial_two_cycle_has_odd_automorphism():
    g = cycle_graph(2)
    _, _, consistent = g.canonical_form()
    assert not consistent
    reason = exact_zero_reason(g)
    assert reason is not None and "automorphism" in reason


def test_wheel_graph_shape():
    g = wheel_graph(3)
    assert (g.n, g.m) == (4, 0)
    assert g.out_degree(4) == 3
    assert all(g.in_degree(k) == 2 for k in (1, 2, 3))
