import itertools

import pytest

from lexpack import (
    EdgeType,
    Graph,
    classify_edge,
    family,
    g_layer,
    g_layer_edges,
    gh_subproduct_edges,
    h_layer,
    h_layer_edges,
    hg_subproduct_edges,
    is_connected,
    k_subgraph,
    lex_product,
)
from oracles import product_edges_by_definition

P3 = family("path", 3)
K2 = family("complete", 2)
K4 = family("complete", 4)


def test_p3_p3_counts_and_definition():
    prod = lex_product(P3, P3)
    assert prod.graph.n == 9
    assert prod.graph.m == 2 * 9 + 3 * 2 == 24
    assert set(prod.graph.edge_list) == product_edges_by_definition(P3, P3)


def test_k2_k2_is_complete():
    prod = lex_product(K2, K2)
    assert prod.graph == family("complete", 4)


def test_disconnected_first_factor():
    g = Graph(4, [(0, 1), (2, 3)])
    prod = lex_product(g, P3)
    assert not is_connected(prod.graph)
    # and conversely, a disconnected second factor stays connected
    assert is_connected(lex_product(P3, family("empty", 3)).graph)


@pytest.mark.parametrize(
    "g,h",
    [
        (P3, P3),
        (K4, family("cycle", 4)),
        (family("cycle", 5), family("empty", 3)),
        (family("path", 4), K2),
    ],
)
def test_edge_count_identity_and_degrees(g, h):
    prod = lex_product(g, h)
    assert prod.graph.m == g.m * h.n * h.n + g.n * h.m
    for u in range(g.n):
        for v in range(h.n):
            assert prod.graph.degree(prod.flat(u, v)) == g.degree(u) * h.n + h.degree(v)
    assert set(prod.graph.edge_list) == product_edges_by_definition(g, h)


def test_classify_edge_examples():
    prod = lex_product(P3, P3)
    assert classify_edge(prod, (prod.flat(0, 0), prod.flat(1, 0))) is EdgeType.ALIGNED
    assert classify_edge(prod, (prod.flat(0, 0), prod.flat(0, 1))) is EdgeType.IN_LAYER
    assert classify_edge(prod, (prod.flat(0, 0), prod.flat(1, 1))) is EdgeType.SKEW
    with pytest.raises(ValueError):
        classify_edge(prod, (prod.flat(0, 0), prod.flat(2, 0)))


@pytest.mark.parametrize("g,h", [(P3, P3), (K4, P3), (P3, family("cycle", 4))])
def test_classification_partitions(g, h):
    prod = lex_product(g, h)
    counts = {t: 0 for t in EdgeType}
    for e in prod.graph.edge_list:
        counts[classify_edge(prod, e)] += 1
    assert counts[EdgeType.ALIGNED] == g.m * h.n
    assert counts[EdgeType.IN_LAYER] == g.n * h.m
    assert counts[EdgeType.SKEW] == g.m * h.n * (h.n - 1)


def test_layers():
    prod = lex_product(P3, P3)
    assert h_layer(prod, 1) == (3, 4, 5)
    assert g_layer(prod, 0) == (0, 3, 6)
    # induced copies via the identity coordinate map
    assert h_layer_edges(prod, 1) == frozenset({(3, 4), (4, 5)})
    assert g_layer_edges(prod, 0) == frozenset({(0, 3), (3, 6)})
    mixed = lex_product(K2, P3)
    assert h_layer_edges(mixed, 0) == frozenset({(0, 1), (1, 2)})
    with pytest.raises(ValueError):
        h_layer(prod, 3)
    with pytest.raises(ValueError):
        g_layer(prod, -1)


def test_k_subgraph_adjacent_pair():
    prod = lex_product(P3, P3)
    sub, index_map = k_subgraph(prod, [0, 1])
    assert sub.n == 6 and sub.m == 9  # one first-factor edge x 3^2
    assert index_map == (0, 1, 2, 3, 4, 5)
    # complete bipartite between the two layers, nothing inside them
    for i in range(3):
        for j in range(3, 6):
            assert sub.has_edge(i, j)
    assert not any(sub.has_edge(i, j) for i in range(3) for j in range(3) if i != j)


def test_k_subgraph_non_adjacent_and_small():
    prod = lex_product(P3, P3)
    sub, _ = k_subgraph(prod, [0, 2])
    assert sub.m == 0
    prod22 = lex_product(K2, K2)
    sub22, _ = k_subgraph(prod22, [0, 1])
    assert sub22.m == 4
    with pytest.raises(ValueError):
        k_subgraph(prod, [1])


def test_not_commutative():
    star = Graph(4, [(0, 1), (0, 2), (0, 3)])
    ab = lex_product(star, P3)
    ba = lex_product(P3, star)
    assert ab.graph.m == 3 * 9 + 4 * 2 == 35
    assert ba.graph.m == 2 * 16 + 3 * 3 == 41
    assert ab.graph.m != ba.graph.m


def test_union_intersection_identity_left():
    # two edge-disjoint trees in the second factor, sharing vertices
    h = Graph(4, [(0, 1), (1, 2), (2, 3), (0, 3), (0, 2)])
    t1 = {(0, 1), (1, 2)}
    t2 = {(0, 3), (2, 3)}
    g = K4
    prod = lex_product(g, h)
    union = gh_subproduct_edges(prod, {0, 1, 2, 3}, t1 | t2)
    assert union == gh_subproduct_edges(prod, {0, 1, 2}, t1) | gh_subproduct_edges(
        prod, {0, 2, 3}, t2
    )
    shared = {0, 2}  # vertex intersection of the two trees
    inter = gh_subproduct_edges(prod, {0, 1, 2}, t1) & gh_subproduct_edges(
        prod, {0, 2, 3}, t2
    )
    layer_copies = frozenset(
        e for v in shared for e in g_layer_edges(prod, v)
    )
    assert inter == gh_subproduct_edges(prod, shared) - layer_copies


def test_union_intersection_identity_right():
    g = Graph(4, [(0, 1), (1, 2), (2, 3), (0, 3), (0, 2)])
    t1 = {(0, 1), (1, 2)}
    t2 = {(0, 3), (2, 3)}
    h = P3
    prod = lex_product(g, h)
    union = hg_subproduct_edges(prod, {0, 1, 2, 3}, t1 | t2)
    assert union == hg_subproduct_edges(prod, {0, 1, 2}, t1) | hg_subproduct_edges(
        prod, {0, 2, 3}, t2
    )
    inter = hg_subproduct_edges(prod, {0, 1, 2}, t1) & hg_subproduct_edges(
        prod, {0, 2, 3}, t2
    )
    assert inter == frozenset(
        e for u in (0, 2) for e in h_layer_edges(prod, u)
    )


def test_flat_coords_round_trip():
    prod = lex_product(family("path", 4), family("cycle", 3))
    for u, v in itertools.product(range(4), range(3)):
        assert prod.coords(prod.flat(u, v)) == (u, v)
    assert prod.vertex_label(prod.flat(2, 1)) == "(2,1)"
    with pytest.raises(ValueError):
        prod.flat(4, 0)
    with pytest.raises(ValueError):
        prod.coords(12)
