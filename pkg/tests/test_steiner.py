import itertools

import pytest

from lexpack import (
    Graph,
    SteinerTree,
    TreePacking,
    TreeType,
    edge_connectivity,
    family,
    find_disjoint_trees,
    is_steiner_tree,
    lambda_k,
    lambda_k_witness,
    min_degree,
    normalize_packing,
    steiner_packing_number,
    tree_type,
)
from oracles import max_packing_bruteforce

P3 = family("path", 3)
P4 = family("path", 4)
K4 = family("complete", 4)
K5 = family("complete", 5)
C5 = family("cycle", 5)


def test_is_steiner_tree_examples():
    assert is_steiner_tree(P3, {(0, 1), (1, 2)}, {0, 1, 2})
    assert not is_steiner_tree(K4, {(0, 1), (2, 3)}, {0, 1, 2, 3})
    assert not is_steiner_tree(K4, {(0, 1), (1, 2), (0, 2)}, {0, 1, 2})
    with pytest.raises(ValueError):
        is_steiner_tree(P3, {(0, 2)}, {0, 2})


def test_tree_type_examples():
    path = SteinerTree(frozenset({0, 1, 2}), frozenset({(0, 2), (1, 2)}))
    assert tree_type(path) is TreeType.PATH
    star = SteinerTree(frozenset({0, 1, 2}), frozenset({(0, 3), (1, 3), (2, 3)}))
    assert tree_type(star) is TreeType.TRIPOD
    unreduced = SteinerTree(
        frozenset({0, 1, 2}), frozenset({(0, 1), (1, 2), (2, 3)})
    )
    with pytest.raises(ValueError, match="leaf"):
        tree_type(unreduced)


def test_packing_number_k4():
    count, packing = steiner_packing_number(K4, (0, 1, 2))
    assert count == 2
    assert count == max_packing_bruteforce(K4, (0, 1, 2))
    assert packing.is_edge_disjoint()
    for tree in packing.trees:
        assert is_steiner_tree(K4, tree.edges, {0, 1, 2})


def test_packing_number_tree_host():
    count, packing = steiner_packing_number(P4, (0, 1, 3))
    assert count == 1
    assert len(packing.trees) == 1


def test_packing_number_disconnected():
    g = Graph(5, [(0, 1), (1, 2), (3, 4)])
    count, packing = steiner_packing_number(g, (0, 1, 3))
    assert count == 0 and packing.trees == ()


@pytest.mark.parametrize(
    "g,expect",
    [(K4, 2), (C5, 1), (family("complete", 3), 1), (P3, 1)],
)
def test_lambda3_small(g, expect):
    assert lambda_k(g, 3) == expect


def test_lambda3_matches_bruteforce_oracle():
    graphs = [
        K4,
        C5,
        Graph(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2), (1, 3)]),
        Graph(4, [(0, 1), (1, 2), (2, 0), (0, 3)]),
    ]
    for g in graphs:
        expected = min(
            max_packing_bruteforce(g, s)
            for s in itertools.combinations(range(g.n), 3)
        )
        assert lambda_k(g, 3) == expected


def test_lambda_k_validation_and_disconnected():
    with pytest.raises(ValueError):
        lambda_k(K4, 1)
    with pytest.raises(ValueError):
        lambda_k(K4, 5)
    assert lambda_k(Graph(4, [(0, 1), (2, 3)]), 3) == 0


def test_lambda_k_four_terminals_smoke():
    star = Graph(5, [(0, 1), (0, 2), (0, 3), (0, 4)])
    assert lambda_k(star, 4) == 1
    assert lambda_k(K5, 4) >= 2


def test_lambda_witness_is_valid():
    value, terms, packing = lambda_k_witness(K4, 3)
    assert value == 2 and len(terms) == 3
    assert len(packing.trees) == 2
    assert packing.is_edge_disjoint()


def test_chain_inequalities_small_corpus():
    graphs = [P3, P4, K4, K5, C5, Graph(5, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4)])]
    for g in graphs:
        l3 = lambda_k(g, 3)
        lam = edge_connectivity(g)
        assert l3 <= lam <= min_degree(g)
        for u, v in g.edge_list:
            assert max(g.degree(u), g.degree(v)) >= l3 + 1


def test_normalize_identity_when_clean():
    trees = (
        SteinerTree(frozenset({0, 1, 2}), frozenset({(0, 3), (1, 3), (2, 3)})),
    )
    packing = TreePacking(frozenset({0, 1, 2}), trees)
    assert normalize_packing(K4, packing) is packing


def test_normalize_two_touching_untouched():
    trees = (
        SteinerTree(frozenset({0, 1, 2}), frozenset({(0, 1), (1, 2)})),
        SteinerTree(frozenset({0, 1, 2}), frozenset({(0, 3), (1, 3), (2, 3)})),
    )
    packing = TreePacking(frozenset({0, 1, 2}), trees)
    assert normalize_packing(K4, packing) is packing


def test_normalize_rewires_three_touching():
    # maximum packing of the complete graph on 5 vertices in which all
    # three trees use an edge induced on the terminals
    terms = frozenset({0, 1, 2})
    trees = (
        SteinerTree(terms, frozenset({(0, 1), (1, 3), (2, 3)})),
        SteinerTree(terms, frozenset({(1, 2), (2, 4), (0, 4)})),
        SteinerTree(terms, frozenset({(0, 2), (0, 3), (3, 4), (1, 4)})),
    )
    packing = TreePacking(terms, trees)
    inside = K5.induced_edges(terms)
    assert all(t.edges & inside for t in trees)
    fixed = normalize_packing(K5, packing)
    assert len(fixed.trees) == 3
    assert fixed.is_edge_disjoint()
    for tree in fixed.trees:
        assert is_steiner_tree(K5, tree.edges, terms)
    assert sum(1 for t in fixed.trees if t.edges & inside) <= 2
    # rewiring stays inside the union of the three original trees
    assert fixed.all_edges() <= packing.all_edges()


def test_normalize_validates_terminal_count():
    packing = TreePacking(frozenset({0, 1}), ())
    with pytest.raises(ValueError):
        normalize_packing(K4, packing)


def test_find_disjoint_trees_pool():
    pool = {(0, 1), (1, 2), (0, 3), (1, 3), (2, 3)}
    found = find_disjoint_trees(K4, (0, 1, 2), 2, allowed_edges=pool)
    assert found is not None and len(found) == 2
    used = set()
    for tree in found:
        assert tree.edges <= frozenset(pool)
        assert not (tree.edges & used)
        used |= tree.edges
    assert find_disjoint_trees(K4, (0, 1, 2), 3, allowed_edges=pool) is None
