import itertools

import pytest

from lexpack import (
    ConstructionError,
    EdgeType,
    Graph,
    SteinerTree,
    TerminalCase,
    TreePacking,
    classify_edge,
    classify_terminals,
    construct_packing,
    construct_packing_detailed,
    expected_tree_count,
    family,
    lex_product,
    verify_packing,
    xy_fan,
    zigzag_linkage,
)

P3 = family("path", 3)
P5 = family("path", 5)
E3 = family("empty", 3)
K3 = family("complete", 3)
K4 = family("complete", 4)


def test_classify_same_layer():
    prod = lex_product(P3, P3)
    cfg = classify_terminals(prod, [(0, 0), (0, 1), (0, 2)])
    assert cfg.case is TerminalCase.SAME_LAYER


def test_classify_two_in_one():
    prod = lex_product(P3, P3)
    cfg = classify_terminals(prod, [(0, 0), (0, 1), (1, 0)])
    assert cfg.case is TerminalCase.TWO_IN_ONE_LAYER
    assert cfg.subcase == "shared_coord"
    assert cfg.x == (0, 0) and cfg.z == (1, 0)  # lone terminal matches x
    cfg2 = classify_terminals(prod, [(0, 0), (0, 1), (1, 2)])
    assert cfg2.subcase == "distinct_coord"
    # canonicalization swaps the pair when the lone coordinate matches y
    cfg3 = classify_terminals(prod, [(0, 0), (0, 1), (1, 1)])
    assert cfg3.subcase == "shared_coord" and cfg3.x == (0, 1)


def test_classify_three_layers():
    prod = lex_product(P3, P3)
    assert classify_terminals(prod, [(0, 0), (1, 1), (2, 2)]).subcase == "none_aligned"
    assert classify_terminals(prod, [(0, 0), (1, 0), (2, 0)]).subcase == "all_aligned"
    cfg = classify_terminals(prod, [(0, 0), (1, 0), (2, 2)])
    assert cfg.subcase == "two_aligned"
    assert cfg.x[1] == cfg.y[1] != cfg.z[1]


def test_classify_rejects_duplicates():
    prod = lex_product(P3, P3)
    with pytest.raises(ValueError):
        classify_terminals(prod, [(0, 0), (0, 0), (1, 1)])
    # flat ids are accepted too
    cfg = classify_terminals(prod, [0, 1, 2])
    assert cfg.case is TerminalCase.SAME_LAYER


@pytest.mark.parametrize("n2", [2, 4])
def test_xy_fan(n2):
    h = family("empty", n2)
    prod = lex_product(P3, h)
    x, y = prod.flat(0, 0), prod.flat(0, 1)
    fans = xy_fan(prod, 0, 1, x, y)
    assert len(fans) == n2
    mids = set()
    for path in fans:
        assert path[0] == x and path[-1] == y and len(path) == 3
        mids.add(path[1])
    assert mids == set(prod.flat(1, c) for c in range(n2))


def test_xy_fan_forbidden_edge():
    prod = lex_product(P3, family("empty", 4))
    x, y = prod.flat(0, 0), prod.flat(0, 1)
    bad = (x, prod.flat(1, 0))
    with pytest.raises(ConstructionError):
        xy_fan(prod, 0, 1, x, y, forbidden={bad})


def test_zigzag_trivial_when_same_layer():
    prod = lex_product(P5, family("empty", 4))
    q = (0, 1, 2)  # a 2-edge witness path: no interior gap to bridge
    paths = zigzag_linkage(prod, q, 1, 1)
    assert all(len(p) == 1 for p in paths)
    assert [p[0] for p in paths] == [prod.flat(1, c) for c in range(4)]


def test_zigzag_parity():
    prod = lex_product(P5, family("empty", 4))
    # odd-length witness path: the far end lands on the successor coordinate
    q3 = (0, 1, 2, 3)
    paths = zigzag_linkage(prod, q3, 1, 2)
    for c, p in enumerate(paths):
        assert p[0] == prod.flat(1, c)
        assert p[-1] == prod.flat(2, (c + 1) % 4)
    # even length: the far end returns to the starting coordinate
    q4 = (0, 1, 2, 3, 4)
    paths = zigzag_linkage(prod, q4, 1, 3)
    for c, p in enumerate(paths):
        assert p[-1] == prod.flat(3, c)
    with pytest.raises(ValueError):
        zigzag_linkage(prod, q4, 3, 1)


def test_zigzag_paths_disjoint_and_skew():
    prod = lex_product(P5, family("empty", 4))
    paths = zigzag_linkage(prod, (0, 1, 2, 3, 4), 1, 3)
    seen = set()
    for p in paths:
        assert not (set(p) & seen)
        seen |= set(p)
        for a, b in zip(p, p[1:]):
            assert classify_edge(prod, (a, b)) is EdgeType.SKEW


def test_construct_p3_p3_all_triples():
    prod = lex_product(P3, P3)
    for terms in itertools.combinations(range(9), 3):
        packing = construct_packing(P3, P3, terms)
        assert len(packing.trees) == 4
        assert verify_packing(prod, packing).valid


def test_construct_disconnected_second_factor():
    packing = construct_packing(P3, E3, [(0, 0), (1, 1), (2, 2)])
    assert len(packing.trees) == 3  # no layer stage available
    prod = lex_product(P3, E3)
    assert verify_packing(prod, packing).valid


def test_construct_k4_k3():
    res = construct_packing_detailed(K4, K3, [(0, 0), (1, 1), (2, 2)])
    assert len(res.packing.trees) == 7 == expected_tree_count(K4, K3)
    assert res.layer_count == 1 and res.cross_count == 6


def test_construct_two_vertex_second_factor():
    res = construct_packing_detailed(K4, family("path", 2), [(0, 0), (1, 1), (2, 0)])
    assert len(res.packing.trees) == expected_tree_count(K4, family("path", 2)) == 4
    assert res.layer_count == 0
    assert any("two vertices" in note for note in res.notes)


def test_construct_preconditions():
    with pytest.raises(ValueError):
        construct_packing(Graph(4, [(0, 1), (2, 3)]), P3, [0, 1, 2])
    with pytest.raises(ValueError):
        construct_packing(family("path", 2), P3, [0, 1, 2])
    with pytest.raises(ValueError):
        construct_packing(P3, Graph(1, []), [0, 1, 2])
    with pytest.raises(ValueError):
        construct_packing(P3, P3, [0, 0, 1])


def test_stage_discipline():
    res = construct_packing_detailed(K4, K3, [(0, 0), (0, 1), (1, 0)])
    prod = lex_product(K4, K3)
    report = verify_packing(prod, res.packing, layer_tree_count=res.layer_count)
    assert report.valid
    for i in range(res.layer_count):
        assert not report.uses(i, EdgeType.SKEW)
    for i in range(res.layer_count, len(res.packing.trees)):
        assert not report.uses(i, EdgeType.IN_LAYER)


def test_verify_empty_packing():
    prod = lex_product(P3, P3)
    report = verify_packing(prod, TreePacking(frozenset({0, 1, 2}), ()))
    assert report.valid and report.size == 0


def test_verify_flags_shared_edge():
    prod = lex_product(P3, P3)
    packing = construct_packing(P3, P3, (0, 1, 2))
    tainted = list(packing.trees)
    # duplicate one tree so an edge is shared
    tainted.append(tainted[0])
    report = verify_packing(prod, TreePacking(packing.terminals, tuple(tainted)))
    assert not report.valid
    assert any("share edge" in p for p in report.problems)
    shared = sorted(tainted[0].edges)[0]
    assert any(str(shared) in p for p in report.problems)


def test_verify_flags_mixed_tree():
    prod = lex_product(P3, P3)
    # a tree mixing an in-layer edge with a skew edge
    mixed = SteinerTree(
        frozenset({prod.flat(0, 0), prod.flat(0, 1), prod.flat(1, 2)}),
        frozenset(
            {
                (prod.flat(0, 0), prod.flat(0, 1)),
                (prod.flat(0, 1), prod.flat(1, 2)),
            }
        ),
    )
    report = verify_packing(prod, TreePacking(mixed.terminals, (mixed,)))
    assert not report.valid
    assert any("mixes" in p for p in report.problems)


def test_count_formula_across_pairs():
    pairs = [
        (P3, P3, 4),
        (P3, E3, 3),
        (K4, K3, 7),
        (family("cycle", 4), family("cycle", 4), 5),
        (K4, family("cycle", 4), 9),
    ]
    for g, h, want in pairs:
        assert expected_tree_count(g, h) == want
