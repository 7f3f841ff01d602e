import pytest

from lexpack import (
    AuditFailure,
    Graph,
    audit,
    connected_graphs,
    factor_inequalities,
    family,
    lower_bound_thm1,
    prop42_lower,
    upper_bound_thm2,
    yangxu_lambda,
    edge_connectivity,
    lex_product,
)

P3 = family("path", 3)
P4 = family("path", 4)
E3 = family("empty", 3)
K2 = family("complete", 2)
K3 = family("complete", 3)
K4 = family("complete", 4)


def test_lower_bound_examples():
    assert lower_bound_thm1(P3, P3) == 1 + 1 * 3 == 4
    assert lower_bound_thm1(P3, E3) == 0 + 1 * 3 == 3
    assert lower_bound_thm1(K4, K3) == 1 + 2 * 3 == 7
    with pytest.raises(ValueError):
        lower_bound_thm1(Graph(4, [(0, 1), (2, 3)]), P3)


def test_upper_bound_examples():
    assert upper_bound_thm2(P3, P3) == min(2 * 9, 1 + 3) == 4
    assert upper_bound_thm2(K4, K3) == min(3 * 9, 2 + 9) == 11
    assert upper_bound_thm2(P4, P3) == 4
    with pytest.raises(ValueError):
        upper_bound_thm2(K2, P3)  # undefined for a 2-vertex first factor


def test_yangxu_examples():
    assert yangxu_lambda(P3, P3) == min(9, 4) == 4
    assert yangxu_lambda(P3, P3) == edge_connectivity(lex_product(P3, P3).graph)
    assert yangxu_lambda(K2, K2) == 3 == edge_connectivity(family("complete", 4))
    assert yangxu_lambda(P3, E3) == min(9, 3) == 3
    assert yangxu_lambda(P3, E3) == edge_connectivity(lex_product(P3, E3).graph)


def test_prop42_values():
    assert prop42_lower(0) == 0
    assert prop42_lower(3) == 2
    assert prop42_lower(4) == 3
    assert prop42_lower(5) == 4
    assert prop42_lower(11) == 8
    with pytest.raises(ValueError):
        prop42_lower(-1)


def test_audit_p3_p3_exact_closure():
    report = audit(P3, P3, exact=True)
    assert report.lower_thm1 == report.constructed == 4
    assert report.exact_lambda3 == 4 and report.upper_thm2 == 4
    assert report.exact_method == "closure"
    assert report.yangxu_direct == 4
    assert all(report.checks.values())
    d = report.to_dict()
    assert d["schema"] == 1 and d["lower_thm1"] == 4


def test_audit_p3_p4_closure_without_search():
    report = audit(P3, P4, exact=True)
    assert report.lower_thm1 == 5
    assert report.upper_thm2 == 1 + 1 * 4 == 5
    assert report.exact_lambda3 == 5
    assert report.exact_method == "closure"


def test_audit_k4_k3_exact_by_search():
    report = audit(K4, K3, exact=True, budget=70)
    assert report.exact_method == "search"
    assert 7 <= report.exact_lambda3 <= 11
    assert report.lower_thm1 == 7 and report.upper_thm2 == 11
    assert report.exact_lambda3 == 10


def test_audit_budget_skip():
    report = audit(K4, K3, exact=True, budget=30)
    assert report.exact_lambda3 is None
    assert report.exact_method == "skipped_budget"


def test_audit_rejects_bad_factors():
    with pytest.raises(ValueError):
        audit(K2, P3)
    with pytest.raises(ValueError):
        audit(Graph(4, [(0, 1), (2, 3)]), P3)


def test_audit_failure_type():
    assert issubclass(AuditFailure, Exception)


def test_factor_inequalities_on_k4():
    checks = factor_inequalities(K4)
    assert checks["lambda3_le_lambda"] and checks["lambda_le_delta"]
    assert checks["adjacent_min_degree_cap"]
    assert checks["prop42_le_lambda3"]


def test_connected_graph_counts():
    assert sum(1 for _ in connected_graphs(3)) == 4
    assert sum(1 for _ in connected_graphs(4)) == 38
    # up to isomorphism: 2 on three vertices, 6 on four, 21 on five
    assert sum(1 for _ in connected_graphs(3, dedup=True)) == 2
    assert sum(1 for _ in connected_graphs(4, dedup=True)) == 6
    assert sum(1 for _ in connected_graphs(5, dedup=True)) == 21
