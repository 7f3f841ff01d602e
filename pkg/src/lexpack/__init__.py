"""Exact 3-terminal edge-disjoint tree packing on lexicographic products.

Library surface: simple graphs and standard families, lexicographic
products with layer/edge-class tooling, Menger path systems via max flow,
exact Steiner-tree packing numbers with witnesses, the constructive
product packing, and certified bound audits.
"""

from .graphs import (
    Graph,
    family,
    from_edgelist_text,
    from_json_obj,
    is_connected,
    load_edgelist,
    load_graph,
    load_json,
    min_degree,
    new_graph,
    save_edgelist,
    save_json,
    to_edgelist_text,
    to_json_obj,
)
from .product import (
    EdgeType,
    ProductGraph,
    classify_edge,
    g_layer,
    g_layer_edges,
    gh_subproduct_edges,
    h_layer,
    h_layer_edges,
    hg_subproduct_edges,
    k_subgraph,
    lex_product,
)
from .connectivity import (
    PathSystem,
    disjoint_paths,
    edge_connectivity,
    local_edge_connectivity,
    min_cut_bruteforce,
)
from .steiner import (
    SearchBudgetExceeded,
    SteinerTree,
    TreePacking,
    TreeType,
    find_disjoint_trees,
    is_steiner_tree,
    lambda_k,
    lambda_k_witness,
    normalize_packing,
    steiner_packing_number,
    tree_type,
)
from .construct import (
    ConstructionError,
    ConstructionResult,
    LayerConfig,
    PackingReport,
    TerminalCase,
    classify_terminals,
    construct_packing,
    construct_packing_detailed,
    expected_tree_count,
    verify_packing,
    xy_fan,
    zigzag_linkage,
)
from .bounds import (
    AuditFailure,
    BoundReport,
    audit,
    connected_graphs,
    corpus_inequality_scan,
    factor_inequalities,
    lower_bound_thm1,
    prop42_lower,
    upper_bound_thm2,
    yangxu_lambda,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
