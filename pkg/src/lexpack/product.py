"""Lexicographic products, layers, and edge classification.

A product vertex (u, v) is flattened to u * n2 + v, so each copy of the
second factor sits on a contiguous index range.

Edges fall into three classes:

* ALIGNED   -- endpoints in different copies, same second coordinate
               (a copy of a first-factor edge);
* IN_LAYER  -- endpoints in the same copy (a second-factor edge);
* SKEW      -- endpoints in different copies, different second coordinates.
"""

from __future__ import annotations

import enum
from typing import Iterable

from .graphs import Graph

Edge = tuple[int, int]


class EdgeType(enum.Enum):
    ALIGNED = "aligned"
    IN_LAYER = "in_layer"
    SKEW = "skew"


class ProductGraph:
    """A Graph on n1*n2 vertices plus factor provenance and index maps."""

    __slots__ = ("graph", "left", "right", "n1", "n2")

    def __init__(self, left: Graph, right: Graph):
        self.left = left
        self.right = right
        self.n1 = left.n
        self.n2 = right.n
        edges: list[Edge] = []
        n2 = right.n
        for u, up in left.edge_list:
            for v in range(n2):
                for vp in range(n2):
                    edges.append((u * n2 + v, up * n2 + vp))
        for u in range(left.n):
            base = u * n2
            for v, vp in right.edge_list:
                edges.append((base + v, base + vp))
        self.graph = Graph(left.n * right.n, edges)

    def flat(self, u: int, v: int) -> int:
        if not (0 <= u < self.n1 and 0 <= v < self.n2):
            raise ValueError(f"coordinates ({u},{v}) out of range")
        return u * self.n2 + v

    def coords(self, i: int) -> tuple[int, int]:
        if not (0 <= i < self.n1 * self.n2):
            raise ValueError(f"flat index {i} out of range")
        return divmod(i, self.n2)

    def vertex_label(self, i: int) -> str:
        u, v = self.coords(i)
        return f"({u},{v})"

    def __repr__(self) -> str:
        return f"ProductGraph(n1={self.n1}, n2={self.n2}, m={self.graph.m})"


def lex_product(g: Graph, h: Graph) -> ProductGraph:
    """Build the lexicographic product of g with h.

    (u,v) ~ (u',v') iff uu' is an edge of g, or u = u' and vv' is an edge
    of h. Not commutative in general.
    """
    return ProductGraph(g, h)


def classify_edge(p: ProductGraph, e: Edge) -> EdgeType:
    a, b = e
    key = (a, b) if a < b else (b, a)
    if key not in p.graph.edges:
        raise ValueError(f"{key} is not an edge of the product")
    (u, v), (up, vp) = p.coords(a), p.coords(b)
    if u == up:
        return EdgeType.IN_LAYER
    if v == vp:
        return EdgeType.ALIGNED
    return EdgeType.SKEW


def h_layer(p: ProductGraph, u: int) -> tuple[int, ...]:
    """Flat vertex ids of the copy of the second factor over vertex u."""
    if not (0 <= u < p.n1):
        raise ValueError(f"first-factor vertex {u} out of range")
    base = u * p.n2
    return tuple(range(base, base + p.n2))


def g_layer(p: ProductGraph, v: int) -> tuple[int, ...]:
    """Flat vertex ids of the copy of the first factor at coordinate v."""
    if not (0 <= v < p.n2):
        raise ValueError(f"second-factor vertex {v} out of range")
    return tuple(u * p.n2 + v for u in range(p.n1))


def h_layer_edges(p: ProductGraph, u: int) -> frozenset[Edge]:
    """IN_LAYER edges of the copy over u (isomorphic to the second factor)."""
    base = u * p.n2
    return frozenset(
        (base + v, base + vp) for v, vp in p.right.edge_list
    )


def g_layer_edges(p: ProductGraph, v: int) -> frozenset[Edge]:
    """ALIGNED edges at coordinate v (isomorphic to the first factor)."""
    return frozenset(
        (u * p.n2 + v, up * p.n2 + v) for u, up in p.left.edge_list
    )


def k_subgraph(p: ProductGraph, w: Iterable[int]) -> tuple[Graph, tuple[int, ...]]:
    """Inter-layer subgraph over the layers of w.

    Keeps only ALIGNED and SKEW edges between the copies over w (the
    in-layer edges are stripped). Returns a re-indexed Graph together with
    the map from its vertex indices back to flat product ids, so path and
    packing searches can run on it unmodified.
    """
    ws = sorted(set(w))
    if len(ws) < 2:
        raise ValueError("need at least two first-factor vertices")
    for u in ws:
        if not (0 <= u < p.n1):
            raise ValueError(f"first-factor vertex {u} out of range")
    index_map = tuple(u * p.n2 + v for u in ws for v in range(p.n2))
    back = {flat: i for i, flat in enumerate(index_map)}
    wset = set(ws)
    edges = []
    for u, up in p.left.edge_list:
        if u in wset and up in wset:
            for v in range(p.n2):
                for vp in range(p.n2):
                    edges.append((back[u * p.n2 + v], back[up * p.n2 + vp]))
    return Graph(len(index_map), edges), index_map


# -- sub-product edge sets ----------------------------------------------
#
# Test-support operations: the edge set, inside an existing product, of the
# product of one factor with a subgraph of the other. Used to check the
# union/intersection identities for products of edge-disjoint trees.


def gh_subproduct_edges(
    p: ProductGraph,
    h_vertices: Iterable[int],
    h_edges: Iterable[Edge] = (),
) -> frozenset[Edge]:
    """Edges of (first factor) o T where T is a subgraph of the second."""
    vs = sorted(set(h_vertices))
    out: set[Edge] = set()
    for u, up in p.left.edge_list:
        for v in vs:
            for vp in vs:
                a, b = u * p.n2 + v, up * p.n2 + vp
                out.add((a, b) if a < b else (b, a))
    for v, vp in h_edges:
        for u in range(p.n1):
            a, b = u * p.n2 + v, u * p.n2 + vp
            out.add((a, b) if a < b else (b, a))
    return frozenset(out)


def hg_subproduct_edges(
    p: ProductGraph,
    g_vertices: Iterable[int],
    g_edges: Iterable[Edge] = (),
) -> frozenset[Edge]:
    """Edges of T o (second factor) where T is a subgraph of the first."""
    us = sorted(set(g_vertices))
    out: set[Edge] = set()
    for u, up in g_edges:
        for v in range(p.n2):
            for vp in range(p.n2):
                a, b = u * p.n2 + v, up * p.n2 + vp
                out.add((a, b) if a < b else (b, a))
    for u in us:
        base = u * p.n2
        for v, vp in p.right.edge_list:
            out.add((base + v, base + vp))
    return frozenset(out)
