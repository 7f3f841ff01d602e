"""Local edge-connectivity via unit-capacity max flow, with path witnesses.

The flow decomposition is post-processed into simple paths and sorted by
non-decreasing length (ties broken lexicographically on the vertex
sequence), because the constructive packing code indexes into path
interiors and needs reproducible witnesses.
"""

from __future__ import annotations

from dataclasses import dataclass

from .graphs import Graph, is_connected


@dataclass(frozen=True)
class PathSystem:
    """An ordered family of pairwise edge-disjoint source->sink paths."""

    source: int
    sink: int
    paths: tuple[tuple[int, ...], ...]

    @property
    def lengths(self) -> tuple[int, ...]:
        return tuple(len(p) - 1 for p in self.paths)

    def edge_sets(self) -> tuple[frozenset[tuple[int, int]], ...]:
        out = []
        for p in self.paths:
            out.append(
                frozenset(
                    (a, b) if a < b else (b, a) for a, b in zip(p, p[1:])
                )
            )
        return tuple(out)

    def first_neighbors(self) -> tuple[int, ...]:
        """Second vertex of each path (distinct across an edge-disjoint system)."""
        return tuple(p[1] for p in self.paths)


def _max_flow_unit(g: Graph, s: int, t: int) -> tuple[int, dict[tuple[int, int], int]]:
    """Edmonds-Karp on the bidirected unit-capacity version of g."""
    flow: dict[tuple[int, int], int] = {}
    for u, v in g.edge_list:
        flow[(u, v)] = 0
        flow[(v, u)] = 0
    value = 0
    while True:
        # BFS over residual arcs; residual cap of (a,b) is 1 - f(a,b) + f(b,a)
        parent = {s: None}
        queue = [s]
        qi = 0
        while qi < len(queue) and t not in parent:
            a = queue[qi]
            qi += 1
            for b in g.neighbors(a):
                if b not in parent and 1 - flow[(a, b)] + flow[(b, a)] > 0:
                    parent[b] = a
                    queue.append(b)
        if t not in parent:
            return value, flow
        b = t
        while parent[b] is not None:
            a = parent[b]
            if flow[(b, a)] > 0:
                flow[(b, a)] -= 1
            else:
                flow[(a, b)] += 1
            b = a
        value += 1


def local_edge_connectivity(g: Graph, u: int, v: int) -> int:
    """Maximum number of pairwise edge-disjoint u-v paths."""
    if u == v:
        raise ValueError("endpoints must be distinct")
    if not (0 <= u < g.n and 0 <= v < g.n):
        raise ValueError(f"vertex out of range: ({u},{v})")
    value, _ = _max_flow_unit(g, u, v)
    return value


def edge_connectivity(g: Graph) -> int:
    """Global edge-connectivity; 0 iff disconnected."""
    if g.n < 2:
        raise ValueError("edge connectivity needs at least 2 vertices")
    if not is_connected(g):
        return 0
    return min(local_edge_connectivity(g, 0, v) for v in range(1, g.n))


def _simplify_walk(walk: list[int]) -> list[int]:
    """Cut cycles out of a walk so it becomes a simple path."""
    out: list[int] = []
    pos: dict[int, int] = {}
    for w in walk:
        if w in pos:
            del_from = pos[w] + 1
            for dropped in out[del_from:]:
                del pos[dropped]
            del out[del_from:]
        else:
            out.append(w)
            pos[w] = len(out) - 1
    return out


def disjoint_paths(g: Graph, u: int, v: int, k: int) -> PathSystem:
    """Exactly k pairwise edge-disjoint u-v paths, shortest first.

    Raises if k exceeds the local edge-connectivity. Flow paths that cross
    themselves are shortcut to simple paths before sorting.
    """
    if u == v:
        raise ValueError("endpoints must be distinct")
    if k < 1:
        raise ValueError(f"need k >= 1, got {k}")
    value, flow = _max_flow_unit(g, u, v)
    if k > value:
        raise ValueError(
            f"requested {k} edge-disjoint paths but connectivity is {value}"
        )
    # Cancel opposite unit flows so each undirected edge carries at most one.
    for a, b in g.edge_list:
        if flow[(a, b)] == 1 and flow[(b, a)] == 1:
            flow[(a, b)] = 0
            flow[(b, a)] = 0
    walks: list[list[int]] = []
    for _ in range(value):
        walk = [u]
        a = u
        while a != v:
            nxt = None
            for b in g.neighbors(a):
                if flow[(a, b)] == 1:
                    nxt = b
                    break
            if nxt is None:
                raise AssertionError("flow conservation violated during trace")
            flow[(a, nxt)] = 0
            walk.append(nxt)
            a = nxt
        walks.append(_simplify_walk(walk))
    walks.sort(key=lambda p: (len(p), p))
    return PathSystem(source=u, sink=v, paths=tuple(tuple(p) for p in walks[:k]))


def min_cut_bruteforce(g: Graph, u: int, v: int) -> int:
    """Independent oracle: minimum u-v edge cut by bipartition enumeration.

    Enumerates all 2^(n-2) vertex bipartitions separating u from v and
    counts crossing edges. Only for small graphs.
    """
    others = [w for w in range(g.n) if w not in (u, v)]
    best = g.m + 1
    for mask in range(1 << len(others)):
        side = {u}
        for i, w in enumerate(others):
            if mask >> i & 1:
                side.add(w)
        crossing = sum(1 for a, b in g.edge_list if (a in side) != (b in side))
        if crossing < best:
            best = crossing
    return best
