"""Steiner trees, exact edge-disjoint tree packing, and generalized
k-edge-connectivity.

The packing number for a terminal set is computed exactly: cheap upper
bounds (terminal degrees, adjacent-pair slot counting, pairwise max flow)
are matched against a greedy packing, and only when a gap remains does a
branch-and-bound over explicitly enumerated reduced trees close it. All
orderings are deterministic so witnesses are reproducible.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass

from .graphs import Graph, is_connected
from .connectivity import disjoint_paths, _max_flow_unit

Edge = tuple[int, int]


class TreeType(enum.Enum):
    """Shape of a reduced 3-terminal tree."""

    PATH = "path"       # a path whose two end vertices are terminals
    TRIPOD = "tripod"   # three terminal leaves joined at one branch vertex


class SearchBudgetExceeded(Exception):
    """Raised when a packing search exceeds its node budget."""


@dataclass(frozen=True)
class SteinerTree:
    terminals: frozenset[int]
    edges: frozenset[Edge]

    @property
    def vertices(self) -> frozenset[int]:
        if not self.edges:
            return self.terminals
        return frozenset(v for e in self.edges for v in e)

    def sorted_edges(self) -> tuple[Edge, ...]:
        return tuple(sorted(self.edges))


@dataclass(frozen=True)
class TreePacking:
    terminals: frozenset[int]
    trees: tuple[SteinerTree, ...]

    def __len__(self) -> int:
        return len(self.trees)

    def all_edges(self) -> frozenset[Edge]:
        return frozenset(e for t in self.trees for e in t.edges)

    def is_edge_disjoint(self) -> bool:
        total = sum(len(t.edges) for t in self.trees)
        return total == len(self.all_edges())


def _normalize_edge(e: Edge) -> Edge:
    a, b = e
    return (a, b) if a < b else (b, a)


def is_steiner_tree(g: Graph, edges, terminals) -> bool:
    """True iff `edges` form a tree whose vertex set contains `terminals`."""
    es = {_normalize_edge(e) for e in edges}
    for e in es:
        if e not in g.edges:
            raise ValueError(f"edge {e} is not in the host graph")
    ts = set(terminals)
    if not es:
        return len(ts) == 1
    verts = {v for e in es for v in e}
    if not ts <= verts:
        return False
    if len(es) != len(verts) - 1:
        return False
    adj: dict[int, list[int]] = {v: [] for v in verts}
    for a, b in es:
        adj[a].append(b)
        adj[b].append(a)
    start = next(iter(verts))
    seen = {start}
    stack = [start]
    while stack:
        a = stack.pop()
        for b in adj[a]:
            if b not in seen:
                seen.add(b)
                stack.append(b)
    return len(seen) == len(verts)


def tree_type(tree: SteinerTree) -> TreeType:
    """Classify a reduced 3-terminal tree as PATH or TRIPOD.

    Raises on trees that are not reduced (a leaf outside the terminal set)
    or not valid 3-terminal trees.
    """
    ts = tree.terminals
    if len(ts) != 3:
        raise ValueError(f"classification needs exactly 3 terminals, got {len(ts)}")
    verts = tree.vertices
    if not ts <= verts or len(tree.edges) != len(verts) - 1:
        raise ValueError("not a valid tree on its terminal set")
    deg: dict[int, int] = {v: 0 for v in verts}
    for a, b in tree.edges:
        deg[a] += 1
        deg[b] += 1
    leaves = [v for v, d in deg.items() if d == 1]
    for leaf in leaves:
        if leaf not in ts:
            raise ValueError(f"unreduced tree: leaf {leaf} is not a terminal")
    if len(leaves) == 2:
        return TreeType.PATH
    if len(leaves) == 3:
        return TreeType.TRIPOD
    raise ValueError(f"unexpected leaf count {len(leaves)} for 3 terminals")


# -- indexed search view -------------------------------------------------


class _SearchGraph:
    """Edge-indexed bitmask view of a Graph."""

    def __init__(self, g: Graph):
        self.g = g
        self.n = g.n
        self.edges = list(g.edge_list)
        self.m = len(self.edges)
        self.full_mask = (1 << self.m) - 1
        self.eidx = {e: i for i, e in enumerate(self.edges)}
        self.inc = [0] * g.n
        self.adj: list[list[tuple[int, int]]] = [[] for _ in range(g.n)]
        for i, (u, v) in enumerate(self.edges):
            self.inc[u] |= 1 << i
            self.inc[v] |= 1 << i
            self.adj[u].append((v, i))
            self.adj[v].append((u, i))
        for a in self.adj:
            a.sort()

    def mask_of(self, edges) -> int:
        mask = 0
        for e in edges:
            mask |= 1 << self.eidx[_normalize_edge(e)]
        return mask

    def edges_of(self, mask: int) -> frozenset[Edge]:
        out = []
        while mask:
            low = mask & -mask
            out.append(self.edges[low.bit_length() - 1])
            mask ^= low
        return frozenset(out)


class _Budget:
    __slots__ = ("remaining",)

    def __init__(self, limit: int | None):
        self.remaining = limit

    def spend(self, amount: int = 1) -> None:
        if self.remaining is None:
            return
        self.remaining -= amount
        if self.remaining < 0:
            raise SearchBudgetExceeded("packing search budget exhausted")


# -- tree enumeration ----------------------------------------------------


def _paths_between(sg: _SearchGraph, s: int, t: int, allowed: int,
                   banned: frozenset[int], budget: _Budget):
    """All simple s-t paths over allowed edges avoiding `banned` vertices.

    Yields (edge_mask, vertex_frozenset). Endpoints must not be banned.
    """
    visited = {s}
    order: list[int] = [s]

    def rec(a: int, mask: int):
        budget.spend()
        if a == t:
            yield mask, frozenset(order)
            return
        for b, i in sg.adj[a]:
            if allowed >> i & 1 and b not in visited and b not in banned:
                visited.add(b)
                order.append(b)
                yield from rec(b, mask | (1 << i))
                order.pop()
                visited.remove(b)

    if s in banned or t in banned:
        return
    yield from rec(s, 0)


def _enum_trees_two(sg, terms, allowed, budget):
    a, b = sorted(terms)
    return [m for m, _ in _paths_between(sg, a, b, allowed, frozenset(), budget)]


def _enum_trees_three(sg, terms, allowed, budget):
    x, y, z = sorted(terms)
    trees: list[int] = []
    # Path-shaped trees: two terminal endpoints, the third lies inside.
    for a, b, c in ((x, y, z), (x, z, y), (y, z, x)):
        for mask, verts in _paths_between(sg, a, b, allowed, frozenset(), budget):
            if c in verts:
                trees.append(mask)
    # Tripods: a non-terminal branch vertex with three disjoint legs.
    sset = frozenset((x, y, z))
    for w in range(sg.n):
        if w in sset:
            continue
        for m1, v1 in _paths_between(sg, w, x, allowed, sset - {x}, budget):
            banned2 = (v1 - {w}) | (sset - {y})
            for m2, v2 in _paths_between(sg, w, y, allowed & ~m1,
                                         frozenset(banned2), budget):
                banned3 = (v1 - {w}) | (v2 - {w}) | (sset - {z})
                for m3, _ in _paths_between(sg, w, z, allowed & ~m1 & ~m2,
                                            frozenset(banned3), budget):
                    trees.append(m1 | m2 | m3)
    return trees


def _enum_trees_general(sg, terms, allowed, budget):
    """Reduced trees for 4+ terminals by staged attachment, de-duplicated."""
    rest = sorted(terms)
    first = rest[0]
    found: set[int] = set()

    def leaves_ok(mask: int) -> bool:
        deg: dict[int, int] = {}
        for i in range(sg.m):
            if mask >> i & 1:
                u, v = sg.edges[i]
                deg[u] = deg.get(u, 0) + 1
                deg[v] = deg.get(v, 0) + 1
        return all(v in terms for v, d in deg.items() if d == 1)

    def grow(comp: frozenset[int], mask: int, todo: tuple[int, ...]):
        budget.spend()
        if not todo:
            if leaves_ok(mask):
                found.add(mask)
            return
        t, remaining = todo[0], todo[1:]
        if t in comp:
            grow(comp, mask, remaining)
            return
        # all simple paths from t whose last vertex is the first hit of comp
        def walk(a: int, pmask: int, pverts: frozenset[int]):
            budget.spend()
            for b, i in sg.adj[a]:
                if not (allowed >> i & 1) or (mask >> i & 1) or (pmask >> i & 1):
                    continue
                if b in comp:
                    grow(comp | pverts | {b}, mask | pmask | (1 << i), remaining)
                elif b not in pverts:
                    walk(b, pmask | (1 << i), pverts | {b})

        walk(t, 0, frozenset({t}))

    grow(frozenset({first}), 0, tuple(rest[1:]))
    return sorted(found)


def _enum_trees(sg, terms, allowed, budget):
    k = len(terms)
    if k == 2:
        trees = _enum_trees_two(sg, terms, allowed, budget)
    elif k == 3:
        trees = _enum_trees_three(sg, terms, allowed, budget)
    else:
        trees = _enum_trees_general(sg, terms, allowed, budget)
    trees.sort(key=lambda m: (bin(m).count("1"), m))
    return trees


# -- bounds and greedy ----------------------------------------------------


def _terminals_connected(sg, terms, free) -> bool:
    start = terms[0]
    seen = {start}
    stack = [start]
    goal = set(terms)
    while stack:
        a = stack.pop()
        for b, i in sg.adj[a]:
            if free >> i & 1 and b not in seen:
                seen.add(b)
                stack.append(b)
    return goal <= seen


def _slot_upper_bound(sg, terms, free) -> int:
    if not _terminals_connected(sg, terms, free):
        return 0
    fdeg = {s: bin(sg.inc[s] & free).count("1") for s in terms}
    bound = min(fdeg.values())
    if len(terms) >= 3:
        for a, b in itertools.combinations(terms, 2):
            e = (a, b) if a < b else (b, a)
            total = fdeg[a] + fdeg[b]
            if e in sg.eidx and free >> sg.eidx[e] & 1:
                bound = min(bound, (total - 1) // 2)
            else:
                bound = min(bound, total // 2)
    return bound


def _flow_upper_bound(sg, terms, free) -> int:
    """Pairwise max-flow bound on the free subgraph (root use only)."""
    sub = Graph(sg.n, [sg.edges[i] for i in range(sg.m) if free >> i & 1])
    best = None
    for a, b in itertools.combinations(terms, 2):
        value, _ = _max_flow_unit(sub, a, b)
        if best is None or value < best:
            best = value
        if best == 0:
            break
    return 0 if best is None else best


def _bfs_tree(sg, root, free):
    """BFS parents over free edges, lowest-index neighbors first."""
    dist = {root: 0}
    parent_edge: dict[int, int] = {}
    queue = [root]
    qi = 0
    while qi < len(queue):
        a = queue[qi]
        qi += 1
        for b, i in sg.adj[a]:
            if free >> i & 1 and b not in dist:
                dist[b] = dist[a] + 1
                parent_edge[b] = i
                queue.append(b)
    return dist, parent_edge


def _greedy_tree(sg, terms, free) -> int | None:
    """One cheap reduced tree over free edges, or None."""
    searches = [_bfs_tree(sg, s, free) for s in terms]
    best_w, best_cost = None, None
    for w in range(sg.n):
        cost = 0
        for dist, _ in searches:
            if w not in dist:
                cost = None
                break
            cost += dist[w]
        if cost is not None and (best_cost is None or cost < best_cost):
            best_w, best_cost = w, cost
    if best_w is None:
        return None
    union = 0
    for s, (dist, parent_edge) in zip(terms, searches):
        a = best_w
        while a != s:
            i = parent_edge[a]
            union |= 1 << i
            u, v = sg.edges[i]
            a = v if a == u else u
    # Union of shortest paths may overlap; extract a spanning tree of it.
    tree = 0
    seen = {best_w}
    stack = [best_w]
    while stack:
        a = stack.pop()
        for b, i in sg.adj[a]:
            if union >> i & 1 and b not in seen:
                seen.add(b)
                tree |= 1 << i
                stack.append(b)
    return _reduce_tree(sg, tree, terms)


def _reduce_tree(sg, mask, terms) -> int:
    """Strip non-terminal leaves until every leaf is a terminal."""
    tset = set(terms)
    while True:
        deg: dict[int, int] = {}
        vert_edge: dict[int, int] = {}
        for i in range(sg.m):
            if mask >> i & 1:
                for v in sg.edges[i]:
                    deg[v] = deg.get(v, 0) + 1
                    vert_edge[v] = i
        trimmed = False
        for v, d in deg.items():
            if d == 1 and v not in tset:
                mask &= ~(1 << vert_edge[v])
                trimmed = True
        if not trimmed:
            return mask


def _greedy_packing(sg, terms, free) -> list[int]:
    out = []
    while True:
        t = _greedy_tree(sg, terms, free)
        if t is None or t == 0:
            return out
        out.append(t)
        free &= ~t


# -- exact packing search --------------------------------------------------


class _PackingSearch:
    def __init__(self, sg: _SearchGraph, terms, allowed: int,
                 node_budget: int | None = None):
        self.sg = sg
        self.terms = tuple(sorted(terms))
        self.allowed = allowed
        self.budget = _Budget(node_budget)
        self._trees: list[int] | None = None

    def trees(self) -> list[int]:
        if self._trees is None:
            self._trees = _enum_trees(self.sg, self.terms, self.allowed,
                                      self.budget)
        return self._trees

    def solve_max(self) -> list[int]:
        free = self.allowed
        best = _greedy_packing(self.sg, self.terms, free)
        ub = min(_slot_upper_bound(self.sg, self.terms, free),
                 _flow_upper_bound(self.sg, self.terms, free))
        if len(best) >= ub:
            return best
        trees = self.trees()
        chosen: list[int] = []
        best_box = [list(best)]

        def dfs(start: int, free_mask: int):
            self.budget.spend()
            bound = _slot_upper_bound(self.sg, self.terms, free_mask)
            if len(chosen) + bound <= len(best_box[0]):
                return
            for j in range(start, len(trees)):
                t = trees[j]
                if t & free_mask == t:
                    chosen.append(t)
                    if len(chosen) > len(best_box[0]):
                        best_box[0] = list(chosen)
                    dfs(j + 1, free_mask & ~t)
                    chosen.pop()

        dfs(0, free)
        return best_box[0]

    def solve_need(self, need: int) -> list[int] | None:
        free = self.allowed
        greedy = _greedy_packing(self.sg, self.terms, free)
        if len(greedy) >= need:
            return greedy[:need]
        if _slot_upper_bound(self.sg, self.terms, free) < need:
            return None
        if _flow_upper_bound(self.sg, self.terms, free) < need:
            return None
        trees = self.trees()
        chosen: list[int] = []

        def dfs(start: int, free_mask: int) -> bool:
            self.budget.spend()
            if len(chosen) == need:
                return True
            bound = _slot_upper_bound(self.sg, self.terms, free_mask)
            if len(chosen) + bound < need:
                return False
            for j in range(start, len(trees)):
                t = trees[j]
                if t & free_mask == t:
                    chosen.append(t)
                    if dfs(j + 1, free_mask & ~t):
                        return True
                    chosen.pop()
            return False

        if dfs(0, free):
            return list(chosen)
        return None


def _masks_to_packing(sg, terms, masks) -> TreePacking:
    trees = tuple(
        sorted(
            (SteinerTree(frozenset(terms), sg.edges_of(m)) for m in masks),
            key=lambda t: t.sorted_edges(),
        )
    )
    return TreePacking(frozenset(terms), trees)


def steiner_packing_number(
    g: Graph, terminals, *, node_budget: int | None = None
) -> tuple[int, TreePacking]:
    """Exact maximum number of pairwise edge-disjoint terminal-spanning
    trees, with a witness packing.

    Returns (0, empty packing) when the terminals do not share a component.
    """
    terms = tuple(sorted(set(terminals)))
    if len(terms) < 2:
        raise ValueError("need at least two terminals")
    for s in terms:
        if not (0 <= s < g.n):
            raise ValueError(f"terminal {s} out of range")
    sg = _SearchGraph(g)
    if not _terminals_connected(sg, terms, sg.full_mask):
        return 0, TreePacking(frozenset(terms), ())
    if len(terms) == 2:
        from .connectivity import local_edge_connectivity

        k = local_edge_connectivity(g, terms[0], terms[1])
        system = disjoint_paths(g, terms[0], terms[1], k)
        masks = [sg.mask_of(es) for es in system.edge_sets()]
        return k, _masks_to_packing(sg, terms, masks)
    search = _PackingSearch(sg, terms, sg.full_mask, node_budget)
    masks = search.solve_max()
    return len(masks), _masks_to_packing(sg, terms, masks)


def lambda_k(g: Graph, k: int, *, node_budget: int | None = None) -> int:
    """Generalized k-edge-connectivity: the minimum packing number over all
    k-subsets of vertices. Exact for k in {2, 3}; larger k is exposed but
    only lightly exercised.
    """
    value, _, _ = lambda_k_witness(g, k, node_budget=node_budget)
    return value


def lambda_k_witness(
    g: Graph, k: int, *, node_budget: int | None = None
) -> tuple[int, tuple[int, ...], TreePacking]:
    """lambda_k plus a minimizing terminal set and its witness packing."""
    if not (2 <= k <= g.n):
        raise ValueError(f"k must be between 2 and {g.n}, got {k}")
    if not is_connected(g):
        empty = TreePacking(frozenset(), ())
        return 0, (), empty
    best: tuple[int, tuple[int, ...], TreePacking] | None = None
    for subset in itertools.combinations(range(g.n), k):
        count, packing = steiner_packing_number(g, subset,
                                                node_budget=node_budget)
        if best is None or count < best[0]:
            best = (count, subset, packing)
            if count == 0:
                break
    assert best is not None
    return best


def find_disjoint_trees(
    g: Graph,
    terminals,
    k: int,
    *,
    allowed_edges=None,
    node_budget: int | None = None,
) -> list[SteinerTree] | None:
    """Find k pairwise edge-disjoint terminal trees inside an edge pool.

    Decision-mode search used by the constructive packer and the packing
    normalizer; returns None when no such family exists in the pool.
    """
    terms = tuple(sorted(set(terminals)))
    sg = _SearchGraph(g)
    allowed = sg.full_mask if allowed_edges is None else sg.mask_of(allowed_edges)
    if k == 0:
        return []
    search = _PackingSearch(sg, terms, allowed, node_budget)
    masks = search.solve_need(k)
    if masks is None:
        return None
    return [SteinerTree(frozenset(terms), sg.edges_of(m)) for m in masks]


def normalize_packing(g: Graph, packing: TreePacking) -> TreePacking:
    """Rearrange a 3-terminal packing so at most two trees use edges of the
    subgraph induced on the terminals.

    At most three trees can meet those induced edges; when exactly three
    do, a replacement family of the same size is re-searched inside the
    union of the offending trees, one member of which avoids the induced
    edges entirely. Anything already normalized is returned unchanged.
    """
    terms = sorted(packing.terminals)
    if len(terms) != 3:
        raise ValueError("normalization is defined for 3-terminal packings")
    inside = g.induced_edges(terms)
    touching = [i for i, t in enumerate(packing.trees) if t.edges & inside]
    if len(touching) <= 2:
        return packing
    pool = frozenset(
        e for i in touching for e in packing.trees[i].edges
    )
    pool_graph = Graph(g.n, pool)
    sg = _SearchGraph(pool_graph)
    avoid = sg.mask_of(inside & pool)
    budget = _Budget(None)
    for first in _enum_trees(sg, terms, sg.full_mask & ~avoid, budget):
        rest = _PackingSearch(sg, terms, sg.full_mask & ~first).solve_need(2)
        if rest is not None:
            replacement = [first] + rest
            new_trees = list(packing.trees)
            for i, mask in zip(touching, replacement):
                new_trees[i] = SteinerTree(frozenset(terms), sg.edges_of(mask))
            return TreePacking(packing.terminals, tuple(new_trees))
    raise RuntimeError(
        "packing rewiring failed; three trees meet the induced terminal "
        "edges and no in-place replacement exists"
    )
