"""Simple undirected graphs on dense integer vertex indices.

Everything downstream (products, flows, packing search) addresses vertices
as 0..n-1 and treats Graph values as immutable. Edges are stored as sorted
(u, v) tuples with u < v.
"""

from __future__ import annotations

import json
from typing import Iterable


class Graph:
    """Immutable simple undirected graph.

    Self-loops, duplicate edges (in either orientation) and out-of-range
    endpoints are rejected at construction time.
    """

    __slots__ = ("n", "edges", "edge_list", "_adj")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]]):
        if n < 1:
            raise ValueError(f"vertex count must be >= 1, got {n}")
        seen: set[tuple[int, int]] = set()
        for pair in edges:
            u, v = pair
            if u == v:
                raise ValueError(f"self-loop ({u},{v}) is not allowed")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u},{v}) out of range for n={n}")
            e = (u, v) if u < v else (v, u)
            if e in seen:
                raise ValueError(f"duplicate edge ({u},{v})")
            seen.add(e)
        self.n = n
        self.edge_list: tuple[tuple[int, int], ...] = tuple(sorted(seen))
        self.edges: frozenset[tuple[int, int]] = frozenset(self.edge_list)
        adj: list[list[int]] = [[] for _ in range(n)]
        for u, v in self.edge_list:
            adj[u].append(v)
            adj[v].append(u)
        self._adj = tuple(tuple(sorted(a)) for a in adj)

    # -- basic queries -------------------------------------------------

    @property
    def m(self) -> int:
        return len(self.edge_list)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def degrees(self) -> tuple[int, ...]:
        return tuple(len(a) for a in self._adj)

    def has_edge(self, u: int, v: int) -> bool:
        return ((u, v) if u < v else (v, u)) in self.edges

    def induced_edges(self, vertices: Iterable[int]) -> frozenset[tuple[int, int]]:
        """Edges with both endpoints in `vertices`."""
        vs = set(vertices)
        return frozenset(e for e in self.edge_list if e[0] in vs and e[1] in vs)

    # -- value semantics ----------------------------------------------

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Graph)
            and self.n == other.n
            and self.edges == other.edges
        )

    def __hash__(self) -> int:
        return hash((self.n, self.edges))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


def new_graph(n: int, edges: Iterable[tuple[int, int]]) -> Graph:
    """Validated constructor; rejects loops, duplicates, bad indices."""
    return Graph(n, edges)


def min_degree(g: Graph) -> int:
    return min(g.degrees())


def is_connected(g: Graph) -> bool:
    """True iff the graph has a single connected component."""
    if g.n == 1:
        return True
    seen = [False] * g.n
    stack = [0]
    seen[0] = True
    count = 1
    while stack:
        u = stack.pop()
        for w in g.neighbors(u):
            if not seen[w]:
                seen[w] = True
                count += 1
                stack.append(w)
    return count == g.n


def connected_component(g: Graph, start: int) -> frozenset[int]:
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for w in g.neighbors(u):
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return frozenset(seen)


def family(kind: str, n: int) -> Graph:
    """Standard small families: path, cycle, complete, empty.

    `empty` yields n isolated vertices (a disconnected non-trivial factor).
    Cycles need n >= 3.
    """
    if n < 1:
        raise ValueError(f"family size must be >= 1, got {n}")
    if kind == "path":
        return Graph(n, [(i, i + 1) for i in range(n - 1)])
    if kind == "cycle":
        if n < 3:
            raise ValueError(f"cycle needs n >= 3, got {n}")
        return Graph(n, [(i, (i + 1) % n) for i in range(n)])
    if kind == "complete":
        return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])
    if kind == "empty":
        return Graph(n, [])
    raise ValueError(f"unknown family kind {kind!r}")


# -- serialization ------------------------------------------------------
#
# Edge-list text: first line "n m", then m lines "u v", LF endings.
# JSON: {"n": ..., "edges": [[u, v], ...]}.
# Both writers emit the canonical sorted edge order so load/save round-trips
# are bit-exact.


def to_edgelist_text(g: Graph) -> str:
    lines = [f"{g.n} {g.m}"]
    lines.extend(f"{u} {v}" for u, v in g.edge_list)
    return "\n".join(lines) + "\n"


def from_edgelist_text(text: str) -> Graph:
    rows = [line for line in text.strip().splitlines() if line.strip()]
    if not rows:
        raise ValueError("empty edge-list input")
    head = rows[0].split()
    if len(head) != 2:
        raise ValueError(f"bad header line {rows[0]!r}, expected 'n m'")
    n, m = int(head[0]), int(head[1])
    if len(rows) - 1 != m:
        raise ValueError(f"header says {m} edges but found {len(rows) - 1}")
    edges = []
    for line in rows[1:]:
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"bad edge line {line!r}")
        edges.append((int(parts[0]), int(parts[1])))
    return Graph(n, edges)


def save_edgelist(g: Graph, path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(to_edgelist_text(g))


def load_edgelist(path) -> Graph:
    with open(path, "r", encoding="ascii") as fh:
        return from_edgelist_text(fh.read())


def to_json_obj(g: Graph) -> dict:
    return {"n": g.n, "edges": [[u, v] for u, v in g.edge_list]}


def from_json_obj(obj: dict) -> Graph:
    return Graph(int(obj["n"]), [(int(u), int(v)) for u, v in obj["edges"]])


def save_json(g: Graph, path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        json.dump(to_json_obj(g), fh)
        fh.write("\n")


def load_json(path) -> Graph:
    with open(path, "r", encoding="ascii") as fh:
        return from_json_obj(json.load(fh))


def load_graph(path) -> Graph:
    """Load either format, sniffing JSON by the leading brace."""
    with open(path, "r", encoding="ascii") as fh:
        text = fh.read()
    if text.lstrip().startswith("{"):
        return from_json_obj(json.loads(text))
    return from_edgelist_text(text)
