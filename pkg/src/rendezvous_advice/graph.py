"""Anonymous port-labeled graphs and the graph families used by the experiments.

Nodes carry integer ids for the harness only; agents never see them.  Each
node ``v`` has a port table ``adj[v]`` whose entry ``p`` is the pair
``(neighbor, arrival_port)``.
"""

from __future__ import annotations

import itertools
import json
import random
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence


class GraphError(ValueError):
    """Raised for invalid graph parameters or malformed port tables."""


Edge = tuple[int, int]


@dataclass(frozen=True)
class PortGraph:
    adj: tuple[tuple[tuple[int, int], ...], ...]

    def __post_init__(self):
        _validate(self.adj)

    @property
    def n(self) -> int:
        return len(self.adj)

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def move(self, v: int, port: int) -> tuple[int, int]:
        """Return ``(neighbor, arrival_port)`` for taking ``port`` at ``v``."""
        return self.adj[v][port]

    def edges(self) -> list[Edge]:
        return [(u, w) for u, row in enumerate(self.adj) for w, _ in row if u < w]

    @classmethod
    def from_tables(cls, tables: Sequence[Sequence[Sequence[int]]]) -> "PortGraph":
        return cls(tuple(tuple((int(w), int(q)) for w, q in row) for row in tables))

    def to_dict(self) -> dict:
        return {"n": self.n, "adj": [[[w, q] for w, q in row] for row in self.adj]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "PortGraph":
        try:
            n, adj = data["n"], data["adj"]
        except (KeyError, TypeError) as exc:
            raise GraphError(f"graph document needs 'n' and 'adj': {exc}") from None
        if len(adj) != n:
            raise GraphError(f"'n' is {n} but 'adj' has {len(adj)} rows")
        return cls.from_tables(adj)

    @classmethod
    def from_json(cls, text: str) -> "PortGraph":
        return cls.from_dict(json.loads(text))


def _validate(adj) -> None:
    n = len(adj)
    if n < 1:
        raise GraphError("graph needs at least one node")
    for u, row in enumerate(adj):
        seen = set()
        for p, (w, q) in enumerate(row):
            if not 0 <= w < n:
                raise GraphError(f"port {p} at node {u} leads to unknown node {w}")
            if w == u:
                raise GraphError(f"self-loop at node {u}")
            if w in seen:
                raise GraphError(f"multi-edge between {u} and {w}")
            seen.add(w)
            if not 0 <= q < len(adj[w]) or adj[w][q] != (u, p):
                raise GraphError(f"port symmetry broken on edge {u}:{p} -> {w}:{q}")
    if n > 1 and len(bfs_order(adj, 0)) != n:
        raise GraphError("graph is not connected")


def bfs_order(adj, source: int) -> dict[int, int]:
    dist = {source: 0}
    queue = deque([source])
    while queue:
        x = queue.popleft()
        for w, _ in adj[x]:
            if w not in dist:
                dist[w] = dist[x] + 1
                queue.append(w)
    return dist


def bfs_distances(g: PortGraph, source: int) -> list[int]:
    dist = bfs_order(g.adj, source)
    return [dist[v] for v in range(g.n)]


def follow_ports(g: PortGraph, start: int, ports: Iterable[int]) -> int:
    v = start
    for p in ports:
        v = g.move(v, p)[0]
    return v


class _Builder:
    """Mutable port tables; ``freeze`` validates and returns a PortGraph."""

    def __init__(self, n: int = 0):
        self.rows: list[list] = [[] for _ in range(n)]

    def add_node(self) -> int:
        self.rows.append([])
        return len(self.rows) - 1

    def connect(self, u: int, pu: int, w: int, pw: int) -> None:
        for v, p in ((u, pu), (w, pw)):
            row = self.rows[v]
            if p >= len(row):
                row.extend([None] * (p + 1 - len(row)))
            if row[p] is not None:
                raise GraphError(f"port {p} at node {v} assigned twice")
        self.rows[u][pu] = (w, pw)
        self.rows[w][pw] = (u, pu)

    def append_edge(self, u: int, w: int) -> None:
        self.connect(u, len(self.rows[u]), w, len(self.rows[w]))

    def freeze(self) -> PortGraph:
        for v, row in enumerate(self.rows):
            if any(entry is None for entry in row):
                raise GraphError(f"gap in port table of node {v}")
        return PortGraph(tuple(tuple(row) for row in self.rows))


def from_edges(n: int, edges: Iterable[Edge], rng: random.Random | None = None) -> PortGraph:
    """Build a port graph from an edge list.

    Ports are assigned in edge-list order at each node; with ``rng`` the port
    numbers at every node are shuffled independently.
    """
    rows: list[list[int]] = [[] for _ in range(n)]
    for u, w in edges:
        rows[u].append(w)
        rows[w].append(u)
    if rng is not None:
        for row in rows:
            rng.shuffle(row)
    port_of = [{w: p for p, w in enumerate(row)} for row in rows]
    if any(len(port_of[v]) != len(rows[v]) for v in range(n)):
        raise GraphError("edge list contains a multi-edge")
    return PortGraph(
        tuple(tuple((w, port_of[w][u]) for w in rows[u]) for u in range(n))
    )


def random_connected_graph(n: int, extra_edges: int, rng: random.Random) -> PortGraph:
    """Random spanning tree plus up to ``extra_edges`` chords, random ports."""
    if n < 2:
        raise GraphError("random graph needs n >= 2")
    order = list(range(n))
    rng.shuffle(order)
    edges = {tuple(sorted((order[i], order[rng.randrange(i)]))) for i in range(1, n)}
    budget = min(extra_edges, n * (n - 1) // 2 - len(edges))
    while budget > 0:
        u, w = rng.sample(range(n), 2)
        e = (min(u, w), max(u, w))
        if e not in edges:
            edges.add(e)
            budget -= 1
    return from_edges(n, sorted(edges), rng)


def build_oriented_ring(n: int) -> PortGraph:
    """Cycle on ``n`` nodes; port 0 leads to ``i+1`` (clockwise), port 1 to ``i-1``."""
    if n < 3:
        raise GraphError(f"oriented ring needs n >= 3, got {n}")
    return PortGraph(tuple((((i + 1) % n, 1), ((i - 1) % n, 0)) for i in range(n)))


def color_even_clique(k: int) -> dict[Edge, int]:
    """Round-robin proper edge colouring of K_k with colours 0..k-2.

    Nodes are 0..k-1.  Node k-1 is fixed and the others rotate: ``{i, j}``
    gets ``(i + j) mod (k-1)`` and ``{i, k-1}`` gets ``2i mod (k-1)``.
    Keys are ``(a, b)`` with ``a < b``.
    """
    if k < 2 or k % 2:
        raise GraphError(f"clique colouring needs an even k >= 2, got {k}")
    m = k - 1
    colors = {}
    for i, j in itertools.combinations(range(k), 2):
        colors[(i, j)] = 2 * i % m if j == m else (i + j) % m
    return colors


@dataclass(frozen=True)
class CliqueChainSpec:
    """One member of the clique-chain family: ``edges[i]`` is the 1-indexed
    pair ``(a, b)``, ``2 <= a < b <= k``, subdivided by the next gate."""

    k: int
    ell: int
    edges: tuple[Edge, ...]

    def __post_init__(self):
        if self.k < 4 or self.k % 2:
            raise GraphError(f"clique chain needs an even k >= 4, got {self.k}")
        if self.ell < 1:
            raise GraphError(f"clique chain needs ell >= 1, got {self.ell}")
        if len(self.edges) != self.ell:
            raise GraphError(f"expected {self.ell} edges, got {len(self.edges)}")
        for a, b in self.edges:
            if not 2 <= a < b <= self.k:
                raise GraphError(f"edge {(a, b)} must satisfy 2 <= a < b <= {self.k}")

    def label(self) -> str:
        return ";".join(f"{a}-{b}" for a, b in self.edges)


def non_gate_edges(k: int) -> list[Edge]:
    """Clique edges avoiding node 1, in ascending lexicographic order."""
    return list(itertools.combinations(range(2, k + 1), 2))


@dataclass(frozen=True)
class DesignatedNodes:
    gates: tuple[int, ...]

    @property
    def agent_start(self) -> int:
        return self.gates[0]

    @property
    def treasure(self) -> int:
        return self.gates[-1]


def build_clique_chain(spec: CliqueChainSpec) -> tuple[PortGraph, DesignatedNodes]:
    """Chain ``ell`` coloured k-cliques through gates subdividing ``spec.edges``.

    Node ``j`` (1-indexed) of clique ``i`` (0-indexed) gets id ``i*k + j - 1``;
    the gate of clique ``i`` is id ``i*k`` and the treasure is id ``ell*k``.
    """
    if not isinstance(spec, CliqueChainSpec):
        raise GraphError(f"expected a CliqueChainSpec, got {type(spec).__name__}")
    k, ell = spec.k, spec.ell
    colors = color_even_clique(k)
    b = _Builder(k * ell + 1)
    for i, (ea, eb) in enumerate(spec.edges):
        base = i * k
        nxt = (i + 1) * k
        last = i == ell - 1
        for (x, y), c in colors.items():
            u, w = base + x, base + y
            if (x + 1, y + 1) == (ea, eb):
                b.connect(u, c, nxt, 0 if last else k - 1)
                b.connect(w, c, nxt, 1 if last else k)
            else:
                b.connect(u, c, w, c)
    g = b.freeze()
    return g, DesignatedNodes(tuple(i * k for i in range(ell + 1)))


def attach_path(g: PortGraph, at: int, extra: int) -> PortGraph:
    """Hang a path of ``extra`` new nodes off ``at`` (next free port there)."""
    if not 0 <= at < g.n:
        raise GraphError(f"node {at} not in graph")
    if extra < 0:
        raise GraphError("extra must be non-negative")
    b = _Builder()
    b.rows = [list(row) for row in g.adj]
    prev, prev_port = at, g.degree(at)
    for _ in range(extra):
        v = b.add_node()
        b.connect(prev, prev_port, v, 0)
        prev, prev_port = v, 1
    return b.freeze()


def join_copies_at(g: PortGraph, w: int) -> tuple[PortGraph, int, int]:
    """Two disjoint copies of ``g`` with the copies of ``w`` joined by an edge.

    Node ``v`` of the original appears as ``v`` and ``v + g.n``.  Returns the
    new graph and the two copies of ``w``.
    """
    if not 0 <= w < g.n:
        raise GraphError(f"node {w} not in graph")
    n = g.n
    b = _Builder()
    b.rows = [list(row) for row in g.adj]
    b.rows += [[(x + n, q) for x, q in row] for row in g.adj]
    b.connect(w, g.degree(w), w + n, g.degree(w))
    return b.freeze(), w, w + n


def shortest_path(g: PortGraph, u: int, v: int) -> tuple[list[int], list[int], list[int]]:
    """Fixed shortest path from ``u`` to ``v``.

    BFS runs from ``v`` expanding ports in ascending order; each node keeps the
    parent that discovered it first.  Returns ``(nodes, pi_fwd, pi_back)``
    where ``nodes`` runs from ``u`` to ``v``.
    """
    if u == v:
        raise GraphError("agents must start at different nodes")
    for x in (u, v):
        if not 0 <= x < g.n:
            raise GraphError(f"node {x} not in graph")
    # toward[x] = (next node on the way to v, port at x leading there)
    toward: dict[int, tuple[int, int]] = {v: (v, -1)}
    queue = deque([v])
    while queue and u not in toward:
        y = queue.popleft()
        for x, q in g.adj[y]:
            if x not in toward:
                toward[x] = (y, q)
                queue.append(x)
    nodes, fwd = [u], []
    while nodes[-1] != v:
        nxt, port = toward[nodes[-1]]
        fwd.append(port)
        nodes.append(nxt)
    back = [g.move(nodes[i], fwd[i])[1] for i in reversed(range(len(fwd)))]
    return nodes, fwd, back


def shortest_path_ports(g: PortGraph, u: int, v: int) -> tuple[int, list[int], list[int]]:
    _, fwd, back = shortest_path(g, u, v)
    return len(fwd), fwd, back


def path_degree_sum(g: PortGraph, u: int, v: int) -> int:
    """Sum of degrees of the nodes after ``u`` on the fixed path, through ``v``."""
    nodes, _, _ = shortest_path(g, u, v)
    return sum(g.degree(x) for x in nodes[1:])
