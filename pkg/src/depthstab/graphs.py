"""Finite simple graphs on vertices 1..n.

Construction and parsing, the structural metrics needed for edge-ideal
invariants (free vertices, bipartiteness, tree diameter, the q parameter),
and the graph families used for exhaustive verification: Prüfer-enumerated
labeled trees, labeled connected graphs and brooms.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Iterator

import networkx as nx

from .errors import GraphParseError, PreconditionError, ValidationError
from .linalg import ExactMatrix

TREE_CAP = 10
CONNECTED_CAP = 7


@dataclass(frozen=True)
class Graph:
    n: int
    edges: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if self.n < 0:
            raise ValidationError(f"negative vertex count {self.n}")
        canon = []
        for e in self.edges:
            u, v = e
            if u == v:
                raise ValidationError(f"loop at vertex {u}")
            if not (1 <= u <= self.n and 1 <= v <= self.n):
                raise ValidationError(f"edge {u}-{v} has an endpoint outside 1..{self.n}")
            canon.append((min(u, v), max(u, v)))
        canon.sort()
        for a, b in zip(canon, canon[1:]):
            if a == b:
                raise ValidationError(f"duplicate edge {a[0]}-{a[1]}")
        object.__setattr__(self, "edges", tuple(canon))

    @classmethod
    def from_edges(cls, edges, n: int | None = None) -> "Graph":
        edges = [tuple(e) for e in edges]
        if n is None:
            n = max((max(e) for e in edges), default=0)
        return cls(n, tuple(edges))

    def neighbors(self) -> dict[int, list[int]]:
        adj: dict[int, list[int]] = {v: [] for v in range(1, self.n + 1)}
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return adj

    def degree(self, v: int) -> int:
        return sum(1 for e in self.edges if v in e)

    def relabel(self, mapping: dict[int, int]) -> "Graph":
        return Graph(self.n, tuple((mapping[u], mapping[v]) for u, v in self.edges))

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(1, self.n + 1))
        g.add_edges_from(self.edges)
        return g

    def encode(self) -> str:
        """One-line form ``n;u1-v1,u2-v2,...``."""
        return f"{self.n};" + ",".join(f"{u}-{v}" for u, v in self.edges)

    @classmethod
    def decode(cls, line: str) -> "Graph":
        head, _, body = line.strip().partition(";")
        edges = []
        for tok in filter(None, body.split(",")):
            u, v = tok.split("-")
            edges.append((int(u), int(v)))
        return cls(int(head), tuple(edges))

    def to_edge_list(self) -> str:
        lines = [f"n {self.n}"] + [f"{u} {v}" for u, v in self.edges]
        return "\n".join(lines) + "\n"

    def __str__(self) -> str:
        return self.encode()


def parse_graph(text: str) -> Graph:
    """Parse edge-list text: ``u v`` per line, ``#`` comments, optional ``n N`` header."""
    n_header = None
    edges: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "n":
            if len(parts) != 2 or not parts[1].isdigit():
                raise GraphParseError(lineno, f"bad header {raw!r}")
            n_header = int(parts[1])
            continue
        if len(parts) != 2:
            raise GraphParseError(lineno, f"expected 'u v', got {raw!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphParseError(lineno, f"non-integer vertex in {raw!r}") from None
        if u < 1 or v < 1:
            raise GraphParseError(lineno, "vertices are 1-indexed")
        if u == v:
            raise ValidationError(f"line {lineno}: loop at vertex {u}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise ValidationError(f"line {lineno}: duplicate edge {key[0]}-{key[1]}")
        seen.add(key)
        edges.append(key)
    n = max((max(e) for e in edges), default=0)
    if n_header is not None:
        if n_header < n:
            raise ValidationError(f"header n {n_header} smaller than largest label {n}")
        n = n_header
    return Graph(n, tuple(edges))


# ---------------------------------------------------------------------------
# metrics

@dataclass(frozen=True)
class GraphMetrics:
    connected: bool
    bipartite: bool
    parts: tuple[tuple[int, ...], tuple[int, ...]] | None
    component_count: int
    free_vertices: tuple[int, ...]
    m: int
    is_tree: bool
    diameter: int | None
    q: int
    max_paths: tuple[tuple[int, ...], ...] = field(default=())

    @property
    def is_star(self) -> bool:
        """Connected graph whose edges all share one vertex (a single edge counts)."""
        return self.is_tree and self.diameter is not None and self.diameter <= 2 and self.m >= 1


def _bfs(adj: dict[int, list[int]], sources) -> dict[int, int]:
    dist = {s: 0 for s in sources}
    queue = deque(dist)
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if w not in dist:
                dist[w] = dist[u] + 1
                queue.append(w)
    return dist


def components(g: Graph) -> list[list[int]]:
    adj = g.neighbors()
    seen: set[int] = set()
    comps = []
    for v in range(1, g.n + 1):
        if v not in seen:
            comp = sorted(_bfs(adj, [v]))
            seen.update(comp)
            comps.append(comp)
    return comps


def two_coloring(g: Graph) -> dict[int, int] | None:
    """Proper 2-coloring by BFS, or None if the graph has an odd cycle."""
    adj = g.neighbors()
    color: dict[int, int] = {}
    for s in range(1, g.n + 1):
        if s in color:
            continue
        color[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for w in adj[u]:
                if w not in color:
                    color[w] = 1 - color[u]
                    queue.append(w)
                elif color[w] == color[u]:
                    return None
    return color


def tree_path(adj: dict[int, list[int]], a: int, b: int) -> tuple[int, ...]:
    """The unique a-b path in a tree."""
    parent = {a: None}
    queue = deque([a])
    while queue:
        u = queue.popleft()
        if u == b:
            break
        for w in adj[u]:
            if w not in parent:
                parent[w] = u
                queue.append(w)
    path = [b]
    while path[-1] != a:
        path.append(parent[path[-1]])
    return tuple(reversed(path))


def double_sweep_diameter(g: Graph) -> int:
    """Tree diameter from two BFS sweeps (exact on trees)."""
    if g.n == 0:
        return 0
    adj = g.neighbors()
    d1 = _bfs(adj, [1])
    far = max(d1, key=lambda v: (d1[v], -v))
    d2 = _bfs(adj, [far])
    return max(d2.values())


def longest_tree_paths(g: Graph) -> tuple[int, tuple[tuple[int, ...], ...]]:
    """Diameter and all maximum-length paths of a tree, by leaf-pair search.

    Each path is listed once, oriented from its smaller endpoint.
    """
    if g.n <= 1:
        return 0, ((1,),) if g.n == 1 else ()
    adj = g.neighbors()
    leaves = [v for v in adj if len(adj[v]) == 1]
    best = -1
    paths: list[tuple[int, ...]] = []
    for a, b in itertools.combinations(leaves, 2):
        p = tree_path(adj, a, b)
        length = len(p) - 1
        if length > best:
            best, paths = length, [p]
        elif length == best:
            paths.append(p)
    return best, tuple(sorted(paths))


def graph_metrics(g: Graph) -> GraphMetrics:
    adj = g.neighbors()
    comps = components(g)
    connected = len(comps) == 1 and g.n >= 1
    coloring = two_coloring(g)
    bipartite = coloring is not None
    parts = None
    if coloring is not None:
        parts = (
            tuple(v for v in sorted(coloring) if coloring[v] == 0),
            tuple(v for v in sorted(coloring) if coloring[v] == 1),
        )
    free = tuple(v for v in range(1, g.n + 1) if len(adj[v]) == 1)
    free_set = set(free)
    q = sum(
        1
        for v in range(1, g.n + 1)
        if v not in free_set and sum(1 for w in adj[v] if w not in free_set) <= 1
    )
    is_tree = connected and len(g.edges) == g.n - 1
    diameter = None
    max_paths: tuple = ()
    if is_tree:
        diameter, max_paths = longest_tree_paths(g)
    return GraphMetrics(
        connected=connected,
        bipartite=bipartite,
        parts=parts,
        component_count=len(comps),
        free_vertices=free,
        m=len(free),
        is_tree=is_tree,
        diameter=diameter,
        q=q,
        max_paths=max_paths,
    )


def distance_to_path(g: Graph, path) -> int:
    """Largest distance from a vertex of g to the vertex set of path."""
    dist = _bfs(g.neighbors(), list(path))
    return max(dist.values())


def distance_two_condition(g: Graph) -> tuple[bool, bool]:
    """(some, every) longest path P of the tree has all vertices within distance 2."""
    _, paths = longest_tree_paths(g)
    flags = [distance_to_path(g, p) <= 2 for p in paths]
    return any(flags), bool(flags) and all(flags)


def incidence_matrix(g: Graph) -> ExactMatrix:
    rows = [[0] * len(g.edges) for _ in range(g.n)]
    for j, (u, v) in enumerate(g.edges):
        rows[u - 1][j] = 1
        rows[v - 1][j] = 1
    return ExactMatrix(g.n, len(g.edges), tuple(tuple(r) for r in rows))


# ---------------------------------------------------------------------------
# canonical forms

def _tree_center(adj: dict[int, list[int]], vertices) -> list[int]:
    degree = {v: len(adj[v]) for v in vertices}
    layer = [v for v in vertices if degree[v] <= 1]
    remaining = len(degree)
    while remaining > 2:
        remaining -= len(layer)
        nxt = []
        for v in layer:
            for w in adj[v]:
                degree[w] -= 1
                if degree[w] == 1:
                    nxt.append(w)
        layer = nxt
    return layer


def _ahu(adj, root, parent) -> str:
    kids = sorted(_ahu(adj, w, root) for w in adj[root] if w != parent)
    return "(" + "".join(kids) + ")"


def tree_canonical_form(g: Graph) -> str:
    """AHU encoding rooted at the center (min over the two centers if bicentral)."""
    adj = g.neighbors()
    if g.n <= 1:
        return "()" * g.n
    return min(_ahu(adj, c, None) for c in _tree_center(adj, list(adj)))


def _adjacency_key(g: Graph, order) -> tuple[int, ...]:
    pos = {v: i for i, v in enumerate(order)}
    return tuple(sorted((min(pos[u], pos[v]), max(pos[u], pos[v])) for u, v in g.edges))


def graph_canonical_form(g: Graph) -> tuple:
    """Lexicographically minimal edge encoding over degree-respecting orderings.

    Vertices are first grouped by (degree, sorted neighbour degrees); only
    orderings that list the groups in sorted order are tried.  That set of
    orderings is itself isomorphism invariant, so the minimum is a complete
    invariant.
    """
    adj = g.neighbors()
    deg = {v: len(adj[v]) for v in adj}
    sig = {v: (deg[v], tuple(sorted(deg[w] for w in adj[v]))) for v in adj}
    groups: dict = {}
    for v in adj:
        groups.setdefault(sig[v], []).append(v)
    keys = sorted(groups)
    best = None
    for combo in itertools.product(*(itertools.permutations(groups[k]) for k in keys)):
        order = [v for block in combo for v in block]
        key = _adjacency_key(g, order)
        if best is None or key < best:
            best = key
    return (g.n, tuple(keys), best)


def canonical_form(g: Graph):
    m = graph_metrics(g)
    if m.is_tree:
        return ("tree", g.n, tree_canonical_form(g))
    return ("graph",) + graph_canonical_form(g)


def canonical_tree_labeling(g: Graph) -> Graph:
    """Relabel a tree by BFS from its (first) center, children in AHU order."""
    adj = g.neighbors()
    if g.n <= 1:
        return g
    centers = _tree_center(adj, list(adj))
    root = min(centers, key=lambda c: (_ahu(adj, c, None), c))
    order = []
    queue = deque([(root, None)])
    while queue:
        u, p = queue.popleft()
        order.append(u)
        kids = sorted((w for w in adj[u] if w != p), key=lambda w: (_ahu(adj, w, u), w))
        queue.extend((w, u) for w in kids)
    mapping = {v: i + 1 for i, v in enumerate(order)}
    return g.relabel(mapping)


# ---------------------------------------------------------------------------
# families

def prufer_decode(seq, n: int) -> Graph:
    """Labeled tree on 1..n from a Prüfer sequence of length n-2."""
    if n == 1:
        return Graph(1)
    if len(seq) != n - 2:
        raise ValueError(f"Prüfer sequence for n={n} must have length {n - 2}")
    degree = [1] * (n + 1)
    for x in seq:
        degree[x] += 1
    edges = []
    for x in seq:
        leaf = next(v for v in range(1, n + 1) if degree[v] == 1)
        edges.append((leaf, x))
        degree[leaf] -= 1
        degree[x] -= 1
    u, v = (w for w in range(1, n + 1) if degree[w] == 1)
    edges.append((u, v))
    return Graph(n, tuple(edges))


def prufer_encode(g: Graph) -> tuple[int, ...]:
    if not graph_metrics(g).is_tree:
        raise PreconditionError("Prüfer encoding needs a tree")
    adj = {v: set(ws) for v, ws in g.neighbors().items()}
    seq = []
    for _ in range(g.n - 2):
        leaf = min(v for v in adj if len(adj[v]) == 1)
        (nb,) = adj.pop(leaf)
        adj[nb].discard(leaf)
        seq.append(nb)
    return tuple(seq)


def enumerate_trees(n: int, up_to_iso: bool = False, cap: int = TREE_CAP) -> Iterator[Graph]:
    """All labeled trees on n vertices (n**(n-2) of them), or one per isomorphism class.

    The isomorphism-class stream uses networkx's constant-time-per-tree
    generator and relabels each tree canonically; enumerate_trees_dedup
    gives the same classes from the Prüfer stream.
    """
    if n < 1:
        raise PreconditionError("need n >= 1")
    if n > cap:
        raise PreconditionError(f"refusing to enumerate trees with n={n} above cap {cap}")
    if up_to_iso:
        if n == 1:
            yield Graph(1)
            return
        found = []
        for t in nx.nonisomorphic_trees(n):
            g = Graph(n, tuple((u + 1, v + 1) for u, v in t.edges()))
            found.append(canonical_tree_labeling(g))
        found.sort(key=lambda t: (tree_canonical_form(t), t.edges))
        yield from found
        return
    for seq in itertools.product(range(1, n + 1), repeat=max(n - 2, 0)):
        yield prufer_decode(seq, n)


def enumerate_trees_dedup(n: int, cap: int = TREE_CAP) -> list[Graph]:
    """Isomorphism classes obtained by streaming every Prüfer sequence."""
    seen = {}
    for t in enumerate_trees(n, cap=cap):
        key = tree_canonical_form(t)
        if key not in seen:
            seen[key] = canonical_tree_labeling(t)
    return [seen[k] for k in sorted(seen)]


def is_connected_edges(n: int, edges) -> bool:
    if n == 0:
        return False
    adj: dict[int, list[int]] = {v: [] for v in range(1, n + 1)}
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    return len(_bfs(adj, [1])) == n


def enumerate_connected_graphs(n: int, up_to_iso: bool = False,
                               cap: int = CONNECTED_CAP) -> Iterator[Graph]:
    """All labeled connected graphs on n vertices, or one per isomorphism class.

    Labeled graphs come from a sweep over every edge subset.  Isomorphism
    classes are read from the networkx graph atlas (all graphs on at most
    seven vertices) and relabeled deterministically.
    """
    if n < 1:
        raise PreconditionError("need n >= 1")
    if n > cap:
        raise PreconditionError(f"refusing to enumerate connected graphs with n={n} above cap {cap}")
    if up_to_iso:
        if n > 7:
            raise PreconditionError("isomorphism classes are available for n <= 7 only")
        for a in nx.graph_atlas_g():
            if a.number_of_nodes() == n and nx.is_connected(a):
                yield Graph(n, tuple((u + 1, v + 1) for u, v in a.edges()))
        return
    pairs = list(itertools.combinations(range(1, n + 1), 2))
    for mask in range(1 << len(pairs)):
        edges = tuple(p for i, p in enumerate(pairs) if mask >> i & 1)
        if is_connected_edges(n, edges):
            yield Graph(n, edges)


def enumerate_connected_dedup(n: int, cap: int = CONNECTED_CAP) -> list[Graph]:
    """Isomorphism classes by brute-force canonical forms over the labeled stream."""
    seen = {}
    for g in enumerate_connected_graphs(n, cap=cap):
        seen.setdefault(canonical_form(g), g)
    return [seen[k] for k in sorted(seen, key=repr)]


def broom(a: int, b: int) -> Graph:
    """Path with a edges (1..a+1) plus b-a leaves hung on vertex a+1."""
    if a < 1 or a >= b:
        raise PreconditionError(f"broom needs 1 <= a < b, got a={a}, b={b}")
    edges = [(i, i + 1) for i in range(1, a + 1)]
    edges += [(a + 1, v) for v in range(a + 2, b + 2)]
    return Graph(b + 1, tuple(edges))


def path_graph(n: int) -> Graph:
    return Graph(n, tuple((i, i + 1) for i in range(1, n)))


def cycle_graph(n: int) -> Graph:
    return Graph(n, tuple((i, i % n + 1) for i in range(1, n + 1)))


def star_graph(r: int) -> Graph:
    """K_{1,r} with center 1."""
    return Graph(r + 1, tuple((1, v) for v in range(2, r + 2)))


def complete_graph(n: int) -> Graph:
    return Graph(n, tuple(itertools.combinations(range(1, n + 1), 2)))


def broom_parameters(g: Graph) -> tuple[int, int] | None:
    """(a, b) if g is isomorphic to broom(a, b), else None."""
    m = graph_metrics(g)
    if not m.is_tree or g.n < 3:
        return None
    adj = g.neighbors()
    hubs = [v for v in adj if len(adj[v]) >= 3]
    if len(hubs) > 1:
        return None
    if hubs:
        (c,) = hubs
        long_arms = [w for w in adj[c] if len(adj[w]) > 1]
        if len(long_arms) > 1:
            return None
    return g.n - m.m, g.n - 1
