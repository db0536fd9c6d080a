"""Graph substrate: simple graphs, total-graph geometry, matchings, 2-factors.

Vertices are integers 0..n-1.  A *total element* is either a vertex (an int)
or an edge, stored canonically as a tuple (u, v) with u < v.  Sets mixing
vertices and edges represent subsets of V(T(G)), the total graph.
"""

from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass
from itertools import combinations

TotalElement = int | tuple[int, int]


class GraphError(ValueError):
    """Malformed graph data or violated precondition."""


def canon_edge(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


def is_edge_element(x) -> bool:
    return isinstance(x, tuple)


class Graph:
    """Immutable simple undirected graph.

    Girth is computed lazily and cached; graphs are never mutated after
    construction, so the cache needs no invalidation.
    """

    __slots__ = ("n", "edges", "adj", "_edge_set", "_girth", "_degrees")

    def __init__(self, n: int, edges):
        if n < 0:
            raise GraphError("vertex count must be nonnegative")
        self.n = n
        seen = set()
        canon = []
        adj = [[] for _ in range(n)]
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u},{v}) out of range for n={n}")
            if u == v:
                raise GraphError(f"loop at vertex {u}")
            e = canon_edge(u, v)
            if e in seen:
                raise GraphError(f"duplicate edge {e}")
            seen.add(e)
            canon.append(e)
            adj[u].append(v)
            adj[v].append(u)
        canon.sort()
        self.edges = tuple(canon)
        self.adj = tuple(tuple(sorted(a)) for a in adj)
        self._edge_set = frozenset(canon)
        self._girth = None
        self._degrees = tuple(len(a) for a in self.adj)

    @property
    def m(self) -> int:
        return len(self.edges)

    def degrees(self) -> tuple[int, ...]:
        return self._degrees

    def max_degree(self) -> int:
        return max(self._degrees, default=0)

    def is_regular(self, d: int | None = None) -> bool:
        if self.n == 0:
            return True
        degs = set(self._degrees)
        if len(degs) != 1:
            return False
        return True if d is None else degs == {d}

    def has_edge(self, u: int, v: int) -> bool:
        return canon_edge(u, v) in self._edge_set

    def edge_set(self) -> frozenset:
        return self._edge_set

    def girth(self):
        if self._girth is None:
            self._girth = _girth_bfs(self)
        return self._girth

    def total_elements(self):
        """All of V(G) followed by E(G), in canonical order."""
        return list(range(self.n)) + list(self.edges)

    def incident_edges(self, v: int) -> list[tuple[int, int]]:
        return [canon_edge(v, w) for w in self.adj[v]]

    def total_neighbors(self, x):
        """Neighbours of a total element in T(G)."""
        if is_edge_element(x):
            u, v = x
            out = [u, v]
            for w in self.adj[u]:
                if w != v:
                    out.append(canon_edge(u, w))
            for w in self.adj[v]:
                if w != u:
                    out.append(canon_edge(v, w))
            return out
        out = list(self.adj[x])
        out.extend(canon_edge(x, w) for w in self.adj[x])
        return out

    def __eq__(self, other):
        return isinstance(other, Graph) and self.n == other.n and self.edges == other.edges

    def __hash__(self):
        return hash((self.n, self.edges))

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"


def parse_graph(text: str) -> Graph:
    """Parse the line-based format: "p <n> <m>", then m lines "e <u> <v>" (1-indexed).

    Lines starting with "c" are comments.  Loops, duplicate edges, out-of-range
    ids and a wrong edge count are rejected.
    """
    n = m = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "p":
            if n is not None:
                raise GraphError(f"line {lineno}: duplicate header")
            if len(parts) != 3:
                raise GraphError(f"line {lineno}: malformed header {line!r}")
            try:
                n, m = int(parts[1]), int(parts[2])
            except ValueError:
                raise GraphError(f"line {lineno}: malformed header {line!r}") from None
        elif parts[0] == "e":
            if n is None:
                raise GraphError(f"line {lineno}: edge before header")
            if len(parts) != 3:
                raise GraphError(f"line {lineno}: malformed edge line {line!r}")
            try:
                u, v = int(parts[1]), int(parts[2])
            except ValueError:
                raise GraphError(f"line {lineno}: malformed edge line {line!r}") from None
            if not (1 <= u <= n and 1 <= v <= n):
                raise GraphError(f"line {lineno}: vertex id out of range")
            edges.append((u - 1, v - 1))
        else:
            raise GraphError(f"line {lineno}: unrecognized line {line!r}")
    if n is None:
        raise GraphError("missing header")
    if m is not None and m != len(edges):
        raise GraphError(f"header declares {m} edges, found {len(edges)}")
    return Graph(n, edges)


def write_graph(g: Graph) -> str:
    lines = [f"p {g.n} {g.m}"]
    lines.extend(f"e {u + 1} {v + 1}" for u, v in g.edges)
    return "\n".join(lines) + "\n"


def _girth_bfs(g: Graph):
    """Shortest cycle length via BFS from every edge; math.inf for forests.

    For each edge uv, the shortest cycle through uv has length
    1 + dist(u, v) in G - uv.
    """
    best = math.inf
    for u, v in g.edges:
        dist = [-1] * g.n
        dist[u] = 0
        queue = deque([u])
        while queue:
            x = queue.popleft()
            if dist[x] + 1 >= best:
                continue
            for y in g.adj[x]:
                if x == u and y == v:
                    continue
                if dist[y] < 0:
                    dist[y] = dist[x] + 1
                    if y == v:
                        queue.clear()
                        break
                    queue.append(y)
        if dist[v] >= 0:
            best = min(best, dist[v] + 1)
    return best


def girth(g: Graph):
    """Length of a shortest cycle of g (math.inf if acyclic)."""
    return g.girth()


def total_distance(g: Graph, x, y) -> int:
    """Distance between two total elements in the total graph T(G)."""
    for z in (x, y):
        if is_edge_element(z):
            if canon_edge(*z) not in g.edge_set():
                raise GraphError(f"edge {z} not in graph")
        elif not (0 <= z < g.n):
            raise GraphError(f"vertex {z} not in graph")
    if is_edge_element(x):
        x = canon_edge(*x)
    if is_edge_element(y):
        y = canon_edge(*y)
    if x == y:
        return 0
    dist = {x: 0}
    queue = deque([x])
    while queue:
        z = queue.popleft()
        for w in g.total_neighbors(z):
            if w not in dist:
                dist[w] = dist[z] + 1
                if w == y:
                    return dist[w]
                queue.append(w)
    raise GraphError(f"{x} and {y} lie in different components of T(G)")


def elements_within(g: Graph, sources, radius: int) -> dict:
    """Map of total elements at T(G)-distance <= radius from any source."""
    dist = {}
    queue = deque()
    for s in sources:
        if is_edge_element(s):
            s = canon_edge(*s)
        if s not in dist:
            dist[s] = 0
            queue.append(s)
    while queue:
        z = queue.popleft()
        if dist[z] == radius:
            continue
        for w in g.total_neighbors(z):
            if w not in dist:
                dist[w] = dist[z] + 1
                queue.append(w)
    return dist


def neighbourhood(g: Graph, edges, i: int) -> frozenset:
    """The i-neighbourhood of an edge set: vertices at T(G)-distance <= i,
    plus edges with both endvertices among them."""
    if i < 0:
        raise GraphError("radius must be nonnegative")
    B = [canon_edge(*e) for e in edges]
    for e in B:
        if e not in g.edge_set():
            raise GraphError(f"edge {e} not in graph")
    dist = elements_within(g, B, i)
    verts = {z for z in dist if not is_edge_element(z)}
    out = set(verts)
    out.update(e for e in g.edges if e[0] in verts and e[1] in verts)
    return frozenset(out)


@dataclass(frozen=True)
class Matching:
    """A set of pairwise disjoint edges."""

    edges: frozenset

    def __post_init__(self):
        covered = set()
        for u, v in self.edges:
            if u in covered or v in covered:
                raise GraphError("matching edges share a vertex")
            covered.add(u)
            covered.add(v)

    def covered_vertices(self) -> frozenset:
        return frozenset(v for e in self.edges for v in e)

    def is_perfect(self, g: Graph) -> bool:
        return len(self.edges) * 2 == g.n


def _has_perfect_matching(g: Graph) -> bool:
    """Maximum-matching existence check (blossom, via networkx)."""
    import networkx as nx

    gx = nx.Graph()
    gx.add_nodes_from(range(g.n))
    gx.add_edges_from(g.edges)
    m = nx.max_weight_matching(gx, maxcardinality=True)
    return 2 * len(m) == g.n


def perfect_matchings(g: Graph, cap: int | None = None):
    """All perfect matchings by backtracking on the lowest uncovered vertex.

    Returns (matchings, complete).  complete is False when `cap` stopped the
    enumeration early.  Odd order gives ([], True).
    """
    if g.n % 2 == 1:
        return [], True
    if g.n == 0:
        return [Matching(frozenset())], True
    if g.n > 30 and not _has_perfect_matching(g):
        return [], True

    out = []
    limit = None if cap is None else cap + 1
    covered = [False] * g.n
    chosen = []

    def backtrack():
        if limit is not None and len(out) >= limit:
            return
        try:
            v = covered.index(False)
        except ValueError:
            out.append(Matching(frozenset(chosen)))
            return
        covered[v] = True
        for w in g.adj[v]:
            if not covered[w]:
                covered[w] = True
                chosen.append(canon_edge(v, w))
                backtrack()
                chosen.pop()
                covered[w] = False
                if limit is not None and len(out) >= limit:
                    break
        covered[v] = False

    backtrack()
    if limit is not None and len(out) >= limit:
        return out[:cap], False
    return out, True


def first_perfect_matching(g: Graph) -> Matching | None:
    """One perfect matching, or None.  Uses the blossom maximum matching;
    backtracking can branch exponentially on graphs this is used for."""
    if g.n % 2 == 1:
        return None
    import networkx as nx

    gx = nx.Graph()
    gx.add_nodes_from(range(g.n))
    gx.add_edges_from(g.edges)
    mm = nx.max_weight_matching(gx, maxcardinality=True)
    if 2 * len(mm) != g.n:
        return None
    return Matching(frozenset(canon_edge(u, v) for u, v in mm))


class OrientedTwoFactor:
    """Spanning 2-regular subgraph with every cycle given a direction.

    succ maps each vertex to its successor; the functional graph must be a
    disjoint union of directed cycles whose arcs are edges of the host graph.
    """

    __slots__ = ("succ", "pred", "cycles", "_edges", "n")

    def __init__(self, g: Graph, succ: dict):
        if len(succ) != g.n or set(succ) != set(range(g.n)):
            raise GraphError("succ must be defined on all vertices")
        if len(set(succ.values())) != g.n:
            raise GraphError("succ must be a bijection")
        pred = {}
        edges = set()
        for v, w in succ.items():
            if not g.has_edge(v, w):
                raise GraphError(f"arc ({v},{w}) is not an edge of the host graph")
            pred[w] = v
            e = canon_edge(v, w)
            if e in edges:
                raise GraphError(f"edge {e} traversed twice")
            edges.add(e)
        deg = {}
        for u, v in edges:
            deg[u] = deg.get(u, 0) + 1
            deg[v] = deg.get(v, 0) + 1
        if any(deg.get(v, 0) != 2 for v in range(g.n)):
            raise GraphError("support of the 2-factor is not 2-regular")
        self.succ = dict(succ)
        self.pred = pred
        self.n = g.n
        self._edges = frozenset(edges)
        self.cycles = self._build_cycles()

    def _build_cycles(self):
        seen = set()
        cycles = []
        for v in range(self.n):
            if v in seen:
                continue
            cyc = [v]
            seen.add(v)
            w = self.succ[v]
            while w != v:
                cyc.append(w)
                seen.add(w)
                w = self.succ[w]
            anchor = cyc.index(min(cyc))
            cyc = cyc[anchor:] + cyc[:anchor]
            cycles.append(tuple(cyc))
        cycles.sort(key=lambda c: c[0])
        return tuple(cycles)

    @property
    def edges(self) -> frozenset:
        return self._edges

    def has_edge(self, e) -> bool:
        return canon_edge(*e) in self._edges

    def arc(self, e) -> tuple[int, int]:
        """The (tail, head) orientation of an F-edge."""
        u, v = e
        if self.succ[u] == v:
            return (u, v)
        if self.succ[v] == u:
            return (v, u)
        raise GraphError(f"{e} is not an edge of the 2-factor")

    def left_end(self, e) -> int:
        return self.arc(e)[0]

    def right_end(self, e) -> int:
        return self.arc(e)[1]

    def edge_after(self, e) -> tuple[int, int]:
        _, h = self.arc(e)
        return canon_edge(h, self.succ[h])

    def edge_before(self, e) -> tuple[int, int]:
        t, _ = self.arc(e)
        return canon_edge(t, self.pred[t])

    def cycle_of(self, v: int) -> tuple[int, ...]:
        for cyc in self.cycles:
            if v in cyc:
                return cyc
        raise GraphError(f"vertex {v} not on any cycle")

    def cycle_edges(self, cyc) -> list[tuple[int, int]]:
        return [canon_edge(cyc[i], cyc[(i + 1) % len(cyc)]) for i in range(len(cyc))]

    def __repr__(self):
        lens = ",".join(str(len(c)) for c in self.cycles)
        return f"OrientedTwoFactor(cycles=[{lens}])"


def orient_two_factor(g: Graph, edges) -> OrientedTwoFactor:
    """Orient a 2-regular spanning edge set: each cycle is traversed from its
    smallest vertex toward its smaller-id neighbour."""
    nbr = {v: [] for v in range(g.n)}
    for u, v in (canon_edge(*e) for e in edges):
        nbr[u].append(v)
        nbr[v].append(u)
    if any(len(ns) != 2 for ns in nbr.values()):
        raise GraphError("edge set is not 2-regular spanning")
    succ = {}
    visited = set()
    for v0 in range(g.n):
        if v0 in visited:
            continue
        nxt = min(nbr[v0])
        prev, cur = v0, nxt
        succ[v0] = nxt
        visited.add(v0)
        while cur != v0:
            visited.add(cur)
            a, b = nbr[cur]
            nxt = b if a == prev else a
            succ[cur] = nxt
            prev, cur = cur, nxt
    return OrientedTwoFactor(g, succ)


def complement_two_factor(g: Graph, m: Matching) -> OrientedTwoFactor:
    """The oriented 2-factor G - M for a perfect matching M of a cubic graph."""
    if not g.is_regular(3):
        raise GraphError("graph is not cubic")
    if not m.is_perfect(g):
        raise GraphError("matching is not perfect")
    if not m.edges <= g.edge_set():
        raise GraphError("matching uses edges outside the graph")
    return orient_two_factor(g, g.edge_set() - m.edges)


def mates(g: Graph, F: OrientedTwoFactor, v: int) -> list[int]:
    """Neighbours of v outside the 2-factor (deg(v) - 2 of them)."""
    return [w for w in g.adj[v] if canon_edge(v, w) not in F.edges]


def _euler_circuit(adj: dict) -> list[int]:
    """Hierholzer tour on a connected even-degree multigraph given as
    {v: multiset-list of neighbours}; consumes the adjacency."""
    start = next(v for v, ns in adj.items() if ns)
    stack = [start]
    tour = []
    while stack:
        v = stack[-1]
        if adj[v]:
            w = adj[v].pop()
            adj[w].remove(v)
            stack.append(w)
        else:
            tour.append(stack.pop())
    return tour[::-1]


def _bipartite_perfect_matching(left, right_of: dict) -> dict:
    """Kuhn's augmenting-path matching; right_of[v] lists admissible partners.
    Returns {left: right}; raises if no perfect matching exists."""
    match_l, match_r = {}, {}

    def augment(v, seen):
        for w in right_of[v]:
            if w in seen:
                continue
            seen.add(w)
            if w not in match_r or augment(match_r[w], seen):
                match_l[v] = w
                match_r[w] = v
                return True
        return False

    for v in left:
        if v not in match_l and not augment(v, set()):
            raise GraphError("bipartite matching does not exist")
    return match_l


def two_factorize_even(g: Graph) -> list[OrientedTwoFactor]:
    """Decompose a connected Delta-regular graph (Delta even) into Delta/2
    edge-disjoint oriented 2-factors, via an Euler tour and repeated perfect
    matchings of the out/in split graph."""
    if g.n == 0:
        return []
    d = g.max_degree()
    if d % 2 == 1 or not g.is_regular(d):
        raise GraphError("graph must be regular of even degree")
    comp = _components(g)
    arcs = []
    for verts in comp:
        adj = {v: sorted(g.adj[v], reverse=True) for v in verts}
        tour = _euler_circuit(adj)
        arcs.extend(zip(tour, tour[1:]))
    out_adj = {v: [] for v in range(g.n)}
    for u, v in arcs:
        out_adj[u].append(v)

    factors = []
    for _ in range(d // 2):
        match = _bipartite_perfect_matching(list(range(g.n)), out_adj)
        factors.append(orient_two_factor(g, (canon_edge(u, v) for u, v in match.items())))
        for u, v in match.items():
            out_adj[u].remove(v)
    return factors


def _components(g: Graph) -> list[list[int]]:
    seen = [False] * g.n
    comps = []
    for s in range(g.n):
        if seen[s]:
            continue
        comp = [s]
        seen[s] = True
        queue = deque([s])
        while queue:
            v = queue.popleft()
            for w in g.adj[v]:
                if not seen[w]:
                    seen[w] = True
                    comp.append(w)
                    queue.append(w)
        comps.append(comp)
    return comps


def is_connected(g: Graph) -> bool:
    return g.n <= 1 or len(_components(g)) == 1


def bridges(g: Graph) -> list[tuple[int, int]]:
    """All bridges, by iterative DFS low-link (graph is simple, so the parent
    edge is skipped exactly once)."""
    disc = [-1] * g.n
    low = [0] * g.n
    out = []
    timer = 0
    for root in range(g.n):
        if disc[root] >= 0:
            continue
        disc[root] = low[root] = timer
        timer += 1
        stack = [(root, -1, iter(g.adj[root]))]
        while stack:
            v, parent, it = stack[-1]
            advanced = False
            for w in it:
                if w == parent:
                    continue  # the unique parent edge of a simple graph
                if disc[w] < 0:
                    disc[w] = low[w] = timer
                    timer += 1
                    stack.append((w, v, iter(g.adj[w])))
                    advanced = True
                    break
                low[v] = min(low[v], disc[w])
            if not advanced:
                stack.pop()
                if stack:
                    pv = stack[-1][0]
                    low[pv] = min(low[pv], low[v])
                    if low[v] > disc[pv]:
                        out.append(canon_edge(pv, v))
    return out


def is_bridgeless(g: Graph) -> bool:
    return not bridges(g)


def generate(kind: str, **params) -> Graph:
    """Named test graphs.

    Kinds: cycle(n), complete(n), complete_bipartite(a, b), prism(n=3),
    generalized_petersen(n, k), random_cubic_girth(n, min_girth, seed,
    retries=...).
    """
    if kind == "cycle":
        n = params["n"]
        if n < 3:
            raise GraphError("cycle needs n >= 3")
        return Graph(n, [(i, (i + 1) % n) for i in range(n)])
    if kind == "complete":
        n = params["n"]
        return Graph(n, list(combinations(range(n), 2)))
    if kind == "complete_bipartite":
        a, b = params["a"], params["b"]
        return Graph(a + b, [(i, a + j) for i in range(a) for j in range(b)])
    if kind == "prism":
        n = params.get("n", 3)
        if n < 3:
            raise GraphError("prism needs n >= 3")
        edges = [(i, (i + 1) % n) for i in range(n)]
        edges += [(n + i, n + (i + 1) % n) for i in range(n)]
        edges += [(i, n + i) for i in range(n)]
        return Graph(2 * n, edges)
    if kind == "generalized_petersen":
        n, k = params["n"], params["k"]
        if n < 3 or not (1 <= k < n) or 2 * k == n:
            raise GraphError("invalid generalized Petersen parameters")
        edges = [(i, (i + 1) % n) for i in range(n)]
        edges += [(i, n + i) for i in range(n)]
        edges += [(n + i, n + (i + k) % n) for i in range(n)]
        return Graph(2 * n, edges)
    if kind == "random_cubic_girth":
        return random_cubic_girth(
            params["n"],
            params["min_girth"],
            params["seed"],
            retries=params.get("retries", 20000),
        )
    raise GraphError(f"unknown generator kind {kind!r}")


def random_cubic_girth(n: int, min_girth: int, seed: int, retries: int = 20000) -> Graph:
    """Random connected bridgeless cubic graph with girth >= min_girth."""
    return random_regular_girth(n, 3, min_girth, seed, retries=retries)


def random_regular_girth(n: int, d: int, min_girth: int, seed: int, retries: int = 20000) -> Graph:
    """Random connected bridgeless d-regular graph with girth >= min_girth.

    Stubs are paired sequentially, a partner being admissible when the new
    edge closes no cycle shorter than min_girth; dead ends restart the
    attempt.  Pure configuration-model rejection is hopeless for the girths
    used here (acceptance probability ~ exp(-sum (d-1)^i/2i)), so
    admissibility is enforced during construction instead.
    """
    if (n * d) % 2 == 1:
        raise GraphError("n*d must be even")
    if d < 2 or n <= d:
        raise GraphError("need 2 <= d < n")
    rng = random.Random(seed)
    for _ in range(retries):
        edges = _try_grow_regular(n, d, min_girth, rng)
        if edges is None:
            continue
        g = Graph(n, edges)
        if not is_connected(g) or not is_bridgeless(g):
            continue
        if g.girth() < min_girth:
            continue
        return g
    raise GraphError("retry budget exhausted")


def _try_grow_regular(n: int, d: int, min_girth: int, rng) -> list | None:
    stubs = [d] * n
    adj = [set() for _ in range(n)]
    edges = []
    remaining = n * d // 2
    while remaining:
        u = min((v for v in range(n) if stubs[v]), key=lambda v: (-stubs[v], v))
        banned = _ball(adj, u, min_girth - 2)
        choices = [v for v in range(n) if stubs[v] and v != u and v not in adj[u] and v not in banned]
        if not choices:
            return None
        v = rng.choice(choices)
        adj[u].add(v)
        adj[v].add(u)
        stubs[u] -= 1
        stubs[v] -= 1
        edges.append((u, v))
        remaining -= 1
    return edges


def _ball(adj, src: int, radius: int) -> set:
    """Vertices within graph distance `radius` of src (src included)."""
    if radius < 0:
        return set()
    dist = {src: 0}
    queue = deque([src])
    while queue:
        x = queue.popleft()
        if dist[x] == radius:
            continue
        for y in adj[x]:
            if y not in dist:
                dist[y] = dist[x] + 1
                queue.append(y)
    return set(dist)
