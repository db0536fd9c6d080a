"""Persistence of graphs, oriented factors and boundary sets as text files.

Graphs use the "p/e" format of graphs.parse_graph.  An oriented 2-factor is
stored as arc lines "a <tail> <head>" (1-indexed) so the orientation
survives; a boundary set reuses plain edge lines.
"""

from __future__ import annotations

from .graphs import Graph, GraphError, OrientedTwoFactor, canon_edge


def write_factor(F: OrientedTwoFactor) -> str:
    lines = [f"p {F.n} {F.n}"]
    for v in range(F.n):
        lines.append(f"a {v + 1} {F.succ[v] + 1}")
    return "\n".join(lines) + "\n"


def parse_factor(g: Graph, text: str) -> OrientedTwoFactor:
    succ = {}
    n = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "p":
            n = int(parts[1])
            if n != g.n:
                raise GraphError(f"factor is for n={n}, graph has n={g.n}")
        elif parts[0] == "a":
            if len(parts) != 3:
                raise GraphError(f"line {lineno}: malformed arc")
            u, v = int(parts[1]) - 1, int(parts[2]) - 1
            if u in succ:
                raise GraphError(f"line {lineno}: duplicate tail {u + 1}")
            succ[u] = v
        else:
            raise GraphError(f"line {lineno}: unrecognized line {line!r}")
    return OrientedTwoFactor(g, succ)


def write_edge_set(g: Graph, edges) -> str:
    canon = sorted(canon_edge(*e) for e in edges)
    lines = [f"p {g.n} {len(canon)}"]
    lines.extend(f"e {u + 1} {v + 1}" for u, v in canon)
    return "\n".join(lines) + "\n"


def parse_edge_set(g: Graph, text: str) -> list:
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("p"):
            continue
        parts = line.split()
        if parts[0] != "e" or len(parts) != 3:
            raise GraphError(f"line {lineno}: malformed edge line")
        u, v = int(parts[1]) - 1, int(parts[2]) - 1
        e = canon_edge(u, v)
        if e not in g.edge_set():
            raise GraphError(f"line {lineno}: edge {e} not in the graph")
        edges.append(e)
    return edges
