"""Maximal independent set enumeration via Bron-Kerbosch with pivoting."""

from __future__ import annotations


class EnumerationCapExceeded(ValueError):
    pass


def maximal_independent_sets(vertices, neighbors: dict, cap: int = 1_000_000):
    """All maximal independent sets of the graph given by `neighbors`.

    Runs Bron-Kerbosch with pivot on the complement: an independent set is a
    clique of the complement graph.  Raises EnumerationCapExceeded past cap.
    """
    verts = list(vertices)
    index = {v: i for i, v in enumerate(verts)}
    n = len(verts)
    comp = [set(range(n)) - {i} for i in range(n)]
    for v, ns in neighbors.items():
        for w in ns:
            comp[index[v]].discard(index[w])

    out = []

    def expand(clique, cand, excl):
        if not cand and not excl:
            out.append(frozenset(verts[i] for i in clique))
            if len(out) > cap:
                raise EnumerationCapExceeded(f"more than {cap} maximal sets")
            return
        pivot = max(cand | excl, key=lambda u: len(comp[u] & cand))
        for v in sorted(cand - comp[pivot]):
            expand(clique + [v], cand & comp[v], excl & comp[v])
            cand = cand - {v}
            excl = excl | {v}

    expand([], set(range(n)), set())
    return out
