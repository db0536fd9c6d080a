"""Randomized construction of full total independent sets along a 2-factor.

Phase 1 assigns independent uniform levels to the boundary edges, seeds each
path of F - B with a virtual (edge, vertex) pair drawn with probabilities
(p(t), q(t), p(t)), and propagates deterministically: an edge enters T when
its two predecessors stayed out, a vertex enters when additionally none of
its mates blocks it (a mate at a strictly lower level blocks when it entered
T; an equal level always blocks).  Phase 2 repairs the junctions at boundary
edges by the fixed conflict table; each resolution touches only the
2-neighbourhood of its boundary edge.

One junction case is easy to overlook: the tail of the boundary edge can be
uncovered while none of u0, u'' or a mate of the tail is in T (reachable
through level ties and through xi-damping).  The table's last row adds the
tail vertex itself then; without that row the output fails fullness at a
rate of order 1/k.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .graphs import (
    Graph,
    GraphError,
    OrientedTwoFactor,
    canon_edge,
    is_edge_element,
    mates,
    neighbourhood,
)
from .recurrence import RecurrenceTable, pq_table

CONFLICT_TYPES = ("I", "II", "IIIa", "IIIb", "IIIc", "IVa", "IVb", "IVc", "IVd")


class GeometryError(GraphError):
    """Boundary set too dense or too sparse for the conflict-table geometry."""


class InternalInvariantError(AssertionError):
    """A structural invariant of the algorithm failed; indicates a bug."""


@dataclass(frozen=True)
class SamplerParams:
    k: int
    xi: float = 1.0

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if not 0 <= self.xi <= 1:
            raise ValueError("xi must lie in [0, 1]")


@dataclass(frozen=True)
class PathAlongFactor:
    """The component of F - B following a boundary edge, in orientation order.

    vertices = [u_0 .. u_r]; edges[j-1] = e_j = u_{j-1} u_j.
    """

    boundary: tuple[int, int]
    vertices: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class LevelAssignment:
    boundary_level: dict
    element_level: dict
    order: tuple
    paths: dict

    def level_of(self, x):
        return self.element_level[x]


@dataclass(frozen=True)
class TotalSet:
    elements: frozenset
    provenance: str = "resolved"

    def __contains__(self, x):
        return x in self.elements

    def __len__(self):
        return len(self.elements)

    def is_total_independent(self, g: Graph) -> bool:
        return independence_violation(g, self.elements) is None

    def is_full(self, g: Graph) -> bool:
        return fullness_violation(g, self.elements) is None


@dataclass(frozen=True)
class ConflictRecord:
    boundary: tuple[int, int]
    kind: str
    removed: tuple
    added: tuple


@dataclass
class SampleResult:
    total_set: TotalSet
    phase1_set: frozenset
    conflicts: tuple
    levels: LevelAssignment
    seeds: dict


def build_paths(F: OrientedTwoFactor, B) -> dict:
    """Split every cycle of F at its boundary edges.

    Every cycle must contain at least one boundary edge.  The path following
    a boundary edge runs from its head to the tail of the next boundary edge
    along the cycle.
    """
    bset = {canon_edge(*e) for e in B}
    if not bset <= F.edges:
        raise GeometryError("boundary edges must lie on the 2-factor")
    paths = {}
    for cyc in F.cycles:
        cyc_edges = F.cycle_edges(cyc)
        marks = [i for i, e in enumerate(cyc_edges) if e in bset]
        if not marks:
            raise GeometryError(f"cycle through {cyc[0]} has no boundary edge")
        L = len(cyc)
        for pos, i in enumerate(marks):
            nxt = marks[(pos + 1) % len(marks)]
            # vertices from head of edge i up to tail of edge nxt
            span = (nxt - i) % L or L
            verts = [cyc[(i + 1 + j) % L] for j in range(span)]
            edges = [canon_edge(verts[j], verts[j + 1]) for j in range(span - 1)]
            paths[cyc_edges[i]] = PathAlongFactor(
                boundary=cyc_edges[i], vertices=tuple(verts), edges=tuple(edges)
            )
    return paths


def assign_levels(F: OrientedTwoFactor, B, params: SamplerParams, rng) -> LevelAssignment:
    """Uniform iid levels on the boundary edges, propagated to every vertex
    and F-edge of the path that follows each boundary edge."""
    paths = build_paths(F, B)
    blist = sorted(paths)
    boundary_level = {e: rng.randint(1, params.k) for e in blist}
    element_level = dict(boundary_level)
    for e, path in paths.items():
        t = boundary_level[e]
        for v in path.vertices:
            element_level[v] = t
        for pe in path.edges:
            element_level[pe] = t
    order = tuple(sorted(blist, key=lambda e: (boundary_level[e], e)))
    return LevelAssignment(
        boundary_level=boundary_level,
        element_level=element_level,
        order=order,
        paths=paths,
    )


def _mate_map(g: Graph, F: OrientedTwoFactor) -> dict:
    return {v: tuple(mates(g, F, v)) for v in range(g.n)}


def phase1(
    g: Graph,
    F: OrientedTwoFactor,
    B,
    levels: LevelAssignment,
    params: SamplerParams,
    rng,
    table: RecurrenceTable | None = None,
    mate_map: dict | None = None,
):
    """Seed and propagate along every path, in level order.

    Returns (included_set, seeds) where seeds maps each boundary edge to the
    seed branch drawn for its path ("edge", "vertex" or "neither").
    """
    if table is None:
        table = pq_table(params.k, xi=params.xi, delta=max(3, g.max_degree()), exact=False)
    pf = [float(x) for x in table.p]
    qf = [float(x) for x in table.q]
    if mate_map is None:
        mate_map = _mate_map(g, F)
    xi = params.xi
    T = set()
    seeds = {}
    lvl = levels.element_level
    for b in levels.order:
        path = levels.paths[b]
        t = levels.boundary_level[b]
        u = rng.random()
        if u < pf[t - 1]:
            seeds[b] = "edge"
            prev_e, prev_u = True, False
        elif u < pf[t - 1] + qf[t - 1]:
            seeds[b] = "vertex"
            prev_e, prev_u = False, True
        else:
            seeds[b] = "neither"
            prev_e, prev_u = False, False
        # elements along the walk: e_0 (= b), u_0, e_1, u_1, ..., e_r, u_r
        elems = [b]
        for v, e in zip(path.vertices, list(path.edges) + [None]):
            elems.append(v)
            if e is not None:
                elems.append(e)
        for x in elems:
            if is_edge_element(x):
                cur = not prev_e and not prev_u
                if cur:
                    T.add(x)
                prev_e = cur
            else:
                cur = not prev_u and not prev_e
                if cur:
                    for m in mate_map[x]:
                        lm = lvl[m]
                        lx = lvl[x]
                        if lm == lx or (lm < lx and m in T):
                            cur = False
                            break
                if cur and xi < 1:
                    cur = rng.random() < xi
                if cur:
                    T.add(x)
                prev_u = cur
    return T, seeds


def _junction(F: OrientedTwoFactor, b):
    tail, head = F.arc(b)
    u1 = F.succ[head]
    u_dp = F.pred[tail]
    return {
        "u0": head,
        "u1": u1,
        "e1": canon_edge(head, u1),
        "u_prime": tail,
        "u_dprime": u_dp,
        "e_prime": canon_edge(u_dp, tail),
    }


def validate_geometry(g: Graph, F: OrientedTwoFactor, B):
    """Diagnostic for boundary sets too dense for the conflict table: the
    F-edges adjacent to a boundary edge must not be boundary edges."""
    bset = {canon_edge(*e) for e in B}
    for b in bset:
        j = _junction(F, b)
        if j["e1"] in bset or j["e_prime"] in bset:
            raise GeometryError(f"boundary edges within one F-step of {b}")


def detect_conflicts(g, F, B, T, levels=None, mate_map=None) -> list[ConflictRecord]:
    """Evaluate the conflict table at every boundary edge against the
    post-phase-1 set T; at most one case may hold per edge."""
    if mate_map is None:
        mate_map = _mate_map(g, F)
    records = []
    for b in sorted(canon_edge(*e) for e in B):
        j = _junction(F, b)
        u0, u1, e1 = j["u0"], j["u1"], j["e1"]
        up, udp, ep = j["u_prime"], j["u_dprime"], j["e_prime"]
        up_in = up in T
        u0_in = u0 in T
        e0_in = b in T
        mates_u0_in = [m for m in mate_map[u0] if m in T]
        mates_up_in = [m for m in mate_map[up] if m in T]
        covered = up_in or e0_in or (ep in T) or any(
            canon_edge(up, m) in T for m in mate_map[up]
        )
        fired = []
        if up_in and u0_in:
            fired.append(("I", (up, u0), (b,)))
        if up_in and e0_in:
            fired.append(("II", (up,), ()))
        if ep in T and e0_in and u1 in T:
            fired.append(("IIIa", (b, u1), (e1,)))
        if ep in T and e0_in and u1 not in T and mates_u0_in:
            m = min(mates_u0_in)
            fired.append(("IIIb", (b, m), (canon_edge(u0, m),)))
        if ep in T and e0_in and u1 not in T and not mates_u0_in:
            fired.append(("IIIc", (b,), (u0,)))
        if not covered and u0_in:
            fired.append(("IVa", (u0,), (b,)))
        if not covered and not u0_in and udp in T:
            fired.append(("IVb", (udp,), (ep,)))
        if not covered and not u0_in and udp not in T and mates_up_in:
            m = min(mates_up_in)
            fired.append(("IVc", (m,), (canon_edge(up, m),)))
        if not covered and not u0_in and udp not in T and not mates_up_in:
            fired.append(("IVd", (), (up,)))
        if len(fired) > 1:
            raise InternalInvariantError(
                f"conflict predicates {[f[0] for f in fired]} fired together at {b}"
            )
        if fired:
            kind, removed, added = fired[0]
            records.append(ConflictRecord(boundary=b, kind=kind, removed=removed, added=added))
    return records


def resolve_conflicts(T, records) -> frozenset:
    """Apply every resolution; removals are collected before additions, so
    the outcome does not depend on record order."""
    removes = set()
    adds = set()
    for r in records:
        removes.update(r.removed)
        adds.update(r.added)
    clash = removes & adds
    if clash:
        raise InternalInvariantError(f"conflicting edits on {sorted(clash)}")
    return frozenset((set(T) - removes) | adds)


FB_TYPE_NAMES = {
    1: "tail predecessor vertex",
    2: "F-edge into tail",
    3: "tail",
    4: "boundary edge",
    5: "head",
    6: "F-edge out of head",
    7: "head successor vertex",
    8: "mate of tail",
    9: "matching edge at tail",
    10: "matching edge at head",
    11: "mate of head",
}


def _type_slots(g: Graph, F: OrientedTwoFactor, b, mate_map):
    j = _junction(F, b)
    up, u0 = j["u_prime"], j["u0"]
    mt = mate_map[up]
    mh = mate_map[u0]
    if len(mt) != 1 or len(mh) != 1:
        raise GeometryError("(F,B)-types are defined for cubic graphs only")
    return {
        1: j["u_dprime"],
        2: j["e_prime"],
        3: up,
        4: b,
        5: u0,
        6: j["e1"],
        7: j["u1"],
        8: mt[0],
        9: canon_edge(up, mt[0]),
        10: canon_edge(u0, mh[0]),
        11: mh[0],
    }


def classify_type(g: Graph, F: OrientedTwoFactor, B, x):
    """The position of x inside the 2-neighbourhood of a boundary edge
    (labels 1..11), or None when x sits outside all of them."""
    if is_edge_element(x):
        x = canon_edge(*x)
    mate_map = _mate_map(g, F)
    found = None
    for b in sorted(canon_edge(*e) for e in B):
        slots = _type_slots(g, F, b, mate_map)
        for label, elem in slots.items():
            if elem == x:
                if found is not None and found[0] != b:
                    raise GeometryError(f"{x} lies in two boundary neighbourhoods")
                found = (b, label)
    return found[1] if found else None


def sample_full_tis(
    g: Graph,
    F: OrientedTwoFactor,
    B,
    params: SamplerParams,
    rng,
    table: RecurrenceTable | None = None,
    mate_map: dict | None = None,
) -> SampleResult:
    """End-to-end: levels, phase 1, conflict detection, resolution."""
    validate_geometry(g, F, B)
    if table is None:
        table = pq_table(params.k, xi=params.xi, delta=max(3, g.max_degree()), exact=False)
    if mate_map is None:
        mate_map = _mate_map(g, F)
    levels = assign_levels(F, B, params, rng)
    T, seeds = phase1(g, F, B, levels, params, rng, table=table, mate_map=mate_map)
    records = detect_conflicts(g, F, B, T, levels, mate_map=mate_map)
    resolved = resolve_conflicts(T, records)
    return SampleResult(
        total_set=TotalSet(elements=resolved, provenance="resolved"),
        phase1_set=frozenset(T),
        conflicts=tuple(records),
        levels=levels,
        seeds=seeds,
    )


def trial_rng(master_seed, index: int) -> random.Random:
    """Independent per-trial stream derived from (master seed, trial index)."""
    return random.Random(f"{master_seed}:{index}")


# ---------------------------------------------------------------------------
# checkers (independent of the construction path)


def independence_violation(g: Graph, S):
    """A pair of adjacent elements of T(G) inside S, or None."""
    for x in S:
        if is_edge_element(x):
            u, v = x
            if u in S or v in S:
                return (x, u if u in S else v)
            for w in (u, v):
                for y in g.adj[w]:
                    e = canon_edge(w, y)
                    if e != x and e in S:
                        return (x, e)
        else:
            for y in g.adj[x]:
                if y in S:
                    return (x, y)
                if canon_edge(x, y) in S:
                    return (x, canon_edge(x, y))
    return None


def fullness_violation(g: Graph, S):
    """A vertex neither in S nor incident to an edge of S, or None."""
    covered = set()
    for x in S:
        if is_edge_element(x):
            covered.update(x)
        else:
            covered.add(x)
    for v in range(g.n):
        if v not in covered:
            return v
    return None


def y_set_violation(g: Graph, S):
    """A vertex whose closed edge-star meets S other than exactly once."""
    for v in range(g.n):
        count = (v in S) + sum(1 for w in g.adj[v] if canon_edge(v, w) in S)
        if count != 1:
            return v, count
    return None


def check_sample(g: Graph, F, B, result: SampleResult) -> list[str]:
    """All safety properties of one end-to-end sample; empty list if clean."""
    problems = []
    S = result.total_set.elements
    iv = independence_violation(g, S)
    if iv:
        problems.append(f"independence: {iv}")
    fv = fullness_violation(g, S)
    if fv is not None:
        problems.append(f"fullness: vertex {fv}")
    yv = y_set_violation(g, S)
    if yv:
        problems.append(f"y-set: {yv}")
    region = neighbourhood(g, [r.boundary for r in result.conflicts], 2) if result.conflicts else frozenset()
    delta = S ^ result.phase1_set
    outside = delta - region
    if outside:
        problems.append(f"locality: {sorted(map(str, outside))[:3]}")
    return problems
