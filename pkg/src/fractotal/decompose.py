"""Decomposition of E(F) into 3*ell boundary sets that cut F sparsely.

The pipeline follows the constructive proof: split each cycle into paths of
length ell (one shorter first path), strong-colour the F-edges with ell
colours against an auxiliary conflict graph (edges at total-graph distance
at most 3, plus the caller's constraint graph Q), assign each path a ternary
symbol from the residue-based sequence, and intersect colour classes with
symbol classes.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from .graphs import (
    Graph,
    GraphError,
    OrientedTwoFactor,
    canon_edge,
    elements_within,
    is_edge_element,
)


@dataclass(frozen=True)
class SparseParams:
    ell: int
    strict: bool = True

    def __post_init__(self):
        if self.ell < 2:
            raise GraphError("ell must be >= 2")

    def check_bound(self, q_max_degree: int):
        if self.strict and self.ell < 83 + 3 * q_max_degree:
            raise GraphError(
                f"strict mode needs ell >= {83 + 3 * q_max_degree}, got {self.ell}"
            )


class ConstraintGraph:
    """Graph on the F-edges: pairs that must not share a boundary set."""

    def __init__(self, edges=()):
        self.adj = {}
        for e, f in edges:
            e, f = canon_edge(*e), canon_edge(*f)
            if e == f:
                raise GraphError("constraint loops are meaningless")
            self.adj.setdefault(e, set()).add(f)
            self.adj.setdefault(f, set()).add(e)

    def neighbors(self, e):
        return self.adj.get(canon_edge(*e), ())

    def max_degree(self) -> int:
        return max((len(s) for s in self.adj.values()), default=0)

    def are_adjacent(self, e, f) -> bool:
        return canon_edge(*f) in self.adj.get(canon_edge(*e), ())


@dataclass(frozen=True)
class PathClass:
    """A split piece of one cycle: `edges` in orientation order."""

    cycle_index: int
    position: int  # 1-based along the cycle
    edges: tuple


@dataclass
class BoundarySet:
    edges: frozenset
    ell: int
    colour: int
    symbol: int
    report: dict = field(default_factory=dict)

    def passed(self) -> bool:
        return bool(self.report.get("passed"))


def path_partition(F: OrientedTwoFactor, ell: int) -> list[list[PathClass]]:
    """Split every cycle into ceil(|C|/ell) edge-disjoint paths along the
    orientation: the first takes the remainder (length in [1, ell]), the rest
    have length exactly ell.  Cycles of length <= ell are rejected."""
    if ell < 2:
        raise GraphError("ell must be >= 2")
    out = []
    for ci, cyc in enumerate(F.cycles):
        L = len(cyc)
        if L < ell + 1:
            raise GraphError(f"cycle of length {L} too short for ell={ell}")
        m = -(-L // ell)
        first = L - (m - 1) * ell
        edges = F.cycle_edges(cyc)
        paths = []
        start = 0
        for j in range(1, m + 1):
            size = first if j == 1 else ell
            paths.append(
                PathClass(cycle_index=ci, position=j, edges=tuple(edges[start : start + size]))
            )
            start += size
        out.append(paths)
    return out


_TERNARY_BASE = {0: "012012", 1: "0102012", 2: "01021012"}
_TERNARY_SHORT = {3: "012", 4: "0102"}


def ternary_sequence(m: int, strict: bool = True) -> list[int]:
    """Length-m symbol sequence over {0,1,2}: starts 01, ends 2, cyclically
    equal symbols are 1..3 apart and zeros at most 2 apart.

    The construction inserts 201-blocks before the final symbol of the
    residue base.  Strict mode requires m >= 6, where the construction is
    uniform; relaxed mode additionally admits m in {3, 4}.  No valid
    sequence exists for m = 5.
    """
    if m < 6:
        if strict or m not in _TERNARY_SHORT:
            raise GraphError(f"no ternary sequence for m={m} (strict={strict})")
        return [int(c) for c in _TERNARY_SHORT[m]]
    base = _TERNARY_BASE[m % 3]
    blocks = (m - len(base)) // 3
    seq = base[:-1] + "201" * blocks + base[-1]
    return [int(c) for c in seq]


def validate_ternary(seq) -> list[str]:
    """Independent checker of the sequence constraints; empty when valid."""
    problems = []
    m = len(seq)
    if m < 3:
        return ["too short"]
    if seq[0] != 0 or seq[1] != 1:
        problems.append("does not start 01")
    if seq[-1] != 2:
        problems.append("does not end 2")
    if any(s not in (0, 1, 2) for s in seq):
        problems.append("alphabet")
    for sym in (0, 1, 2):
        pos = [i for i, s in enumerate(seq) if s == sym]
        if not pos:
            problems.append(f"symbol {sym} missing")
            continue
        gaps = [(b - a - 1) for a, b in zip(pos, pos[1:])]
        gaps.append(pos[0] + m - pos[-1] - 1)  # wrap-around separation
        hi = 2 if sym == 0 else 3
        for gsep in gaps:
            if not 1 <= gsep <= hi:
                problems.append(f"symbol {sym} separation {gsep} outside [1,{hi}]")
                break
    return problems


def aux_conflict_graph(g: Graph, F: OrientedTwoFactor, Q: ConstraintGraph | None) -> dict:
    """Adjacency on E(F): pairs at total-graph distance <= 3, plus Q."""
    fedges = sorted(F.edges)
    adj = {e: set() for e in fedges}
    fset = set(fedges)
    for e in fedges:
        near = elements_within(g, [e], 3)
        for x in near:
            if x != e and is_edge_element(x) and x in fset:
                adj[e].add(x)
    if Q is not None:
        for e in fedges:
            for f in Q.neighbors(e):
                if f not in fset:
                    raise GraphError(f"constraint edge endpoint {f} not on F")
                if f != e:
                    adj[e].add(f)
                    adj[f].add(e)
    return adj


def _pool_short_paths(paths_per_cycle, ell):
    """Classes for the strong colouring: every full path is its own class;
    short first paths are pooled whole (never split) into bins of capacity
    ell, first-fit."""
    classes = []
    bins = []
    for paths in paths_per_cycle:
        for p in paths:
            if len(p.edges) == ell:
                classes.append(list(p.edges))
            else:
                for b in bins:
                    if sum(len(q.edges) for q in b) + len(p.edges) <= ell:
                        b.append(p)
                        break
                else:
                    bins.append([p])
    short_classes = [[e for p in b for e in p.edges] for b in bins]
    return classes + short_classes, len(short_classes)


def validate_strong_colouring(aux: dict, classes, colouring: dict, colours: int) -> list[str]:
    problems = []
    for e, ns in aux.items():
        for f in ns:
            if colouring[e] == colouring[f]:
                problems.append(f"aux edge {e},{f} monochromatic")
    for cls in classes:
        seen = {}
        for e in cls:
            c = colouring[e]
            if c in seen:
                problems.append(f"colour {c} twice in one class")
            seen[c] = e
    if any(not 1 <= c <= colours for c in colouring.values()):
        problems.append("colour out of range")
    return problems


def strong_colour(
    aux: dict,
    classes,
    colours: int,
    rng=None,
    restarts: int = 60,
    steps: int = 4000,
) -> dict:
    """Proper colouring of `aux` hitting every class at most once per colour.

    Randomized repair search (swap two colours inside a class, or move an
    element to a colour unused in its class), restarted on stalls; instances
    with at most 20 elements fall back to exhaustive search.  Raises when the
    budget is exhausted, which relaxed-mode callers must expect.
    """
    if rng is None:
        rng = random.Random(0)
    elements = [e for cls in classes for e in cls]
    if len(set(elements)) != len(elements):
        raise GraphError("classes overlap")
    if any(len(cls) > colours for cls in classes):
        raise GraphError("class larger than the number of colours")
    if set(aux) - set(elements):
        raise GraphError("aux vertex missing from the partition")

    if len(elements) <= 20:
        result = _strong_colour_exhaustive(aux, classes, colours)
        if result is None:
            raise GraphError("no strong colouring exists")
        return result

    class_of = {}
    for idx, cls in enumerate(classes):
        for e in cls:
            class_of[e] = idx

    def conflicts_at(e, colouring):
        ce = colouring[e]
        return sum(1 for f in aux.get(e, ()) if colouring.get(f) == ce)

    for _ in range(restarts):
        colouring = {}
        for cls in classes:
            for e, c in zip(cls, rng.sample(range(1, colours + 1), len(cls))):
                colouring[e] = c
        bad = {e for e in elements if conflicts_at(e, colouring)}
        for _ in range(steps):
            if not bad:
                return colouring
            e = rng.choice(sorted(bad))
            cls = classes[class_of[e]]
            used = {colouring[f] for f in cls}
            best = None
            # move to a free colour
            for c in range(1, colours + 1):
                if c in used:
                    continue
                old = colouring[e]
                colouring[e] = c
                delta = conflicts_at(e, colouring)
                colouring[e] = old
                if best is None or delta < best[0]:
                    best = (delta, "move", c)
            # swap with a classmate
            for f in cls:
                if f == e:
                    continue
                old_e, old_f = colouring[e], colouring[f]
                colouring[e], colouring[f] = old_f, old_e
                delta = conflicts_at(e, colouring) + conflicts_at(f, colouring)
                colouring[e], colouring[f] = old_e, old_f
                if best is None or delta < best[0]:
                    best = (delta, "swap", f)
            if best is None:
                break
            if best[1] == "move":
                colouring[e] = best[2]
            else:
                f = best[2]
                colouring[e], colouring[f] = colouring[f], colouring[e]
            bad = {x for x in elements if conflicts_at(x, colouring)}
        # stalled: restart
    raise GraphError("strong colouring search budget exhausted")


def _strong_colour_exhaustive(aux: dict, classes, colours: int):
    order = [list(cls) for cls in classes]

    def place(ci, colouring):
        if ci == len(order):
            return dict(colouring)
        cls = order[ci]
        for perm in itertools.permutations(range(1, colours + 1), len(cls)):
            ok = True
            for e, c in zip(cls, perm):
                if any(colouring.get(f) == c for f in aux.get(e, ())):
                    ok = False
                    break
                colouring[e] = c
            if ok:
                res = place(ci + 1, colouring)
                if res:
                    return res
            for e in cls:
                colouring.pop(e, None)
        return None

    return place(0, {})


def verify_sparse(
    g: Graph,
    F: OrientedTwoFactor,
    B,
    ell: int,
    Q: ConstraintGraph | None = None,
) -> dict:
    """Check the boundary-set invariants independently of construction:
    pairwise distance >= 4 in T(G), components of F-B are paths with length
    in [ell, 7*ell], Q-independence, and >= 2 edges on every cycle."""
    B = sorted(canon_edge(*e) for e in B)
    bset = set(B)
    report = {"ell": ell, "size": len(B)}

    witness = None
    for i, e in enumerate(B):
        near = elements_within(g, [e], 3)
        for f in B[i + 1 :]:
            if f in near:
                witness = (e, f, near[f])
                break
        if witness:
            break
    report["four_distant"] = {"passed": witness is None, "witness": witness}

    comp_witness = None
    lengths = []
    for cyc in F.cycles:
        edges = F.cycle_edges(cyc)
        marks = [i for i, e in enumerate(edges) if e in bset]
        if not marks:
            comp_witness = ("cycle-without-boundary", cyc[0], len(cyc))
            continue
        L = len(edges)
        for pos, i in enumerate(marks):
            nxt = marks[(pos + 1) % len(marks)]
            comp_len = ((nxt - i) % L or L) - 1
            lengths.append(comp_len)
            if comp_witness is None and not ell <= comp_len <= 7 * ell:
                comp_witness = ("component-length", edges[i], comp_len)
    report["components"] = {
        "passed": comp_witness is None,
        "witness": comp_witness,
        "lengths": sorted(lengths),
    }

    q_witness = None
    if Q is not None:
        for e, f in itertools.combinations(B, 2):
            if Q.are_adjacent(e, f):
                q_witness = (e, f)
                break
    report["q_independent"] = {"passed": q_witness is None, "witness": q_witness}

    short = None
    for cyc in F.cycles:
        cnt = sum(1 for e in F.cycle_edges(cyc) if e in bset)
        if cnt < 2:
            short = (cyc[0], cnt)
            break
    report["two_per_cycle"] = {"passed": short is None, "witness": short}

    report["passed"] = all(
        report[k]["passed"] for k in ("four_distant", "components", "q_independent", "two_per_cycle")
    )
    return report


def decompose(
    g: Graph,
    F: OrientedTwoFactor,
    params: SparseParams,
    Q: ConstraintGraph | None = None,
    seed: int = 0,
) -> list[BoundarySet]:
    """Partition E(F) into 3*ell boundary sets B_{r,t}.

    Colour r ranges over the strong colouring classes, symbol t over the
    ternary sequence; B_{r,t} collects the colour-r edges of the symbol-t
    paths.  Every returned set carries its verify_sparse report; in strict
    mode all reports pass, in relaxed desk-scale mode failures are recorded
    rather than raised.
    """
    ell = params.ell
    params.check_bound(Q.max_degree() if Q is not None else 0)
    paths_per_cycle = path_partition(F, ell)
    symbols = {}
    for paths in paths_per_cycle:
        seq = ternary_sequence(len(paths), strict=params.strict)
        for p, s in zip(paths, seq):
            symbols[(p.cycle_index, p.position)] = s

    classes, n_short = _pool_short_paths(paths_per_cycle, ell)
    aux = aux_conflict_graph(g, F, Q)
    colouring = strong_colour(aux, classes, ell, rng=random.Random(seed))
    problems = validate_strong_colouring(aux, classes, colouring, ell)
    if problems:
        raise GraphError(f"strong colouring invalid: {problems[:3]}")

    buckets = {(r, t): set() for r in range(1, ell + 1) for t in (0, 1, 2)}
    for paths in paths_per_cycle:
        for p in paths:
            t = symbols[(p.cycle_index, p.position)]
            for e in p.edges:
                buckets[(colouring[e], t)].add(e)

    out = []
    for r in range(1, ell + 1):
        for t in (0, 1, 2):
            edges = frozenset(buckets[(r, t)])
            rep = verify_sparse(g, F, edges, ell, Q) if edges else {"passed": False, "empty": True}
            if params.strict and not rep["passed"]:
                raise GraphError(f"strict decomposition produced a failing set (r={r}, t={t})")
            out.append(BoundarySet(edges=edges, ell=ell, colour=r, symbol=t, report=rep))
    if n_short > 1:
        for b in out:
            b.report["short_classes"] = n_short
    return out


def greedy_boundary(
    g: Graph,
    F: OrientedTwoFactor,
    min_gap: int = 4,
    max_per_cycle: int | None = None,
) -> list:
    """A pairwise min_gap-distant boundary set covering every cycle, chosen
    greedily; used where the full decomposition is out of reach.

    Short cycles go first (they run out of admissible edges fastest), and
    each cycle's first pick maximizes the distance to everything chosen so
    far before the rest of the cycle is swept.  max_per_cycle caps how many
    edges a cycle receives; by default the sweep packs maximally."""
    chosen = []
    blocked = set()

    def block(e):
        chosen.append(e)
        blocked.update(
            x for x in elements_within(g, [e], min_gap - 1) if is_edge_element(x)
        )

    for cyc in sorted(F.cycles, key=len):
        edges = F.cycle_edges(cyc)
        free = [e for e in edges if e not in blocked]
        if not free:
            raise GraphError(f"cannot cover cycle through {cyc[0]} at distance {min_gap}")
        if chosen:
            near = elements_within(g, chosen, 2 * min_gap)
            first = max(free, key=lambda e: (near.get(e, 2 * min_gap + 1), e))
        else:
            first = free[0]
        block(first)
        got = 1
        start = edges.index(first)
        stride = max(1, len(edges) // max_per_cycle) if max_per_cycle else 1
        for j in range(start + stride, start + len(edges), stride):
            if max_per_cycle is not None and got >= max_per_cycle:
                break
            e = edges[j % len(edges)]
            if e not in blocked:
                block(e)
                got += 1
    return chosen
