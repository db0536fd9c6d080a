"""Weight estimation, matching covers, the final mixture, exact LPs, gluing.

Empirical inclusion frequencies are exact rationals (counts over trials), so
the structural identities (one element of each vertex star per sample, the
size-4 identity of the final mixture) can be asserted with equality rather
than tolerances whenever every sample is clean.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .decompose import SparseParams, decompose
from .graphs import (
    Graph,
    GraphError,
    OrientedTwoFactor,
    canon_edge,
    complement_two_factor,
    elements_within,
    is_bridgeless,
    is_edge_element,
    neighbourhood,
    perfect_matchings,
)
from .independent_sets import maximal_independent_sets
from .lp import LPInfeasible, minimize_covering, solve_equalities
from .sampler import (
    SamplerParams,
    check_sample,
    sample_full_tis,
    trial_rng,
    _mate_map,
)
from .recurrence import pq_table

Z99 = 2.5758293035489004  # two-sided 99% normal quantile


@dataclass
class WeightEstimate:
    """Per-element inclusion counts from repeated end-to-end samples."""

    trials: int
    counts: dict
    violations: int
    boundary: tuple = ()

    def frequency(self, x) -> Fraction:
        return Fraction(self.counts.get(x, 0), self.trials)

    def ci99(self, x) -> float:
        p = self.counts.get(x, 0) / self.trials
        return Z99 * math.sqrt(max(p * (1 - p), 1e-12) / self.trials)

    def class_means(self, g: Graph, F: OrientedTwoFactor):
        """(alpha, beta, gamma): means over non-F edges, vertices, F-edges."""
        fedges = F.edges
        verts = range(g.n)
        non_f = [e for e in g.edges if e not in fedges]
        beta = sum((self.frequency(v) for v in verts), Fraction(0)) / g.n
        gamma = sum((self.frequency(e) for e in fedges), Fraction(0)) / len(fedges)
        alpha = (
            sum((self.frequency(e) for e in non_f), Fraction(0)) / len(non_f)
            if non_f
            else Fraction(0)
        )
        return alpha, beta, gamma


def estimate_weights(
    g: Graph,
    F: OrientedTwoFactor,
    B,
    params: SamplerParams,
    trials: int,
    seed,
    table=None,
    mate_map=None,
) -> WeightEstimate:
    """Empirical per-element inclusion frequencies over `trials` samples."""
    if trials < 1:
        raise GraphError("trials must be positive")
    if table is None:
        table = pq_table(params.k, xi=params.xi, delta=max(3, g.max_degree()), exact=False)
    if mate_map is None:
        mate_map = _mate_map(g, F)
    counts = {}
    violations = 0
    for i in range(trials):
        res = sample_full_tis(g, F, B, params, trial_rng(seed, i), table=table, mate_map=mate_map)
        if check_sample(g, F, B, res):
            violations += 1
        for x in res.total_set.elements:
            counts[x] = counts.get(x, 0) + 1
    return WeightEstimate(
        trials=trials,
        counts=counts,
        violations=violations,
        boundary=tuple(sorted(canon_edge(*e) for e in B)),
    )


def type_aggregates(g: Graph, F: OrientedTwoFactor, est: WeightEstimate):
    """Mean frequency per (F,B)-type label 1..11 plus out-of-region class
    means, matching the position-determines-probability claim.

    Desk-scale boundary sets are rarely 4-distant, so an element may take a
    type relative to several boundary edges; it then contributes to each."""
    from .sampler import _type_slots

    B = est.boundary
    region = neighbourhood(g, B, 2)
    mate_map = _mate_map(g, F)
    by_type = {}
    for b in B:
        for label, elem in _type_slots(g, F, b, mate_map).items():
            by_type.setdefault(label, []).append(est.frequency(elem))
    out = {}
    for label, vals in sorted(by_type.items()):
        out[label] = sum(vals, Fraction(0)) / len(vals)
    outside = {"vertex": [], "f_edge": [], "non_f_edge": []}
    for v in range(g.n):
        if v not in region:
            outside["vertex"].append(est.frequency(v))
    for e in g.edges:
        if e not in region:
            key = "f_edge" if e in F.edges else "non_f_edge"
            outside[key].append(est.frequency(e))
    outside_means = {
        k: (sum(vals, Fraction(0)) / len(vals) if vals else None)
        for k, vals in outside.items()
    }
    return out, outside_means


def augment_boundary(g: Graph, F: OrientedTwoFactor, B) -> list:
    """Extend B so every cycle carries a boundary edge; the added edge of an
    uncovered cycle maximizes the total-graph distance to the edges already
    chosen (sparseness is the whole point of boundary sets)."""
    B = [canon_edge(*e) for e in B]
    chosen = set(B)
    for cyc in F.cycles:
        edges = F.cycle_edges(cyc)
        if any(e in chosen for e in edges):
            continue
        if not chosen:
            chosen.add(edges[0])
            B.append(edges[0])
            continue
        near = elements_within(g, sorted(chosen), 6)
        far = max(edges, key=lambda e: (near.get(e, 7), e))
        chosen.add(far)
        B.append(far)
    return B


def screen_boundary(
    g: Graph,
    F: OrientedTwoFactor,
    B,
    seed,
    trials: int = 300,
    ks=(1, 3, 11),
    xis=(1.0,),
) -> bool:
    """Quick probe: does (F, B) produce only clean samples over the budget?"""
    mate_map = _mate_map(g, F)
    for k in ks:
        for xi in xis:
            params = SamplerParams(k=k, xi=xi)
            table = pq_table(k, xi=xi, delta=max(3, g.max_degree()), exact=False)
            for i in range(trials):
                res = sample_full_tis(g, F, B, params, trial_rng(seed, i), table=table, mate_map=mate_map)
                if check_sample(g, F, B, res):
                    return False
    return True


def safe_boundary_partition(
    g: Graph,
    F: OrientedTwoFactor,
    count: int,
    seed=0,
    screen_trials: int = 300,
) -> list[list]:
    """Partition E(F) into `count` boundary sets that pass the cleanliness
    screen, for desk-scale graphs where the sparse decomposition cannot
    produce verifying sets.  One cycle: each edge must screen clean as a
    singleton.  Two cycles of equal length: a perfect matching of clean
    (outer edge, inner edge) pairs.  Sets beyond the family size are empty
    (they sample via augment_boundary).  Raises when no clean family exists.
    """
    from .graphs import _bipartite_perfect_matching

    cyc_edges = [F.cycle_edges(c) for c in F.cycles]
    if len(cyc_edges) == 1:
        edges = cyc_edges[0]
        family = []
        for e in edges:
            if not screen_boundary(g, F, [e], seed, screen_trials):
                raise GraphError(f"singleton boundary {e} is not clean")
            family.append([e])
    elif len(cyc_edges) == 2 and len(cyc_edges[0]) == len(cyc_edges[1]):
        A, C = cyc_edges
        right_of = {
            i: [j for j in range(len(C)) if screen_boundary(g, F, [A[i], C[j]], seed, screen_trials)]
            for i in range(len(A))
        }
        try:
            match = _bipartite_perfect_matching(list(range(len(A))), right_of)
        except GraphError:
            raise GraphError("no clean boundary partition found") from None
        family = [[A[i], C[match[i]]] for i in range(len(A))]
    else:
        raise GraphError("safe partition supports one cycle or two equal cycles")
    if len(family) > count:
        raise GraphError(f"family of {len(family)} sets exceeds requested {count}")
    family += [[] for _ in range(count - len(family))]
    return family


@dataclass
class MixtureEstimate:
    """Uniform mixture of per-boundary-set estimates (equal trials per set)."""

    per_set: list
    trials_per_set: int
    sampled_boundaries: list
    source: str

    @property
    def n_sets(self):
        return len(self.per_set)

    @property
    def violations(self):
        return sum(e.violations for e in self.per_set)

    def frequency(self, x) -> Fraction:
        return sum((e.frequency(x) for e in self.per_set), Fraction(0)) / self.n_sets

    def class_means(self, g: Graph, F: OrientedTwoFactor):
        abc = [e.class_means(g, F) for e in self.per_set]
        n = self.n_sets
        alpha = sum((a for a, _, _ in abc), Fraction(0)) / n
        beta = sum((b for _, b, _ in abc), Fraction(0)) / n
        gamma = sum((c for _, _, c in abc), Fraction(0)) / n
        return alpha, beta, gamma

    def y_identity(self, g: Graph) -> dict:
        """Per-vertex sums of frequencies over the closed edge star; exactly
        one element of each star is included when every sample is clean."""
        sums = []
        for v in range(g.n):
            s = self.frequency(v)
            for w in g.adj[v]:
                s += self.frequency(canon_edge(v, w))
            sums.append(s)
        return {
            "min": min(sums),
            "max": max(sums),
            "exact_one": all(s == 1 for s in sums),
        }


def average_over_decomposition(
    g: Graph,
    F: OrientedTwoFactor,
    params: SamplerParams,
    sparse: SparseParams,
    trials: int,
    seed=0,
    Q=None,
    boundary_sets=None,
) -> MixtureEstimate:
    """Uniform mixture of weight estimates over a family of boundary sets
    partitioning E(F).

    The family comes from the sparse decomposition when it succeeds; on desk
    graphs where the strong colouring is infeasible the screened safe
    partition is used instead (source field records which).  Sets are
    augmented so every cycle is covered before sampling.
    """
    count = 3 * sparse.ell
    source = "explicit"
    if boundary_sets is None:
        try:
            sets = decompose(g, F, sparse, Q=Q, seed=seed if isinstance(seed, int) else 0)
            boundary_sets = [sorted(b.edges) for b in sets]
            source = "decompose"
        except GraphError:
            boundary_sets = safe_boundary_partition(g, F, count, seed=seed)
            source = "safe-partition"
    if len(boundary_sets) != count:
        raise GraphError(f"expected {count} boundary sets, got {len(boundary_sets)}")
    flat = [canon_edge(*e) for B in boundary_sets for e in B]
    if len(set(flat)) != len(flat) or set(flat) != set(F.edges):
        raise GraphError("boundary sets must partition E(F)")

    trials_per_set = max(1, -(-trials // count))
    table = pq_table(params.k, xi=params.xi, delta=max(3, g.max_degree()), exact=False)
    mate_map = _mate_map(g, F)
    per_set = []
    sampled = []
    for j, B in enumerate(boundary_sets):
        Bs = augment_boundary(g, F, B)
        sampled.append(Bs)
        per_set.append(
            estimate_weights(
                g, F, Bs, params, trials_per_set, f"{seed}/set{j}", table=table, mate_map=mate_map
            )
        )
    return MixtureEstimate(
        per_set=per_set,
        trials_per_set=trials_per_set,
        sampled_boundaries=sampled,
        source=source,
    )


@dataclass
class PMCover:
    matchings: list
    multiplicities: list
    N: int

    @property
    def total(self):
        return sum(self.multiplicities)

    def coverage(self, e) -> int:
        e = canon_edge(*e)
        return sum(m for M, m in zip(self.matchings, self.multiplicities) if e in M.edges)

    def expanded_factors(self, g: Graph):
        """The 3N complementary oriented 2-factors, with multiplicity."""
        out = []
        for M, mult in zip(self.matchings, self.multiplicities):
            F = complement_two_factor(g, M)
            out.extend([F] * mult)
        return out


def uniform_pm_cover(g: Graph, cap: int = 200000) -> PMCover:
    """A multiset of 3N perfect matchings covering every edge exactly N times.

    Enumerates the perfect matchings, solves the exact fractional
    edge-colouring system (each edge weight 1/3), and clears denominators
    minimally.  Bridged cubic graphs are refused: no such cover exists.
    """
    if not g.is_regular(3):
        raise GraphError("uniform matching covers are for cubic graphs")
    if not is_bridgeless(g):
        raise GraphError("graph has a bridge: no perfect matching cover exists")
    ms, complete = perfect_matchings(g, cap=cap)
    if not complete:
        raise GraphError("perfect matching enumeration exceeded its cap")
    if not ms:
        raise GraphError("no perfect matchings")
    edge_index = {e: i for i, e in enumerate(g.edges)}
    A = [[Fraction(0)] * len(ms) for _ in g.edges]
    for j, M in enumerate(ms):
        for e in M.edges:
            A[edge_index[e]][j] = Fraction(1)
    b = [Fraction(1, 3)] * len(g.edges)
    try:
        x = solve_equalities(A, b)
    except LPInfeasible:
        raise GraphError("no uniform cover (fractional edge colouring infeasible)")
    denom = 1
    for v in x:
        denom = denom * v.denominator // math.gcd(denom, v.denominator)
    scale = denom if denom % 3 == 0 else 3 * denom
    mult = [int(v * scale) for v in x]
    keep = [(M, m) for M, m in zip(ms, mult) if m > 0]
    return PMCover(
        matchings=[M for M, _ in keep],
        multiplicities=[m for _, m in keep],
        N=scale // 3,
    )


def matching_distribution(cover: PMCover) -> dict:
    """The fractional 3-edge-colouring as weights per matching: mult / N.
    Total mass 3; every edge acquires weight exactly 1."""
    return {
        frozenset(M.edges): Fraction(m, cover.N)
        for M, m in zip(cover.matchings, cover.multiplicities)
    }


def assemble_final(g: Graph, mixtures: list, cover: PMCover) -> dict:
    """Combine per-factor mixtures with the matching distribution.

    mixtures[i] estimates weights for the cover's i-th complementary factor
    (multiplicity-expanded, so len(mixtures) == 3N).  Reports the class
    weights, the matching coefficient 1 - (1-beta)/(3*beta), the per-element
    coverage of the final mixture after 1/beta scaling, and the size
    identity: the weight of every closed vertex star is exactly 4 when all
    samples were clean and beta > 1/4 makes the coefficient a probability.
    """
    n_factors = 3 * cover.N
    if len(mixtures) != n_factors:
        raise GraphError(f"need one weight estimate per factor ({n_factors})")
    factors = cover.expanded_factors(g)

    def wprime(x) -> Fraction:
        return sum((mix.frequency(x) for mix in mixtures), Fraction(0)) / n_factors

    alphas, betas, gammas = [], [], []
    for mix, F in zip(mixtures, factors):
        a, b, c = mix.class_means(g, F)
        alphas.append(a)
        betas.append(b)
        gammas.append(c)
    alpha = sum(alphas, Fraction(0)) / n_factors
    beta = sum(betas, Fraction(0)) / n_factors
    gamma = sum(gammas, Fraction(0)) / n_factors

    factor_count = {e: 0 for e in g.edges}
    for F in factors:
        for e in F.edges:
            factor_count[e] += 1
    uniform_2n = all(c == 2 * cover.N for c in factor_count.values())
    # with every edge in exactly 2N of the factors, the mean edge weight of
    # the factor average collapses to (alpha + 2*gamma)/3 identically
    mean_edge_wprime = sum((wprime(e) for e in g.edges), Fraction(0)) / g.m
    edge_weight_identity = uniform_2n and mean_edge_wprime == (alpha + 2 * gamma) / 3

    coeff = 1 - (1 - beta) / (3 * beta) if beta > 0 else None
    cdist = matching_distribution(cover)

    def c_weight(x) -> Fraction:
        if not is_edge_element(x):
            return Fraction(0)
        return sum((w for M, w in cdist.items() if x in M), Fraction(0))

    coverage = {}
    y_sums = []
    cov_mean_v = cov_mean_e = None
    if coeff is not None:
        for x in list(range(g.n)) + list(g.edges):
            coverage[x] = wprime(x) / beta + coeff * c_weight(x)
        for v in range(g.n):
            s = coverage[v] + sum(coverage[canon_edge(v, w)] for w in g.adj[v])
            y_sums.append(s)
        cov_mean_v = sum((coverage[v] for v in range(g.n)), Fraction(0)) / g.n
        cov_mean_e = sum((coverage[e] for e in g.edges), Fraction(0)) / g.m

    violations = sum(m.violations for m in mixtures)
    report = {
        "n_factors": n_factors,
        "N": cover.N,
        "alpha": alpha,
        "beta": beta,
        "gamma": gamma,
        "edge_weight": (alpha + 2 * gamma) / 3,
        "matching_coefficient": coeff,
        "coefficient_nonnegative": coeff is not None and coeff >= 0,
        "beta_deficit": Fraction(1, 4) - beta,
        "beta_exceeds_quarter": beta > Fraction(1, 4),
        "each_edge_in_2N_factors": uniform_2n,
        "edge_weight_identity": edge_weight_identity,
        "sample_violations": violations,
        "coverage": coverage,
        "coverage_mean_vertices": cov_mean_v,
        "coverage_mean_edges": cov_mean_e,
        "y_sums": y_sums,
        "size_identity_exact_4": bool(y_sums) and all(s == 4 for s in y_sums),
    }
    return report


@dataclass
class LPSolution:
    value: Fraction
    weights: list
    sets: list
    universe: list

    def weight_on(self, x) -> Fraction:
        return sum(
            (w for w, s in zip(self.weights, self.sets) if x in s), Fraction(0)
        )


def exact_chi_f(universe, independent_sets, clique_certificate=()) -> LPSolution:
    """Exact fractional chromatic number of a covering instance.

    universe: hashable elements; independent_sets: iterable of sets covering
    the instance (all maximal independent sets for exactness).  The optimum
    is checked against the clique certificate and the covering constraints
    are re-verified exactly before returning.
    """
    universe = list(universe)
    sets = [frozenset(s) for s in independent_sets]
    index = {x: i for i, x in enumerate(universe)}
    columns = [[index[x] for x in s] for s in sets]
    value, weights = minimize_covering(len(universe), columns)
    sol = LPSolution(value=value, weights=weights, sets=sets, universe=universe)
    for x in universe:
        if sol.weight_on(x) < 1:
            raise GraphError(f"covering constraint violated at {x}")
    if len(clique_certificate) and value < len(clique_certificate):
        raise GraphError("optimum below clique certificate; enumeration incomplete?")
    return sol


def total_graph_adjacency(g: Graph) -> dict:
    return {x: list(g.total_neighbors(x)) for x in g.total_elements()}


def fractional_total_chromatic_number(g: Graph, cap: int = 1_000_000) -> LPSolution:
    """Exact chi''_f via the covering LP over all maximal total independent
    sets; the closed edge star of a maximum-degree vertex certifies the
    lower bound Delta + 1."""
    adj = total_graph_adjacency(g)
    sets = maximal_independent_sets(g.total_elements(), adj, cap=cap)
    v_max = max(range(g.n), key=lambda v: len(g.adj[v]))
    clique = [v_max] + [canon_edge(v_max, w) for w in g.adj[v_max]]
    return exact_chi_f(g.total_elements(), sets, clique)


def bridge_glue(g: Graph, bridge, W1, W2) -> list[frozenset]:
    """Glue two 4N-multisets of total independent sets across a bridge.

    W1 and W2 live on the two components of g - bridge; each must cover
    every element of its side exactly N times.  The output is a 4N-multiset
    covering every element of g, bridge included, exactly N times: the
    x1-sets occupy the first block, the x2-sets the second, and the sets
    avoiding the bridge ends entirely take the last block, which is where
    the bridge is added.
    """
    bridge = canon_edge(*bridge)
    x1, x2 = bridge
    if len(W1) != len(W2) or len(W1) % 4:
        raise GraphError("need two multisets of equal size 4N")
    N = len(W1) // 4

    def classify(W, x):
        star = {x} | set(g.incident_edges(x)) - {bridge}
        with_x = [s for s in W if x in s]
        avoid = [s for s in W if not (s & star)]
        if len(with_x) != N:
            raise GraphError(f"{x} must lie in exactly N={N} sets, found {len(with_x)}")
        if len(avoid) < N:
            raise GraphError(f"fewer than N sets avoid {x} and its edges")
        return with_x, avoid

    def arrange(W, x, x_block):
        with_x, avoid = classify(W, x)
        chosen_avoid = avoid[:N]
        used = []
        rest = list(W)
        for s in with_x + chosen_avoid:
            rest.remove(s)
        slots = [None] * (4 * N)
        for i, s in enumerate(with_x):
            slots[x_block * N + i] = s
        for i, s in enumerate(chosen_avoid):
            slots[3 * N + i] = s
        it = iter(rest)
        for j in range(4 * N):
            if slots[j] is None:
                slots[j] = next(it)
        return slots

    s1 = arrange(W1, x1, 0)
    s2 = arrange(W2, x2, 1)
    out = []
    for j in range(4 * N):
        merged = frozenset(s1[j]) | frozenset(s2[j])
        if j >= 3 * N:
            merged |= {bridge}
        out.append(merged)
    return out


def make_beta_estimator(g: Graph, F: OrientedTwoFactor, B, k: int, seed):
    """An estimator suitable for calibrate_xi: xi, trials -> (beta_hat, hw99).

    beta_hat is the mean vertex-inclusion frequency over `trials` samples;
    the half-width uses the per-trial vertex fraction as the iid unit, which
    is what varies between samples."""
    mate_map = _mate_map(g, F)

    def estimator(xi, trials):
        params = SamplerParams(k=k, xi=xi)
        table = pq_table(k, xi=xi, delta=max(3, g.max_degree()), exact=False)
        fractions = []
        for i in range(trials):
            res = sample_full_tis(
                g, F, B, params, trial_rng(f"{seed}:{xi:.12f}", i),
                table=table, mate_map=mate_map,
            )
            n_vertices = sum(1 for x in res.total_set.elements if not is_edge_element(x))
            fractions.append(n_vertices / g.n)
        mean = sum(fractions) / trials
        var = sum((f - mean) ** 2 for f in fractions) / max(trials - 1, 1)
        return mean, Z99 * math.sqrt(var / trials)

    return estimator


def thin_element(dist: dict, z, target: Fraction) -> dict:
    """Lower the total weight on sets containing z to `target` by moving a
    proportional share of their mass onto the same sets with z removed.

    dist maps frozensets of total elements to nonnegative weights; the
    element's weight must be at least the target.  Total mass is preserved
    and the thinning is exact rational.
    """
    current = sum((w for s, w in dist.items() if z in s), Fraction(0))
    if current < target:
        raise GraphError(f"weight of {z} is {current} < target {target}")
    if current == target:
        return dict(dist)
    keep = Fraction(target) / current
    out = {}
    for s, w in dist.items():
        if z in s:
            out[s] = out.get(s, Fraction(0)) + w * keep
            reduced = frozenset(s - {z})
            out[reduced] = out.get(reduced, Fraction(0)) + w * (1 - keep)
        else:
            out[s] = out.get(s, Fraction(0)) + w
    return out


def suppressed_vertex_report(g: Graph, est, z: int) -> dict:
    """Weight of a degree-2 vertex against the complement bound
    1 - w[x] - w[y] - w[xz] - w[yz] over its neighbourhood."""
    if len(g.adj[z]) != 2:
        raise GraphError("suppressed-vertex bound applies to degree-2 vertices")
    x, y = g.adj[z]
    fz = est.frequency(z)
    bound = (
        1
        - est.frequency(x)
        - est.frequency(y)
        - est.frequency(canon_edge(x, z))
        - est.frequency(canon_edge(y, z))
    )
    return {"weight": fz, "lower_bound": bound, "holds": fz >= bound}


def cover_counts(g: Graph, sets) -> dict:
    """How many of the sets contain each element of V(G) + E(G)."""
    out = {x: 0 for x in g.total_elements()}
    for s in sets:
        for x in s:
            key = canon_edge(*x) if is_edge_element(x) else x
            if key in out:
                out[key] += 1
    return out
