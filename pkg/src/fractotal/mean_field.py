"""Mean-field oracle for the level recurrence and the conflict table.

Simulates the propagation along a single directed path with synthetic mates:
a mate at level i carries an independent inclusion coin of probability
qt(i), realizing the independence that the girth assumption provides on real
graphs.  Inclusion frequencies must then match the recurrence exactly, and
junction statistics reproduce the per-type conflict probabilities.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .recurrence import pq_table
from .sampler import SamplerParams


@dataclass
class MeanFieldReport:
    k: int
    xi: float
    delta: int
    trials: int
    length: int
    level_counts: np.ndarray
    p_hat: np.ndarray
    q_hat: np.ndarray
    p_exact: np.ndarray
    q_exact: np.ndarray

    def within_3_sigma(self) -> bool:
        return bool(self.max_sigma_deviation() <= 3.0)

    def max_sigma_deviation(self) -> float:
        worst = 0.0
        for hat, exact in ((self.p_hat, self.p_exact), (self.q_hat, self.q_exact)):
            n = self.level_counts
            sd = np.sqrt(np.maximum(exact * (1 - exact), 1e-12) / np.maximum(n, 1))
            worst = max(worst, float(np.max(np.abs(hat - exact) / sd)))
        return worst


class _PathState:
    """Vectorized (edge, vertex) chain over all trials at once."""

    def __init__(self, rng, pf, qf, qtf, level, xi, delta, trials):
        self.rng = rng
        self.pf, self.qf, self.qtf = pf, qf, qtf
        self.level = level
        self.xi = xi
        self.n_mates = delta - 2
        self.trials = trials
        u = rng.random(trials)
        p_t = pf[level - 1]
        q_t = qf[level - 1]
        self.prev_e = u < p_t
        self.prev_u = (~self.prev_e) & (u < p_t + q_t)
        self.seed_edge = self.prev_e.copy()
        self.seed_vertex = self.prev_u.copy()

    def step(self):
        """Advance by one (e_j, u_j) pair; returns (e_j, u_j, mate_info)."""
        rng = self.rng
        e_j = ~self.prev_e & ~self.prev_u
        v1 = ~self.prev_u & ~e_j
        ok = np.ones(self.trials, dtype=bool)
        mate_info = []
        for _ in range(self.n_mates):
            lm = rng.integers(1, len(self.pf) + 1, self.trials)
            coin = rng.random(self.trials) < self.qtf[lm - 1]
            blocked = (lm == self.level) | ((lm < self.level) & coin)
            ok &= ~blocked
            mate_info.append((lm, coin))
        u_j = v1 & ok
        if self.xi < 1:
            u_j = u_j & (rng.random(self.trials) < self.xi)
        self.prev_e, self.prev_u = e_j, u_j
        return e_j, u_j, mate_info

    def mate_final_states(self, u_state, mate_info):
        """Final in-T indicator of each synthetic mate: a mate at a lower
        level keeps its coin, an equal level is never included, a higher
        level needs its coin and the vertex itself staying out."""
        out = []
        for lm, coin in mate_info:
            final = ((lm < self.level) & coin) | ((lm > self.level) & coin & ~u_state)
            out.append(final)
        return out


def mean_field_process(
    params: SamplerParams,
    length: int,
    trials: int,
    seed=0,
    delta: int = 3,
) -> MeanFieldReport:
    """Per-level inclusion frequencies measured at a single mid-path position
    (independent across trials, so the binomial error bars are exact)."""
    if length < 10 * params.k:
        raise ValueError("length must be at least 10k")
    if trials < 1:
        raise ValueError("trials must be positive")
    k, xi = params.k, params.xi
    table = pq_table(k, xi=xi, delta=delta, exact=False)
    pf = np.array(table.p)
    qf = np.array(table.q)
    qtf = np.array(table.qt)
    rng = np.random.default_rng(seed)
    level = rng.integers(1, k + 1, trials)
    state = _PathState(rng, pf, qf, qtf, level, xi, delta, trials)
    measure_at = length // 2
    e_m = u_m = None
    for j in range(length):
        e_j, u_j, _ = state.step()
        if j == measure_at:
            e_m, u_m = e_j, u_j
    counts = np.zeros(k, dtype=np.int64)
    p_hat = np.zeros(k)
    q_hat = np.zeros(k)
    for t in range(1, k + 1):
        mask = level == t
        n = int(mask.sum())
        counts[t - 1] = n
        if n:
            p_hat[t - 1] = e_m[mask].mean()
            q_hat[t - 1] = u_m[mask].mean()
    return MeanFieldReport(
        k=k,
        xi=xi,
        delta=delta,
        trials=trials,
        length=length,
        level_counts=counts,
        p_hat=p_hat,
        q_hat=q_hat,
        p_exact=pf.copy(),
        q_exact=qf.copy(),
    )


def junction_conflict_frequencies(
    params: SamplerParams,
    trials: int,
    seed=0,
    delta: int = 3,
) -> dict:
    """Monte Carlo frequencies of the conflict types at a synthetic junction:
    an independently levelled preceding path (supplying u'', e', u') meeting
    the seeded start (e_0, u_0, e_1, u_1) of the next one.

    For the cubic undamped case the closed-form IIIb probability
    sum_t (1/k) p* p(t) (p* - p(t)/k) (1/k)(1 + sum_{i<t} p(i)) is evaluated
    alongside (the displayed product with explicit 1/k level weights).
    """
    k, xi = params.k, params.xi
    table = pq_table(k, xi=xi, delta=delta, exact=False)
    pf = np.array(table.p)
    qf = np.array(table.q)
    qtf = np.array(table.qt)
    rng = np.random.default_rng(seed)

    s = rng.integers(1, k + 1, trials)  # preceding path's level
    A = _PathState(rng, pf, qf, qtf, s, xi, delta, trials)
    _e0A, u0A, _ = A.step()
    e1A, u1A, mates_up = A.step()
    up_in = u1A
    udp_in = u0A
    ep_in = e1A
    mate_up_any = np.zeros(trials, dtype=bool)
    for fin in A.mate_final_states(u1A, mates_up):
        mate_up_any |= fin

    t = rng.integers(1, k + 1, trials)  # boundary edge's level
    Bst = _PathState(rng, pf, qf, qtf, t, xi, delta, trials)
    e0B, u0B, mates_u0 = Bst.step()
    e1B, u1B, _ = Bst.step()
    mate_u0_any = np.zeros(trials, dtype=bool)
    for fin in Bst.mate_final_states(u0B, mates_u0):
        mate_u0_any |= fin

    covered = up_in | ep_in | e0B
    preds = {
        "I": up_in & u0B,
        "II": up_in & e0B,
        "IIIa": ep_in & e0B & u1B,
        "IIIb": ep_in & e0B & ~u1B & mate_u0_any,
        "IIIc": ep_in & e0B & ~u1B & ~mate_u0_any,
        "IVa": ~covered & u0B,
        "IVb": ~covered & ~u0B & udp_in,
        "IVc": ~covered & ~u0B & ~udp_in & mate_up_any,
        "IVd": ~covered & ~u0B & ~udp_in & ~mate_up_any,
    }
    total = np.zeros(trials, dtype=np.int64)
    for arr in preds.values():
        total += arr
    if int(total.max(initial=0)) > 1:
        raise AssertionError("conflict predicates not mutually exclusive")

    freqs = {name: float(arr.mean()) for name, arr in preds.items()}
    out = {
        "k": k,
        "xi": xi,
        "delta": delta,
        "trials": trials,
        "frequencies": freqs,
        "sigma": {
            name: float(np.sqrt(max(f * (1 - f), 1e-12) / trials))
            for name, f in freqs.items()
        },
    }
    if delta == 3 and xi == 1:
        p_star = float(pf.mean())
        acc = 0.0
        run = 0.0
        for tt in range(1, k + 1):
            p_t = pf[tt - 1]
            acc += (1.0 / k) * p_star * p_t * (p_star - p_t / k) * ((1 + run) / k)
            run += p_t
        out["iiib_closed_form"] = acc
    return out
