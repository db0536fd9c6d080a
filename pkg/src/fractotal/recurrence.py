"""The level recurrence p(i), q(i), its asymptotics, and the even-degree ODE.

For k levels and damping xi, the cubic recurrence is

    2 p(i) + q(i) = 1,
    q(i) = xi * p(i) * (1 - 1/k - (1/k) * sum_{j<i} p(j)),

solved per step for p(i) (the bracket involves earlier terms only, so each
step is a linear equation).  For even degree Delta > 3 the bracket sums the
mate-inclusion terms qt(j) = p(j) * S^(Delta-3) instead and q(i) picks up the
power Delta-2.  Tables are exact rationals for small k; the denominators
roughly double in bit length per step, so large k falls back to floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

# Exact tables get impractical (denominator bit length ~2^k) beyond these;
# the even-degree bracket powers make the blow-up steeper.
EXACT_K_LIMIT = 16
EXACT_K_LIMIT_EVEN = 9

LIMIT_PSTAR = 3 - math.sqrt(7)


@dataclass(frozen=True)
class RecurrenceTable:
    """Arrays p, q (and qt, the one-mate-higher inclusion probability) with
    aggregates p* and q*.  Entries are Fractions in exact mode, floats
    otherwise."""

    k: int
    xi: Fraction | float
    delta: int
    p: tuple
    q: tuple
    qt: tuple
    exact: bool

    @property
    def p_star(self):
        return sum(self.p) / self.k

    @property
    def q_star(self):
        return sum(self.q) / self.k

    def p_of(self, level: int):
        return self.p[level - 1]

    def q_of(self, level: int):
        return self.q[level - 1]

    def qt_of(self, level: int):
        return self.qt[level - 1]

    def as_floats(self):
        return [float(x) for x in self.p], [float(x) for x in self.q], [float(x) for x in self.qt]


def pq_table(k: int, xi=1, delta: int = 3, exact: bool | None = None) -> RecurrenceTable:
    """Level recurrence table for k levels, damping xi, degree delta.

    exact=None picks rationals for k <= EXACT_K_LIMIT and floats above.
    delta must be 3 or an even integer >= 4.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if not 0 <= xi <= 1:
        raise ValueError("xi must lie in [0, 1]")
    if delta != 3 and (delta < 4 or delta % 2):
        raise ValueError("delta must be 3 or an even integer >= 4")
    if exact is None:
        exact = k <= (EXACT_K_LIMIT if delta == 3 else EXACT_K_LIMIT_EVEN)
    if exact:
        one_over_k = Fraction(1, k)
        xi = Fraction(xi)
    else:
        one_over_k = 1.0 / k
        xi = float(xi)

    ps, qs, qts = [], [], []
    acc = 0  # running sum of qt(j) (= p(j) when delta == 3)
    power = delta - 2
    for _ in range(k):
        bracket = 1 - one_over_k - one_over_k * acc
        s_pow = bracket ** power
        p = 1 / (2 + xi * s_pow)
        q = xi * p * s_pow
        qt = p * bracket ** (power - 1)
        ps.append(p)
        qs.append(q)
        qts.append(qt)
        acc += qt
    return RecurrenceTable(k=k, xi=xi, delta=delta, p=tuple(ps), q=tuple(qs), qt=tuple(qts), exact=exact)


def limit_profile(x: float) -> float:
    """The k -> infinity profile of p along the unit interval: (9 - 2x)^(-1/2)."""
    if not 0 <= x <= 1:
        raise ValueError("x must lie in [0, 1]")
    return (9 - 2 * x) ** -0.5


def verify_limit_convergence(k_list, tol: float = 1e-3) -> dict:
    """Gap table |p*_k - (3 - sqrt 7)| over increasing k; checks the gaps
    decrease monotonically and the last one is below tol."""
    if list(k_list) != sorted(set(k_list)):
        raise ValueError("k_list must be strictly increasing")
    rows = []
    for k in k_list:
        t = pq_table(k, exact=k <= EXACT_K_LIMIT)
        gap = abs(float(t.p_star) - LIMIT_PSTAR)
        rows.append({"k": k, "p_star": float(t.p_star), "gap": gap})
    gaps = [r["gap"] for r in rows]
    monotone = all(a > b for a, b in zip(gaps, gaps[1:]))
    return {
        "limit": LIMIT_PSTAR,
        "rows": rows,
        "monotone_decreasing": monotone,
        "final_gap": gaps[-1],
        "tolerance": tol,
        "ok": monotone and gaps[-1] < tol,
    }


@dataclass(frozen=True)
class OdeSolution:
    """Sampled solution of F' = -F^(D-3) / (F^(D-2) + 2) with Q integrated
    alongside; Q must agree with (1 - F^2)/2 up to integration error."""

    delta: int
    h: float
    xs: tuple
    F: tuple
    Q: tuple

    @property
    def F1(self) -> float:
        return self.F[-1]

    @property
    def Q1(self) -> float:
        return self.Q[-1]

    def Qt(self) -> tuple:
        return tuple(1 - f for f in self.F)

    def consistency_error(self) -> float:
        """max |Q(x) - (1 - F(x)^2)/2| over the grid."""
        return max(abs(q - (1 - f * f) / 2) for q, f in zip(self.Q, self.F))


def _ode_rhs(delta: int, f: float) -> tuple[float, float]:
    den = f ** (delta - 2) + 2
    df = -(f ** (delta - 3)) / den
    dq = f ** (delta - 2) / den  # Q' = -F * F'
    return df, dq


def integrate_even_ode(delta: int, h: float = 1e-3) -> OdeSolution:
    """Classical 4th-order integration of the even-degree profile ODE on [0,1].

    The requested step is rounded to 1/ceil(1/h) so the grid ends exactly at 1.
    """
    if delta < 4 or delta % 2:
        raise ValueError("delta must be an even integer >= 4")
    if not 0 < h <= 1e-3:
        raise ValueError("step must lie in (0, 1e-3]")
    steps = math.ceil(1 / h)
    h = 1.0 / steps
    f, q = 1.0, 0.0
    xs = [0.0]
    Fs = [f]
    Qs = [q]
    for i in range(steps):
        k1f, k1q = _ode_rhs(delta, f)
        k2f, k2q = _ode_rhs(delta, f + h / 2 * k1f)
        k3f, k3q = _ode_rhs(delta, f + h / 2 * k2f)
        k4f, k4q = _ode_rhs(delta, f + h * k3f)
        f += h / 6 * (k1f + 2 * k2f + 2 * k3f + k4f)
        q += h / 6 * (k1q + 2 * k2q + 2 * k3q + k4q)
        xs.append((i + 1) * h)
        Fs.append(f)
        Qs.append(q)
    return OdeSolution(delta=delta, h=h, xs=tuple(xs), F=tuple(Fs), Q=tuple(Qs))


def f1_closed_form_bound(delta: int) -> float:
    """Upper bound on F(1): 1 + 3/(D-2) * log(((2/3)^(D-2) + 2) / 3)."""
    return 1 + 3 / (delta - 2) * math.log(((2 / 3) ** (delta - 2) + 2) / 3)


def calibrate_xi(
    estimator,
    target,
    tol: float = 1e-3,
    initial_trials: int = 1000,
    max_trials: int = 1 << 20,
    max_iter: int = 200,
) -> float:
    """Find xi with estimator(xi) ~= target by confidence-interval bisection.

    estimator(xi, trials) must return (estimate, halfwidth99); a deterministic
    estimator reports halfwidth 0.  The sample size doubles whenever the
    interval straddles the target.  Assumes the estimate increases with xi;
    if the initial bracket [0, 1] is inconsistent, a coarse scan attempts to
    re-bracket before giving up.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")

    trials = initial_trials

    def measure(xi):
        nonlocal trials
        est, hw = estimator(xi, trials)
        while hw > 0 and abs(est - target) <= hw and trials < max_trials:
            trials = min(2 * trials, max_trials)
            est, hw = estimator(xi, trials)
        return est

    mid = 0.5
    e_mid = measure(mid)
    if abs(e_mid - target) < tol:
        return mid
    lo, hi = 0.0, 1.0
    e_lo, e_hi = measure(lo), measure(hi)
    if not (e_lo < target < e_hi):
        lo, hi, e_lo, e_hi = _rebracket(measure, target)
    for _ in range(max_iter):
        mid = (lo + hi) / 2
        e_mid = measure(mid)
        if abs(e_mid - target) < tol:
            return mid
        if e_mid < target:
            lo, e_lo = mid, e_mid
        else:
            hi, e_hi = mid, e_mid
        if hi - lo < 1e-15:
            break
    raise RuntimeError("calibration budget exhausted without satisfying tolerance")


def _rebracket(measure, target, points: int = 9):
    xs = [i / (points + 1) for i in range(points + 2)]
    vals = [measure(x) for x in xs]
    for a, b, va, vb in zip(xs, xs[1:], vals, vals[1:]):
        if va < target < vb:
            return a, b, va, vb
    raise ValueError("estimator does not bracket the target on [0, 1]")
