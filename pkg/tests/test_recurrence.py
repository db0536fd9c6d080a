import math
from fractions import Fraction

import pytest

from fractotal.recurrence import (
    LIMIT_PSTAR,
    calibrate_xi,
    f1_closed_form_bound,
    integrate_even_ode,
    limit_profile,
    pq_table,
    verify_limit_convergence,
)


def combined_form_oracle(k):
    """p(i) = k / (3k - 1 - sum_{j<i} p(j)), evaluated step by step."""
    ps = []
    acc = 0.0
    for _ in range(k):
        p = k / (3 * k - 1 - acc)
        ps.append(p)
        acc += p
    return ps


def simpson(f, a, b, n=2000):
    h = (b - a) / n
    s = f(a) + f(b)
    s += 4 * sum(f(a + (2 * i + 1) * h) for i in range(n // 2))
    s += 2 * sum(f(a + 2 * i * h) for i in range(1, n // 2))
    return s * h / 3


def test_k11_first_row_exact():
    t = pq_table(11)
    assert t.exact
    assert t.p[0] == Fraction(11, 32)
    assert t.q[0] == Fraction(5, 16)


def test_two_p_plus_q_is_one_exact():
    for k in (1, 2, 5, 11):
        for xi in (Fraction(1), Fraction(1, 2), Fraction(0)):
            t = pq_table(k, xi=xi)
            assert all(2 * p + q == 1 for p, q in zip(t.p, t.q))
            assert all(0 <= p <= 1 and 0 <= q <= 1 for p, q in zip(t.p, t.q))


def test_xi_zero_collapses():
    t = pq_table(5, xi=0)
    assert all(q == 0 for q in t.q)
    assert all(p == Fraction(1, 2) for p in t.p)


def test_float_table_matches_combined_form_oracle():
    t = pq_table(100)
    assert not t.exact
    oracle = combined_form_oracle(100)
    assert max(abs(a - b) for a, b in zip(t.p, oracle)) < 1e-12


def test_telescoping_identities_exact():
    k = 11
    t = pq_table(k)
    for i in range(k - 1):
        p_i, p_next = t.p[i], t.p[i + 1]
        assert p_next - p_i == p_i**3 / (k - p_i**2)
        assert 1 / p_i - 1 / p_next == p_i / k
    assert all(a < b for a, b in zip(t.p, t.p[1:]))


def test_q_star_at_11_exceeds_quarter_exactly():
    t = pq_table(11)
    assert t.q_star >= Fraction(1, 4)


def test_even_delta_table_relations():
    k = 6
    for delta in (4, 6):
        t = pq_table(k, delta=delta)
        assert t.exact
        assert all(2 * p + q == 1 for p, q in zip(t.p, t.q))
        # q = p * S^(d-2) and qt = p * S^(d-3) share the bracket: q = qt * S
        for i in range(k):
            if t.qt[i] != 0:
                S = t.q[i] / t.qt[i]
                assert t.qt[i] == t.p[i] * S ** (delta - 3)
    t11 = pq_table(11, delta=4)
    assert not t11.exact
    assert all(abs(2 * p + q - 1) < 1e-14 for p, q in zip(t11.p, t11.q))


def test_delta3_qt_equals_p():
    t = pq_table(7)
    assert t.qt == t.p


def test_invalid_parameters():
    with pytest.raises(ValueError):
        pq_table(0)
    with pytest.raises(ValueError):
        pq_table(5, xi=1.5)
    with pytest.raises(ValueError):
        pq_table(5, delta=5)


def test_limit_profile_values():
    assert limit_profile(0) == pytest.approx(1 / 3, abs=1e-15)
    assert limit_profile(1) == pytest.approx(7**-0.5, abs=1e-15)
    integral = simpson(limit_profile, 0, 1)
    assert integral == pytest.approx(3 - math.sqrt(7), abs=1e-10)
    with pytest.raises(ValueError):
        limit_profile(1.5)


def test_limit_convergence():
    rep = verify_limit_convergence([100, 1000, 10000])
    assert rep["ok"]
    gaps = [r["gap"] for r in rep["rows"]]
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < 1e-3


def test_k1_aggregate():
    rep = verify_limit_convergence([1], tol=1.0)
    assert rep["rows"][0]["p_star"] == pytest.approx(0.5, abs=1e-15)
    assert rep["rows"][0]["gap"] == pytest.approx(0.5 - LIMIT_PSTAR, abs=1e-12)


# --- even-degree ODE ----------------------------------------------------


def test_ode_initial_slope():
    from fractotal.recurrence import _ode_rhs

    for delta in (4, 6, 8, 10, 12):
        assert _ode_rhs(delta, 1.0)[0] == pytest.approx(-1 / 3, abs=1e-15)


@pytest.mark.parametrize("delta", [4, 6, 8, 10, 12])
def test_ode_bounds_and_consistency(delta):
    sol = integrate_even_ode(delta, 1e-3)
    assert sol.F1 <= f1_closed_form_bound(delta)
    assert sol.Q1 > 1 / (delta + 1)
    assert sol.consistency_error() < 10 * sol.h**4
    # F decreasing, F'' > 0 via second differences
    assert all(a > b for a, b in zip(sol.F, sol.F[1:]))
    second = [sol.F[i - 1] - 2 * sol.F[i] + sol.F[i + 1] for i in range(1, len(sol.F) - 1)]
    assert all(s > 0 for s in second)
    # Q(0)=0, F(0)=1, Qt = 1 - F
    assert sol.F[0] == 1 and sol.Q[0] == 0
    assert sol.Qt()[0] == 0


def test_ode_richardson_agreement():
    for delta in (4, 8):
        a = integrate_even_ode(delta, 1e-3)
        b = integrate_even_ode(delta, 5e-4)
        assert abs(a.F1 - b.F1) < 1e-8
        assert abs(a.Q1 - b.Q1) < 1e-8


def test_ode_rejects_bad_parameters():
    with pytest.raises(ValueError):
        integrate_even_ode(5, 1e-3)
    with pytest.raises(ValueError):
        integrate_even_ode(4, 0.01)


# --- calibration --------------------------------------------------------


def q_star_proxy(xi, trials):
    t = pq_table(11, xi=xi, exact=False)
    return float(t.q_star), 0.0


def test_calibrate_against_scalar_bisection_oracle():
    eta = calibrate_xi(q_star_proxy, 0.25, tol=1e-10)
    lo, hi = 0.0, 1.0
    for _ in range(60):
        mid = (lo + hi) / 2
        if q_star_proxy(mid, 0)[0] < 0.25:
            lo = mid
        else:
            hi = mid
    assert eta == pytest.approx((lo + hi) / 2, abs=1e-9)


def test_calibrate_constant_estimator_returns_midpoint():
    eta = calibrate_xi(lambda xi, n: (0.25, 0.0), 0.25, tol=1e-6)
    assert eta == 0.5


def test_calibrate_bracketing_failure():
    with pytest.raises(ValueError):
        calibrate_xi(lambda xi, n: (2.0, 0.0), 0.25, tol=1e-6)


def test_calibrate_with_noisy_estimator_doubles_trials():
    import random as _r

    calls = []

    def noisy(xi, trials):
        calls.append(trials)
        rng = _r.Random(f"{xi:.12f}:{trials}")
        true = float(pq_table(11, xi=xi, exact=False).q_star)
        hw = 1.0 / math.sqrt(trials)
        return true + rng.uniform(-hw / 3, hw / 3), hw

    eta = calibrate_xi(noisy, 0.25, tol=2e-2, initial_trials=64)
    assert abs(float(pq_table(11, xi=eta, exact=False).q_star) - 0.25) < 3e-2
    assert max(calls) > 64  # the straddle rule kicked in
