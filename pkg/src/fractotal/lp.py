"""Exact rational linear programming: dense two-phase simplex, Bland's rule.

Everything is a Fraction; Bland's anti-cycling pivot keeps the solver exact
and finite.  Problem sizes here are tiny (dozens of rows, hundreds of
columns), so no effort is spent on sparsity.
"""

from __future__ import annotations

from fractions import Fraction


class LPInfeasible(Exception):
    pass


class LPUnbounded(Exception):
    pass


def _pivot(T, basis, r, c):
    m = len(T) - 1
    piv = T[r][c]
    inv = 1 / piv
    T[r] = [a * inv for a in T[r]]
    for i in range(m + 1):
        if i != r and T[i][c] != 0:
            f = T[i][c]
            row_r = T[r]
            T[i] = [a - f * b for a, b in zip(T[i], row_r)]
    basis[r] = c


def _bland(T, basis, ncols):
    """Run simplex iterations until optimal; Bland's rule throughout."""
    m = len(T) - 1
    while True:
        obj = T[-1]
        enter = next((j for j in range(ncols) if obj[j] < 0), None)
        if enter is None:
            return
        ratio = None
        leave = None
        for i in range(m):
            a = T[i][enter]
            if a > 0:
                r = T[i][-1] / a
                if ratio is None or r < ratio or (r == ratio and basis[i] < basis[leave]):
                    ratio = r
                    leave = i
        if leave is None:
            raise LPUnbounded("objective unbounded below")
        _pivot(T, basis, leave, enter)


def simplex_minimize(c, A, b):
    """min c.x subject to A x = b, x >= 0; exact rationals.

    Returns (value, x).  Raises LPInfeasible / LPUnbounded.
    """
    m = len(A)
    n = len(c)
    c = [Fraction(v) for v in c]
    A = [[Fraction(v) for v in row] for row in A]
    b = [Fraction(v) for v in b]
    for i in range(m):
        if b[i] < 0:
            A[i] = [-v for v in A[i]]
            b[i] = -b[i]

    # phase 1: artificials n..n+m-1
    T = [A[i] + [Fraction(1 if j == i else 0) for j in range(m)] + [b[i]] for i in range(m)]
    obj = [Fraction(0)] * (n + m + 1)
    for i in range(m):
        for j in range(n):
            obj[j] -= T[i][j]
        obj[-1] -= T[i][-1]
    T.append(obj)
    basis = [n + i for i in range(m)]
    _bland(T, basis, n + m)
    if T[-1][-1] != 0:
        raise LPInfeasible("no feasible point")

    # drive leftover artificials out of the basis (their value is 0)
    for i in range(m):
        if basis[i] >= n:
            piv_col = next((j for j in range(n) if T[i][j] != 0), None)
            if piv_col is not None:
                _pivot(T, basis, i, piv_col)

    keep = [i for i in range(m) if basis[i] < n]
    rows = [T[i][:n] + [T[i][-1]] for i in keep]
    basis = [basis[i] for i in keep]
    m = len(rows)

    # phase 2 objective: reduced costs of c against the basis
    obj = c[:] + [Fraction(0)]
    for i in range(m):
        cb = c[basis[i]]
        if cb != 0:
            obj = [o - cb * a for o, a in zip(obj, rows[i])]
    rows.append(obj)
    _bland(rows, basis, n)

    x = [Fraction(0)] * n
    for i in range(m):
        x[basis[i]] = rows[i][-1]
    return -rows[-1][-1], x


def solve_equalities(A, b):
    """A nonnegative solution of A x = b (phase 1 only); raises LPInfeasible."""
    n = len(A[0]) if A else 0
    value, x = simplex_minimize([Fraction(0)] * n, A, b)
    return x


def minimize_covering(universe_count: int, columns, rhs=1):
    """min sum(w) s.t. for each universe row, sum of w over covering columns >= rhs.

    columns[j] is an iterable of row indices covered by column j.  Surplus
    variables are appended internally.  Returns (value, weights) with weights
    exact; surplus values are dropped.
    """
    ncols = len(columns)
    A = []
    for i in range(universe_count):
        row = [Fraction(0)] * (ncols + universe_count)
        row[ncols + i] = Fraction(-1)
        A.append(row)
    for j, rows in enumerate(columns):
        for i in rows:
            A[i][j] = Fraction(1)
    b = [Fraction(rhs)] * universe_count
    c = [Fraction(1)] * ncols + [Fraction(0)] * universe_count
    value, x = simplex_minimize(c, A, b)
    return value, x[:ncols]
