"""Small dense linear programs solved exactly over rationals.

Two-phase tableau simplex with Bland's rule, all arithmetic in
:class:`fractions.Fraction`.  Floats are converted exactly (every double is a
dyadic rational), so verdicts are exact for the numbers actually supplied.
Problems too large for a rational tableau are handed to HiGHS through
:func:`scipy.optimize.linprog`, in floating point.

Variables are always nonnegative.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

EXACT_SIZE_LIMIT = 60_000  # tableau entries


@dataclass
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: Optional[list] = None
    value: Optional[object] = None
    exact: bool = True


def _frac(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


def _pivot(T, r, c):
    row = T[r]
    a = row[c]
    if a != 1:
        T[r] = row = [v / a for v in row]
    for i, other in enumerate(T):
        if i != r:
            f = other[c]
            if f:
                T[i] = [v - f * w for v, w in zip(other, row)]


def _run(T, basis, cost, allowed):
    """Minimize cost over the tableau; Bland's rule prevents cycling."""
    m = len(T)
    ncols = len(cost)
    while True:
        cb = [cost[b] for b in basis]
        enter = None
        for j in range(ncols):
            if not allowed[j] or j in basis:
                continue
            r = cost[j]
            for i in range(m):
                if T[i][j] and cb[i]:
                    r -= cb[i] * T[i][j]
            if r < 0:
                enter = j
                break
        if enter is None:
            return "optimal"
        leave, best = None, None
        for i in range(m):
            a = T[i][enter]
            if a > 0:
                ratio = T[i][-1] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    leave, best = i, ratio
        if leave is None:
            return "unbounded"
        _pivot(T, leave, enter)
        basis[leave] = enter


def linprog_exact(
    c: Sequence,
    A_ub: Sequence[Sequence] = (),
    b_ub: Sequence = (),
    A_eq: Sequence[Sequence] = (),
    b_eq: Sequence = (),
    maximize: bool = False,
) -> LPResult:
    """Optimize ``c @ x`` subject to ``A_ub x <= b_ub``, ``A_eq x = b_eq``, ``x >= 0``."""
    n = len(c)
    rows = [([_frac(a) for a in r], _frac(b), "le") for r, b in zip(A_ub, b_ub)]
    rows += [([_frac(a) for a in r], _frac(b), "eq") for r, b in zip(A_eq, b_eq)]
    m = len(rows)
    if (n + 2 * m) * m > EXACT_SIZE_LIMIT:
        return _linprog_float(c, A_ub, b_ub, A_eq, b_eq, maximize)

    # column layout: x (n) | slack per le-row | artificial per row needing one
    nslack = sum(1 for *_, kind in rows if kind == "le")
    need_art = [kind == "eq" or b < 0 for _, b, kind in rows]
    nart = sum(need_art)
    ncols = n + nslack + nart
    T, basis = [], []
    s_col, a_col = n, n + nslack
    for (coef, b, kind), art in zip(rows, need_art):
        row = coef + [Fraction(0)] * (nslack + nart) + [b]
        if kind == "le":
            row[s_col] = Fraction(1)
            slack = s_col
            s_col += 1
        if b < 0:
            row = [-v for v in row]
        if art:
            row[a_col] = Fraction(1)
            basis.append(a_col)
            a_col += 1
        else:
            basis.append(slack)
        T.append(row)

    allowed = [True] * ncols
    if nart:
        cost1 = [Fraction(0)] * (n + nslack) + [Fraction(1)] * nart
        _run(T, basis, cost1, allowed)
        infeas = sum(T[i][-1] for i, b in enumerate(basis) if b >= n + nslack)
        if infeas > 0:
            return LPResult("infeasible")
        # drive zero-level artificials out of the basis
        for i in range(len(T) - 1, -1, -1):
            if basis[i] >= n + nslack:
                j = next((j for j in range(n + nslack) if T[i][j] != 0), None)
                if j is None:
                    del T[i], basis[i]
                else:
                    _pivot(T, i, j)
                    basis[i] = j
        for j in range(n + nslack, ncols):
            allowed[j] = False

    sign = -1 if maximize else 1
    cost2 = [sign * _frac(v) for v in c] + [Fraction(0)] * (nslack + nart)
    status = _run(T, basis, cost2, allowed)
    if status == "unbounded":
        return LPResult("unbounded")
    x = [Fraction(0)] * n
    for i, b in enumerate(basis):
        if b < n:
            x[b] = T[i][-1]
    value = sum(_frac(ci) * xi for ci, xi in zip(c, x))
    return LPResult("optimal", x, value)


def _linprog_float(c, A_ub, b_ub, A_eq, b_eq, maximize) -> LPResult:
    import numpy as np
    from scipy.optimize import linprog

    cc = np.asarray([float(v) for v in c])
    res = linprog(
        -cc if maximize else cc,
        A_ub=np.asarray(A_ub, dtype=float) if len(A_ub) else None,
        b_ub=np.asarray(b_ub, dtype=float) if len(b_ub) else None,
        A_eq=np.asarray(A_eq, dtype=float) if len(A_eq) else None,
        b_eq=np.asarray(b_eq, dtype=float) if len(b_eq) else None,
        bounds=(0, None),
        method="highs",
    )
    if res.status == 2:
        return LPResult("infeasible", exact=False)
    if res.status == 3:
        return LPResult("unbounded", exact=False)
    if res.status != 0:
        raise RuntimeError(f"LP solver failed: {res.message}")
    x = [float(v) for v in res.x]
    return LPResult("optimal", x, float(cc @ res.x), exact=False)


def feasible_point(A_ub=(), b_ub=(), A_eq=(), b_eq=(), nvars: int | None = None):
    """Some ``x >= 0`` meeting the constraints, or ``None``."""
    if nvars is None:
        nvars = len(A_ub[0]) if len(A_ub) else len(A_eq[0])
    res = linprog_exact([0] * nvars, A_ub, b_ub, A_eq, b_eq)
    return res.x if res.status == "optimal" else None
