"""Exact rational linear programming via a two-phase tableau simplex.

Bland's rule everywhere, so the solver is deterministic and never cycles.
Problem sizes in this library are tiny (tens of rows); clarity over speed.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


class LPResult:
    __slots__ = ("status", "value", "x")

    def __init__(self, status: str, value: Fraction | None, x: tuple[Fraction, ...] | None):
        self.status = status
        self.value = value
        self.x = x


def _pivot(tab: list[list[Fraction]], basis: list[int], row: int, col: int) -> None:
    inv = tab[row][col]
    tab[row] = [x / inv for x in tab[row]]
    for i in range(len(tab)):
        if i != row and tab[i][col] != 0:
            f = tab[i][col]
            tab[i] = [a - f * b for a, b in zip(tab[i], tab[row])]
    basis[row] = col


def _run_simplex(tab: list[list[Fraction]], basis: list[int], ncols: int, allowed) -> str:
    # Last row is the objective (maximization): reduced costs tab[-1][j], value tab[-1][-1].
    while True:
        obj = tab[-1]
        col = next((j for j in range(ncols) if allowed(j) and obj[j] < 0), None)
        if col is None:
            return OPTIMAL
        row = None
        best = None
        for i in range(len(tab) - 1):
            if tab[i][col] > 0:
                ratio = tab[i][-1] / tab[i][col]
                if best is None or ratio < best or (ratio == best and basis[i] < basis[row]):
                    best, row = ratio, i
        if row is None:
            return UNBOUNDED
        _pivot(tab, basis, row, col)


def lp_max(c: Sequence, a_ub: Sequence[Sequence], b_ub: Sequence,
           a_eq: Sequence[Sequence] = (), b_eq: Sequence = ()) -> LPResult:
    """Maximize c.x subject to a_ub.x <= b_ub and a_eq.x == b_eq, x free."""
    c = [Fraction(v) for v in c]
    n = len(c)
    rows: list[tuple[list[Fraction], Fraction]] = []
    for row, b in zip(a_ub, b_ub, strict=True):
        rows.append(([Fraction(v) for v in row], Fraction(b)))
    for row, b in zip(a_eq, b_eq, strict=True):
        r = [Fraction(v) for v in row]
        rows.append((r, Fraction(b)))
        rows.append(([-v for v in r], -Fraction(b)))
    m = len(rows)

    # Free x split as u - w; slacks turn every row into an equality with rhs >= 0.
    nvars = 2 * n + m
    tab: list[list[Fraction]] = []
    art_cols: list[int] = []
    basis: list[int] = []
    for i, (row, b) in enumerate(rows):
        line = [Fraction(0)] * nvars
        for j, v in enumerate(row):
            line[j] = v
            line[n + j] = -v
        line[2 * n + i] = Fraction(1)
        if b < 0:
            line = [-v for v in line]
            b = -b
            basis.append(-1)  # needs an artificial
        else:
            basis.append(2 * n + i)
        tab.append(line + [b])

    for i in range(m):
        if basis[i] == -1:
            for line in tab:
                line.insert(-1, Fraction(0))
            col = len(tab[0]) - 2
            tab[i][col] = Fraction(1)
            basis[i] = col
            art_cols.append(col)

    total = len(tab[0]) - 1
    artset = set(art_cols)

    if art_cols:
        phase1 = [Fraction(0)] * (total + 1)
        for col in art_cols:
            phase1[col] = Fraction(1)
        tab.append(phase1)
        for i in range(m):
            if basis[i] in artset:
                f = tab[-1][basis[i]]
                tab[-1] = [a - f * b for a, b in zip(tab[-1], tab[i])]
        _run_simplex(tab, basis, total, lambda j: True)
        if tab[-1][-1] != 0:
            return LPResult(INFEASIBLE, None, None)
        tab.pop()
        # Drive leftover artificials out of the basis (degenerate but possible).
        for i in range(m):
            if basis[i] in artset:
                col = next((j for j in range(total) if j not in artset and tab[i][j] != 0), None)
                if col is None:
                    continue  # redundant row, harmless to keep
                _pivot(tab, basis, i, col)

    allowed = (lambda j: j not in artset) if artset else (lambda j: True)
    obj = [Fraction(0)] * (total + 1)
    for j in range(n):
        obj[j] = -c[j]
        obj[n + j] = c[j]
    tab.append(obj)
    for i in range(m):
        if tab[-1][basis[i]] != 0:
            f = tab[-1][basis[i]]
            tab[-1] = [a - f * b for a, b in zip(tab[-1], tab[i])]
    status = _run_simplex(tab, basis, total, allowed)
    if status == UNBOUNDED:
        return LPResult(UNBOUNDED, None, None)
    xfull = [Fraction(0)] * total
    for i in range(m):
        xfull[basis[i]] = tab[i][-1]
    x = tuple(xfull[j] - xfull[n + j] for j in range(n))
    return LPResult(OPTIMAL, tab[-1][-1], x)


def lp_min(c: Sequence, a_ub, b_ub, a_eq=(), b_eq=()) -> LPResult:
    """Minimize c.x under the same constraint conventions as lp_max."""
    res = lp_max([-Fraction(v) for v in c], a_ub, b_ub, a_eq, b_eq)
    if res.status == OPTIMAL:
        return LPResult(OPTIMAL, -res.value, res.x)
    return res


def feasible(a_ub, b_ub, a_eq=(), b_eq=(), nvars: int | None = None) -> tuple[Fraction, ...] | None:
    """A feasible point of the system, or None."""
    if nvars is None:
        probe = list(a_ub) + list(a_eq)
        nvars = len(probe[0]) if probe else 0
    res = lp_max([Fraction(0)] * nvars, a_ub, b_ub, a_eq, b_eq)
    return res.x if res.status == OPTIMAL else None
