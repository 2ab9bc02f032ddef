"""Exact rational linear programming.

A dense two-phase tableau simplex over :class:`~fractions.Fraction` with
Bland's rule, which cannot cycle.  The problems solved in this package are
tiny (a few dozen variables), so clarity wins over speed here.

Standard form::

    minimize (or maximize)  c @ x
    subject to              A_eq @ x == b_eq
                            A_ub @ x <= b_ub
                            x >= 0
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LPResult:
    status: str
    x: Optional[tuple] = None
    value: Optional[Fraction] = None

    @property
    def ok(self) -> bool:
        return self.status == OPTIMAL


class _Tableau:
    def __init__(self, rows, rhs, basis):
        self.rows = rows  # list of lists of Fraction
        self.rhs = rhs
        self.basis = basis

    def pivot(self, r, col):
        row = self.rows[r]
        p = row[col]
        if p != 1:
            inv = 1 / p
            self.rows[r] = row = [v * inv for v in row]
            self.rhs[r] *= inv
        for i, other in enumerate(self.rows):
            if i == r:
                continue
            f = other[col]
            if f:
                self.rows[i] = [a - f * b for a, b in zip(other, row)]
                self.rhs[i] -= f * self.rhs[r]
        self.basis[r] = col

    def reduced_costs(self, cost):
        z = [Fraction(0)] * len(cost)
        for r, b in enumerate(self.basis):
            cb = cost[b]
            if cb:
                for j, v in enumerate(self.rows[r]):
                    if v:
                        z[j] += cb * v
        return [c - zj for c, zj in zip(cost, z)]

    def run(self, cost, allowed):
        """Minimize ``cost`` over the current basis; Bland's rule."""
        while True:
            red = self.reduced_costs(cost)
            entering = next(
                (j for j in range(len(cost)) if allowed[j] and red[j] < 0), None
            )
            if entering is None:
                return OPTIMAL
            best = None
            for r, row in enumerate(self.rows):
                a = row[entering]
                if a > 0:
                    ratio = self.rhs[r] / a
                    key = (ratio, self.basis[r])
                    if best is None or key < best[0]:
                        best = (key, r)
            if best is None:
                return UNBOUNDED
            self.pivot(best[1], entering)

    def value(self, cost):
        return sum(
            (cost[b] * self.rhs[r] for r, b in enumerate(self.basis)), Fraction(0)
        )


def solve(
    c: Sequence,
    A_eq: Sequence[Sequence] = (),
    b_eq: Sequence = (),
    A_ub: Sequence[Sequence] = (),
    b_ub: Sequence = (),
    maximize: bool = False,
) -> LPResult:
    n = len(c)
    c = [Fraction(v) for v in c]
    rows, rhs = [], []
    m_ub = len(A_ub)
    for i, (a, b) in enumerate(zip(A_ub, b_ub)):
        slack = [Fraction(0)] * m_ub
        slack[i] = Fraction(1)
        rows.append([Fraction(v) for v in a] + slack)
        rhs.append(Fraction(b))
    for a, b in zip(A_eq, b_eq):
        rows.append([Fraction(v) for v in a] + [Fraction(0)] * m_ub)
        rhs.append(Fraction(b))
    for row in rows:
        if len(row) != n + m_ub:
            raise ValueError("constraint row length does not match objective")
    nvar = n + m_ub
    for r in range(len(rows)):
        if rhs[r] < 0:
            rows[r] = [-v for v in rows[r]]
            rhs[r] = -rhs[r]

    # phase 1: one artificial per row
    m = len(rows)
    total = nvar + m
    for r in range(m):
        art = [Fraction(0)] * m
        art[r] = Fraction(1)
        rows[r] = rows[r] + art
    tab = _Tableau(rows, rhs, [nvar + r for r in range(m)])
    phase1_cost = [Fraction(0)] * nvar + [Fraction(1)] * m
    tab.run(phase1_cost, [True] * total)
    if tab.value(phase1_cost) > 0:
        return LPResult(INFEASIBLE)

    # drive remaining (zero-valued) artificials out of the basis
    r = 0
    while r < len(tab.rows):
        if tab.basis[r] >= nvar:
            col = next((j for j in range(nvar) if tab.rows[r][j] != 0), None)
            if col is None:
                del tab.rows[r]
                del tab.rhs[r]
                del tab.basis[r]
                continue
            tab.pivot(r, col)
        r += 1

    sign = -1 if maximize else 1
    cost = [sign * v for v in c] + [Fraction(0)] * (total - n)
    allowed = [True] * nvar + [False] * m
    status = tab.run(cost, allowed)
    if status == UNBOUNDED:
        return LPResult(UNBOUNDED)
    x = [Fraction(0)] * total
    for r, b in enumerate(tab.basis):
        x[b] = tab.rhs[r]
    value = sum((ci * xi for ci, xi in zip(c, x)), Fraction(0))
    return LPResult(OPTIMAL, tuple(x[:n]), value)


def feasible_point(A_eq, b_eq, A_ub=(), b_ub=()) -> Optional[tuple]:
    """Any point of ``{x >= 0 : A_eq x = b_eq, A_ub x <= b_ub}``, or None."""
    width = len(A_eq[0]) if A_eq else len(A_ub[0])
    res = solve([0] * width, A_eq, b_eq, A_ub, b_ub)
    return res.x if res.ok else None
