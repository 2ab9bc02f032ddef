"""Independent brute-force oracles shared by several test modules."""

from fractions import Fraction as F
from itertools import combinations


def solve_exact(rows, rhs):
    """Unique solution of a square-or-tall system by Gauss-Jordan, else None."""
    m = [list(map(F, r)) + [F(b)] for r, b in zip(rows, rhs)]
    ncol = len(rows[0])
    piv_row = 0
    pivots = []
    for c in range(ncol):
        p = next((r for r in range(piv_row, len(m)) if m[r][c] != 0), None)
        if p is None:
            return None
        m[piv_row], m[p] = m[p], m[piv_row]
        lead = m[piv_row][c]
        m[piv_row] = [v / lead for v in m[piv_row]]
        for r in range(len(m)):
            if r != piv_row and m[r][c]:
                f = m[r][c]
                m[r] = [a - f * b for a, b in zip(m[r], m[piv_row])]
        pivots.append(piv_row)
        piv_row += 1
    if any(row[-1] != 0 for row in m[piv_row:]):
        return None
    return [m[r][-1] for r in pivots]


def polytope_vertices(A_eq, b_eq):
    """Vertices of ``{x >= 0 : A_eq x = b_eq}`` by trying every column
    support and keeping nonnegative unique solutions."""
    n = len(A_eq[0])
    out = set()
    for size in range(1, n + 1):
        for cols in combinations(range(n), size):
            sub = [[row[j] for j in cols] for row in A_eq]
            x = solve_exact(sub, b_eq)
            if x is None or any(v < 0 for v in x):
                continue
            full = [F(0)] * n
            for j, v in zip(cols, x):
                full[j] = v
            out.add(tuple(full))
    return out
