"""Small dense linear algebra over the rationals."""

from __future__ import annotations

from fractions import Fraction


def rref(matrix):
    """Reduced row echelon form; returns ``(rows, pivot_columns)``."""
    rows = [[Fraction(v) for v in row] for row in matrix]
    if not rows:
        return rows, []
    ncols = len(rows[0])
    pivots = []
    r = 0
    for col in range(ncols):
        pivot = next((i for i in range(r, len(rows)) if rows[i][col] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        p = rows[r][col]
        rows[r] = [v / p for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def nullspace(matrix):
    """Basis of ``{x : matrix @ x = 0}`` as a list of vectors."""
    rows, pivots = rref(matrix)
    ncols = len(matrix[0])
    free = [j for j in range(ncols) if j not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for r, p in enumerate(pivots):
            x[p] = -rows[r][f]
        basis.append(x)
    return basis


def rank(matrix) -> int:
    return len(rref(matrix)[1])


def matmul(a, b):
    cols = list(zip(*b))
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in cols] for row in a]


def identity(k):
    return [[Fraction(int(i == j)) for j in range(k)] for i in range(k)]


def matrix_power(m, n: int):
    """``m ** n`` by repeated squaring."""
    result = identity(len(m))
    base = [[Fraction(v) for v in row] for row in m]
    while n:
        if n & 1:
            result = matmul(result, base)
        n >>= 1
        if n:
            base = matmul(base, base)
    return result
