"""DeGroot consensus: agents repeatedly replace their opinion by a weighted
average of everybody's opinions, ``F^(n) = W F^(n-1)``."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .core import ZERO, Event, Measure, ProbInterval, as_rational, mixture
from .errors import DegenerateError, DomainError, ValidationError
from .linalg import identity, matmul, matrix_power, nullspace

DEFAULT_MAX_N = 64


@dataclass(frozen=True)
class WeightMatrix:
    rows: tuple

    def __post_init__(self):
        rows = tuple(tuple(as_rational(v) for v in row) for row in self.rows)
        k = len(rows)
        if k == 0:
            raise ValidationError("weight matrix is empty")
        for i, row in enumerate(rows):
            if len(row) != k:
                raise ValidationError(f"row {i} has {len(row)} entries, expected {k}", field=i)
            if any(v < 0 for v in row):
                raise ValidationError(f"row {i} has a negative entry", field=i)
            if sum(row, ZERO) != 1:
                raise ValidationError(f"row {i} sums to {sum(row, ZERO)}, not 1", field=i)
        object.__setattr__(self, "rows", rows)

    @property
    def k(self) -> int:
        return len(self.rows)

    def power(self, n: int) -> WeightMatrix:
        return WeightMatrix(matrix_power(self.rows, n))


def _check(W: WeightMatrix, opinions: Sequence[Measure]):
    if len(opinions) != W.k:
        raise ValidationError(f"{len(opinions)} opinions for a {W.k}x{W.k} weight matrix")
    space = opinions[0].space
    if any(f.space != space for f in opinions):
        raise DomainError("opinions live on different state spaces")


def degroot_step(W: WeightMatrix, opinions: Sequence[Measure]) -> tuple:
    _check(W, opinions)
    return tuple(mixture(opinions, row) for row in W.rows)


@dataclass(frozen=True)
class ConsensusCheck:
    holds_at: Optional[int]
    max_n: int
    column: Optional[int] = None

    @property
    def holds(self) -> bool:
        return self.holds_at is not None


def consensus_condition(W: WeightMatrix, max_n: int = DEFAULT_MAX_N) -> ConsensusCheck:
    """Smallest ``n <= max_n`` such that some column of ``W**n`` is positive.

    Only the zero pattern matters, so powers are taken over booleans.
    """
    k = W.k
    base = [[v > 0 for v in row] for row in W.rows]
    cur = base
    for n in range(1, max_n + 1):
        for j in range(k):
            if all(cur[i][j] for i in range(k)):
                return ConsensusCheck(n, max_n, j)
        cur = [[any(cur[i][l] and base[l][j] for l in range(k)) for j in range(k)] for i in range(k)]
    return ConsensusCheck(None, max_n)


def stationary_vector(W: WeightMatrix) -> tuple:
    """Exact solution of ``pi W = pi`` with ``sum(pi) = 1``.

    Raises :class:`DegenerateError` carrying the dimension of the solution
    space when it is not one-dimensional.
    """
    k = W.k
    eye = identity(k)
    # pi (W - I) = 0  <=>  (W - I)^T pi^T = 0
    system = [[W.rows[j][i] - eye[i][j] for j in range(k)] for i in range(k)]
    basis = nullspace(system)
    if len(basis) != 1:
        raise DegenerateError(
            f"stationary vectors form a {len(basis)}-dimensional space", dimension=len(basis)
        )
    v = basis[0]
    total = sum(v, ZERO)
    pi = tuple(x / total for x in v)
    if any(x < 0 for x in pi):
        raise DegenerateError("stationary vector has negative entries", dimension=1)
    check = matmul([list(pi)], W.rows)[0]
    assert tuple(check) == pi
    return pi


def consensus_limit(W: WeightMatrix, opinions: Sequence[Measure]) -> Measure:
    """The common opinion ``sum_j pi_j F_j``."""
    _check(W, opinions)
    return mixture(opinions, stationary_vector(W))


def iterate(W: WeightMatrix, opinions: Sequence[Measure], steps: int) -> tuple:
    """``W**steps F`` in one product, using repeated squaring."""
    _check(W, opinions)
    return tuple(mixture(opinions, row) for row in W.power(steps).rows)


@dataclass(frozen=True)
class NestingTrace:
    intervals: tuple
    nested: bool
    first_strict: Optional[tuple]  # (r, s) with interval s strictly inside interval r


def nesting_trace(W: WeightMatrix, opinions: Sequence[Measure], event: Event, steps: int) -> NestingTrace:
    """Intervals ``[min_i F_in(A), max_i F_in(A)]`` for ``n = 0..steps``."""
    _check(W, opinions)
    cur = tuple(opinions)
    intervals = []
    for n in range(steps + 1):
        values = [f.prob(event) for f in cur]
        intervals.append(ProbInterval(min(values), max(values)))
        if n < steps:
            cur = degroot_step(W, cur)
    nested = all(intervals[n - 1].contains(intervals[n]) for n in range(1, len(intervals)))
    first = None
    for s in range(1, len(intervals)):
        a, b = intervals[0], intervals[s]
        if b.lo > a.lo and b.hi < a.hi:
            first = (0, s)
            break
    return NestingTrace(tuple(intervals), nested, first)


def max_deviation(a: Measure, b: Measure) -> Fraction:
    return max(abs(x - y) for x, y in zip(a.weights, b.weights))
