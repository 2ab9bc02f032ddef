"""Finite state spaces, events, exact measures and credal sets.

Events are stored as integer bitmasks over the atoms of a :class:`StateSpace`
(bit ``i`` set means atom ``i`` is a member), so that the 2**n subsets of a
space can be enumerated as ``range(2**n)``.  All probabilities are
:class:`fractions.Fraction`; floats are rejected on input.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .errors import ConditioningError, DomainError, ValidationError

MAX_ATOMS = 24

ZERO = Fraction(0)
ONE = Fraction(1)


def as_rational(value) -> Fraction:
    """Convert ``value`` to an exact Fraction.

    Accepts ints, Fractions, Decimals and strings such as ``"3/10"`` or
    ``"0.3"``.  Floats are refused because their binary expansion is rarely
    what the caller meant.
    """
    if isinstance(value, bool):
        raise ValidationError(f"not a rational: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Decimal):
        return Fraction(value)
    if isinstance(value, float):
        raise ValidationError(
            f"float {value!r} is inexact; pass it as a string such as '{value}'"
        )
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValidationError(f"malformed rational {value!r}") from exc
    raise ValidationError(f"not a rational: {value!r}")


def format_rational(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def submasks(mask: int) -> Iterator[int]:
    """All submasks of ``mask``, ``mask`` itself first and 0 last."""
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


@dataclass(frozen=True)
class StateSpace:
    atoms: tuple

    def __post_init__(self):
        atoms = tuple(str(a) for a in self.atoms)
        object.__setattr__(self, "atoms", atoms)
        if not atoms:
            raise ValidationError("a state space needs at least one atom")
        if len(set(atoms)) != len(atoms):
            raise ValidationError(f"duplicate atom labels in {list(atoms)}")
        if len(atoms) > MAX_ATOMS:
            raise ValidationError(
                f"{len(atoms)} atoms exceeds the hard cap of {MAX_ATOMS}"
            )

    @property
    def n(self) -> int:
        return len(self.atoms)

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def index(self, label) -> int:
        try:
            return self.atoms.index(str(label))
        except ValueError:
            raise ValidationError(f"unknown atom {label!r}") from None

    def event(self, labels: Iterable = ()) -> Event:
        mask = 0
        for label in labels:
            mask |= 1 << self.index(label)
        return Event(self, mask)

    def from_mask(self, mask: int) -> Event:
        return Event(self, mask)

    def empty(self) -> Event:
        return Event(self, 0)

    def full(self) -> Event:
        return Event(self, self.full_mask)

    def singleton(self, i: int) -> Event:
        return Event(self, 1 << i)

    def events(self) -> Iterator[Event]:
        """Every subset of the space, in ascending bitmask order."""
        for mask in range(1 << self.n):
            yield Event(self, mask)


@dataclass(frozen=True)
class Event:
    space: StateSpace
    mask: int

    def __post_init__(self):
        if self.mask < 0 or self.mask > self.space.full_mask:
            raise ValidationError(f"mask {self.mask} outside the state space")

    def _check(self, other: Event):
        if other.space != self.space:
            raise DomainError("events live on different state spaces")

    def __and__(self, other: Event) -> Event:
        self._check(other)
        return Event(self.space, self.mask & other.mask)

    def __or__(self, other: Event) -> Event:
        self._check(other)
        return Event(self.space, self.mask | other.mask)

    def __sub__(self, other: Event) -> Event:
        self._check(other)
        return Event(self.space, self.mask & ~other.mask)

    def __invert__(self) -> Event:
        return Event(self.space, self.space.full_mask ^ self.mask)

    def complement(self) -> Event:
        return ~self

    def __le__(self, other: Event) -> bool:
        self._check(other)
        return self.mask & ~other.mask == 0

    def __lt__(self, other: Event) -> bool:
        return self <= other and self.mask != other.mask

    def __len__(self) -> int:
        return popcount(self.mask)

    def __iter__(self) -> Iterator[int]:
        return (i for i in range(self.space.n) if self.mask >> i & 1)

    def __contains__(self, i: int) -> bool:
        return bool(self.mask >> i & 1)

    @property
    def labels(self) -> tuple:
        return tuple(self.space.atoms[i] for i in self)

    def is_empty(self) -> bool:
        return self.mask == 0

    def __repr__(self):
        return "{" + ",".join(self.labels) + "}"


@dataclass(frozen=True)
class ProbInterval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        lo, hi = as_rational(self.lo), as_rational(self.hi)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if not (0 <= lo <= hi <= 1):
            raise ValidationError(f"invalid probability interval [{lo}, {hi}]")

    def contains(self, other: ProbInterval) -> bool:
        """``other`` is a (weak) subset of this interval."""
        return self.lo <= other.lo and other.hi <= self.hi

    def is_degenerate(self) -> bool:
        return self.lo == self.hi

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def __iter__(self):
        yield self.lo
        yield self.hi

    def __repr__(self):
        return f"[{format_rational(self.lo)}, {format_rational(self.hi)}]"


@dataclass(frozen=True)
class Measure:
    space: StateSpace
    weights: tuple

    def __post_init__(self):
        weights = tuple(as_rational(w) for w in self.weights)
        object.__setattr__(self, "weights", weights)
        if len(weights) != self.space.n:
            raise ValidationError(
                f"measure has {len(weights)} weights for {self.space.n} atoms"
            )
        if any(w < 0 for w in weights):
            raise ValidationError(f"negative weight in {list(map(str, weights))}")
        total = sum(weights, ZERO)
        if total != 1:
            raise ValidationError(f"weights sum to {total}, not 1")

    @classmethod
    def uniform(cls, space: StateSpace) -> Measure:
        return cls(space, (Fraction(1, space.n),) * space.n)

    @classmethod
    def dirac(cls, space: StateSpace, i: int) -> Measure:
        return cls(space, tuple(ONE if j == i else ZERO for j in range(space.n)))

    def prob_mask(self, mask: int) -> Fraction:
        w = self.weights
        return sum((w[i] for i in range(len(w)) if mask >> i & 1), ZERO)

    def prob(self, event: Event) -> Fraction:
        if event.space != self.space:
            raise DomainError("event and measure live on different state spaces")
        return self.prob_mask(event.mask)

    def __call__(self, event: Event) -> Fraction:
        return self.prob(event)

    def condition(self, event: Event) -> Measure:
        """Bayes conditioning on ``event``; ``event`` must be non-null."""
        pe = self.prob(event)
        if pe == 0:
            raise ConditioningError(f"P({event!r}) = 0")
        return Measure(
            self.space,
            tuple(w / pe if i in event else ZERO for i, w in enumerate(self.weights)),
        )

    @property
    def support(self) -> Event:
        mask = 0
        for i, w in enumerate(self.weights):
            if w > 0:
                mask |= 1 << i
        return Event(self.space, mask)

    def __repr__(self):
        return "Measure(" + ", ".join(format_rational(w) for w in self.weights) + ")"


def mixture(measures: Sequence[Measure], weights: Sequence) -> Measure:
    """The convex combination ``sum(w * P)``; weights must be a distribution."""
    if not measures:
        raise ValidationError("mixture of no measures")
    if len(measures) != len(weights):
        raise ValidationError(
            f"{len(weights)} weights for {len(measures)} measures"
        )
    weights = [as_rational(w) for w in weights]
    if any(w < 0 for w in weights) or sum(weights, ZERO) != 1:
        raise ValidationError("mixture weights must be nonnegative and sum to 1")
    space = measures[0].space
    if any(m.space != space for m in measures):
        raise DomainError("mixed measures live on different state spaces")
    n = space.n
    out = [ZERO] * n
    for w, m in zip(weights, measures):
        if w:
            for i in range(n):
                out[i] += w * m.weights[i]
    return Measure(space, tuple(out))


@dataclass(frozen=True)
class CredalSet:
    """Convex hull of finitely many measures (the vertices)."""

    space: StateSpace
    vertices: tuple

    def __post_init__(self):
        vertices = tuple(self.vertices)
        object.__setattr__(self, "vertices", vertices)
        if not vertices:
            raise ValidationError("a credal set needs at least one vertex")
        for j, v in enumerate(vertices):
            if not isinstance(v, Measure):
                raise ValidationError(f"vertex {j} is not a Measure", field=j)
            if v.space != self.space:
                raise DomainError(f"vertex {j} lives on a different state space")

    @classmethod
    def from_rows(cls, space: StateSpace, rows) -> CredalSet:
        return cls(space, tuple(Measure(space, tuple(r)) for r in rows))

    @classmethod
    def singleton(cls, measure: Measure) -> CredalSet:
        return cls(measure.space, (measure,))

    def _mask(self, event: Event) -> int:
        if event.space != self.space:
            raise DomainError("event and credal set live on different state spaces")
        return event.mask

    def lower_mask(self, mask: int) -> Fraction:
        return min(v.prob_mask(mask) for v in self.vertices)

    def upper_mask(self, mask: int) -> Fraction:
        return max(v.prob_mask(mask) for v in self.vertices)

    def lower(self, event: Event) -> Fraction:
        return self.lower_mask(self._mask(event))

    def upper(self, event: Event) -> Fraction:
        return self.upper_mask(self._mask(event))

    def interval(self, event: Event) -> ProbInterval:
        mask = self._mask(event)
        values = [v.prob_mask(mask) for v in self.vertices]
        return ProbInterval(min(values), max(values))

    def argmin_vertices(self, event: Event) -> list[int]:
        values = [v.prob(event) for v in self.vertices]
        low = min(values)
        return [j for j, x in enumerate(values) if x == low]

    def argmax_vertices(self, event: Event) -> list[int]:
        values = [v.prob(event) for v in self.vertices]
        high = max(values)
        return [j for j, x in enumerate(values) if x == high]

    def __len__(self):
        return len(self.vertices)

    def __iter__(self):
        return iter(self.vertices)


@dataclass(frozen=True)
class Partition:
    space: StateSpace
    blocks: tuple

    def __iter__(self):
        return iter(self.blocks)

    def __len__(self):
        return len(self.blocks)


def lower_prob(credal: CredalSet, event: Event) -> Fraction:
    """Lower probability: the minimum of ``P(event)`` over the vertices.

    ``P(A)`` is linear in ``P``, so the infimum over the hull is attained at
    a vertex.
    """
    return credal.lower(event)


def upper_prob(credal: CredalSet, event: Event) -> Fraction:
    return credal.upper(event)


def event_interval(credal: CredalSet, event: Event) -> ProbInterval:
    return credal.interval(event)


def validate_partition(space: StateSpace, blocks: Sequence[Event]) -> Partition:
    """Check that ``blocks`` are nonempty, pairwise disjoint and cover ``space``."""
    seen = 0
    for j, block in enumerate(blocks):
        if block.space != space:
            raise DomainError(f"block {j} lives on a different state space")
        if block.is_empty():
            raise ValidationError(f"block {j} is empty", field=j)
        if block.mask & seen:
            raise ValidationError(
                f"block {j} {block!r} overlaps an earlier block", field=j
            )
        seen |= block.mask
    if seen != space.full_mask:
        gap = Event(space, space.full_mask ^ seen)
        raise ValidationError(f"blocks do not cover {gap!r}", field="gap")
    return Partition(space, tuple(blocks))
