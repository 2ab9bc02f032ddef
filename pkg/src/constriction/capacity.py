"""Set functions on finite spaces: capacities, belief functions and masses.

A :class:`SetFunction` stores one value per subset (dense, indexed by
bitmask).  A :class:`MassFunction` stores only its focal elements.  The two
are related by the Möbius transform and its inverse (the zeta transform)::

    m(A) = sum_{B <= A} (-1)**|A - B| f(B)
    f(A) = sum_{B <= A} m(B)
"""

from __future__ import annotations

import itertools
from math import comb
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from .core import (
    ONE,
    ZERO,
    CredalSet,
    Event,
    Measure,
    StateSpace,
    as_rational,
    format_rational,
    submasks,
)
from .errors import DomainError, PreconditionError, SizeError, ValidationError

# Dense set functions hold 2**n values.
ENUMERATION_LIMIT = 12
# Permutation construction of the core visits n! orderings.
PERMUTATION_LIMIT = 8
# Upper bound on collections visited by the k-monotonicity enumerators.
COLLECTION_LIMIT = 2_000_000


def _guard(space: StateSpace):
    if space.n > ENUMERATION_LIMIT:
        raise SizeError(
            f"{space.n} atoms: 2**{space.n} subsets exceeds the enumeration "
            f"limit of 2**{ENUMERATION_LIMIT}",
            bound=1 << space.n,
        )


@dataclass(frozen=True)
class SetFunction:
    space: StateSpace
    values: tuple

    def __post_init__(self):
        _guard(self.space)
        values = tuple(as_rational(v) for v in self.values)
        if len(values) != 1 << self.space.n:
            raise ValidationError(
                f"set function needs {1 << self.space.n} values, got {len(values)}"
            )
        object.__setattr__(self, "values", values)

    @classmethod
    def from_callable(cls, space: StateSpace, fn: Callable[[int], Fraction]):
        _guard(space)
        return cls(space, tuple(fn(mask) for mask in range(1 << space.n)))

    def value(self, mask: int) -> Fraction:
        return self.values[mask]

    def __call__(self, event: Event) -> Fraction:
        if event.space != self.space:
            raise DomainError("event and set function live on different state spaces")
        return self.values[event.mask]

    def conjugate(self) -> SetFunction:
        """``A -> 1 - f(A^c)``; maps lower probabilities to upper ones."""
        full = self.space.full_mask
        return SetFunction(self.space, tuple(ONE - self.values[full ^ m] for m in range(full + 1)))

    def upper(self, event: Event) -> Fraction:
        return ONE - self.values[self.space.full_mask ^ event.mask]

    def table(self) -> list:
        """Canonical dump: ``(labels, value)`` rows in ascending bitmask order."""
        return [
            (Event(self.space, m).labels, v) for m, v in enumerate(self.values)
        ]

    def __repr__(self):
        body = ", ".join(
            f"{Event(self.space, m)!r}: {format_rational(v)}"
            for m, v in enumerate(self.values)
        )
        return f"SetFunction({body})"


@dataclass(frozen=True)
class MassFunction:
    """Sparse map from focal elements (bitmasks) to masses.

    No invariants are enforced at construction because Möbius transforms of
    arbitrary set functions may be negative or unnormalized; call
    :meth:`validate` where a genuine mass function is required.
    """

    space: StateSpace
    masses: dict = field(hash=False)

    def __post_init__(self):
        clean = {}
        for key, v in dict(self.masses).items():
            mask = key.mask if isinstance(key, Event) else int(key)
            if mask < 0 or mask > self.space.full_mask:
                raise ValidationError(f"focal mask {mask} outside the state space")
            v = as_rational(v)
            if v != 0:
                clean[mask] = clean.get(mask, ZERO) + v
        object.__setattr__(self, "masses", {k: clean[k] for k in sorted(clean) if clean[k] != 0})

    def __eq__(self, other):
        return (
            isinstance(other, MassFunction)
            and self.space == other.space
            and self.masses == other.masses
        )

    def __hash__(self):
        return hash((self.space, tuple(self.masses.items())))

    @classmethod
    def from_labels(cls, space: StateSpace, items) -> MassFunction:
        """Build from ``{iterable_of_labels: mass}`` or ``[(labels, mass)]``."""
        if isinstance(items, dict):
            items = items.items()
        return cls(space, {space.event(labels).mask: v for labels, v in items})

    def mass(self, event: Event) -> Fraction:
        return self.masses.get(event.mask, ZERO)

    @property
    def focal_elements(self) -> list:
        return [Event(self.space, m) for m in self.masses]

    def total(self) -> Fraction:
        return sum(self.masses.values(), ZERO)

    def violations(self, nonnegative: bool = True) -> list:
        out = []
        if self.masses.get(0, ZERO) != 0:
            out.append(("a", f"m(empty set) = {self.masses[0]}, must be 0"))
        if self.total() != 1:
            out.append(("b", f"masses sum to {self.total()}, must be 1"))
        if nonnegative:
            for m, v in self.masses.items():
                if v < 0:
                    out.append(("nonnegative", f"m({Event(self.space, m)!r}) = {v} < 0"))
        return out

    def validate(self, nonnegative: bool = True) -> MassFunction:
        problems = self.violations(nonnegative)
        if problems:
            label, msg = problems[0]
            raise ValidationError(f"mass property ({label}) violated: {msg}", field=label)
        return self

    def bel_mask(self, mask: int) -> Fraction:
        return sum((v for f, v in self.masses.items() if f & ~mask == 0), ZERO)

    def pl_mask(self, mask: int) -> Fraction:
        return sum((v for f, v in self.masses.items() if f & mask), ZERO)

    def bel(self, event: Event) -> Fraction:
        return self.bel_mask(event.mask)

    def pl(self, event: Event) -> Fraction:
        return self.pl_mask(event.mask)

    def __repr__(self):
        body = ", ".join(
            f"{Event(self.space, m)!r}: {format_rational(v)}" for m, v in self.masses.items()
        )
        return f"MassFunction({body})"


def mobius_transform(f: SetFunction) -> MassFunction:
    """Möbius transform of a total set function (masses may be negative)."""
    g = list(f.values)
    n = f.space.n
    for i in range(n):
        bit = 1 << i
        for mask in range(len(g)):
            if mask & bit:
                g[mask] -= g[mask ^ bit]
    return MassFunction(f.space, dict(enumerate(g)))


def zeta_transform(m: MassFunction) -> SetFunction:
    """Inverse Möbius transform, ``f(A) = sum of m(B) over B <= A``."""
    _guard(m.space)
    g = [ZERO] * (1 << m.space.n)
    for mask, v in m.masses.items():
        g[mask] += v
    for i in range(m.space.n):
        bit = 1 << i
        for mask in range(len(g)):
            if mask & bit:
                g[mask] += g[mask ^ bit]
    return SetFunction(m.space, tuple(g))


def belief_from_mass(m: MassFunction) -> SetFunction:
    """Belief function of a mass function; rejects masses violating (a)/(b)."""
    m.validate(nonnegative=False)
    return zeta_transform(m)


def plausibility_from_mass(m: MassFunction) -> SetFunction:
    return belief_from_mass(m).conjugate()


def lower_envelope(credal: CredalSet) -> SetFunction:
    return SetFunction.from_callable(credal.space, credal.lower_mask)


def upper_envelope(credal: CredalSet) -> SetFunction:
    return SetFunction.from_callable(credal.space, credal.upper_mask)


def measure_function(p: Measure) -> SetFunction:
    return SetFunction.from_callable(p.space, p.prob_mask)


def is_capacity(f: SetFunction) -> bool:
    """Normalized (``f(empty)=0, f(full)=1``) and monotone under inclusion."""
    full = f.space.full_mask
    if f.values[0] != 0 or f.values[full] != 1:
        return False
    for mask in range(full + 1):
        v = f.values[mask]
        for i in range(f.space.n):
            bit = 1 << i
            if not mask & bit and f.values[mask | bit] < v:
                return False
    return True


@dataclass(frozen=True)
class MonotonicityResult:
    holds: bool
    witness: Optional[dict] = None

    def __bool__(self):
        return self.holds


def _collection_count(n: int, k: int) -> int:
    return sum(comb(n, j) * comb(1 << j, k) for j in range(n + 1))


def _check_k(f: SetFunction, k: int, monotone: bool) -> MonotonicityResult:
    if k < 2:
        raise ValidationError(f"order k must be at least 2, got {k}")
    n = f.space.n
    bound = _collection_count(n, k)
    if bound > COLLECTION_LIMIT:
        raise SizeError(
            f"order-{k} check on {n} atoms visits about {bound} collections "
            f"(limit {COLLECTION_LIMIT})",
            bound=bound,
        )
    full = f.space.full_mask
    values = f.values
    index_sets = [
        [i for i in range(k) if s >> i & 1] for s in range(1, 1 << k)
    ]
    for a in range(full + 1):
        if monotone:
            family = list(submasks(a))
        else:
            family = [full ^ s for s in submasks(full ^ a)]
        if len(family) < k:
            continue
        for sets in itertools.combinations(family, k):
            rhs = ZERO
            for idx in index_sets:
                acc = sets[idx[0]]
                for i in idx[1:]:
                    acc = acc & sets[i] if monotone else acc | sets[i]
                term = values[acc]
                rhs += term if len(idx) % 2 else -term
            lhs = values[a]
            bad = lhs < rhs if monotone else lhs > rhs
            if bad:
                return MonotonicityResult(
                    False,
                    {
                        "A": Event(f.space, a),
                        "sets": tuple(Event(f.space, s) for s in sets),
                        "lhs": lhs,
                        "rhs": rhs,
                    },
                )
    return MonotonicityResult(True)


def is_k_monotone(f: SetFunction, k: int) -> MonotonicityResult:
    """Check the order-k inclusion-exclusion inequality directly.

    Every collection of ``k`` distinct subsets ``A_i`` of every ``A`` is
    visited; on failure the result carries the violating collection.
    """
    return _check_k(f, k, monotone=True)


def is_k_alternating(f: SetFunction, k: int) -> MonotonicityResult:
    """Dual of :func:`is_k_monotone`, over supersets and unions."""
    return _check_k(f, k, monotone=False)


def is_belief_function(f: SetFunction) -> bool:
    """A capacity whose Möbius transform is nonnegative everywhere."""
    if not is_capacity(f):
        return False
    return all(v >= 0 for v in mobius_transform(f).masses.values())


def compatible_contains(f: SetFunction, p: Measure) -> bool:
    """True iff ``p`` dominates ``f`` on every event."""
    if p.space != f.space:
        raise DomainError("measure and set function live on different state spaces")
    return all(p.prob_mask(mask) >= v for mask, v in enumerate(f.values))


def core_vertices(bel: SetFunction) -> CredalSet:
    """Vertices of ``{P : P >= bel}`` for a belief function ``bel``.

    For each ordering of the atoms, every focal mass goes to its last-ranked
    member; the resulting measures (deduplicated, in order of first
    appearance) are the extreme points of the core.
    """
    if not is_belief_function(bel):
        raise PreconditionError("core_vertices needs a belief function")
    n = bel.space.n
    if n > PERMUTATION_LIMIT:
        raise SizeError(
            f"{n}! orderings exceeds the permutation limit", bound=n
        )
    masses = mobius_transform(bel).masses
    seen = {}
    for order in itertools.permutations(range(n)):
        rank = {atom: r for r, atom in enumerate(order)}
        w = [ZERO] * n
        for focal, v in masses.items():
            last = max((i for i in range(n) if focal >> i & 1), key=rank.__getitem__)
            w[last] += v
        seen.setdefault(tuple(w), None)
    return CredalSet(bel.space, tuple(Measure(bel.space, w) for w in seen))


def mass_from_credal(credal: CredalSet) -> MassFunction:
    """Mass function of a credal set whose lower envelope is a belief function."""
    low = lower_envelope(credal)
    if not is_belief_function(low):
        raise PreconditionError("lower envelope of this credal set is not a belief function")
    return mobius_transform(low)

