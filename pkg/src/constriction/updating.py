"""Updating rules and their reversal by intentional forgetting.

Four rules, tagged as in the rest of the package:

``B``  generalized Bayes, vertex-wise conditioning of a credal set;
``G``  geometric rule, the ratio of lower probabilities;
``D``  Dempster's rule, intersect-and-renormalize on masses;
``I``  generalized imaging, mass transfer through a transfer function.

Every update can be wrapped in an :class:`UpdateRecord` that keeps the full
prior state, so forgetting is an exact restore rather than an inverse map
(neither Dempster's rule nor imaging is injective).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from .capacity import (
    MassFunction,
    SetFunction,
    belief_from_mass,
    core_vertices,
    is_belief_function,
    lower_envelope,
    mobius_transform,
)
from .core import ONE, ZERO, CredalSet, Event, ProbInterval, StateSpace, as_rational
from .errors import (
    ConditioningError,
    DomainError,
    PreconditionError,
    ValidationError,
)

RULES = ("B", "G", "D", "I")
RULE_NAMES = {"bayes": "B", "geometric": "G", "dempster": "D", "imaging": "I"}

State = Union[CredalSet, SetFunction, MassFunction]


def rule_tag(rule: str) -> str:
    """Accept ``"B"`` or ``"bayes"`` style names."""
    tag = RULE_NAMES.get(rule.lower(), rule.upper()) if isinstance(rule, str) else None
    if tag not in RULES:
        raise ValidationError(f"unknown updating rule {rule!r}")
    return tag


def gen_bayes_update(credal: CredalSet, evidence: Event) -> CredalSet:
    """Condition every vertex on ``evidence``.

    ``P(A | E)`` is a ratio of two linear functionals with a positive
    denominator, hence quasi-linear on the hull; its extrema over the hull
    are therefore attained at vertices and the conditioned vertex list
    represents the same envelope as conditioning the whole hull.
    """
    if evidence.space != credal.space:
        raise DomainError("evidence and credal set live on different state spaces")
    out = []
    for j, v in enumerate(credal.vertices):
        if v.prob(evidence) == 0:
            raise ConditioningError(
                f"vertex {j} assigns probability 0 to the evidence {evidence!r}"
            )
        out.append(v.condition(evidence))
    return CredalSet(credal.space, tuple(out))


def geometric_crossings(lower: SetFunction, evidence: Event) -> list:
    """Events whose geometric lower bound exceeds the geometric upper bound.

    Never happens for lower envelopes of credal sets (they are superadditive
    on disjoint events); reported for arbitrary set-function inputs.
    """
    full = lower.space.full_mask
    e = evidence.mask
    le = lower.values[e]
    out = []
    for a in range(full + 1):
        lo = lower.values[a & e]
        hi = le - lower.values[(full ^ a) & e]
        if lo > hi:
            out.append(Event(lower.space, a))
    return out


def geometric_update(lower: Union[SetFunction, CredalSet], evidence: Event) -> SetFunction:
    """Conditional lower probability ``L(A & E) / L(E)``.

    The conditional upper probability is the conjugate of the result
    (``SetFunction.upper``).  Crossed bounds are reported through a
    ``RuntimeWarning``, not clamped.
    """
    if isinstance(lower, CredalSet):
        lower = lower_envelope(lower)
    if evidence.space != lower.space:
        raise DomainError("evidence and set function live on different state spaces")
    le = lower.values[evidence.mask]
    if le <= 0:
        raise ConditioningError(
            f"lower probability of the evidence {evidence!r} is {le}; the geometric rule needs it positive"
        )
    e = evidence.mask
    posterior = SetFunction(
        lower.space, tuple(lower.values[a & e] / le for a in range(len(lower.values)))
    )
    crossed = geometric_crossings(lower, evidence)
    if crossed:
        warnings.warn(
            f"geometric bounds cross (lower > upper) on {len(crossed)} events, "
            f"first {crossed[0]!r}",
            RuntimeWarning,
            stacklevel=2,
        )
    return posterior


def dempster_update(m: MassFunction, evidence: Event) -> MassFunction:
    """Dempster conditioning: move each focal set to its intersection with E
    and renormalize by the plausibility of E."""
    if evidence.space != m.space:
        raise DomainError("evidence and mass function live on different state spaces")
    m.validate(nonnegative=True)
    e = evidence.mask
    pl = m.pl_mask(e)
    if pl == 0:
        raise ConditioningError(f"plausibility of the evidence {evidence!r} is 0")
    out = {}
    for focal, v in m.masses.items():
        inter = focal & e
        if inter:
            out[inter] = out.get(inter, ZERO) + v
    return MassFunction(m.space, {k: v / pl for k, v in out.items()})


@dataclass(frozen=True)
class TransferFunction:
    """``f(B, X)``: share of the mass of ``X`` sent to ``B`` given evidence E.

    Stored sparsely as ``{(B_mask, X_mask): value}``; absent pairs are 0.
    """

    evidence: Event
    table: dict = field(hash=False)

    def __post_init__(self):
        clean = {}
        for (b, x), v in dict(self.table).items():
            b = b.mask if isinstance(b, Event) else int(b)
            x = x.mask if isinstance(x, Event) else int(x)
            v = as_rational(v)
            if v != 0:
                clean[(b, x)] = clean.get((b, x), ZERO) + v
        object.__setattr__(self, "table", clean)

    @property
    def space(self) -> StateSpace:
        return self.evidence.space

    def __call__(self, b: int, x: int) -> Fraction:
        return self.table.get((b, x), ZERO)

    def targets(self, x: int) -> dict:
        return {b: v for (b, xx), v in self.table.items() if xx == x}

    @classmethod
    def dempster_style(cls, evidence: Event) -> TransferFunction:
        """Send each X to ``X & E``; mass wholly outside E goes to E."""
        e = evidence.mask
        table = {}
        for x in range(evidence.space.full_mask + 1):
            inter = x & e
            table[(inter if inter else e, x)] = ONE
        return cls(evidence, table)

    @classmethod
    def uniform_within_e(cls, evidence: Event) -> TransferFunction:
        """Send each X to ``X & E``; mass wholly outside E is spread evenly
        over the singletons of E."""
        e = evidence.mask
        atoms = [1 << i for i in evidence]
        if not atoms:
            raise ValidationError("evidence must be nonempty")
        share = Fraction(1, len(atoms))
        table = {}
        for x in range(evidence.space.full_mask + 1):
            inter = x & e
            if inter:
                table[(inter, x)] = ONE
            else:
                for s in atoms:
                    table[(s, x)] = share
        return cls(evidence, table)

    @classmethod
    def builtin(cls, name: str, evidence: Event) -> TransferFunction:
        makers = {
            "dempster-style": cls.dempster_style,
            "uniform-within-e": cls.uniform_within_e,
        }
        try:
            return makers[name.lower()](evidence)
        except KeyError:
            raise ValidationError(
                f"unknown built-in transfer {name!r}; choose from {sorted(makers)}"
            ) from None


@dataclass(frozen=True)
class TransferViolation:
    constraint: str
    b: Optional[int]
    x: int
    detail: str


def validate_transfer(t: TransferFunction) -> list:
    """All violated constraints, each with a witness pair; empty means valid.

    (a) ``sum_B f(B, X) = 1`` for every X; (b) ``f(B, X) = 0`` whenever
    ``B`` lies inside the complement of E; (c) ``f(empty, X) = 0``;
    values must also lie in [0, 1].
    """
    space = t.space
    e = t.evidence.mask
    full = space.full_mask
    out = []
    sums = {}
    for (b, x), v in sorted(t.table.items()):
        if b > full or x > full:
            out.append(TransferViolation("domain", b, x, "mask outside the state space"))
            continue
        if v < 0 or v > 1:
            out.append(TransferViolation("range", b, x, f"f = {v} not in [0, 1]"))
        if b == 0:
            out.append(TransferViolation("c", b, x, f"f(empty, X) = {v}"))
        elif b & e == 0:
            out.append(
                TransferViolation("b", b, x, f"f(B, X) = {v} with B inside the complement of E")
            )
        sums[x] = sums.get(x, ZERO) + v
    for x in range(full + 1):
        s = sums.get(x, ZERO)
        if s != 1:
            out.append(TransferViolation("a", None, x, f"sum over B of f(B, X) = {s}"))
    return out


def imaging_update(m: MassFunction, t: TransferFunction) -> MassFunction:
    """Generalized imaging: ``m_I(A) = sum_X f(A, X) m(X)``."""
    if t.space != m.space:
        raise DomainError("transfer function and mass function live on different state spaces")
    problems = validate_transfer(t)
    if problems:
        p = problems[0]
        raise ValidationError(
            f"transfer function violates constraint ({p.constraint}): {p.detail}",
            field=p.constraint,
        )
    out = {}
    for (b, x), v in t.table.items():
        mx = m.masses.get(x)
        if mx:
            out[b] = out.get(b, ZERO) + v * mx
    return MassFunction(m.space, out)


def as_mass(state: State) -> MassFunction:
    if isinstance(state, MassFunction):
        return state
    if isinstance(state, CredalSet):
        state = lower_envelope(state)
    if not is_belief_function(state):
        raise PreconditionError("this rule needs a belief function")
    return mobius_transform(state)


def as_lower(state: State) -> SetFunction:
    if isinstance(state, SetFunction):
        return state
    if isinstance(state, CredalSet):
        return lower_envelope(state)
    return belief_from_mass(state)


def as_credal(state: State) -> CredalSet:
    if isinstance(state, CredalSet):
        return state
    if isinstance(state, MassFunction):
        state = belief_from_mass(state)
    return core_vertices(state)


def state_interval(state: State, event: Event) -> ProbInterval:
    """``[lower(A), upper(A)]`` of any supported belief state."""
    if isinstance(state, CredalSet):
        return state.interval(event)
    if isinstance(state, MassFunction):
        return ProbInterval(state.bel(event), state.pl(event))
    return ProbInterval(state(event), state.upper(event))


def update(state: State, rule: str, evidence: Event, transfer=None) -> UpdateRecord:
    """Apply ``rule`` and return the record (prior snapshot included).

    Input states are converted where the rule needs another representation:
    Bayes works on credal sets, the geometric rule on lower probabilities,
    Dempster and imaging on masses.
    """
    tag = rule_tag(rule)
    if tag == "B":
        posterior = gen_bayes_update(as_credal(state), evidence)
    elif tag == "G":
        posterior = geometric_update(as_lower(state), evidence)
    elif tag == "D":
        posterior = dempster_update(as_mass(state), evidence)
    else:
        m = as_mass(state)
        if m.bel_mask(evidence.mask) <= 0:
            raise ConditioningError("imaging needs positive belief in the evidence")
        if transfer is None:
            transfer = TransferFunction.dempster_style(evidence)
        elif isinstance(transfer, str):
            transfer = TransferFunction.builtin(transfer, evidence)
        if transfer.evidence != evidence:
            raise ValidationError("transfer function was built for different evidence")
        posterior = imaging_update(m, transfer)
    return UpdateRecord(tag, evidence, state, posterior)


@dataclass(frozen=True)
class UpdateRecord:
    rule: str
    evidence: Event
    prior: State
    posterior: State


def forget(record: UpdateRecord) -> State:
    """Undo one update exactly by restoring the recorded prior."""
    return record.prior


@dataclass(frozen=True)
class UpdateChain:
    """Append-only log of successive updates from an initial state."""

    initial: State
    records: tuple = ()

    @property
    def state(self) -> State:
        return self.records[-1].posterior if self.records else self.initial

    def apply(self, rule: str, evidence: Event, transfer=None) -> UpdateChain:
        rec = update(self.state, rule, evidence, transfer)
        return UpdateChain(self.initial, self.records + (rec,))

    def forget(self, k: int = 1) -> UpdateChain:
        """Drop the last ``k`` updates; ``k = len(records)`` returns to the initial state."""
        if not 0 <= k <= len(self.records):
            raise ValidationError(f"cannot forget {k} of {len(self.records)} updates")
        return UpdateChain(self.initial, self.records[: len(self.records) - k])


@dataclass(frozen=True)
class LeviVerdict:
    triggered: bool
    message: str
    before: ProbInterval
    after_update: ProbInterval
    restored: Optional[State] = None
    reversal: Optional[object] = None


def levi_neutral(record: UpdateRecord, event: Event) -> LeviVerdict:
    """Reject evidence that dilated ``event``.

    If the recorded Bayes or geometric update dilated the event, the prior is
    restored and the verdict of going back from the conditioned bounds to
    the prior bounds is returned; otherwise neutrality is not triggered.
    """
    from .analysis import DILATIONS, classify_uniform

    if record.rule not in ("B", "G"):
        raise PreconditionError("Levi-neutrality is defined after Bayes or geometric updates")
    before = state_interval(record.prior, event)
    after = state_interval(record.posterior, event)
    verdict = classify_uniform(before, after)
    if verdict.kind not in DILATIONS:
        return LeviVerdict(False, "no dilation, neutrality not triggered", before, after)
    restored = forget(record)
    reversal = classify_uniform(after, state_interval(restored, event))
    tag = record.rule
    return LeviVerdict(
        True,
        f"(LN_{tag}, {record.evidence!r}) constricts {event!r}",
        before,
        after,
        restored,
        reversal,
    )
