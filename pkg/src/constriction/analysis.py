"""Constriction and dilation verdicts, and checks of the theorem conditions.

Interval vocabulary, for a prior ``[lo, hi]`` and a posterior ``[lo', hi']``:

* strict constriction: ``lo' > lo`` and ``hi' < hi``;
* weak constriction: one of those inequalities strict, the other an equality;
* strict / weak dilation: the same with the roles of the intervals swapped;
* neither: equal intervals, or intervals that shift without nesting.

Equal intervals are deliberately *not* weak constriction; see
:func:`classify_uniform`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

from .capacity import MassFunction, SetFunction, belief_from_mass, is_belief_function, mobius_transform
from .core import ONE, ZERO, CredalSet, Event, Measure, Partition, ProbInterval, as_rational
from .errors import ConditioningError, PreconditionError, ValidationError
from .updating import (
    State,
    TransferFunction,
    dempster_update,
    geometric_update,
    imaging_update,
    rule_tag,
    state_interval,
    update,
    validate_transfer,
)

STRICT_CONSTRICTION = "strict-constriction"
WEAK_CONSTRICTION = "weak-constriction"
STRICT_DILATION = "strict-dilation"
WEAK_DILATION = "weak-dilation"
NEITHER = "neither"

CONSTRICTIONS = (STRICT_CONSTRICTION, WEAK_CONSTRICTION)
DILATIONS = (STRICT_DILATION, WEAK_DILATION)

UNIFORM = "uniform"
POINTWISE = "pointwise"
MERELY_POINTWISE = "merely-pointwise"
SINGLE = "single-evidence"


@dataclass(frozen=True)
class Verdict:
    kind: str
    scope: str
    before: ProbInterval
    after: Union[ProbInterval, tuple]
    witnesses: dict = field(default_factory=dict, hash=False, compare=False)

    @property
    def constricts(self) -> bool:
        return self.kind in CONSTRICTIONS

    @property
    def dilates(self) -> bool:
        return self.kind in DILATIONS


def _kind(before: ProbInterval, after: ProbInterval) -> str:
    up_lo, up_hi = after.lo > before.lo, after.hi < before.hi
    eq_lo, eq_hi = after.lo == before.lo, after.hi == before.hi
    if up_lo and up_hi:
        return STRICT_CONSTRICTION
    if (up_lo and eq_hi) or (eq_lo and up_hi):
        return WEAK_CONSTRICTION
    down_lo, down_hi = after.lo < before.lo, after.hi > before.hi
    if down_lo and down_hi:
        return STRICT_DILATION
    if (down_lo and eq_hi) or (eq_lo and down_hi):
        return WEAK_DILATION
    return NEITHER


def classify_uniform(before: ProbInterval, after: ProbInterval, scope: str = UNIFORM) -> Verdict:
    """Exact verdict for moving from ``before`` to ``after``.

    When both endpoints coincide the verdict is ``neither``: the weak case
    needs exactly one of the two inequalities to hold with equality.
    """
    return Verdict(_kind(before, after), scope, before, after)


# -- partition experiments ---------------------------------------------------


@dataclass(frozen=True)
class PartitionReport:
    event: Event
    rule: str
    before: ProbInterval
    blocks: tuple  # of (Event, Verdict)
    pointwise: Verdict
    uniform: Verdict
    skipped: tuple = ()

    @property
    def merely_pointwise(self) -> bool:
        return self.pointwise.scope == MERELY_POINTWISE


def _pointwise_kind(kinds: Sequence[str]) -> str:
    if kinds and all(k == STRICT_CONSTRICTION for k in kinds):
        return STRICT_CONSTRICTION
    if kinds and all(k in CONSTRICTIONS for k in kinds):
        return WEAK_CONSTRICTION
    if kinds and all(k == STRICT_DILATION for k in kinds):
        return STRICT_DILATION
    if kinds and all(k in DILATIONS for k in kinds):
        return WEAK_DILATION
    return NEITHER


def posterior_interval(state: State, rule: str, evidence: Event, event: Event, transfer=None) -> ProbInterval:
    """Interval of ``event`` after updating ``state`` on ``evidence``."""
    tag = rule_tag(rule)
    if tag == "I":
        if isinstance(transfer, TransferFunction):
            t = transfer
        elif callable(transfer):
            t = transfer(evidence)
        else:
            t = TransferFunction.builtin(transfer or "dempster-style", evidence)
        rec = update(state, tag, evidence, t)
    else:
        rec = update(state, tag, evidence)
    return state_interval(rec.posterior, event)


def _null_everywhere(state: State, block: Event) -> bool:
    return state_interval(state, block).hi == 0


def classify_partition(
    state: State,
    event: Event,
    partition: Partition,
    rule: str = "B",
    transfer=None,
) -> PartitionReport:
    """Per-block, pointwise and uniform verdicts for an experiment.

    Blocks null under every member of the belief set are outcomes of
    probability zero; they are returned in ``skipped``.  A block null under
    only some members raises :class:`ConditioningError` for the rules that
    need positive lower probability.  ``transfer`` (imaging only) is a built-in
    name, a :class:`TransferFunction`, or a callable ``block -> transfer``.
    """
    tag = rule_tag(rule)
    before = state_interval(state, event)
    blocks, skipped = [], []
    for block in partition:
        if _null_everywhere(state, block):
            skipped.append(block)
            continue
        after = posterior_interval(state, tag, block, event, transfer)
        v = classify_uniform(before, after, SINGLE)
        blocks.append((block, v))
    if not blocks:
        raise ConditioningError("every block of the partition is null")
    lows = [v.after.lo for _, v in blocks]
    highs = [v.after.hi for _, v in blocks]
    lo, hi = min(lows), max(highs)
    witnesses = {
        "inf_lower_blocks": tuple(b for b, v in blocks if v.after.lo == lo),
        "sup_upper_blocks": tuple(b for b, v in blocks if v.after.hi == hi),
    }
    uniform = Verdict(_kind(before, ProbInterval(lo, hi)), UNIFORM, before, ProbInterval(lo, hi), witnesses)
    pkind = _pointwise_kind([v.kind for _, v in blocks])
    scope = POINTWISE
    if pkind in CONSTRICTIONS and lo == before.lo and hi == before.hi:
        scope = MERELY_POINTWISE
    pointwise = Verdict(pkind, scope, before, tuple(v.after for _, v in blocks), witnesses)
    return PartitionReport(event, tag, before, tuple(blocks), pointwise, uniform, tuple(skipped))


# -- Bayes balance and envelope bounds ---------------------------------------


@dataclass(frozen=True)
class BalanceResult:
    plus: tuple
    minus: tuple
    p_plus: Fraction
    p_minus: Fraction

    @property
    def ok(self) -> bool:
        return (self.p_plus > 0) == (self.p_minus > 0)


def lemma_balance_check(p: Measure, event: Event, partition: Partition) -> BalanceResult:
    """Blocks where conditioning raises / lowers ``P(event)``.

    By the law of total probability one set of blocks is charged exactly
    when the other one is.
    """
    pa = p.prob(event)
    plus, minus = [], []
    for block in partition:
        pb = p.prob(block)
        if pb == 0:
            continue
        cond = p.prob(event & block) / pb
        if cond > pa:
            plus.append(block)
        elif cond < pa:
            minus.append(block)
    return BalanceResult(
        tuple(plus),
        tuple(minus),
        sum((p.prob(b) for b in plus), ZERO),
        sum((p.prob(b) for b in minus), ZERO),
    )


@dataclass(frozen=True)
class BoundCheck:
    rule: str
    prior: ProbInterval
    inf_lower: Fraction
    sup_upper: Fraction
    lower_blocks: tuple
    upper_blocks: tuple

    @property
    def ok(self) -> bool:
        return self.inf_lower <= self.prior.lo and self.sup_upper >= self.prior.hi


def envelope_bound_check(credal: CredalSet, event: Event, partition: Partition, rule: str = "B") -> BoundCheck:
    """Compare the extreme block-conditional bounds with the prior bounds.

    ``ok`` means ``inf_E lower(A|E) <= lower(A)`` and
    ``sup_E upper(A|E) >= upper(A)``.  Under generalized Bayes this always
    holds; under the geometric rule it can fail.
    """
    tag = rule_tag(rule)
    if tag not in ("B", "G"):
        raise ValidationError("envelope bound check covers the Bayes and geometric rules")
    prior = credal.interval(event)
    per = []
    for block in partition:
        if credal.upper(block) == 0:
            continue
        per.append((block, posterior_interval(credal, tag, block, event)))
    lo = min(i.lo for _, i in per)
    hi = max(i.hi for _, i in per)
    return BoundCheck(
        tag,
        prior,
        lo,
        hi,
        tuple(b for b, i in per if i.lo == lo),
        tuple(b for b, i in per if i.hi == hi),
    )


# -- dependence and intentional forgetting -----------------------------------


@dataclass(frozen=True)
class DependenceSign:
    d: Fraction

    @property
    def sign(self) -> str:
        return "+" if self.d > 0 else "-" if self.d < 0 else "0"


def dependence(p: Measure, a: Event, b: Event) -> DependenceSign:
    """``P(A & B) - P(A) P(B)``."""
    return DependenceSign(p.prob(a & b) - p.prob(a) * p.prob(b))


@dataclass(frozen=True)
class ForgettingReport:
    rule: str
    event: Event
    forgotten: Event
    lower_witnesses: tuple
    upper_witnesses: tuple
    prior: ProbInterval
    posterior: ProbInterval
    verdict: Verdict

    @property
    def holds(self) -> bool:
        return bool(self.lower_witnesses) and bool(self.upper_witnesses)

    @property
    def constricts(self) -> bool:
        return self.verdict.kind == STRICT_CONSTRICTION


def forgetting_condition(reference: CredalSet, event: Event, forgotten: Event, rule: str = "B") -> ForgettingReport:
    """Sufficient condition for forgetting ``forgotten`` to constrict ``event``.

    ``reference`` is the belief set the agent returns to.  The minimizing
    face of ``P -> P(A)`` meets the negatively dependent measures iff one of
    its vertices does, because ``P(A)`` is constant on that face and the
    dependence is then linear in ``P``; likewise for the maximizing face.
    The report also records what forgetting actually does: the verdict of
    moving from the updated bounds back to the reference bounds.
    """
    tag = rule_tag(rule)
    if tag not in ("B", "G"):
        raise ValidationError("forgetting analysis covers the Bayes and geometric rules")
    lows = reference.argmin_vertices(event)
    highs = reference.argmax_vertices(event)
    vs = reference.vertices
    lower_w = tuple(j for j in lows if dependence(vs[j], event, forgotten).d < 0)
    upper_w = tuple(j for j in highs if dependence(vs[j], event, forgotten).d > 0)
    prior = reference.interval(event)
    posterior = posterior_interval(reference, tag, forgotten, event)
    verdict = classify_uniform(posterior, prior)
    return ForgettingReport(tag, event, forgotten, lower_w, upper_w, prior, posterior, verdict)


def _intersection(events: Sequence[Event]) -> Event:
    out = events[0].space.full()
    for e in events:
        out = out & e
    return out


def _condition_all(credal: CredalSet, events: Sequence[Event], rule: str) -> State:
    state: State = credal
    for e in events:
        state = update(state, rule, e).posterior
    return state


def forgetting_condition_recent(
    initial: CredalSet, evidence: Sequence[Event], k: int, event: Event
) -> ForgettingReport:
    """Forget the last ``k`` of ``evidence`` (``k = len(evidence)`` resets to ``initial``)."""
    t = len(evidence)
    if not 1 <= k <= t:
        raise ValidationError(f"k must lie in 1..{t}")
    reference = _condition_all(initial, evidence[: t - k], "B")
    return forgetting_condition(reference, event, _intersection(evidence[t - k:]), "B")


def forgetting_condition_early(
    initial: CredalSet, evidence: Sequence[Event], k: int, event: Event
) -> ForgettingReport:
    """Forget the evidence collected before step ``k`` (the first ``k - 1`` items)."""
    t = len(evidence)
    if not 2 <= k <= t:
        raise ValidationError(f"k must lie in 2..{t}")
    reference = _condition_all(initial, evidence[k - 1:], "B")
    return forgetting_condition(reference, event, _intersection(evidence[: k - 1]), "B")


# -- geometric versus Dempster -----------------------------------------------


@dataclass(frozen=True)
class DichotomyReport:
    event: Event
    evidence: Event
    prior: ProbInterval
    geometric: tuple  # intervals given E and given E^c
    dempster: tuple

    @staticmethod
    def _dilates(prior, intervals):
        return all(i.contains(prior) for i in intervals) and any(i != prior for i in intervals)

    @staticmethod
    def _constricts(prior, intervals):
        return all(prior.contains(i) for i in intervals)

    @property
    def geometric_dilates(self) -> bool:
        return self._dilates(self.prior, self.geometric)

    @property
    def dempster_dilates(self) -> bool:
        return self._dilates(self.prior, self.dempster)

    @property
    def geometric_constricts(self) -> bool:
        return self._constricts(self.prior, self.geometric)

    @property
    def dempster_constricts(self) -> bool:
        return self._constricts(self.prior, self.dempster)

    @property
    def ok(self) -> bool:
        return (not self.geometric_dilates or self.dempster_constricts) and (
            not self.dempster_dilates or self.geometric_constricts
        )


def geom_dempster_dichotomy(bel: Union[SetFunction, MassFunction], event: Event, evidence: Event) -> DichotomyReport:
    """Both rules on the experiment ``{E, E^c}``.

    At the level of the whole experiment, *dilates* means every block
    interval contains the prior interval and at least one differs from it;
    *constricts* means every block interval lies inside the prior interval.
    """
    if isinstance(bel, MassFunction):
        m = bel.validate()
        low = belief_from_mass(m)
    else:
        low = bel
        if not is_belief_function(low):
            raise PreconditionError("the dichotomy needs a belief function")
        m = mobius_transform(low)
    ec = ~evidence
    for name, e in (("E", evidence), ("E^c", ec)):
        if low(e) <= 0:
            raise PreconditionError(f"belief of {name} = {low(e)}; both blocks need positive belief")
    prior = ProbInterval(low(event), low.upper(event))
    geo, dem = [], []
    for e in (evidence, ec):
        g = geometric_update(low, e)
        geo.append(ProbInterval(g(event), g.upper(event)))
        d = dempster_update(m, e)
        dem.append(ProbInterval(d.bel(event), d.pl(event)))
    return DichotomyReport(event, evidence, prior, tuple(geo), tuple(dem))


# -- imaging -----------------------------------------------------------------


@dataclass(frozen=True)
class ImagingReport:
    event: Event
    sum_inside: Fraction
    sum_outside: Fraction
    verdict: Verdict

    @property
    def sums_positive(self) -> bool:
        return self.sum_inside > 0 and self.sum_outside > 0

    @property
    def ok(self) -> bool:
        return self.sums_positive == (self.verdict.kind == STRICT_CONSTRICTION)


def imaging_constriction_iff(m: MassFunction, t: TransferFunction, event: Event) -> ImagingReport:
    """Evaluate both mass-transfer sums and the interval verdict for imaging.

    ``sum_inside`` is ``sum over B <= A of [sum_X f(B, X) m(X) - m(B)]`` and
    ``sum_outside`` the same over ``B <= A^c``.
    """
    m.validate()
    if m.bel(t.evidence) <= 0:
        raise PreconditionError("imaging needs positive belief in the evidence")
    problems = validate_transfer(t)
    if problems:
        raise ValidationError(
            f"transfer function violates constraint ({problems[0].constraint}): {problems[0].detail}",
            field=problems[0].constraint,
        )
    moved = {}
    for (b, x), v in t.table.items():
        mx = m.masses.get(x)
        if mx:
            moved[b] = moved.get(b, ZERO) + v * mx
    a = event.mask
    ac = event.space.full_mask ^ a

    def delta(region):
        keys = set(moved) | set(m.masses)
        return sum(
            (moved.get(b, ZERO) - m.masses.get(b, ZERO) for b in keys if b & ~region == 0),
            ZERO,
        )

    posterior = imaging_update(m, t)
    before = ProbInterval(m.bel(event), m.pl(event))
    after = ProbInterval(posterior.bel(event), posterior.pl(event))
    return ImagingReport(event, delta(a), delta(ac), classify_uniform(before, after))


# -- open credal set, finite truncation --------------------------------------

LOW_END = Fraction(2, 5)
HIGH_END = Fraction(3, 5)


def enumerate_rationals(count: int, lo: Fraction = LOW_END, hi: Fraction = HIGH_END) -> list:
    """First ``count`` rationals strictly inside ``(lo, hi)``, listed by
    increasing denominator and then numerator (an explicit enumeration of
    the rationals in the interval)."""
    out = []
    d = 1
    while len(out) < count:
        d += 1
        for num in range(1, d):
            q = Fraction(num, d)
            if q.denominator == d and lo < q < hi:
                out.append(q)
                if len(out) == count:
                    break
    return out


@dataclass(frozen=True)
class GridPoint:
    x: Fraction
    feasible: bool
    given_a: tuple = ()  # P_x(N = n | A), n = 1..N, then the absorbing outcome
    given_not_a: tuple = ()
    posteriors: tuple = ()
    reason: str = ""


@dataclass(frozen=True)
class OpenSetReport:
    q: tuple
    points: tuple

    @property
    def inf_q(self) -> Fraction:
        return min(self.q)

    @property
    def sup_q(self) -> Fraction:
        return max(self.q)

    @property
    def feasible(self) -> bool:
        return all(p.feasible for p in self.points)

    @property
    def posteriors_match(self) -> bool:
        return all(p.feasible and p.posteriors == self.q for p in self.points)


def open_set_construction(x: Fraction, q: Sequence[Fraction]) -> GridPoint:
    """Likelihoods on ``{1..N, absorbing}`` with the prescribed likelihood ratios.

    Outcome ``n`` must have ratio ``P(n|A)/P(n|A^c) = (1-x) q_n / (x (1-q_n))``
    and positive probability; the absorbing outcome is uninformative (ratio
    1) and takes the leftover mass.  With weights proportional to ``2**-n``,
    the outcomes with ratio above 1 are rescaled against those below 1 so
    that both conditional distributions total the same amount; this is
    possible exactly when some ``q_n`` lies on each side of ``x`` (or all
    equal ``x``).
    """
    x = as_rational(x)
    if not 0 < x < 1:
        return GridPoint(x, False, reason="x must lie strictly between 0 and 1")
    ratios = [(1 - x) * qn / (x * (1 - qn)) for qn in q]
    excess = [r - 1 for r in ratios]
    base = [Fraction(1, 2 ** (n + 1)) for n in range(len(q))]
    pos = sum((b * e for b, e in zip(base, excess) if e > 0), ZERO)
    neg = sum((-b * e for b, e in zip(base, excess) if e < 0), ZERO)
    if (pos > 0) != (neg > 0):
        side = "above" if pos > 0 else "below"
        return GridPoint(
            x,
            False,
            reason=f"every likelihood ratio lies {side} 1 at x = {x}; the law of total probability fails",
        )
    scaled = []
    for b, e in zip(base, excess):
        if e > 0:
            scaled.append(b * neg)
        elif e < 0:
            scaled.append(b * pos)
        else:
            scaled.append(b * (pos if pos else ONE))
    total = sum(scaled, ZERO)
    c = 1 / (2 * total)
    not_a = [c * s for s in scaled]
    given_a = [r * w for r, w in zip(ratios, not_a)]
    given_a.append(1 - sum(given_a, ZERO))
    not_a.append(1 - sum(not_a, ZERO))
    posteriors = []
    for pa, pn in zip(given_a[:-1], not_a[:-1]):
        joint_a = x * pa
        posteriors.append(joint_a / (joint_a + (1 - x) * pn))
    return GridPoint(x, True, tuple(given_a), tuple(not_a), tuple(posteriors))


def open_set_demo(grid: Sequence, n: int = 16, q: Optional[Sequence] = None) -> OpenSetReport:
    """Finite truncation of the open-interval example.

    Each grid value ``x`` plays the role of ``P_x(A)``; ``q`` defaults to the
    first ``n`` enumerated rationals in (2/5, 3/5).  Every feasible grid
    point yields the posterior ``P_x(A | N = n) = q_n`` regardless of ``x``.
    """
    grid = [as_rational(x) for x in grid]
    q = enumerate_rationals(n) if q is None else [as_rational(v) for v in q]
    if len(q) < 2:
        raise ValidationError("need at least two enumerated rationals")
    for v in q:
        if not LOW_END < v < HIGH_END:
            raise ValidationError(f"q value {v} not strictly inside (2/5, 3/5)")
    return OpenSetReport(tuple(q), tuple(open_set_construction(x, q) for x in grid))
