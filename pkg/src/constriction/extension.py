"""Coherent extension of assessments and selection of a single measure.

On a finite space the greatest lower / least upper bound of ``P(target)``
over all measures agreeing with a finite assessment is a pair of linear
programs over the atoms.  (LP duality turns the bound over linear
combinations of the assessed indicators into the same number, so no
separate dual formulation is needed.)
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from . import lp
from .core import ONE, ZERO, CredalSet, Event, Measure, ProbInterval, StateSpace, as_rational, mixture
from .analysis import NEITHER, STRICT_CONSTRICTION, Verdict, classify_uniform
from .errors import CoherenceError, PreconditionError, SelectionError, ValidationError

INTERVAL = "interval"
DETERMINED = "determined"
INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class Assessment:
    events: tuple
    probs: tuple
    target: Event

    def __post_init__(self):
        events = tuple(self.events)
        probs = tuple(as_rational(p) for p in self.probs)
        if len(events) != len(probs):
            raise ValidationError(f"{len(probs)} probabilities for {len(events)} events")
        for j, p in enumerate(probs):
            if not 0 <= p <= 1:
                raise ValidationError(f"probability {p} of event {j} outside [0, 1]", field=j)
        for j, e in enumerate(events):
            if e.space != self.target.space:
                raise ValidationError(f"event {j} lives on a different state space", field=j)
        object.__setattr__(self, "events", events)
        object.__setattr__(self, "probs", probs)

    @property
    def space(self) -> StateSpace:
        return self.target.space

    def extended(self, p) -> Assessment:
        """Same assessment with ``P(target) = p`` added; target unchanged."""
        return Assessment(self.events + (self.target,), self.probs + (as_rational(p),), self.target)


def general_position(names: Sequence[str], target_name: str = "target") -> tuple:
    """State space whose atoms are the constituents of ``names``.

    Atom labels are membership signatures such as ``"10"`` (in the first
    event, not in the second).  Returns ``(space, events)``.
    """
    k = len(names)
    labels = tuple(format(s, f"0{k}b")[::-1] for s in range(1 << k))
    space = StateSpace(labels)
    events = tuple(
        space.event([lab for lab in labels if lab[j] == "1"]) for j in range(k)
    )
    return space, events


def _constituents(a: Assessment) -> list:
    """Group the atoms by membership in the assessed events and the target."""
    groups = {}
    for i in range(a.space.n):
        sig = tuple(i in e for e in a.events) + (i in a.target,)
        groups.setdefault(sig, []).append(i)
    return list(groups)


def _bound_lps(a: Assessment):
    sigs = _constituents(a)
    n_ev = len(a.events)
    A_eq = [[int(s[j]) for s in sigs] for j in range(n_ev)]
    b_eq = list(a.probs)
    A_eq.append([1] * len(sigs))
    b_eq.append(ONE)
    c = [int(s[-1]) for s in sigs]
    return c, A_eq, b_eq


@dataclass(frozen=True)
class BoundsResult:
    status: str
    interval: Optional[ProbInterval] = None

    @property
    def value(self) -> Optional[Fraction]:
        return self.interval.lo if self.status == DETERMINED else None


def definetti_bounds(a: Assessment) -> BoundsResult:
    """Tightest coherent bounds on ``P(target)`` given the assessment."""
    c, A_eq, b_eq = _bound_lps(a)
    low = lp.solve(c, A_eq, b_eq)
    if low.status == lp.INFEASIBLE:
        return BoundsResult(INFEASIBLE)
    high = lp.solve(c, A_eq, b_eq, maximize=True)
    interval = ProbInterval(low.value, high.value)
    return BoundsResult(DETERMINED if interval.is_degenerate() else INTERVAL, interval)


def definetti_select(a: Assessment, p) -> Verdict:
    """Verdict for fixing ``P(target) = p`` inside the coherent interval."""
    p = as_rational(p)
    res = definetti_bounds(a)
    if res.status == INFEASIBLE:
        raise CoherenceError("the assessment is incoherent")
    if res.status == DETERMINED:
        raise PreconditionError(f"P(target) is already determined at {res.value}")
    lo, hi = res.interval
    if not lo <= p <= hi:
        raise CoherenceError(f"selected value {p} outside the coherent interval [{lo}, {hi}]")
    return classify_uniform(res.interval, ProbInterval(p, p))


# -- hulls -------------------------------------------------------------------


def _distinct(vertices) -> list:
    seen = {}
    for v in vertices:
        seen.setdefault(v.weights, v)
    return list(seen.values())


def in_hull(point: Measure, vertices: Sequence[Measure]) -> bool:
    if not vertices:
        return False
    n = point.space.n
    A_eq = [[v.weights[i] for v in vertices] for i in range(n)]
    A_eq.append([1] * len(vertices))
    return lp.feasible_point(A_eq, list(point.weights) + [ONE]) is not None


def extreme_points(credal: CredalSet) -> CredalSet:
    """Drop duplicate vertices and those inside the hull of the others."""
    kept = _distinct(credal.vertices)
    j = 0
    while j < len(kept):
        others = kept[:j] + kept[j + 1:]
        if len(kept) > 1 and in_hull(kept[j], others):
            del kept[j]
        else:
            j += 1
    return CredalSet(credal.space, tuple(kept))


@dataclass(frozen=True)
class Decomposition:
    weights: tuple  # one per extreme point
    min_weight: Fraction

    @property
    def all_positive(self) -> bool:
        return self.min_weight > 0


def hull_decomposition(point: Measure, vertices: Sequence[Measure]) -> Optional[Decomposition]:
    """Mixture weights for ``point`` maximizing the smallest weight, or None."""
    k = len(vertices)
    n = point.space.n
    # variables: alpha_1..alpha_k, t ; maximize t subject to t <= alpha_j
    A_eq = [[v.weights[i] for v in vertices] + [0] for i in range(n)]
    A_eq.append([1] * k + [0])
    b_eq = list(point.weights) + [ONE]
    A_ub = [[-1 if j == jj else 0 for jj in range(k)] + [1] for j in range(k)]
    res = lp.solve([0] * k + [1], A_eq, b_eq, A_ub, [0] * k, maximize=True)
    if not res.ok:
        return None
    return Decomposition(res.x[:k], res.x[k])


@dataclass(frozen=True)
class SelectionReport:
    point: Measure
    extreme: CredalSet
    decomposition: Decomposition
    verdicts: tuple  # (Event, Verdict) for every event
    is_extreme: bool

    @property
    def strict_everywhere(self) -> bool:
        """Strict constriction of every event with a nondegenerate interval."""
        return self.decomposition.all_positive

    @property
    def weak_events(self) -> list:
        """Nondegenerate events whose selected probability sits on a bound."""
        return [e for e, v in self.verdicts if v.kind not in (STRICT_CONSTRICTION, NEITHER)]

    def verdict(self, event: Event) -> Verdict:
        return self.verdicts[event.mask][1]


def selection_classify(credal: CredalSet, point: Measure) -> SelectionReport:
    """Classify the selection of ``point`` out of ``credal`` event by event.

    When ``point`` is a mixture with every extreme point weighted
    positively, no bound can be attained by it on a nondegenerate event, so
    every such event is strictly constricted.
    """
    ext = extreme_points(credal)
    if len(ext) < 2:
        raise PreconditionError("selection needs at least two extreme points")
    dec = hull_decomposition(point, ext.vertices)
    if dec is None:
        raise SelectionError(f"{point!r} is not in the convex hull of the credal set")
    verdicts = tuple(
        (e, classify_uniform(ext.interval(e), ProbInterval(point.prob(e), point.prob(e))))
        for e in credal.space.events()
    )
    is_extreme = any(v.weights == point.weights for v in ext.vertices)
    return SelectionReport(point, ext, dec, verdicts, is_extreme)


def convex_pool(measures: Sequence[Measure], weights: Sequence) -> Measure:
    """Linear opinion pool ``sum_j w_j P_j``."""
    return mixture(measures, weights)


# -- maximum entropy ---------------------------------------------------------

MAXENT_GAP = 1e-12
MAXENT_DENOMINATOR = 10**6


@dataclass(frozen=True)
class MaxEntResult:
    measure: Measure
    weights: tuple
    gap: float
    approximate: bool = True

    @property
    def certified(self) -> bool:
        return self.gap <= MAXENT_GAP


def entropy(p) -> float:
    if isinstance(p, Measure):
        p = p.weights
    return -sum(float(w) * math.log(float(w)) for w in p if w > 0)


def _fw_gap(V, p):
    import numpy as np

    grad = -np.log(p) - 1.0
    scores = V @ grad
    return float(scores.max() - grad @ p), int(scores.argmax())


def _newton_on_face(V, alpha, active, iters=50):
    """Maximize entropy over mixtures of the ``active`` vertices."""
    import numpy as np

    for _ in range(iters):
        S = sorted(active)
        W = V[S]
        a = alpha[S]
        p = a @ W
        grad = W @ (-np.log(p) - 1.0)
        hess = -(W / p) @ W.T
        # restrict to sum(a) = 1 directions
        k = len(S)
        if k == 1:
            break
        basis = np.eye(k)[:, 1:] - np.eye(k)[:, [0]]
        g = basis.T @ grad
        h = basis.T @ hess @ basis
        step = basis @ np.linalg.lstsq(h, -g, rcond=None)[0]
        t = 1.0
        neg = step < 0
        if neg.any():
            t = min(1.0, float(np.min(-a[neg] / step[neg])))
        new = a + t * step
        p_new = new @ W
        # backtrack on entropy if the full step overshoots
        h0 = -(p @ np.log(p))
        while t > 1e-16 and (p_new.min() <= 0 or -(p_new @ np.log(p_new)) < h0 - 1e-15):
            t /= 2
            new = a + t * step
            p_new = new @ W
        if t <= 1e-16:
            break
        new[new < 1e-15] = 0.0
        new /= new.sum()
        alpha = alpha.copy()
        alpha[S] = new
        dropped = [j for j, v in zip(S, new) if v == 0.0]
        for j in dropped:
            active.discard(j)
        if np.abs(t * step).max() < 1e-16:
            break
    return alpha


def maxent_select(credal: CredalSet, max_rounds: int = 200) -> MaxEntResult:
    """Entropy maximizer over the convex hull of the vertices.

    The optimization runs in floating point over mixture weights: Newton
    steps on the current face, with the Frank-Wolfe vertex added whenever
    the duality gap is not yet certified.  The weights are then rounded to
    rationals, so the returned measure is an exact member of the hull; the
    result is flagged approximate.
    """
    import numpy as np

    ext = _distinct(credal.vertices)
    if len(ext) == 1:
        return MaxEntResult(ext[0], (ONE,), 0.0, approximate=False)
    support = [i for i in range(credal.space.n) if any(v.weights[i] for v in ext)]
    V = np.array([[float(v.weights[i]) for i in support] for v in ext])
    k = len(ext)
    alpha = np.full(k, 1.0 / k)
    active = set(range(k))
    gap = math.inf
    for _ in range(max_rounds):
        alpha = _newton_on_face(V, alpha, active)
        p = alpha @ V
        gap, j = _fw_gap(V, p)
        if gap <= MAXENT_GAP:
            break
        if j in active:
            # Newton stalled on this face: take a Frank-Wolfe step to move on
            d = V[j] - p
            ts = np.linspace(0.0, 1.0, 1001)[1:]
            vals = [-(q @ np.log(q)) for q in (p + t * d for t in ts) if q.min() > 0]
            t = float(ts[int(np.argmax(vals))]) if vals else 0.0
            alpha = (1 - t) * alpha
            alpha[j] += t
        active.add(j)
    weights = [Fraction(float(a)).limit_denominator(MAXENT_DENOMINATOR) for a in alpha]
    weights = [max(w, ZERO) for w in weights]
    top = max(range(k), key=lambda j: weights[j])
    weights[top] = ONE - (sum(weights, ZERO) - weights[top])
    measure = mixture(ext, weights)
    exact_p = np.array([float(measure.weights[i]) for i in support])
    gap = max(0.0, _fw_gap(V, exact_p)[0]) if exact_p.min() > 0 else math.inf
    weights_out = tuple(weights)
    return MaxEntResult(measure, weights_out, gap)


# -- Halmos extension ---------------------------------------------------------


@dataclass(frozen=True)
class HalmosResult:
    pi: Fraction
    inner: Fraction
    outer: Fraction
    degenerate: bool

    @property
    def ok(self) -> bool:
        return self.inner <= self.pi <= self.outer


def validate_algebra(space: StateSpace, algebra: Sequence[Event]) -> frozenset:
    masks = frozenset(e.mask for e in algebra)
    if space.full_mask not in masks or 0 not in masks:
        raise ValidationError("the subalgebra must contain the empty set and the whole space")
    for a in masks:
        if space.full_mask ^ a not in masks:
            raise ValidationError(f"subalgebra not closed under complement at {Event(space, a)!r}")
        for b in masks:
            if a | b not in masks:
                raise ValidationError(
                    f"subalgebra not closed under union at {Event(space, a)!r}, {Event(space, b)!r}"
                )
    return masks


def halmos_extension(mu: Measure, kernels: Sequence[Measure], event: Event, algebra: Sequence[Event]) -> HalmosResult:
    """Extend the kernel mixture from a subalgebra to ``event``.

    ``pi`` is the mixture probability ``sum_x mu(x) nu_x(event)``; ``inner``
    and ``outer`` mix the inner and outer measures of ``event`` relative to
    the subalgebra.  When ``event`` already belongs to the subalgebra the
    three coincide and ``degenerate`` is set.
    """
    if len(kernels) != mu.space.n:
        raise ValidationError(f"{len(kernels)} kernels for {mu.space.n} points")
    space = event.space
    for x, k in enumerate(kernels):
        if k.space != space:
            raise ValidationError(f"kernel {x} lives on a different space", field=x)
    masks = validate_algebra(space, algebra)
    inside = [b for b in masks if b & ~event.mask == 0]
    around = [b for b in masks if event.mask & ~b == 0]
    pi = inner = outer = ZERO
    for w, k in zip(mu.weights, kernels):
        if not w:
            continue
        pi += w * k.prob(event)
        inner += w * max(k.prob_mask(b) for b in inside)
        outer += w * min(k.prob_mask(b) for b in around)
    return HalmosResult(pi, inner, outer, event.mask in masks)
