"""Seeded random instances and the property campaigns behind ``check``.

Every generator takes a :class:`random.Random`, so a campaign is fully
determined by its seed.  Probabilities are small-denominator rationals,
which keeps exact arithmetic fast and produces the ties (equal bounds,
degenerate intervals) that floating point would blur.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .analysis import (
    CONSTRICTIONS,
    WEAK_CONSTRICTION,
    classify_partition,
    envelope_bound_check,
    forgetting_condition,
    geom_dempster_dichotomy,
    imaging_constriction_iff,
    lemma_balance_check,
)
from .capacity import MassFunction, SetFunction, belief_from_mass, mobius_transform, zeta_transform
from .core import CredalSet, Event, Measure, StateSpace, validate_partition
from .errors import ConditioningError
from .updating import TransferFunction, gen_bayes_update

THEOREMS = ("lemma13", "prop14", "prop15", "lemma46", "thm48", "thm410", "thm411")


def space_of(n: int) -> StateSpace:
    return StateSpace(tuple(f"w{i}" for i in range(n)))


def random_weights(rng: random.Random, n: int, low: int = 0, high: int = 9) -> list:
    while True:
        raw = [rng.randint(low, high) for _ in range(n)]
        total = sum(raw)
        if total:
            return [Fraction(r, total) for r in raw]


def random_measure(rng: random.Random, space: StateSpace, low: int = 0) -> Measure:
    return Measure(space, tuple(random_weights(rng, space.n, low)))


def random_credal(rng: random.Random, space: StateSpace, k: int, low: int = 0) -> CredalSet:
    return CredalSet(space, tuple(random_measure(rng, space, low) for _ in range(k)))


def random_event(rng: random.Random, space: StateSpace, proper: bool = True) -> Event:
    lo, hi = (1, space.full_mask - 1) if proper else (0, space.full_mask)
    return Event(space, rng.randint(lo, hi))


def random_partition(rng: random.Random, space: StateSpace, min_blocks: int = 2):
    while True:
        k = rng.randint(min_blocks, space.n)
        labels = [rng.randrange(k) for _ in range(space.n)]
        masks = [0] * k
        for i, b in enumerate(labels):
            masks[b] |= 1 << i
        masks = [m for m in masks if m]
        if len(masks) >= min_blocks:
            return validate_partition(space, [Event(space, m) for m in masks])


def random_mass(rng: random.Random, space: StateSpace, focal: int = 4) -> MassFunction:
    masks = set()
    while len(masks) < min(focal, space.full_mask):
        masks.add(rng.randint(1, space.full_mask))
    masks = sorted(masks)
    weights = random_weights(rng, len(masks), low=1)
    return MassFunction(space, dict(zip(masks, weights)))


def random_signed_mass(rng: random.Random, space: StateSpace) -> MassFunction:
    """Any rational values on the nonempty sets; not a genuine mass."""
    return MassFunction(
        space, {m: Fraction(rng.randint(-9, 9), rng.randint(1, 9)) for m in range(1, space.full_mask + 1)}
    )


def random_set_function(rng: random.Random, space: StateSpace) -> SetFunction:
    return SetFunction(
        space, tuple(Fraction(rng.randint(-9, 9), rng.randint(1, 9)) for _ in range(1 << space.n))
    )


def random_transfer(rng: random.Random, evidence: Event, spread: int = 3) -> TransferFunction:
    """Each source set (the empty set included) sends its mass to up to
    ``spread`` random targets meeting the evidence."""
    space = evidence.space
    targets = [b for b in range(1, space.full_mask + 1) if b & evidence.mask]
    table = {}
    for x in range(space.full_mask + 1):
        chosen = rng.sample(targets, rng.randint(1, min(spread, len(targets))))
        for b, w in zip(chosen, random_weights(rng, len(chosen), low=1)):
            table[(b, x)] = w
    return TransferFunction(evidence, table)


def random_stochastic(rng: random.Random, k: int, positive: bool = True) -> list:
    return [random_weights(rng, k, low=1 if positive else 0) for _ in range(k)]


# -- campaigns ------------------------------------------------------------------


@dataclass
class CampaignResult:
    theorem: str
    trials: int
    seed: int
    passed: int = 0
    violations: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)

    @property
    def failed(self) -> int:
        return self.trials - self.passed

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def record(self, ok: bool, detail=None, keep: int = 5):
        if ok:
            self.passed += 1
        elif len(self.violations) < keep:
            self.violations.append(detail)


def credal_corpus(rng: random.Random):
    """One instance of the shared corpus: n in {3,4,5}, 2 to 6 strictly
    positive vertices, a random partition with at least two blocks."""
    n = rng.choice((3, 4, 5))
    space = space_of(n)
    credal = random_credal(rng, space, rng.randint(2, 6), low=1)
    return credal, random_partition(rng, space)


def campaign_balance(trials: int, seed: int) -> CampaignResult:
    rng = random.Random(seed)
    res = CampaignResult("lemma13", trials, seed)
    for t in range(trials):
        space = space_of(rng.choice((3, 4, 5)))
        p = random_measure(rng, space)
        a = random_event(rng, space)
        part = random_partition(rng, space)
        b = lemma_balance_check(p, a, part)
        res.record(b.ok, {"instance": t, "measure": repr(p), "event": repr(a)})
    return res


def campaign_no_weak_uniform(trials: int, seed: int) -> CampaignResult:
    """Generalized Bayes never weakly uniformly constricts."""
    rng = random.Random(seed)
    res = CampaignResult("prop14", trials, seed)
    for t in range(trials):
        credal, part = credal_corpus(rng)
        bad = None
        for a in credal.space.events():
            try:
                rep = classify_partition(credal, a, part, "B")
            except ConditioningError:
                continue
            if rep.uniform.kind == WEAK_CONSTRICTION:
                bad = {"instance": t, "event": repr(a), "uniform": rep.uniform.kind}
                break
        res.record(bad is None, bad)
    return res


def campaign_no_weak_pointwise(trials: int, seed: int) -> CampaignResult:
    """Generalized Bayes never pointwise constricts, weakly or strictly."""
    rng = random.Random(seed)
    res = CampaignResult("prop15", trials, seed)
    events = 0
    for t in range(trials):
        credal, part = credal_corpus(rng)
        bad = None
        for a in credal.space.events():
            try:
                rep = classify_partition(credal, a, part, "B")
            except ConditioningError:
                continue
            events += 1
            if rep.pointwise.kind in CONSTRICTIONS:
                bad = {"instance": t, "event": repr(a), "pointwise": rep.pointwise.kind}
                break
        res.record(bad is None, bad)
    res.stats["events_tested"] = events
    return res


def campaign_envelope_bounds(trials: int, seed: int, rules=("B", "G")) -> CampaignResult:
    """Extreme block bounds reach the prior bounds, for each of ``rules``."""
    rng = random.Random(seed)
    res = CampaignResult("lemma46", trials, seed)
    per_rule = {r: 0 for r in rules}
    for t in range(trials):
        credal, part = credal_corpus(rng)
        bad = None
        for rule in rules:
            for a in credal.space.events():
                try:
                    chk = envelope_bound_check(credal, a, part, rule)
                except ConditioningError:
                    continue
                if not chk.ok:
                    per_rule[rule] += 1
                    bad = bad or {
                        "instance": t,
                        "rule": rule,
                        "event": repr(a),
                        "vertices": [repr(v) for v in credal.vertices],
                        "partition": [repr(b) for b in part],
                        "prior": repr(chk.prior),
                        "inf_lower": str(chk.inf_lower),
                        "sup_upper": str(chk.sup_upper),
                    }
                    break
        res.record(bad is None, bad)
    res.stats["instances_violating"] = per_rule
    return res


def campaign_forgetting(trials: int, seed: int, rule: str = "B", max_draws: int = 200_000) -> CampaignResult:
    """Rejection-sample instances meeting the sufficient condition and check
    that forgetting strictly constricts on each.

    The agent starts from a credal set, learns E and later forgets it,
    which restores the starting set; the condition is evaluated on the
    starting set.
    """
    rng = random.Random(seed)
    res = CampaignResult("thm48", trials, seed)
    draws = 0
    found = 0
    while found < trials and draws < max_draws:
        draws += 1
        space = space_of(rng.choice((3, 4)))
        credal = random_credal(rng, space, rng.randint(2, 4), low=1)
        a = random_event(rng, space)
        e = random_event(rng, space)
        try:
            rep = forgetting_condition(credal, a, e, rule)
        except ConditioningError:
            continue
        if not rep.holds:
            continue
        found += 1
        res.record(
            rep.constricts,
            {
                "draw": draws,
                "vertices": [repr(v) for v in credal.vertices],
                "event": repr(a),
                "forgotten": repr(e),
                "after_update": repr(rep.posterior),
                "after_forgetting": repr(rep.prior),
            },
        )
    res.trials = found
    res.stats["draws"] = draws
    return res


def campaign_dichotomy(trials: int, seed: int) -> CampaignResult:
    """Geometric dilation forces Dempster constriction and vice versa, on
    random belief functions over four atoms, every event A tested."""
    rng = random.Random(seed)
    res = CampaignResult("thm410", trials, seed)
    space = space_of(4)
    geo = dem = 0
    for t in range(trials):
        while True:
            m = random_mass(rng, space, rng.randint(2, 6))
            e = random_event(rng, space)
            if m.bel(e) > 0 and m.bel(~e) > 0:
                break
        bel = belief_from_mass(m)
        bad = None
        for a in space.events():
            rep = geom_dempster_dichotomy(bel, a, e)
            geo += rep.geometric_dilates
            dem += rep.dempster_dilates
            if not rep.ok and bad is None:
                bad = {"instance": t, "mass": repr(m), "evidence": repr(e), "event": repr(a)}
        res.record(bad is None, bad)
    res.stats["geometric_dilations"] = geo
    res.stats["dempster_dilations"] = dem
    return res


def campaign_imaging(trials: int, seed: int) -> CampaignResult:
    rng = random.Random(seed)
    res = CampaignResult("thm411", trials, seed)
    strict = 0
    for t in range(trials):
        space = space_of(rng.choice((3, 4)))
        while True:
            m = random_mass(rng, space, rng.randint(2, 5))
            e = random_event(rng, space)
            if m.bel(e) > 0:
                break
        tr = random_transfer(rng, e)
        a = random_event(rng, space)
        rep = imaging_constriction_iff(m, tr, a)
        strict += rep.sums_positive
        res.record(rep.ok, {"instance": t, "mass": repr(m), "evidence": repr(e), "event": repr(a)})
    res.stats["sums_positive"] = strict
    return res


def campaign_mobius(trials: int, seed: int) -> CampaignResult:
    """Round trips f -> m -> f on arbitrary set functions and m -> f -> m on
    nonnegative masses."""
    rng = random.Random(seed)
    res = CampaignResult("mobius", 2 * trials, seed)
    for t in range(trials):
        space = space_of(rng.randint(1, 5))
        f = random_set_function(rng, space)
        res.record(zeta_transform(mobius_transform(f)) == f, {"instance": t, "kind": "set-function"})
    for t in range(trials):
        space = space_of(rng.randint(1, 5))
        m = random_mass(rng, space, rng.randint(1, 6))
        res.record(mobius_transform(belief_from_mass(m)) == m, {"instance": t, "kind": "mass"})
    return res


CAMPAIGNS: dict[str, Callable[[int, int], CampaignResult]] = {
    "lemma13": campaign_balance,
    "prop14": campaign_no_weak_uniform,
    "prop15": campaign_no_weak_pointwise,
    "lemma46": campaign_envelope_bounds,
    "thm48": campaign_forgetting,
    "thm410": campaign_dichotomy,
    "thm411": campaign_imaging,
}


def run_campaign(theorem: str, trials: int, seed: int) -> CampaignResult:
    return CAMPAIGNS[theorem](trials, seed)
