import itertools
import random
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog

from constriction.analysis import (
    MERELY_POINTWISE,
    NEITHER,
    STRICT_CONSTRICTION,
    STRICT_DILATION,
    WEAK_CONSTRICTION,
    WEAK_DILATION,
    classify_partition,
    classify_uniform,
    dependence,
    enumerate_rationals,
    envelope_bound_check,
    forgetting_condition,
    forgetting_condition_early,
    forgetting_condition_recent,
    geom_dempster_dichotomy,
    imaging_constriction_iff,
    lemma_balance_check,
    open_set_construction,
    open_set_demo,
)
from constriction.campaigns import campaign_dichotomy, random_credal, random_event, random_partition, space_of
from constriction.capacity import MassFunction, belief_from_mass, measure_function
from constriction.core import CredalSet, Measure, ProbInterval, StateSpace, validate_partition
from constriction.errors import PreconditionError, ValidationError
from constriction.updating import TransferFunction

I = ProbInterval


def test_classify_uniform_examples():
    assert classify_uniform(I(F(2, 5), F(3, 5)), I(F(1, 2), F(1, 2))).kind == STRICT_CONSTRICTION
    assert classify_uniform(I(F(1, 2), F(1, 2)), I(0, 1)).kind == STRICT_DILATION
    assert classify_uniform(I(F(1, 4), F(3, 4)), I(F(1, 4), F(3, 4))).kind == NEITHER
    assert classify_uniform(I(F(1, 4), F(3, 4)), I(F(1, 4), F(1, 2))).kind == WEAK_CONSTRICTION
    assert classify_uniform(I(F(1, 4), F(1, 2)), I(F(1, 4), F(3, 4))).kind == WEAK_DILATION
    # a shift without nesting
    assert classify_uniform(I(F(1, 4), F(1, 2)), I(F(1, 3), F(3, 4))).kind == NEITHER


MIRROR = {
    STRICT_CONSTRICTION: STRICT_DILATION,
    WEAK_CONSTRICTION: WEAK_DILATION,
    STRICT_DILATION: STRICT_CONSTRICTION,
    WEAK_DILATION: WEAK_CONSTRICTION,
    NEITHER: NEITHER,
}

fractions = st.fractions(min_value=0, max_value=1, max_denominator=6)


@settings(max_examples=300)
@given(fractions, fractions, fractions, fractions)
def test_classify_uniform_antisymmetric(a, b, c, d):
    x, y = I(min(a, b), max(a, b)), I(min(c, d), max(c, d))
    assert classify_uniform(y, x).kind == MIRROR[classify_uniform(x, y).kind]


def test_coin_partition(coin, coin_events):
    part = validate_partition(coin.space, [coin_events["H1"], coin_events["T1"]])
    rep = classify_partition(coin, coin_events["H2"], part, "B")
    assert [v.kind for _, v in rep.blocks] == [STRICT_DILATION, STRICT_DILATION]
    assert all(v.after == I(0, 1) for _, v in rep.blocks)
    assert rep.pointwise.kind == STRICT_DILATION
    assert rep.uniform.kind == STRICT_DILATION


def test_trivial_partition_is_neither(coin, coin_events):
    part = validate_partition(coin.space, [coin.space.full()])
    for rule in ("B", "G"):
        rep = classify_partition(coin, coin_events["H2"], part, rule)
        assert rep.pointwise.kind == NEITHER and rep.uniform.kind == NEITHER


def test_null_blocks_are_skipped(coin_space):
    c = CredalSet.from_rows(coin_space, [(F(1, 2), F(1, 2), 0, 0), (F(1, 4), F(3, 4), 0, 0)])
    part = validate_partition(coin_space, [coin_space.event(["HH", "HT"]), coin_space.event(["TH", "TT"])])
    rep = classify_partition(c, coin_space.event(["HH"]), part)
    assert [repr(b) for b in rep.skipped] == ["{TH,TT}"]


def test_merely_pointwise_flag():
    """Each block weakly constricts under the geometric rule, yet the block
    bounds together reach both prior bounds."""
    s = space_of(4)
    c = CredalSet.from_rows(
        s,
        [
            (F(1, 4), F(1, 8), F(1, 4), F(3, 8)),
            (F(3, 13), F(2, 13), F(2, 13), F(6, 13)),
            (F(7, 26), F(3, 13), F(2, 13), F(9, 26)),
        ],
    )
    part = validate_partition(s, [s.event(["w1", "w2"]), s.event(["w0", "w3"])])
    rep = classify_partition(c, s.event(["w0", "w1"]), part, "G")
    assert rep.before == I(F(3, 8), F(1, 2))
    assert [v.after for _, v in rep.blocks] == [I(F(13, 32), F(1, 2)), I(F(3, 8), F(7, 16))]
    assert rep.pointwise.kind == WEAK_CONSTRICTION
    assert rep.merely_pointwise
    assert rep.uniform.kind == NEITHER


def test_balance_examples(coin, coin_events):
    s = space_of(4)
    u = Measure.uniform(s)
    singles = validate_partition(s, [s.singleton(i) for i in range(4)])
    b = lemma_balance_check(u, s.event(["w0", "w1"]), singles)
    assert b.ok and b.p_plus > 0 and b.p_minus > 0
    part = validate_partition(coin.space, [coin_events["H1"], coin_events["T1"]])
    b = lemma_balance_check(coin.vertices[0], coin_events["H2"], part)
    # P(H2|H1) = 0 < 1/2 and P(H2|T1) = 1 > 1/2
    assert b.minus == (coin_events["H1"],) and b.plus == (coin_events["T1"],)
    assert b.p_plus == b.p_minus == F(1, 2)


@settings(max_examples=300, deadline=None)
@given(st.randoms(use_true_random=False))
def test_balance_property(rng):
    s = space_of(rng.choice((2, 3, 4, 5)))
    raw = [rng.randint(0, 5) for _ in range(s.n)]
    if not sum(raw):
        raw[0] = 1
    p = Measure(s, tuple(F(r, sum(raw)) for r in raw))
    a = random_event(rng, s, proper=False)
    part = random_partition(rng, s, 1)
    assert lemma_balance_check(p, a, part).ok


def test_envelope_bound_examples(coin, coin_events):
    part = validate_partition(coin.space, [coin_events["H1"], coin_events["T1"]])
    chk = envelope_bound_check(coin, coin_events["H2"], part, "B")
    assert chk.ok and chk.inf_lower == 0 and chk.sup_upper == 1
    single = CredalSet.singleton(coin.vertices[1])
    assert envelope_bound_check(single, coin_events["H2"], part, "B").ok


def geometric_counterexample():
    s = space_of(4)
    c = CredalSet.from_rows(
        s, [(F(1, 7), F(2, 7), F(1, 14), F(1, 2)), (F(1, 15), F(4, 15), F(1, 15), F(3, 5))]
    )
    part = validate_partition(s, [s.event(["w2", "w3"]), s.event(["w0", "w1"])])
    return c, s.event(["w0", "w2"]), part


def test_geometric_envelope_bound_counterexample():
    """Prior [2/15, 3/14]; the geometric upper bounds are 1/8 and 1/5, both
    below the prior upper bound 3/14."""
    c, a, part = geometric_counterexample()
    chk = envelope_bound_check(c, a, part, "G")
    assert chk.prior == I(F(2, 15), F(3, 14))
    assert chk.sup_upper == F(1, 5)
    assert not chk.ok
    assert envelope_bound_check(c, a, part, "B").ok


def test_dependence_examples(coin, coin_events):
    s = space_of(4)
    product = Measure(s, (F(1, 6), F(1, 3), F(1, 6), F(1, 3)))  # independent coordinates
    assert dependence(product, s.event(["w0", "w1"]), s.event(["w0", "w2"])).d == 0
    d = dependence(coin.vertices[0], coin_events["H2"], coin_events["H1"])
    assert (d.d, d.sign) == (F(-1, 4), "-")
    d = dependence(coin.vertices[1], coin_events["H2"], coin_events["H1"])
    assert (d.d, d.sign) == (F(1, 4), "+")


def test_forgetting_coin(coin, coin_events):
    rep = forgetting_condition(coin, coin_events["H2"], coin_events["H1"])
    assert rep.holds
    assert rep.lower_witnesses == (0,) and rep.upper_witnesses == (1,)
    assert rep.posterior == I(0, 1) and rep.prior == I(F(1, 2), F(1, 2))
    assert rep.constricts


def test_forgetting_independent_set_fails_condition():
    s = space_of(4)  # atoms (x, y) in {0,1}^2 : w0=00, w1=01, w2=10, w3=11
    verts = []
    for p, q in [(F(1, 3), F(1, 2)), (F(2, 3), F(1, 4)), (F(1, 2), F(3, 4))]:
        verts.append(Measure(s, ((1 - p) * (1 - q), (1 - p) * q, p * (1 - q), p * q)))
    c = CredalSet(s, tuple(verts))
    x1, y1 = s.event(["w2", "w3"]), s.event(["w1", "w3"])
    rep = forgetting_condition(c, x1, y1)
    assert not rep.holds


def test_forgetting_chain_variants():
    rng = random.Random(21)
    s = space_of(4)
    checked = 0
    while checked < 30:
        c0 = random_credal(rng, s, 3, low=1)
        ev = [random_event(rng, s) for _ in range(3)]
        a = random_event(rng, s)
        try:
            recent = forgetting_condition_recent(c0, ev, 2, a)
            early = forgetting_condition_early(c0, ev, 2, a)
        except Exception:
            continue
        checked += 1
        for rep in (recent, early):
            if rep.holds:
                assert rep.constricts


def test_forgetting_rejects_bad_k(coin, coin_events):
    with pytest.raises(ValidationError):
        forgetting_condition_recent(coin, [coin_events["H1"]], 2, coin_events["H2"])


def test_dichotomy_precise_measure():
    s = space_of(4)
    bel = measure_function(Measure(s, (F(1, 10), F(2, 10), F(3, 10), F(4, 10))))
    e = s.event(["w0", "w1"])
    for a in s.events():
        rep = geom_dempster_dichotomy(bel, a, e)
        assert not rep.geometric_dilates and not rep.dempster_dilates
        assert rep.geometric == rep.dempster


def test_dichotomy_precondition():
    s = space_of(3)
    m = MassFunction(s, {s.full_mask: 1})
    with pytest.raises(PreconditionError, match="E"):
        geom_dempster_dichotomy(m, s.event(["w0"]), s.event(["w0"]))


def test_dichotomy_found_instance():
    """Search for a geometric dilation and report the Dempster intervals."""
    rng = random.Random(7)
    s = space_of(4)
    from constriction.campaigns import random_mass

    for _ in range(5000):
        m = random_mass(rng, s, rng.randint(2, 6))
        e = random_event(rng, s)
        if m.bel(e) == 0 or m.bel(~e) == 0:
            continue
        for a in s.events():
            rep = geom_dempster_dichotomy(m, a, e)
            if rep.geometric_dilates:
                assert rep.dempster_constricts
                assert all(rep.prior.contains(i) for i in rep.dempster)
                return
    pytest.fail("no geometric dilation found")


def test_imaging_constructed_strict_instance():
    """Mass wholly outside A and A^c moves into A & E and A^c & E."""
    s = StateSpace(("a", "b", "c", "d"))
    e = s.event("ab")
    a = s.event("ac")
    m = MassFunction.from_labels(s, {("a", "b", "c", "d"): F(1, 2), ("a",): F(1, 4), ("b",): F(1, 4)})
    table = {}
    for x in range(16):
        inter = x & e.mask
        if x == s.full_mask:
            table[(s.event("a").mask, x)] = F(1, 2)
            table[(s.event("b").mask, x)] = F(1, 2)
        else:
            table[(inter if inter else e.mask, x)] = 1
    t = TransferFunction(e, table)
    rep = imaging_constriction_iff(m, t, a)
    assert rep.sum_inside > 0 and rep.sum_outside > 0
    assert rep.verdict.kind == STRICT_CONSTRICTION and rep.ok


def test_imaging_identity_no_constriction():
    s = StateSpace(("a", "b", "c"))
    e = s.event("ab")
    m = MassFunction.from_labels(s, {("a",): F(1, 3), ("a", "b"): F(2, 3)})
    t = TransferFunction.dempster_style(e)
    rep = imaging_constriction_iff(m, t, s.event("a"))
    assert rep.sum_inside == 0 and rep.sum_outside == 0
    assert rep.verdict.kind == NEITHER and rep.ok


def test_enumeration_order():
    assert enumerate_rationals(11) == [
        F(1, 2), F(3, 7), F(4, 7), F(4, 9), F(5, 9), F(5, 11), F(6, 11), F(5, 12), F(7, 12), F(6, 13), F(7, 13)
    ]


def test_open_set_given_q():
    q = [F(9, 20), F(1, 2), F(11, 20)]
    rep = open_set_demo([F(9, 20), F(1, 2), F(11, 20)], q=q)
    # at either end every other q lies on one side of x
    assert [p.feasible for p in rep.points] == [False, True, False]
    good = open_set_demo([F(1, 2)], q=q)
    assert good.posteriors_match
    assert good.points[0].posteriors == tuple(q)
    for p in good.points:
        assert sum(p.given_a) == 1 and sum(p.given_not_a) == 1
        assert all(w > 0 for w in p.given_a[:-1]) and all(w >= 0 for w in p.given_a)


def lp_feasible(x: F, q) -> bool:
    """Oracle: find P(n|A), P(n|A^c) > 0 on 1..N (plus an absorbing outcome)
    with the prescribed likelihood ratios, using scipy's LP solver."""
    n = len(q)
    r = [float((1 - x) * qi / (x * (1 - qi))) for qi in q]
    # variables b_1..b_N (P(n|A^c)), slack s_A, s_B ; a_n = r_n b_n
    eps = 1e-6
    A_eq = [r + [1, 0], [1.0] * n + [0, 1]]
    b_eq = [1, 1]
    # the absorbing outcome cannot discriminate, so its two probabilities agree
    A_eq.append([ri - 1 for ri in r] + [0, 0])
    b_eq.append(0)
    bounds = [(eps, None)] * n + [(0, None), (0, None)]
    res = linprog(np.zeros(n + 2), A_eq=A_eq, b_eq=b_eq, bounds=bounds, method="highs")
    return res.status == 0


def test_open_set_matches_lp_oracle():
    q = enumerate_rationals(8)
    for x in [F(2, 5), F(41, 100), F(9, 20), F(1, 2), F(11, 20), F(3, 5), F(7, 10), F(3, 10)]:
        ours = open_set_construction(x, q).feasible
        assert ours == lp_feasible(x, q), x


def test_open_set_boundary_infeasible():
    p = open_set_construction(F(2, 5), enumerate_rationals(16))
    assert not p.feasible and "above" in p.reason


def test_open_set_rejects_out_of_range_q():
    with pytest.raises(ValidationError):
        open_set_demo([F(1, 2)], q=[F(1, 2), F(3, 5)])


def test_open_set_spread_grows_with_n():
    widths = [open_set_demo([F(1, 2)], n).sup_q - open_set_demo([F(1, 2)], n).inf_q for n in (4, 16, 64)]
    assert widths == sorted(widths) and widths[-1] < F(1, 5)
