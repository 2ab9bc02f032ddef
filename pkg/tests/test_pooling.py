import random
from fractions import Fraction as F

import pytest

from constriction.campaigns import random_measure, random_stochastic, space_of
from constriction.core import CredalSet, Measure, StateSpace
from constriction.errors import DegenerateError, ValidationError
from constriction.extension import in_hull
from constriction.pooling import (
    WeightMatrix,
    consensus_condition,
    consensus_limit,
    degroot_step,
    iterate,
    max_deviation,
    nesting_trace,
    stationary_vector,
)

W2 = WeightMatrix(((F(1, 2), F(1, 2)), (F(1, 4), F(3, 4))))
EYE = WeightMatrix(((1, 0), (0, 1)))
SWAP = WeightMatrix(((0, 1), (1, 0)))


@pytest.fixture
def pair():
    s = StateSpace(("a", "not_a"))
    return s, (Measure(s, (F(1, 5), F(4, 5))), Measure(s, (F(4, 5), F(1, 5))))


def test_weight_validation():
    with pytest.raises(ValidationError, match="row 1"):
        WeightMatrix(((F(1, 2), F(1, 2)), (F(1, 2), F(1, 3))))
    with pytest.raises(ValidationError):
        WeightMatrix(((F(3, 2), F(-1, 2)), (0, 1)))
    with pytest.raises(ValidationError):
        WeightMatrix(((1,),  (1,)))


def test_step_examples(pair):
    s, f = pair
    a = s.event(["a"])
    nxt = degroot_step(W2, f)
    assert (nxt[0].prob(a), nxt[1].prob(a)) == (F(1, 2), F(13, 20))
    assert degroot_step(EYE, f) == f
    hull = CredalSet(s, f)
    assert all(in_hull(g, hull.vertices) for g in nxt)


def test_step_dimension_mismatch(pair):
    s, f = pair
    with pytest.raises(ValidationError):
        degroot_step(W2, f[:1])


def test_consensus_condition():
    assert consensus_condition(W2).holds_at == 1
    assert not consensus_condition(EYE, 100).holds
    assert not consensus_condition(SWAP).holds
    # zero pattern [[0,1],[1,1]]: column 2 is positive already at n = 1
    assert consensus_condition(WeightMatrix(((0, 1), (F(1, 2), F(1, 2))))).holds_at == 1
    # a 3-cycle with one self-loop needs a few powers
    cyc = WeightMatrix(((F(1, 2), F(1, 2), 0), (0, 0, 1), (1, 0, 0)))
    n = consensus_condition(cyc).holds_at
    assert n is not None and n > 1
    assert any(all(row[j] > 0 for row in cyc.power(n).rows) for j in range(3))
    assert not any(all(row[j] > 0 for row in cyc.power(n - 1).rows) for j in range(3))


def test_stationary_vector():
    assert stationary_vector(W2) == (F(1, 3), F(2, 3))
    ds = WeightMatrix(((F(1, 2), F(1, 4), F(1, 4)), (F(1, 4), F(1, 2), F(1, 4)), (F(1, 4), F(1, 4), F(1, 2))))
    assert stationary_vector(ds) == (F(1, 3),) * 3
    with pytest.raises(DegenerateError) as err:
        stationary_vector(EYE)
    assert err.value.dimension == 2


def test_stationary_matches_power_iteration():
    rng = random.Random(3)
    for _ in range(20):
        k = rng.randint(2, 4)
        W = WeightMatrix(random_stochastic(rng, k))
        pi = stationary_vector(W)
        row = W.power(256).rows[0]
        assert max(abs(float(a - b)) for a, b in zip(pi, row)) < 1e-12


def test_consensus_limit(pair):
    s, f = pair
    a = s.event(["a"])
    assert consensus_limit(W2, f).prob(a) == F(3, 5)
    same = (f[0], f[0])
    assert consensus_limit(W2, same) == f[0]
    assert in_hull(consensus_limit(W2, f), f)


def test_nesting_example(pair):
    s, f = pair
    tr = nesting_trace(W2, f, s.event(["a"]), 20)
    assert tr.nested and tr.first_strict == (0, 1)
    assert tr.intervals[0].lo == F(1, 5) and tr.intervals[0].hi == F(4, 5)
    last = tr.intervals[-1]
    assert last.lo <= F(3, 5) <= last.hi and last.width < F(1, 10**5)
    tr = nesting_trace(EYE, f, s.event(["a"]), 5)
    assert tr.nested and tr.first_strict is None
    assert len(set(tr.intervals)) == 1


def test_nesting_random_positive():
    rng = random.Random(10)
    for _ in range(100):
        k = rng.randint(2, 4)
        s = space_of(rng.randint(2, 4))
        W = WeightMatrix(random_stochastic(rng, k))
        f = tuple(random_measure(rng, s) for _ in range(k))
        a = s.event(["w0"])
        tr = nesting_trace(W, f, a, 12)
        assert tr.nested
        limit = consensus_limit(W, f).prob(a)
        assert all(iv.lo <= limit <= iv.hi for iv in tr.intervals)


def test_iterate_converges_monotonically(pair):
    s, f = pair
    limit = consensus_limit(W2, f)
    devs = [max_deviation(g, limit) for g in (iterate(W2, f, n)[0] for n in range(0, 30, 3))]
    assert all(b < a for a, b in zip(devs, devs[1:]))
    assert float(max(max_deviation(g, limit) for g in iterate(W2, f, 64))) < 1e-12


def test_power_rows_stay_stochastic():
    rng = random.Random(2)
    W = WeightMatrix(random_stochastic(rng, 3, positive=False))
    for n in (0, 1, 5, 17):
        assert all(sum(row) == 1 for row in W.power(n).rows)
