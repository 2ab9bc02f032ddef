from fractions import Fraction as F
from pathlib import Path

import pytest

from constriction.core import CredalSet, StateSpace

FIXTURES = Path(__file__).resolve().parents[1] / "src" / "constriction" / "fixtures"


@pytest.fixture
def fixtures():
    return FIXTURES


@pytest.fixture
def coin_space():
    return StateSpace(("HH", "HT", "TH", "TT"))


@pytest.fixture
def coin(coin_space):
    """Two tosses with fair marginals and unknown dependence."""
    return CredalSet.from_rows(coin_space, [(0, F(1, 2), F(1, 2), 0), (F(1, 2), 0, 0, F(1, 2))])


@pytest.fixture
def coin_events(coin_space):
    s = coin_space
    return {
        "H1": s.event(["HH", "HT"]),
        "T1": s.event(["TH", "TT"]),
        "H2": s.event(["HH", "TH"]),
        "T2": s.event(["HT", "TT"]),
    }
