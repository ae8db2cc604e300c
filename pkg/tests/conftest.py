from fractions import Fraction

import pytest
from hypothesis import strategies as st

from rcu.fixtures import example1, example2_blocks, example2_masses
from rcu.uncertainty import EventSpace, MassAssignment, ProbabilityVector, capacity_from_masses


@pytest.fixture
def ex1():
    return example1()


@pytest.fixture
def eps():
    return Fraction(1, 1000)


@pytest.fixture
def ex2():
    m = example2_masses()
    return m, capacity_from_masses(m), example2_blocks(m.space)


@st.composite
def spaces(draw, low=1, high=4):
    n = draw(st.integers(low, high))
    return EventSpace([f"e{i}" for i in range(n)])


@st.composite
def mass_assignments(draw, space=None):
    space = space or draw(spaces())
    focal = draw(st.sets(st.integers(1, space.full), min_size=1, max_size=min(6, space.full)))
    weights = draw(st.lists(st.integers(1, 9), min_size=len(focal), max_size=len(focal)))
    total = sum(weights)
    return MassAssignment(space, {f: Fraction(w, total) for f, w in zip(sorted(focal), weights)})


@st.composite
def probabilities(draw, space, positive=False):
    low = 1 if positive else 0
    raw = draw(st.lists(st.integers(low, 9), min_size=space.n, max_size=space.n))
    if sum(raw) == 0:
        raw[0] = 1
    return ProbabilityVector(space, [Fraction(r, sum(raw)) for r in raw])


@st.composite
def gain_vectors(draw, space, low=-20, high=20):
    return draw(
        st.lists(st.fractions(low, high, max_denominator=6), min_size=space.n, max_size=space.n)
    )
