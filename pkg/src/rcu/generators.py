"""Seeded random models for property tests and the acceptance runs."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from .tree import Chance, ChanceEdge, Decision, DecisionEdge, DecisionTree, GainMapping, Leaf, count_strategies
from .uncertainty import EventSet, EventSpace, MassAssignment, ProbabilityVector, iter_bits


def random_space(rng: random.Random, low: int = 2, high: int = 4) -> EventSpace:
    return EventSpace([f"s{i}" for i in range(rng.randint(low, high))])


def random_weights(rng: random.Random, k: int, scale: int = 12) -> list[Fraction]:
    raw = [rng.randint(1, scale) for _ in range(k)]
    total = sum(raw)
    return [Fraction(r, total) for r in raw]


def random_masses(rng: random.Random, space: EventSpace, max_focal: int = 5) -> MassAssignment:
    """Belief function whose focal sets cover every elementary event.

    Covering keeps every non-empty event plausible, so conditioning on any
    path event is defined.
    """
    full = space.full
    focal: set[int] = set()
    for _ in range(rng.randint(1, max_focal)):
        focal.add(rng.randint(1, full))
    covered = 0
    for f in focal:
        covered |= f
    if covered != full:
        focal.add(full & ~covered if rng.random() < 0.5 else full)
    focal = sorted(focal)
    return MassAssignment(space, dict(zip(focal, random_weights(rng, len(focal)))))


def random_probability(rng: random.Random, space: EventSpace, positive: bool = True) -> ProbabilityVector:
    if positive:
        return ProbabilityVector(space, random_weights(rng, space.n))
    raw = [rng.randint(0, 6) for _ in range(space.n)]
    if not any(raw):
        raw[rng.randrange(space.n)] = 1
    return ProbabilityVector(space, [Fraction(r, sum(raw)) for r in raw])


def random_gain_mapping(rng: random.Random, space: EventSpace, low: int = -5, high: int = 10) -> GainMapping:
    return GainMapping.total(space, [rng.randint(low, high) for _ in range(space.n)])


def _split(rng: random.Random, mask: int) -> list[int]:
    """Random partition of ``mask`` into 2 or 3 non-empty cells."""
    bits = list(iter_bits(mask))
    k = min(len(bits), rng.choice([2, 2, 3]))
    rng.shuffle(bits)
    cells = [0] * k
    for j, b in enumerate(bits):
        cells[j if j < k else rng.randrange(k)] |= 1 << b
    return sorted(cells)


class _Builder:
    def __init__(self, rng: random.Random, space: EventSpace, gains: tuple[int, int], depth: int):
        self.rng, self.space, self.gains, self.depth = rng, space, gains, depth
        self.counter = itertools.count()

    def node(self, mask: int, level: int, want_decision: bool):
        rng = self.rng
        if level >= self.depth or (level > 0 and rng.random() < 0.25):
            return self.payoff(mask)
        if want_decision:
            width = rng.choice([2, 2, 3])
            edges = tuple(
                DecisionEdge(f"a{i}", self.node(mask, level + 1, rng.random() < 0.3), i) for i in range(width)
            )
            return Decision(f"d{next(self.counter)}", edges)
        if mask & (mask - 1) == 0:
            return self.node(mask, level, True)
        edges = tuple(
            ChanceEdge(EventSet(self.space, cell), self.node(cell, level + 1, True), i)
            for i, cell in enumerate(_split(rng, mask))
        )
        return Chance(f"c{next(self.counter)}", edges)

    def payoff(self, mask: int):
        low, high = self.gains
        if mask & (mask - 1) == 0 or self.rng.random() < 0.3:
            return Leaf(Fraction(self.rng.randint(low, high)))
        edges = tuple(
            ChanceEdge(EventSet(self.space, cell), Leaf(Fraction(self.rng.randint(low, high))), i)
            for i, cell in enumerate(_split(self.rng, mask))
        )
        return Chance(f"c{next(self.counter)}", edges)


def random_tree(
    rng: random.Random,
    space: EventSpace,
    depth: int = 4,
    max_strategies: int = 200,
    gains: tuple[int, int] = (0, 9),
) -> DecisionTree:
    """Random valid tree with a decision root and at most ``max_strategies`` strategies."""
    while True:
        root = _Builder(rng, space, gains, depth).node(space.full, 0, True)
        t = DecisionTree(space, root)
        if 1 < count_strategies(t) <= max_strategies:
            return t


def random_two_stage_tree(
    rng: random.Random, space: EventSpace, branches: int = 2, options: int = 2, gain_max: int = 4
) -> DecisionTree:
    """Root choice among ``branches`` ways of splitting the space in two.

    Under each branch a chance node reveals one of two cells and a decision
    node then picks one of ``options`` random acts on that cell.  Different
    branches observe different partitions, which is what lets cross-branch
    dominance appear.
    """
    if space.n < 2:
        raise ValueError("a two-stage tree needs at least two elementary events")
    counter = itertools.count()

    def act(mask: int) -> Chance:
        edges = tuple(
            ChanceEdge(EventSet(space, 1 << b), Leaf(Fraction(rng.randint(0, gain_max))), i)
            for i, b in enumerate(iter_bits(mask))
        )
        return Chance(f"c{next(counter)}", edges)

    root_edges = []
    for b in range(branches):
        bits = list(range(space.n))
        rng.shuffle(bits)
        first = sum(1 << x for x in bits[: rng.randint(1, space.n - 1)])
        cells = sorted([first, space.full & ~first])
        observed = []
        for i, cell in enumerate(cells):
            choice = Decision(
                f"d{next(counter)}", tuple(DecisionEdge(f"o{j}", act(cell), j) for j in range(options))
            )
            observed.append(ChanceEdge(EventSet(space, cell), choice, i))
        root_edges.append(DecisionEdge(f"b{b}", Chance(f"c{next(counter)}", tuple(observed)), b))
    return DecisionTree(space, Decision("root", tuple(root_edges)))


def random_information_instance(rng: random.Random, space: EventSpace | None = None):
    """Acts, a two-cell partition and a price for an information-price audit."""
    space = space or random_space(rng, 2, 4)
    acts = [GainMapping.total(space, [rng.randint(0, 9) for _ in range(space.n)]) for _ in range(rng.randint(2, 3))]
    bits = list(range(space.n))
    rng.shuffle(bits)
    k = rng.randint(1, space.n - 1)
    first = sum(1 << b for b in bits[:k])
    partition = [EventSet(space, first), EventSet(space, space.full & ~first)]
    return acts, partition, Fraction(rng.randint(1, 10), 10)
