"""Finite event algebra and non-additive uncertainty.

Events are subsets of a small finite space, encoded as bit masks (bit ``i``
set iff the ``i``-th elementary event belongs to the set).  Capacities map
every subset to an exact :class:`~fractions.Fraction`; three backings are
provided (Möbius masses, lower envelope of probabilities, explicit table)
plus the lazily evaluated conditional capacity produced by :func:`condition`.

>>> space = EventSpace(["R", "B", "Y"])
>>> m = MassAssignment(space, {("R",): Fraction(1, 3), ("B", "Y"): Fraction(2, 3)})
>>> lower_probability(m, space.event(["R", "Y"]))
Fraction(1, 3)
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import ConditioningOnImplausibleEvent, InvalidModel, SpaceMismatch

MAX_EVENTS = 24

ZERO = Fraction(0)
ONE = Fraction(1)


def to_rational(x) -> Fraction:
    """Convert ints, Fractions and ``"p/q"`` strings to a Fraction.

    Floats are refused: they would silently break exact comparisons.
    """
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def iter_bits(mask: int) -> Iterator[int]:
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


@dataclass(frozen=True)
class EventSpace:
    """Ordered, finite set of elementary events."""

    labels: tuple[str, ...]

    def __init__(self, labels: Iterable[str]):
        labels = tuple(labels)
        if not labels:
            raise InvalidModel("an event space needs at least one elementary event")
        if len(labels) > MAX_EVENTS:
            raise InvalidModel(f"at most {MAX_EVENTS} elementary events are supported")
        for lab in labels:
            if not isinstance(lab, str) or not lab:
                raise InvalidModel(f"invalid event label {lab!r}")
        if len(set(labels)) != len(labels):
            raise InvalidModel("event labels must be unique")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "_index", {lab: i for i, lab in enumerate(labels)})

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def full(self) -> int:
        return (1 << len(self.labels)) - 1

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise InvalidModel(f"unknown elementary event {label!r}") from None

    def mask_of(self, names: Iterable[str]) -> int:
        mask = 0
        for name in names:
            mask |= 1 << self.index(name)
        return mask

    def event(self, names: Iterable[str] | str) -> EventSet:
        if isinstance(names, str):
            names = [names]
        return EventSet(self, self.mask_of(names))

    def from_mask(self, mask: int) -> EventSet:
        return EventSet(self, mask)

    @property
    def omega(self) -> EventSet:
        return EventSet(self, self.full)

    @property
    def empty(self) -> EventSet:
        return EventSet(self, 0)

    def singleton(self, i: int) -> EventSet:
        return EventSet(self, 1 << i)

    def subsets(self) -> Iterator[EventSet]:
        for mask in range(self.full + 1):
            yield EventSet(self, mask)

    def names(self, mask: int) -> list[str]:
        return [self.labels[i] for i in iter_bits(mask)]

    def __repr__(self):
        return f"EventSpace({list(self.labels)!r})"


@dataclass(frozen=True)
class EventSet:
    space: EventSpace
    mask: int

    def __post_init__(self):
        if self.mask < 0 or self.mask > self.space.full:
            raise InvalidModel(f"mask {self.mask} outside the event space")

    def _other(self, other: EventSet) -> int:
        if not isinstance(other, EventSet):
            return NotImplemented
        if other.space != self.space:
            raise SpaceMismatch("events belong to different spaces")
        return other.mask

    def __or__(self, other):
        return EventSet(self.space, self.mask | self._other(other))

    def __and__(self, other):
        return EventSet(self.space, self.mask & self._other(other))

    def __sub__(self, other):
        return EventSet(self.space, self.mask & ~self._other(other))

    def __invert__(self):
        return EventSet(self.space, self.space.full & ~self.mask)

    def __le__(self, other):
        return self.mask & ~self._other(other) == 0

    def __lt__(self, other):
        return self <= other and self.mask != other.mask

    def __len__(self):
        return popcount(self.mask)

    def __bool__(self):
        return self.mask != 0

    def __contains__(self, label: str) -> bool:
        return bool(self.mask >> self.space.index(label) & 1)

    def __iter__(self) -> Iterator[str]:
        return iter(self.space.names(self.mask))

    def names(self) -> list[str]:
        return self.space.names(self.mask)

    def __repr__(self):
        return "{" + ",".join(self.names()) + "}"


def _as_mask(space: EventSpace, event) -> int:
    if isinstance(event, EventSet):
        if event.space != space:
            raise SpaceMismatch("event belongs to a different space")
        return event.mask
    if isinstance(event, int) and not isinstance(event, bool):
        if not 0 <= event <= space.full:
            raise InvalidModel(f"mask {event} outside the event space")
        return event
    return space.mask_of([event] if isinstance(event, str) else event)


class MassAssignment:
    """Basic probability assignment: positive masses on distinct, non-empty focal sets."""

    def __init__(self, space: EventSpace, masses: Mapping | Iterable):
        self.space = space
        items = masses.items() if isinstance(masses, Mapping) else masses
        entries: dict[int, Fraction] = {}
        for event, mass in items:
            mask = _as_mask(space, event)
            mass = to_rational(mass)
            if mask == 0:
                raise InvalidModel("the empty set cannot carry mass")
            if mass <= 0:
                raise InvalidModel(f"mass on {space.names(mask)} must be positive, got {mass}")
            if mask in entries:
                raise InvalidModel(f"focal set {space.names(mask)} listed twice")
            entries[mask] = mass
        total = sum(entries.values(), ZERO)
        if total != 1:
            raise InvalidModel(f"masses sum to {total}, not 1")
        self.entries: tuple[tuple[int, Fraction], ...] = tuple(sorted(entries.items()))

    def focal_sets(self) -> list[tuple[EventSet, Fraction]]:
        return [(EventSet(self.space, mask), mass) for mask, mass in self.entries]

    def as_dict(self) -> dict[int, Fraction]:
        return dict(self.entries)

    def __eq__(self, other):
        if not isinstance(other, MassAssignment):
            return NotImplemented
        return self.space == other.space and self.entries == other.entries

    def __hash__(self):
        return hash((self.space, self.entries))

    def __repr__(self):
        body = ", ".join(f"{self.space.names(m)}: {v}" for m, v in self.entries)
        return f"MassAssignment({body})"


@dataclass(frozen=True)
class ProbabilityVector:
    """Additive probability on the elementary events."""

    space: EventSpace
    p: tuple[Fraction, ...]

    def __init__(self, space: EventSpace, p: Sequence | Mapping):
        if isinstance(p, Mapping):
            vals = [ZERO] * space.n
            for label, v in p.items():
                vals[space.index(label)] = to_rational(v)
        else:
            vals = [to_rational(v) for v in p]
        if len(vals) != space.n:
            raise InvalidModel(f"expected {space.n} probabilities, got {len(vals)}")
        if any(v < 0 for v in vals):
            raise InvalidModel("probabilities must be non-negative")
        if sum(vals, ZERO) != 1:
            raise InvalidModel(f"probabilities sum to {sum(vals, ZERO)}, not 1")
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "p", tuple(vals))

    @classmethod
    def uniform(cls, space: EventSpace) -> ProbabilityVector:
        return cls(space, [Fraction(1, space.n)] * space.n)

    @classmethod
    def degenerate(cls, space: EventSpace, label: str) -> ProbabilityVector:
        return cls(space, {label: 1})

    def prob(self, event) -> Fraction:
        mask = _as_mask(self.space, event)
        return sum((self.p[i] for i in iter_bits(mask)), ZERO)

    def __getitem__(self, label: str) -> Fraction:
        return self.p[self.space.index(label)]

    def mix(self, other: ProbabilityVector, weight: Fraction) -> ProbabilityVector:
        """Return ``(1 - weight) * self + weight * other``."""
        return ProbabilityVector(
            self.space, [(1 - weight) * a + weight * b for a, b in zip(self.p, other.p)]
        )

    @property
    def strictly_positive(self) -> bool:
        return all(v > 0 for v in self.p)

    def __repr__(self):
        return "ProbabilityVector(" + ", ".join(str(v) for v in self.p) + ")"


class Capacity:
    """Set function on all subsets of a finite space.

    Subclasses implement ``_compute(mask)``; values are memoized.  No
    invariant is enforced on construction (see :func:`validate_capacity`),
    so malformed tables can still be represented and diagnosed.
    """

    def __init__(self, space: EventSpace):
        self.space = space
        self._cache: dict[int, Fraction] = {}

    def _compute(self, mask: int) -> Fraction:
        raise NotImplementedError

    def value(self, mask: int) -> Fraction:
        v = self._cache.get(mask)
        if v is None:
            v = self._compute(mask)
            self._cache[mask] = v
        return v

    def __call__(self, event) -> Fraction:
        return self.value(_as_mask(self.space, event))

    def plausibility(self, event) -> Fraction:
        mask = _as_mask(self.space, event)
        return 1 - self.value(self.space.full & ~mask)

    def table(self) -> tuple[Fraction, ...]:
        return tuple(self.value(mask) for mask in range(self.space.full + 1))

    def materialize(self) -> TableCapacity:
        return TableCapacity(self.space, self.table())

    def is_additive(self) -> bool:
        n, v = self.space.n, self.value
        singles = sum((v(1 << i) for i in range(n)), ZERO)
        if singles != 1:
            return False
        return all(
            v(mask) == sum((v(1 << i) for i in iter_bits(mask)), ZERO)
            for mask in range(self.space.full + 1)
        )


class MassCapacity(Capacity):
    """Belief function induced by a :class:`MassAssignment`."""

    def __init__(self, masses: MassAssignment):
        super().__init__(masses.space)
        self.masses = masses

    def _compute(self, mask: int) -> Fraction:
        return sum((m for f, m in self.masses.entries if f & ~mask == 0), ZERO)

    def __repr__(self):
        return f"MassCapacity({self.masses!r})"


class EnvelopeCapacity(Capacity):
    """Lower envelope ``A -> min_p p(A)`` of finitely many probabilities."""

    def __init__(self, ps: Sequence[ProbabilityVector]):
        ps = tuple(ps)
        if not ps:
            raise InvalidModel("the lower envelope of an empty set is undefined")
        space = ps[0].space
        if any(p.space != space for p in ps):
            raise SpaceMismatch("all probabilities must share one space")
        super().__init__(space)
        self.probabilities = ps

    def _compute(self, mask: int) -> Fraction:
        return min(p.prob(mask) for p in self.probabilities)

    def __repr__(self):
        return f"EnvelopeCapacity({list(self.probabilities)!r})"


class TableCapacity(Capacity):
    def __init__(self, space: EventSpace, values: Sequence | Mapping):
        super().__init__(space)
        size = space.full + 1
        if isinstance(values, Mapping):
            table = [None] * size
            for event, v in values.items():
                table[_as_mask(space, event)] = to_rational(v)
            missing = [i for i, v in enumerate(table) if v is None]
            if missing:
                raise InvalidModel(
                    f"capacity table misses {len(missing)} subsets, e.g. {space.names(missing[0])}"
                )
        else:
            table = [to_rational(v) for v in values]
            if len(table) != size:
                raise InvalidModel(f"capacity table needs {size} entries, got {len(table)}")
        self.values = tuple(table)

    def _compute(self, mask: int) -> Fraction:
        return self.values[mask]

    def __repr__(self):
        return f"TableCapacity({self.space!r}, {len(self.values)} entries)"


class ConditionalCapacity(Capacity):
    """Generalized Bayesian update of ``base`` on the event ``given``.

    ``Π(A|B) = Π(A∩B) / [Π(A∩B) + 1 - Π((A∩B) ∪ Bᶜ)]``.  The ratio is 0/0
    only when nothing in ``B \\ A`` is plausible and ``A∩B`` has zero lower
    probability; the limiting value 1 is used there, as for ``B ⊆ A``.
    """

    def __init__(self, base: Capacity, given: int):
        super().__init__(base.space)
        self.base = base
        self.given = given
        self._outside = base.space.full & ~given

    def _compute(self, mask: int) -> Fraction:
        inside = mask & self.given
        if inside == 0:
            return ZERO
        if inside == self.given:
            return ONE
        low = self.base.value(inside)
        denom = low + 1 - self.base.value(inside | self._outside)
        if denom == 0:
            return ONE
        return low / denom

    def __repr__(self):
        return f"ConditionalCapacity({self.base!r} | {self.space.names(self.given)})"


def lower_probability(m: MassAssignment, event) -> Fraction:
    """Total mass of the focal sets contained in ``event``."""
    mask = _as_mask(m.space, event)
    return sum((v for f, v in m.entries if f & ~mask == 0), ZERO)


def capacity_from_masses(m: MassAssignment) -> MassCapacity:
    return MassCapacity(m)


def min_envelope(ps: Sequence[ProbabilityVector]) -> EnvelopeCapacity:
    return EnvelopeCapacity(ps)


def additive_capacity(p: ProbabilityVector) -> EnvelopeCapacity:
    return EnvelopeCapacity([p])


@dataclass(frozen=True)
class MobiusTransform:
    """Signed Möbius masses of a capacity (zero entries omitted)."""

    space: EventSpace
    masses: tuple[tuple[int, Fraction], ...]

    @property
    def negative(self) -> list[tuple[EventSet, Fraction]]:
        return [(EventSet(self.space, f), v) for f, v in self.masses if v < 0]

    @property
    def is_belief(self) -> bool:
        return all(v > 0 for f, v in self.masses if f) and all(f for f, _ in self.masses)

    def as_dict(self) -> dict[int, Fraction]:
        return dict(self.masses)

    def to_mass_assignment(self) -> MassAssignment:
        if not self.is_belief:
            raise InvalidModel("capacity is not a belief function (signed Möbius masses)")
        return MassAssignment(self.space, self.as_dict())

    def resynthesize(self) -> TableCapacity:
        """Rebuild ``A -> Σ_{B⊆A} m(B)`` from the (possibly signed) masses."""
        size = self.space.full + 1
        table = [ZERO] * size
        for f, v in self.masses:
            table[f] += v
        _zeta(table, self.space.n)
        return TableCapacity(self.space, table)


def _zeta(table: list, n: int) -> None:
    for i in range(n):
        bit = 1 << i
        for mask in range(len(table)):
            if mask & bit:
                table[mask] += table[mask ^ bit]


def _mobius(table: list, n: int) -> None:
    for i in range(n):
        bit = 1 << i
        for mask in range(len(table)):
            if mask & bit:
                table[mask] -= table[mask ^ bit]


def mobius_inversion(c: Capacity) -> MobiusTransform:
    """``m(A) = Σ_{B⊆A} (-1)^{|A∖B|} Π(B)`` via the fast subset transform."""
    table = list(c.table())
    _mobius(table, c.space.n)
    return MobiusTransform(c.space, tuple((f, v) for f, v in enumerate(table) if v != 0))


@dataclass(frozen=True)
class CapacityViolation:
    kind: str  # "normalization" | "range" | "monotonicity"
    sets: tuple[tuple[str, ...], ...]
    detail: str

    def as_dict(self) -> dict:
        return {"kind": self.kind, "sets": [list(s) for s in self.sets], "detail": self.detail}


def validate_capacity(c: Capacity) -> list[CapacityViolation]:
    """Check normalization, range and monotonicity.

    Monotonicity is checked on covering pairs ``A ⊂ A ∪ {e}``; any violating
    pair ``A ⊂ B`` implies a violating covering pair on a chain from A to B.
    """
    space, v = c.space, c.value
    names = lambda mask: tuple(space.names(mask))  # noqa: E731
    out: list[CapacityViolation] = []
    if v(0) != 0:
        out.append(CapacityViolation("normalization", (names(0),), f"value of the empty set is {v(0)}"))
    if v(space.full) != 1:
        out.append(
            CapacityViolation("normalization", (names(space.full),), f"value of Ω is {v(space.full)}")
        )
    for mask in range(space.full + 1):
        val = v(mask)
        if val < 0 or val > 1:
            out.append(CapacityViolation("range", (names(mask),), f"value {val} outside [0, 1]"))
        for i in range(space.n):
            bit = 1 << i
            if not mask & bit and v(mask | bit) < val:
                out.append(
                    CapacityViolation(
                        "monotonicity",
                        (names(mask), names(mask | bit)),
                        f"{val} > {v(mask | bit)}",
                    )
                )
    return out


def condition(c: Capacity, given) -> Capacity:
    """Generalized Bayesian conditioning of ``c`` on ``given``."""
    mask = _as_mask(c.space, given)
    if 1 - c.value(c.space.full & ~mask) <= 0:
        raise ConditioningOnImplausibleEvent(c.space.names(mask))
    if mask == c.space.full:
        return c
    return ConditionalCapacity(c, mask)


def core_extreme_points(
    m: MassAssignment, perm_budget: int = 720, seed: int = 0
) -> list[ProbabilityVector]:
    """Extreme points of the core, one per ordering of the elementary events.

    Each focal mass goes to its earliest element in the ordering.  All n!
    orderings are used when they fit in ``perm_budget``; otherwise a seeded
    sample of ``perm_budget`` orderings.
    """
    if perm_budget < 1:
        raise ValueError("perm_budget must be at least 1")
    n = m.space.n
    if math.factorial(n) <= perm_budget:
        orders: Iterable[Sequence[int]] = itertools.permutations(range(n))
    else:
        rng = random.Random(seed)

        def sample():
            base = list(range(n))
            for _ in range(perm_budget):
                rng.shuffle(base)
                yield tuple(base)

        orders = sample()
    seen: dict[tuple[Fraction, ...], None] = {}
    for order in orders:
        p = [ZERO] * n
        for focal, mass in m.entries:
            first = next(i for i in order if focal >> i & 1)
            p[first] += mass
        seen.setdefault(tuple(p), None)
    return [ProbabilityVector(m.space, p) for p in seen]
