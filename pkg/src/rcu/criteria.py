"""Evaluation criteria for gain mappings.

``choquet_value`` is the rank-dependent Choquet expected utility; with an
additive capacity it coincides with ``seu_value``.  ``linear_value`` weighs
raw gains (no utility) and drives the alpha-strategies of :mod:`rcu.solve`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import InvalidModel, SpaceMismatch
from .tree import DecisionTree, GainMapping, Strategy, gain_mapping
from .uncertainty import (
    ZERO,
    Capacity,
    ProbabilityVector,
    additive_capacity,
    condition,
    to_rational,
)


class Utility:
    """Strictly increasing map from gains to utilities, exact on rationals."""

    def __call__(self, x: Fraction) -> Fraction:
        raise NotImplementedError

    def as_dict(self) -> dict:
        raise NotImplementedError


class Identity(Utility):
    def __call__(self, x):
        return x

    def as_dict(self):
        return {"kind": "identity"}

    def __eq__(self, other):
        return isinstance(other, Identity)

    def __hash__(self):
        return hash("identity")

    def __repr__(self):
        return "Identity()"


@dataclass(frozen=True)
class Affine(Utility):
    a: Fraction
    b: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "a", to_rational(self.a))
        object.__setattr__(self, "b", to_rational(self.b))
        if self.a <= 0:
            raise InvalidModel("affine utility needs a positive slope")

    def __call__(self, x):
        return self.a * x + self.b

    def as_dict(self):
        return {"kind": "affine", "a": str(self.a), "b": str(self.b)}


@dataclass(frozen=True)
class PiecewiseLinear(Utility):
    """Linear interpolation between breakpoints, extended by the end slopes."""

    points: tuple[tuple[Fraction, Fraction], ...]

    def __init__(self, points: Sequence[tuple]):
        pts = tuple((to_rational(x), to_rational(y)) for x, y in points)
        if len(pts) < 2:
            raise InvalidModel("piecewise utility needs at least two breakpoints")
        for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
            if x1 <= x0 or y1 <= y0:
                raise InvalidModel("piecewise utility must be strictly increasing")
        object.__setattr__(self, "points", pts)

    def __call__(self, x):
        pts = self.points
        if x <= pts[0][0]:
            (x0, y0), (x1, y1) = pts[0], pts[1]
        elif x >= pts[-1][0]:
            (x0, y0), (x1, y1) = pts[-2], pts[-1]
        else:
            k = next(i for i in range(1, len(pts)) if x <= pts[i][0])
            (x0, y0), (x1, y1) = pts[k - 1], pts[k]
        return y0 + (y1 - y0) * (x - x0) / (x1 - x0)

    def as_dict(self):
        return {"kind": "piecewise", "points": [[str(x), str(y)] for x, y in self.points]}


IDENTITY = Identity()


def choquet_value(g: GainMapping, c: Capacity, u: Utility = IDENTITY) -> Fraction:
    """Choquet expected utility of ``g`` under capacity ``c``.

    Equal utilities are merged into one level; the value is
    ``u_1 + Σ_{i≥2} c(level_i ∪ … ∪ level_k) (u_i − u_{i−1})`` over the
    sorted distinct levels.  A mapping defined on part of the space is only
    meaningful for a capacity conditioned on that part.
    """
    if g.space != c.space:
        raise SpaceMismatch("gain mapping and capacity live on different spaces")
    if g.support != c.space.full and c.value(g.support) != 1:
        raise InvalidModel("partial gain mapping needs a capacity conditioned on its support")
    by_level: dict[Fraction, int] = {}
    for i, gain in g.items():
        level = u(gain)
        by_level[level] = by_level.get(level, 0) | (1 << i)
    levels = sorted(by_level, reverse=True)
    total = ZERO
    upper = 0
    for hi, lo in zip(levels, levels[1:]):
        upper |= by_level[hi]
        total += c.value(upper) * (hi - lo)
    return levels[-1] + total


def seu_value(g: GainMapping, p: ProbabilityVector, u: Utility = IDENTITY) -> Fraction:
    if g.space != p.space:
        raise SpaceMismatch("gain mapping and probability live on different spaces")
    return sum((p.p[i] * u(gain) for i, gain in g.items()), ZERO)


def linear_value(g: GainMapping, alpha: ProbabilityVector) -> Fraction:
    if g.space != alpha.space:
        raise SpaceMismatch("gain mapping and weights live on different spaces")
    return sum((alpha.p[i] * gain for i, gain in g.items()), ZERO)


def local_value(
    t: DecisionTree, node_id: str, s: Strategy, c: Capacity, u: Utility = IDENTITY
) -> Fraction:
    """Value at ``node_id`` of the substrategy ``s`` under ``c`` conditioned on the path event."""
    cond = condition(c, t.path_mask(node_id))
    return choquet_value(gain_mapping(t, s, node_id, strict=False), cond, u)


class Evaluator:
    """Memoized local criterion for one (tree, capacity, utility) triple."""

    def __init__(self, t: DecisionTree, c: Capacity, u: Utility = IDENTITY):
        if t.space != c.space:
            raise SpaceMismatch("tree and capacity live on different spaces")
        self.tree = t
        self.capacity = c
        self.utility = u
        self._conditional: dict[str, Capacity] = {}
        self._values: dict[tuple[str, Strategy], Fraction] = {}

    def conditional(self, node_id: str) -> Capacity:
        cap = self._conditional.get(node_id)
        if cap is None:
            cap = condition(self.capacity, self.tree.path_mask(node_id))
            self._conditional[node_id] = cap
        return cap

    def value(self, node_id: str, sub: Strategy) -> Fraction:
        key = (node_id, sub)
        v = self._values.get(key)
        if v is None:
            g = gain_mapping(self.tree, sub, node_id, strict=False)
            v = choquet_value(g, self.conditional(node_id), self.utility)
            self._values[key] = v
        return v


KINDS = ("ceu", "seu", "linear")


@dataclass(frozen=True)
class CriterionConfig:
    kind: str = "ceu"
    utility: Utility = field(default=IDENTITY)
    probability: ProbabilityVector | None = None
    epsilon0: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "epsilon0", to_rational(self.epsilon0))
        if self.kind not in KINDS:
            raise InvalidModel(f"unknown criterion kind {self.kind!r}")
        if self.kind != "ceu" and self.probability is None:
            raise InvalidModel(f"criterion {self.kind!r} needs a probability vector")
        if self.epsilon0 < 0:
            raise InvalidModel("epsilon0 must be non-negative")

    def resolve(self, capacity: Capacity) -> tuple[Capacity, Utility]:
        """Capacity and utility the solvers should use under this criterion."""
        if self.kind == "ceu":
            return capacity, self.utility
        if self.probability.space != capacity.space:
            raise SpaceMismatch("criterion probability lives on another space")
        u = IDENTITY if self.kind == "linear" else self.utility
        return additive_capacity(self.probability), u
