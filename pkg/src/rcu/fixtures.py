"""Canonical models: the coin-and-urn tree and the eight-event belief function.

The coin-and-urn tree is a reconstruction.  Its elementary events are the
pairs (coin side, ball colour); the capacity is the lower envelope of the
two extreme urns (1/3 red, the other 2/3 all black or all yellow) combined
with a fair coin.  At the root the decision maker either goes Up, sees the
coin and then bets on a colour, or goes Down and receives a fixed act.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import InvalidModel
from .tree import DecisionTree, EdgeId, Strategy, chance, decision, leaf
from .uncertainty import (
    Capacity,
    EventSpace,
    MassAssignment,
    ProbabilityVector,
    min_envelope,
)

COIN_URN_EVENTS = ("HR", "HB", "HY", "TR", "TB", "TY")
DEFAULT_EPSILON = Fraction(1, 1000)


@dataclass
class Model:
    """A decision tree together with its capacity and optional metadata."""

    tree: DecisionTree
    capacity: Capacity
    pay_edges: tuple[EdgeId, ...] = ()
    criterion: object = None
    meta: dict = field(default_factory=dict)

    @property
    def space(self) -> EventSpace:
        return self.tree.space


def coin_urn_space() -> EventSpace:
    return EventSpace(COIN_URN_EVENTS)


def coin_urn_capacity(space: EventSpace | None = None) -> Capacity:
    space = space or coin_urn_space()
    sixth, third = Fraction(1, 6), Fraction(1, 3)
    all_black = ProbabilityVector(space, [sixth, third, 0, sixth, third, 0])
    all_yellow = ProbabilityVector(space, [sixth, 0, third, sixth, 0, third])
    return min_envelope([all_black, all_yellow])


def _bet(space: EventSpace, node_id: str, winning: list[str], within: list[str], prize, rest) -> object:
    losing = [e for e in within if e not in winning]
    return chance(node_id, [(space.event(winning), leaf(prize)), (space.event(losing), leaf(rest))])


def example1(epsilon=DEFAULT_EPSILON) -> Model:
    """Root ``0``: Up (edge 0) or Down (edge 1).

    Up leads to the coin; on Heads node ``1`` offers d_R (edge 0) or d_B
    (edge 1), on Tails node ``2`` offers d_R (edge 0) or d_Y (edge 1).
    d_R pays 100 on red; d_B / d_Y pay 100 + 2ε on their colour and 2ε
    otherwise; Down pays 100 + ε on HB ∪ TY and ε otherwise.
    """
    eps = Fraction(epsilon)
    if not 0 < eps < Fraction(100, 6):
        raise InvalidModel("epsilon must lie strictly between 0 and 100/6")
    space = coin_urn_space()
    heads, tails = ["HR", "HB", "HY"], ["TR", "TB", "TY"]
    node1 = decision(
        "1",
        [
            ("d_R", _bet(space, "1R", ["HR"], heads, 100, 0)),
            ("d_B", _bet(space, "1B", ["HB"], heads, 100 + 2 * eps, 2 * eps)),
        ],
    )
    node2 = decision(
        "2",
        [
            ("d_R", _bet(space, "2R", ["TR"], tails, 100, 0)),
            ("d_Y", _bet(space, "2Y", ["TY"], tails, 100 + 2 * eps, 2 * eps)),
        ],
    )
    up = chance("coin", [(space.event(heads), node1), (space.event(tails), node2)])
    down = _bet(space, "down", ["HB", "TY"], list(COIN_URN_EVENTS), 100 + eps, eps)
    root = decision("0", [("U", up), ("D", down)])
    tree = DecisionTree(space, root)
    return Model(tree, coin_urn_capacity(space), meta={"epsilon": eps})


# named strategies of the coin-and-urn tree
DOWN = Strategy({"0": 1})
UP_RR = Strategy({"0": 0, "1": 0, "2": 0})
UP_BY = Strategy({"0": 0, "1": 1, "2": 1})
UP_RY = Strategy({"0": 0, "1": 0, "2": 1})
UP_BR = Strategy({"0": 0, "1": 1, "2": 0})


def example2_space() -> EventSpace:
    return EventSpace([f"e{i}" for i in range(1, 9)])


def example2_blocks(space: EventSpace | None = None) -> dict[str, object]:
    """Blocks E1..E4 (pairs of elementary events) of the eight-event space."""
    space = space or example2_space()
    return {f"E{k}": space.event([f"e{2 * k - 1}", f"e{2 * k}"]) for k in range(1, 5)}


def example2_masses() -> MassAssignment:
    space = example2_space()
    E = example2_blocks(space)
    return MassAssignment(
        space,
        {
            E["E1"] | E["E2"]: Fraction(1, 4),
            E["E3"] | E["E4"]: Fraction(3, 8),
            E["E1"]: Fraction(1, 8),
            E["E2"]: Fraction(1, 8),
            E["E3"]: Fraction(1, 16),
            E["E4"]: Fraction(1, 16),
        },
    )
