"""Rationality audits: money pumps, price of information, SEU dynamic consistency."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .criteria import IDENTITY, Utility
from .errors import ConditioningOnImplausibleEvent, InvalidModel
from .solve import (
    AlphaSystem,
    SolveReport,
    _compose,
    _sophisticated_plan,
    justifiable,
    resolute_limited,
    resolute_unlimited,
    sophisticated,
)
from .criteria import Evaluator
from .tree import (
    Chance,
    ChanceEdge,
    Decision,
    DecisionEdge,
    DecisionTree,
    EdgeId,
    GainMapping,
    Leaf,
    Node,
    Strategy,
    gain_mapping,
)
from .uncertainty import (
    ZERO,
    Capacity,
    EventSet,
    ProbabilityVector,
    additive_capacity,
    iter_bits,
    to_rational,
)

METHODS = ("sophisticated", "justifiable-exact", "justifiable-approx", "resolute", "resolute-limited")


@dataclass(frozen=True)
class AuditVerdict:
    passed: bool
    offending_edge: EdgeId | None = None
    detail: str = ""

    def as_dict(self) -> dict:
        out = {"pass": self.passed}
        if self.offending_edge is not None:
            out["offending_edge"] = list(self.offending_edge)
        return out


def run_method(
    method: str,
    t: DecisionTree,
    c: Capacity,
    u: Utility = IDENTITY,
    alphas: Sequence[AlphaSystem] | None = None,
    eps0: Fraction = Fraction(0),
    check_dominance: bool = False,
    cap: int | None = None,
) -> SolveReport:
    """Dispatch on the method names used by the command line."""
    if method == "sophisticated":
        return sophisticated(t, c, u, check_dominance, cap)
    if method == "justifiable-exact":
        return justifiable(t, c, u, "exact", check_dominance=check_dominance, cap=cap)
    if method == "justifiable-approx":
        return justifiable(t, c, u, "approx", alphas, check_dominance=check_dominance, cap=cap)
    if method == "resolute":
        return resolute_unlimited(t, c, u, alphas or (), check_dominance, cap)
    if method == "resolute-limited":
        return resolute_limited(t, c, u, alphas or (), eps0, check_dominance, cap)
    raise ValueError(f"unknown method {method!r}")


def audit_money_pump(t: DecisionTree, pay_edges: Sequence[EdgeId], s: Strategy) -> AuditVerdict:
    """PASS iff ``s`` never takes one of the declared pay edges."""
    pay = sorted({(str(n), int(i)) for n, i in pay_edges})
    for edge in pay:
        t.edge(edge)
    used = set(s.choices)
    for edge in pay:
        if edge in used:
            return AuditVerdict(False, edge, f"strategy pays at node {edge[0]!r}")
    return AuditVerdict(True)


def _shifted_copy(node: Node, shift: Fraction, suffix: str) -> Node:
    if isinstance(node, Leaf):
        return Leaf(node.gain + shift, None if node.id is None else node.id + suffix)
    if isinstance(node, Decision):
        return Decision(
            node.id + suffix,
            tuple(DecisionEdge(e.action, _shifted_copy(e.child, shift, suffix), e.index) for e in node.edges),
        )
    return Chance(
        node.id + suffix,
        tuple(ChanceEdge(e.event, _shifted_copy(e.child, shift, suffix), e.index) for e in node.edges),
    )


def build_money_pump_gadget(
    t: DecisionTree, fee, at: str | None = None, suffix: str = "~pay"
) -> tuple[DecisionTree, EdgeId]:
    """Offer to pay ``fee`` to face a decision position again.

    With ``at=None`` a new root ``pump`` chooses between the original tree
    (edge 0) and a copy of it with every gain lowered by ``fee`` (edge 1).
    Otherwise the decision node ``at`` gains an extra edge leading to such a
    copy of its own subtree.  Returns the tree and the pay edge id.
    """
    fee = to_rational(fee)
    if fee <= 0:
        raise InvalidModel("the fee of a money pump must be positive")
    if at is None:
        root = Decision(
            "pump",
            (
                DecisionEdge("refuse", t.root, 0),
                DecisionEdge("pay", _shifted_copy(t.root, -fee, suffix), 1),
            ),
        )
        if "pump" in t:
            raise InvalidModel("node id 'pump' already used")
        return DecisionTree(t.space, root), ("pump", 1)
    target = t.node(at)
    if not isinstance(target, Decision):
        raise InvalidModel(f"node {at!r} is not a decision node")
    new_index = max(e.index for e in target.edges) + 1
    pump = Decision(
        target.id,
        target.edges + (DecisionEdge("pay", _shifted_copy(target, -fee, suffix), new_index),),
    )

    def replace(node: Node) -> Node:
        if isinstance(node, Leaf):
            return node
        if node.id == at:
            return pump
        if isinstance(node, Decision):
            return Decision(node.id, tuple(DecisionEdge(e.action, replace(e.child), e.index) for e in node.edges))
        return Chance(node.id, tuple(ChanceEdge(e.event, replace(e.child), e.index) for e in node.edges))

    return DecisionTree(t.space, replace(t.root)), (at, new_index)


def _act_node(node_id: str, g: GainMapping, mask: int, shift: Fraction) -> Node:
    groups: dict[Fraction, int] = {}
    for i in iter_bits(mask):
        groups[g.gains[i]] = groups.get(g.gains[i], 0) | (1 << i)
    if len(groups) == 1:
        return Leaf(next(iter(groups)) + shift)
    edges = sorted(groups.items(), key=lambda kv: kv[1] & -kv[1])
    return Chance(
        node_id,
        tuple(
            ChanceEdge(EventSet(g.space, m), Leaf(gain + shift), j) for j, (gain, m) in enumerate(edges)
        ),
    )


def build_information_tree(
    acts: Sequence[GainMapping] | Mapping[str, GainMapping],
    partition: Sequence[EventSet],
    price,
) -> tuple[DecisionTree, EdgeId]:
    """Observe the partition cell then act (edge 0), or pay to act blind (edge 1)."""
    price = to_rational(price)
    if price <= 0:
        raise InvalidModel("the price of avoiding information must be positive")
    named = list(acts.items()) if isinstance(acts, Mapping) else [(f"a{i}", g) for i, g in enumerate(acts)]
    if not named:
        raise InvalidModel("at least one act is required")
    space = named[0][1].space
    if any(g.space != space or g.support != space.full for _, g in named):
        raise InvalidModel("acts must be total gain mappings on one space")
    seen = 0
    for cell in partition:
        if cell.space != space or cell.mask == 0 or cell.mask & seen:
            raise InvalidModel(f"invalid partition cell {cell}")
        seen |= cell.mask
    if seen != space.full:
        raise InvalidModel("partition cells do not cover the space")
    cells = []
    for j, cell in enumerate(partition):
        options = tuple(
            DecisionEdge(name, _act_node(f"cell{j}.{name}", g, cell.mask, ZERO), i)
            for i, (name, g) in enumerate(named)
        )
        cells.append(ChanceEdge(cell, Decision(f"cell{j}", options), j))
    blind = tuple(
        DecisionEdge(name, _act_node(f"blind.{name}", g, space.full, -price), i)
        for i, (name, g) in enumerate(named)
    )
    root = Decision(
        "root",
        (
            DecisionEdge("info", Chance("observe", tuple(cells)), 0),
            DecisionEdge("no-info-paid", Decision("blind", blind), 1),
        ),
    )
    return DecisionTree(space, root), ("root", 1)


def audit_information_price(
    acts: Sequence[GainMapping] | Mapping[str, GainMapping],
    partition: Sequence[EventSet],
    price,
    c: Capacity,
    u: Utility = IDENTITY,
    method: str = "justifiable-exact",
    alphas: Sequence[AlphaSystem] | None = None,
    eps0: Fraction = Fraction(0),
) -> AuditVerdict:
    """PASS iff the method's strategy does not pay to stay uninformed.

    A failed cooperation (no strategy) is reported as a non-pass.
    """
    t, paid = build_information_tree(acts, partition, price)
    report = run_method(method, t, c, u, alphas, eps0)
    if report.failure:
        return AuditVerdict(False, None, "method failed to select a strategy")
    return audit_money_pump(t, [paid], report.strategy)


def seu_dynamic_consistency_check(t: DecisionTree, p: ProbabilityVector, u: Utility = IDENTITY) -> bool:
    """Sophisticated choice under an additive capacity is SEU-optimal at every node.

    The unnormalized optimum ``W(k) = max Σ_{e ∈ B_k} p(e) u(g(e))`` is
    computed by dynamic programming; the check asserts that the
    sophisticated substrategy at each decision node ``k`` has conditional
    value exactly ``W(k) / p(B_k)`` and that both procedures pick the same
    strategy (identical tie-breaking).
    """
    t.check()
    for k in t.decision_ids():
        if p.prob(t.path_mask(k)) == 0:
            raise ConditioningOnImplausibleEvent(t.space.names(t.path_mask(k)))
    weights = p.p

    def mass(mask: int) -> Fraction:
        return sum((weights[i] for i in iter_bits(mask)), ZERO)

    optimum: dict[str, Fraction] = {}
    plan: dict[str, Strategy] = {}

    def best(node: Node, path: int) -> Fraction:
        if isinstance(node, Leaf):
            return mass(path) * u(node.gain)
        if isinstance(node, Chance):
            return sum((best(e.child, path & e.event.mask) for e in node.edges), ZERO)
        top = None
        for e in node.edges:
            v = best(e.child, path)
            if top is None or v > top[0]:
                top = (v, e.index)
        optimum[node.id] = top[0]
        plan[node.id] = top[1]
        return top[0]

    root_opt = best(t.root, t.space.full)
    ev = Evaluator(t, additive_capacity(p), u)
    soph = _sophisticated_plan(ev)
    for k, sub in soph.items():
        if sub[k] != plan[k]:
            return False
        if ev.value(k, sub) != optimum[k] / mass(t.path_mask(k)):
            return False
    s = _compose(t.root, soph)
    g = gain_mapping(t, s)
    return sum((weights[i] * u(v) for i, v in g.items()), ZERO) == root_opt
