"""Strategy selection on decision trees.

Four procedures are provided:

* :func:`sophisticated` -- backward induction, each decision node maximizing
  its own conditional Choquet value given the choices already fixed below.
* :func:`justifiable` -- sophisticated choice inside the subtree of edges
  that lie on at least one undominated strategy (exact, via the dominance
  oracle) or on at least one alpha-strategy (approximate).
* :func:`resolute_unlimited` / :func:`resolute_limited` -- cooperative
  rollback over the subtree spanned by alpha-strategies.  Each node may only
  keep alpha-substrategies; with a finite ``eps0`` a node rejects those worth
  more than ``eps0`` below its best available option, and the procedure
  fails when nothing survives at the root.
"""

from __future__ import annotations

import enum
import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .criteria import IDENTITY, Evaluator, Utility, choquet_value
from .errors import InvalidModel, RCUError, SpaceMismatch
from .tree import (
    Chance,
    Decision,
    DecisionTree,
    GainMapping,
    Leaf,
    Strategy,
    SubtreeMask,
    decision_children,
    enumerate_strategies,
    gain_mapping,
    reachable_decisions,
    restrict,
    strategy_edges,
    substrategy,
)
from .uncertainty import (
    ZERO,
    Capacity,
    EnvelopeCapacity,
    MassCapacity,
    ProbabilityVector,
    TableCapacity,
    core_extreme_points,
    mobius_inversion,
    to_rational,
)

log = logging.getLogger(__name__)


class Relation(str, enum.Enum):
    STRICT = "strict"
    WEAK = "weak"
    NONE = "none"


@dataclass(frozen=True)
class DominanceVerdict:
    relation: Relation
    witness: str | None = None

    @property
    def dominated(self) -> bool:
        return self.relation is not Relation.NONE


def dominates(g1: GainMapping, g2: GainMapping) -> DominanceVerdict:
    """Does ``g1`` dominate ``g2``?  STRICT when better on every event."""
    g1.same_domain(g2)
    strict_at = []
    for (i, a), (_, b) in zip(g1.items(), g2.items()):
        if a < b:
            return DominanceVerdict(Relation.NONE)
        if a > b:
            strict_at.append(i)
    if not strict_at:
        return DominanceVerdict(Relation.NONE)
    witness = g1.space.labels[strict_at[0]]
    if len(strict_at) == len(g1.vector()):
        return DominanceVerdict(Relation.STRICT, witness)
    return DominanceVerdict(Relation.WEAK, witness)


def _weakly_better(a: Sequence, b: Sequence) -> bool:
    return all(x >= y for x, y in zip(a, b)) and a != b


def undominated_flags(vectors: Sequence[tuple[Fraction, ...]]) -> list[bool]:
    """Pareto filter: ``flags[i]`` iff no vector weakly dominates ``vectors[i]``.

    A dominating vector has a strictly larger sum, so vectors are visited by
    decreasing sum and compared against the undominated ones found so far.
    """
    sums = [sum(v, ZERO) for v in vectors]
    order = sorted(range(len(vectors)), key=lambda i: -sums[i])
    flags = [False] * len(vectors)
    frontier: list[tuple[Fraction, ...]] = []
    pos = 0
    while pos < len(order):
        end = pos
        while end < len(order) and sums[order[end]] == sums[order[pos]]:
            end += 1
        group = order[pos:end]
        for i in group:
            flags[i] = not any(_weakly_better(f, vectors[i]) for f in frontier)
        frontier.extend({vectors[i] for i in group if flags[i]})
        pos = end
    return flags


def undominated_strategies(t: DecisionTree, cap: int | None = None) -> list[Strategy]:
    t.check()
    strategies = enumerate_strategies(t, cap=cap)
    vectors = [gain_mapping(t, s).vector() for s in strategies]
    return [s for s, ok in zip(strategies, undominated_flags(vectors)) if ok]


def is_undominated(t: DecisionTree, s: Strategy, cap: int | None = None) -> bool:
    target = gain_mapping(t, s).vector()
    return not any(
        _weakly_better(gain_mapping(t, other).vector(), target)
        for other in enumerate_strategies(t, cap=cap)
    )


def build_T0(t: DecisionTree, cap: int | None = None) -> SubtreeMask:
    """Edges lying on at least one undominated strategy."""
    allowed: set = set()
    for s in undominated_strategies(t, cap):
        allowed |= strategy_edges(t, s)
    return SubtreeMask(frozenset(allowed))


@dataclass(frozen=True)
class AlphaSystem:
    id: int
    alpha: ProbabilityVector
    strictly_positive: bool
    source: str = "user"


def make_alpha_systems(
    vectors: Iterable[ProbabilityVector], eta: Fraction = Fraction(0), source: str = "user"
) -> list[AlphaSystem]:
    eta = to_rational(eta)
    if not 0 <= eta < 1:
        raise ValueError("eta must lie in [0, 1)")
    out: list[AlphaSystem] = []
    seen = set()
    for v in vectors:
        if eta > 0:
            v = v.mix(ProbabilityVector.uniform(v.space), eta)
        if v.p in seen:
            continue
        seen.add(v.p)
        out.append(AlphaSystem(len(out), v, v.strictly_positive, source))
    return out


def _random_simplex(space, rng: random.Random) -> ProbabilityVector:
    weights = [Fraction(rng.expovariate(1.0)).limit_denominator(1000) + Fraction(1, 1000) for _ in range(space.n)]
    total = sum(weights, ZERO)
    return ProbabilityVector(space, [w / total for w in weights])


def _capacity_generators(c: Capacity, perm_budget: int, seed: int) -> list[ProbabilityVector]:
    if isinstance(c, MassCapacity):
        return core_extreme_points(c.masses, perm_budget, seed)
    if isinstance(c, EnvelopeCapacity):
        return list(c.probabilities)
    if isinstance(c, TableCapacity):
        mob = mobius_inversion(c)
        if mob.is_belief:
            return core_extreme_points(mob.to_mass_assignment(), perm_budget, seed)
    return []


def generate_weight_systems(
    c: Capacity,
    count: int = 128,
    seed: int = 0,
    eta: Fraction = Fraction(1, 100),
    user_supplied: Sequence[ProbabilityVector] = (),
    perm_budget: int = 720,
) -> list[AlphaSystem]:
    """Weighting systems for alpha-strategies, at most ``count`` of them.

    In priority order: user vectors, probabilities generating the capacity
    (core extreme points of a belief function, or the members of a lower
    envelope), the uniform vector, then seeded random simplex points.  With
    ``eta > 0`` every vector is mixed with the uniform one, making it
    strictly positive.
    """
    eta = to_rational(eta)
    if not 0 <= eta < 1:
        raise ValueError("eta must lie in [0, 1)")
    space = c.space
    vectors: list[ProbabilityVector] = list(user_supplied)
    sources = ["user"] * len(vectors)
    for v in _capacity_generators(c, perm_budget, seed):
        vectors.append(v)
        sources.append("capacity")
    vectors.append(ProbabilityVector.uniform(space))
    sources.append("uniform")
    out: list[AlphaSystem] = []
    seen = set()

    def add(v, source):
        if eta > 0:
            v = v.mix(ProbabilityVector.uniform(space), eta)
        if v.p not in seen and len(out) < count:
            seen.add(v.p)
            out.append(AlphaSystem(len(out), v, v.strictly_positive, source))

    for v, source in zip(vectors, sources):
        add(v, source)
    rng = random.Random(seed)
    attempts = 0
    while len(out) < count and attempts < 10 * count:
        add(_random_simplex(space, rng), "random")
        attempts += 1
    return out


def alpha_strategy(t: DecisionTree, a: AlphaSystem | ProbabilityVector) -> Strategy:
    """Strategy maximizing ``Σ α(e) g(e)`` by backward induction.

    A decision node takes the child with the largest α-weighted gain over its
    own path event; ties go to the lowest edge index.
    """
    alpha = a.alpha if isinstance(a, AlphaSystem) else a
    if alpha.space != t.space:
        raise SpaceMismatch("weights and tree live on different spaces")
    weights = alpha.p
    choices: dict[str, int] = {}

    def mass(mask: int) -> Fraction:
        total, i = ZERO, 0
        while mask:
            if mask & 1:
                total += weights[i]
            mask >>= 1
            i += 1
        return total

    def best(node, path: int) -> tuple[Fraction, list]:
        if isinstance(node, Leaf):
            return mass(path) * node.gain, []
        if isinstance(node, Chance):
            total, picks = ZERO, []
            for e in node.edges:
                v, p = best(e.child, path & e.event.mask)
                total += v
                picks += p
            return total, picks
        top = None
        for e in node.edges:
            v, p = best(e.child, path)
            if top is None or v > top[0]:
                top = (v, [(node.id, e.index)] + p)
        return top

    _, picks = best(t.root, t.space.full)
    choices.update(picks)
    return Strategy(choices)


@dataclass
class SpannedSubtree:
    mask: SubtreeMask
    index: dict[str, list[tuple[int, Strategy]]]
    strategies: dict[int, Strategy]
    systems: dict[int, AlphaSystem]

    @property
    def non_positive(self) -> list[int]:
        return [i for i, a in self.systems.items() if not a.strictly_positive]


def build_T1(t: DecisionTree, alphas: Sequence[AlphaSystem]) -> SpannedSubtree:
    """Subtree spanned by the alpha-strategies, indexed by system."""
    if not alphas:
        raise InvalidModel("at least one weighting system is required")
    t.check()
    allowed: set = set()
    index: dict[str, list[tuple[int, Strategy]]] = {}
    strategies: dict[int, Strategy] = {}
    for a in alphas:
        s = alpha_strategy(t, a)
        strategies[a.id] = s
        allowed |= strategy_edges(t, s)
        for k in reachable_decisions(t, s):
            index.setdefault(k, []).append((a.id, substrategy(t, s, k)))
    return SpannedSubtree(SubtreeMask(frozenset(allowed)), index, strategies, {a.id: a for a in alphas})


@dataclass
class SolveReport:
    method: str
    strategy: Strategy | None
    root_value: Fraction | None
    node_values: dict[str, Fraction] = field(default_factory=dict)
    undominated: bool | None = None
    failure: bool = False
    diagnostics: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "method": self.method,
            "strategy": None if self.strategy is None else {"choices": self.strategy.as_dict()},
            "root_value": None if self.root_value is None else str(self.root_value),
            "node_values": {k: str(v) for k, v in sorted(self.node_values.items())},
            "undominated": self.undominated,
            "failure": self.failure,
            "diagnostics": self.diagnostics,
        }


def _root_value(ev: Evaluator, s: Strategy) -> Fraction:
    t = ev.tree
    if isinstance(t.root, Decision):
        return ev.value(t.root.id, s)
    return choquet_value(gain_mapping(t, s), ev.capacity, ev.utility)


def _node_values(ev: Evaluator, s: Strategy) -> dict[str, Fraction]:
    t = ev.tree
    return {k: ev.value(k, substrategy(t, s, k)) for k in reachable_decisions(t, s)}


def _compose(node, plan: dict[str, Strategy], head: dict | None = None) -> Strategy:
    """Join the planned substrategies of the nearest decision nodes under ``node``."""
    choices = dict(head or {})
    stack = [node]
    while stack:
        n = stack.pop()
        if isinstance(n, Decision):
            choices.update(plan[n.id].as_dict())
        elif isinstance(n, Chance):
            stack.extend(e.child for e in n.edges)
    return Strategy(choices)


def _finish(
    report: SolveReport, t: DecisionTree, check_dominance: bool, cap: int | None
) -> SolveReport:
    if check_dominance and report.strategy is not None:
        report.undominated = is_undominated(t, report.strategy, cap)
    return report


def _sophisticated_plan(ev: Evaluator) -> dict[str, Strategy]:
    t = ev.tree
    plan: dict[str, Strategy] = {}
    for k in t.decision_postorder():
        node = t.node(k)
        top = None
        for e in node.edges:
            cand = _compose(e.child, plan, {k: e.index})
            v = ev.value(k, cand)
            if top is None or v > top[0]:
                top = (v, cand)
        plan[k] = top[1]
    return plan


def sophisticated(
    t: DecisionTree,
    c: Capacity,
    u: Utility = IDENTITY,
    check_dominance: bool = False,
    cap: int | None = None,
) -> SolveReport:
    t.check()
    ev = Evaluator(t, c, u)
    plan = _sophisticated_plan(ev)
    s = _compose(t.root, plan)
    report = SolveReport("sophisticated", s, _root_value(ev, s), _node_values(ev, s))
    return _finish(report, t, check_dominance, cap)


def justifiable(
    t: DecisionTree,
    c: Capacity,
    u: Utility = IDENTITY,
    mode: str = "exact",
    alphas: Sequence[AlphaSystem] | None = None,
    check_dominance: bool = True,
    cap: int | None = None,
) -> SolveReport:
    """Sophisticated choice restricted to T0 (``mode="exact"``) or T1 (``"approx"``)."""
    t.check()
    diagnostics: dict = {"mode": mode}
    if mode == "exact":
        mask = build_T0(t, cap)
    elif mode == "approx":
        if not alphas:
            raise InvalidModel("approximate justifiable choice needs weighting systems")
        spanned = build_T1(t, alphas)
        mask = spanned.mask
        diagnostics["alpha_systems"] = len(alphas)
        diagnostics["non_positive_systems"] = spanned.non_positive
    else:
        raise ValueError(f"unknown mode {mode!r}")
    sub = restrict(t, mask)
    diagnostics["retained_edges"] = len(mask.allowed)
    inner = sophisticated(sub, c, u)
    ev = Evaluator(t, c, u)
    s = inner.strategy
    report = SolveReport(
        f"justifiable-{mode}", s, _root_value(ev, s), _node_values(ev, s), diagnostics=diagnostics
    )
    if check_dominance:
        try:
            report.undominated = is_undominated(t, s, cap)
        except RCUError as exc:
            log.warning("dominance check skipped: %s", exc)
    return report


def _resolute(
    t: DecisionTree,
    c: Capacity,
    u: Utility,
    alphas: Sequence[AlphaSystem],
    eps0: Fraction | None,
    method: str,
    check_dominance: bool,
    cap: int | None,
) -> SolveReport:
    if not alphas:
        raise InvalidModel("at least one weighting system is required")
    if any(not a.strictly_positive for a in alphas):
        log.warning("some weighting systems have zero weights; undominatedness is not guaranteed")
    t.check()
    ev = Evaluator(t, c, u)
    spanned = build_T1(t, alphas)
    systems = sorted(spanned.systems)
    strategies = spanned.strategies
    subs: dict[tuple[int, str], Strategy] = {}
    kids: dict[tuple[int, str], list[str]] = {}
    traversing: dict[str, list[int]] = {}
    for a in systems:
        for k in reachable_decisions(t, strategies[a]):
            subs[a, k] = substrategy(t, strategies[a], k)
            kids[a, k] = decision_children(t, strategies[a], k)
            traversing.setdefault(k, []).append(a)

    acceptable: dict[str, set[Strategy]] = {}
    tentative: dict[str, Strategy] = {}
    tentative_system: dict[str, int] = {}
    pruned: dict[str, int] = {}

    def select(k: str | None, candidates: list[int], value) -> int | None:
        if not candidates:
            return None
        best = max(value(a) for a in candidates)
        top = [a for a in candidates if value(a) == best]

        def consistent(a: int) -> bool:
            children = kids[a, k] if k is not None else root_kids[a]
            return not children or any(subs[a, m] == tentative.get(m) for m in children)

        preferred = [a for a in top if consistent(a)]
        return min(preferred or top)

    for k in t.decision_postorder():
        if k not in traversing:
            continue
        available = [
            a for a in traversing[k] if all(subs[a, m] in acceptable[m] for m in kids[a, k])
        ]
        if available:
            value = lambda a, k=k: ev.value(k, subs[a, k])  # noqa: E731
            best = max(value(a) for a in available)
            kept = [a for a in available if eps0 is None or value(a) >= best - eps0]
        else:
            kept = []
        acceptable[k] = {subs[a, k] for a in kept}
        pruned[k] = len({subs[a, k] for a in traversing[k]}) - len(acceptable[k])
        chosen = select(k, kept, lambda a, k=k: ev.value(k, subs[a, k]))
        if chosen is not None:
            tentative[k] = subs[chosen, k]
            tentative_system[k] = chosen

    diagnostics = {
        "alpha_systems": len(systems),
        "non_positive_systems": spanned.non_positive,
        "tentative_system": dict(sorted(tentative_system.items())),
        "pruned": {k: v for k, v in sorted(pruned.items()) if v},
    }
    if eps0 is not None:
        diagnostics["epsilon0"] = str(eps0)

    root = t.root
    if isinstance(root, Decision):
        winner = tentative_system.get(root.id)
    else:
        # no choice at the root itself: every system whose first decisions survived
        first = _first_decisions(root)
        root_kids = {a: first for a in systems}
        survivors = [a for a in systems if all(subs[a, m] in acceptable[m] for m in root_kids[a])]
        winner = select(None, survivors, lambda a: _root_value(ev, strategies[a]))

    if winner is None:
        return SolveReport(method, None, None, failure=True, diagnostics=diagnostics)
    s = strategies[winner]
    diagnostics["selected_system"] = winner
    report = SolveReport(method, s, _root_value(ev, s), _node_values(ev, s), diagnostics=diagnostics)
    return _finish(report, t, check_dominance, cap)


def _first_decisions(node) -> list[str]:
    out = []
    stack = [node]
    while stack:
        n = stack.pop()
        if isinstance(n, Decision):
            out.append(n.id)
        elif isinstance(n, Chance):
            stack.extend(e.child for e in n.edges)
    return out


def resolute_unlimited(
    t: DecisionTree,
    c: Capacity,
    u: Utility = IDENTITY,
    alphas: Sequence[AlphaSystem] = (),
    check_dominance: bool = False,
    cap: int | None = None,
) -> SolveReport:
    """Cooperative rollback over T1 where every Self accepts any alpha-substrategy."""
    return _resolute(t, c, u, alphas, None, "resolute", check_dominance, cap)


def resolute_limited(
    t: DecisionTree,
    c: Capacity,
    u: Utility = IDENTITY,
    alphas: Sequence[AlphaSystem] = (),
    eps0: Fraction = Fraction(0),
    check_dominance: bool = False,
    cap: int | None = None,
) -> SolveReport:
    """Cooperative rollback where each Self concedes at most ``eps0``; may fail."""
    eps0 = to_rational(eps0)
    if eps0 < 0:
        raise ValueError("eps0 must be non-negative")
    return _resolute(t, c, u, alphas, eps0, "resolute-limited", check_dominance, cap)
