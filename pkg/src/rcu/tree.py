"""Decision trees, strategies and the strategy -> gain mapping.

Nodes are immutable values.  Every edge remembers its ``index`` in the tree
it was first built in; :func:`restrict` keeps those indices, so a strategy
of a restricted tree is directly a strategy of the original one.  Edge
identifiers are ``(parent id, index)`` pairs.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Union

from .errors import CapExceeded, InvalidModel, InvalidStrategy, SpaceMismatch
from .uncertainty import EventSet, EventSpace, iter_bits, to_rational

DEFAULT_STRATEGY_CAP = 10**6

EdgeId = tuple[str, int]


def default_cap() -> int:
    """Enumeration cap; ``RCU_STRATEGY_CAP`` overrides the default of 10**6."""
    raw = os.environ.get("RCU_STRATEGY_CAP")
    return int(raw) if raw else DEFAULT_STRATEGY_CAP


@dataclass(frozen=True)
class Leaf:
    gain: Fraction
    id: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "gain", to_rational(self.gain))


@dataclass(frozen=True)
class DecisionEdge:
    action: str
    child: "Node"
    index: int


@dataclass(frozen=True)
class ChanceEdge:
    event: EventSet
    child: "Node"
    index: int


@dataclass(frozen=True)
class Decision:
    id: str
    edges: tuple[DecisionEdge, ...]


@dataclass(frozen=True)
class Chance:
    id: str
    edges: tuple[ChanceEdge, ...]


Node = Union[Decision, Chance, Leaf]


def leaf(gain, id: str | None = None) -> Leaf:
    return Leaf(to_rational(gain), id)


def decision(id: str, edges: Iterable[tuple[str, Node]]) -> Decision:
    return Decision(id, tuple(DecisionEdge(a, c, i) for i, (a, c) in enumerate(edges)))


def chance(id: str, edges: Iterable[tuple[EventSet, Node]]) -> Chance:
    return Chance(id, tuple(ChanceEdge(e, c, i) for i, (e, c) in enumerate(edges)))


class DecisionTree:
    """A finite decision tree over an event space.

    Construction never fails on structural problems; use
    :func:`validate_tree` (or :meth:`check`) before solving.
    """

    def __init__(self, space: EventSpace, root: Node):
        self.space = space
        self.root = root
        self._nodes: dict[str, Node] = {}
        self._path: dict[str, int] = {}
        self._parent: dict[str, EdgeId] = {}
        self._order: list[str] = []
        self.duplicate_ids: list[str] = []
        self._index(root, space.full, None)
        self._violations = None

    def _index(self, node: Node, path: int, parent: EdgeId | None) -> None:
        stack = [(node, path, parent)]
        while stack:
            node, path, parent = stack.pop()
            if isinstance(node, Leaf):
                continue
            if node.id in self._nodes:
                self.duplicate_ids.append(node.id)
                continue
            self._nodes[node.id] = node
            self._path[node.id] = path
            if parent is not None:
                self._parent[node.id] = parent
            self._order.append(node.id)
            children = []
            for e in node.edges:
                sub = path & e.event.mask if isinstance(e, ChanceEdge) else path
                children.append((e.child, sub, (node.id, e.index)))
            stack.extend(reversed(children))

    @property
    def root_id(self) -> str | None:
        return None if isinstance(self.root, Leaf) else self.root.id

    def node(self, node_id: str) -> Node:
        try:
            return self._nodes[node_id]
        except KeyError:
            raise InvalidModel(f"unknown node {node_id!r}") from None

    def __contains__(self, node_id: str) -> bool:
        return node_id in self._nodes

    def node_ids(self) -> list[str]:
        """Decision and chance node ids in depth-first, edge-index order."""
        return list(self._order)

    def decision_ids(self) -> list[str]:
        return [i for i in self._order if isinstance(self._nodes[i], Decision)]

    def decision_postorder(self) -> list[str]:
        """Decision nodes with every descendant before its ancestors."""
        return list(reversed(self.decision_ids()))

    def path_mask(self, node_id: str) -> int:
        self.node(node_id)
        return self._path[node_id]

    def parent(self, node_id: str) -> EdgeId | None:
        self.node(node_id)
        return self._parent.get(node_id)

    def edge(self, edge_id: EdgeId):
        node_id, index = edge_id
        node = self.node(node_id)
        for e in node.edges:
            if e.index == index:
                return e
        raise InvalidModel(f"node {node_id!r} has no edge {index}")

    def edge_ids(self) -> list[EdgeId]:
        return [(i, e.index) for i in self._order for e in self._nodes[i].edges]

    def leaves(self) -> Iterator[tuple[Leaf, int]]:
        """Every leaf with its path event mask."""
        stack = [(self.root, self.space.full)]
        while stack:
            node, path = stack.pop()
            if isinstance(node, Leaf):
                yield node, path
                continue
            for e in reversed(node.edges):
                sub = path & e.event.mask if isinstance(e, ChanceEdge) else path
                stack.append((e.child, sub))

    @property
    def violations(self) -> list["TreeViolation"]:
        if self._violations is None:
            self._violations = _collect_violations(self)
        return self._violations

    def check(self) -> DecisionTree:
        if self.violations:
            raise InvalidModel("; ".join(v.describe() for v in self.violations))
        return self

    def __eq__(self, other):
        if not isinstance(other, DecisionTree):
            return NotImplemented
        return self.space == other.space and self.root == other.root

    def __repr__(self):
        return f"DecisionTree({len(self._order)} internal nodes over {self.space!r})"


def path_event(t: DecisionTree, node_id: str) -> EventSet:
    """Intersection of the chance-edge events on the path from the root."""
    return EventSet(t.space, t.path_mask(node_id))


@dataclass(frozen=True)
class TreeViolation:
    kind: str  # "duplicate-id" | "empty-decision" | "partition" | "space" | "edge-index"
    node: str | None
    detail: str

    def describe(self) -> str:
        return f"{self.kind} at {self.node}: {self.detail}"

    def as_dict(self) -> dict:
        return {"kind": self.kind, "node": self.node, "detail": self.detail}


def _collect_violations(t: DecisionTree) -> list[TreeViolation]:
    out = [TreeViolation("duplicate-id", i, "node id used more than once") for i in t.duplicate_ids]
    names = t.space.names
    for node_id in t.node_ids():
        node = t.node(node_id)
        indices = [e.index for e in node.edges]
        if len(set(indices)) != len(indices):
            out.append(TreeViolation("edge-index", node_id, f"repeated edge indices {indices}"))
        if isinstance(node, Decision):
            if not node.edges:
                out.append(TreeViolation("empty-decision", node_id, "decision node without edges"))
            continue
        if any(e.event.space != t.space for e in node.edges):
            out.append(TreeViolation("space", node_id, "edge event from a different space"))
            continue
        path = t.path_mask(node_id)
        seen = 0
        for e in node.edges:
            m = e.event.mask
            if m == 0:
                out.append(TreeViolation("partition", node_id, f"edge {e.index} has an empty event"))
            if m & seen:
                out.append(
                    TreeViolation(
                        "partition", node_id, f"edge {e.index} event {names(m)} overlaps {names(m & seen)}"
                    )
                )
            if m & ~path:
                out.append(
                    TreeViolation(
                        "partition",
                        node_id,
                        f"edge {e.index} event {names(m)} leaves the path event by {names(m & ~path)}",
                    )
                )
            seen |= m
        if path & ~seen:
            out.append(
                TreeViolation("partition", node_id, f"edges do not cover {names(path & ~seen)}")
            )
    return out


def validate_tree(t: DecisionTree) -> list[TreeViolation]:
    return list(t.violations)


@dataclass(frozen=True)
class Strategy:
    """Chosen edge index per reachable decision node."""

    choices: tuple[tuple[str, int], ...] = ()

    def __init__(self, choices: Mapping[str, int] | Iterable[tuple[str, int]] = ()):
        items = choices.items() if isinstance(choices, Mapping) else choices
        object.__setattr__(self, "choices", tuple(sorted((str(k), int(v)) for k, v in items)))

    def __getitem__(self, node_id: str) -> int:
        for k, v in self.choices:
            if k == node_id:
                return v
        raise KeyError(node_id)

    def get(self, node_id: str, default=None):
        return self.as_dict().get(node_id, default)

    def __contains__(self, node_id: str) -> bool:
        return any(k == node_id for k, _ in self.choices)

    def __len__(self):
        return len(self.choices)

    def as_dict(self) -> dict[str, int]:
        return dict(self.choices)

    def __repr__(self):
        return "Strategy(" + ", ".join(f"{k}->{v}" for k, v in self.choices) + ")"


@dataclass(frozen=True)
class GainMapping:
    """Gain per elementary event on ``support`` (``None`` outside it)."""

    space: EventSpace
    gains: tuple[Fraction | None, ...]
    support: int

    @classmethod
    def total(cls, space: EventSpace, gains) -> GainMapping:
        if isinstance(gains, Mapping):
            vals = [None] * space.n
            for k, v in gains.items():
                vals[space.index(k)] = to_rational(v)
        else:
            vals = [to_rational(v) for v in gains]
        if len(vals) != space.n or any(v is None for v in vals):
            raise InvalidModel("a total gain mapping needs one gain per elementary event")
        return cls(space, tuple(vals), space.full)

    def items(self) -> Iterator[tuple[int, Fraction]]:
        for i in iter_bits(self.support):
            yield i, self.gains[i]

    def __getitem__(self, label: str) -> Fraction:
        g = self.gains[self.space.index(label)]
        if g is None:
            raise KeyError(label)
        return g

    def vector(self) -> tuple[Fraction, ...]:
        return tuple(g for _, g in self.items())

    def same_domain(self, other: GainMapping) -> None:
        if self.space != other.space or self.support != other.support:
            raise SpaceMismatch("gain mappings are defined on different events")

    def __repr__(self):
        return "GainMapping(" + ", ".join(f"{self.space.labels[i]}:{g}" for i, g in self.items()) + ")"


def _start(t: DecisionTree, node_id: str | None) -> tuple[Node, int]:
    if node_id is None:
        return t.root, t.space.full
    return t.node(node_id), t.path_mask(node_id)


def _child(node: Decision, index: int) -> Node:
    for e in node.edges:
        if e.index == index:
            return e.child
    raise InvalidStrategy(f"node {node.id!r} has no edge {index}")


def gain_mapping(
    t: DecisionTree, s: Strategy, node_id: str | None = None, strict: bool = True
) -> GainMapping:
    """Gain obtained under ``s`` for each event of the node's path event.

    With ``strict`` a choice at a decision node that ``s`` never reaches is
    an error; otherwise such choices are ignored.
    """
    start, path = _start(t, node_id)
    gains: list[Fraction | None] = [None] * t.space.n
    choices = s.as_dict()
    used = set()
    stack = [(start, path)]
    while stack:
        node, mask = stack.pop()
        if isinstance(node, Leaf):
            for i in iter_bits(mask):
                gains[i] = node.gain
        elif isinstance(node, Decision):
            if node.id not in choices:
                raise InvalidStrategy(f"no choice at reachable decision node {node.id!r}")
            used.add(node.id)
            stack.append((_child(node, choices[node.id]), mask))
        else:
            for e in node.edges:
                sub = mask & e.event.mask
                if sub:
                    stack.append((e.child, sub))
    if any(gains[i] is None for i in iter_bits(path)):
        raise InvalidModel("chance edges do not partition the path event")
    if strict and set(choices) - used:
        extra = sorted(set(choices) - used)
        raise InvalidStrategy(f"choices at unreachable decision nodes {extra}")
    return GainMapping(t.space, tuple(gains), path)


def reachable_decisions(t: DecisionTree, s: Strategy, node_id: str | None = None) -> list[str]:
    """Decision nodes reached under ``s`` from the node, depth-first."""
    start, _ = _start(t, node_id)
    choices = s.as_dict()
    out = []
    stack = [start]
    while stack:
        node = stack.pop()
        if isinstance(node, Decision):
            out.append(node.id)
            if node.id not in choices:
                raise InvalidStrategy(f"no choice at reachable decision node {node.id!r}")
            stack.append(_child(node, choices[node.id]))
        elif isinstance(node, Chance):
            stack.extend(reversed([e.child for e in node.edges]))
    return out


def substrategy(t: DecisionTree, s: Strategy, node_id: str) -> Strategy:
    """Trace of ``s`` on the subtree rooted at ``node_id``."""
    choices = s.as_dict()
    return Strategy({k: choices[k] for k in reachable_decisions(t, s, node_id)})


def decision_children(t: DecisionTree, s: Strategy, node_id: str) -> list[str]:
    """Nearest decision nodes strictly below ``node_id`` that ``s`` reaches."""
    node = t.node(node_id)
    choices = s.as_dict()
    if isinstance(node, Decision):
        frontier = [_child(node, choices[node.id])]
    else:
        frontier = [e.child for e in node.edges]
    out = []
    while frontier:
        n = frontier.pop(0)
        if isinstance(n, Decision):
            out.append(n.id)
        elif isinstance(n, Chance):
            frontier.extend(e.child for e in n.edges)
    return out


def strategy_edges(t: DecisionTree, s: Strategy) -> frozenset[EdgeId]:
    """Edges on every root-to-leaf path consistent with ``s``."""
    choices = s.as_dict()
    out = set()
    stack = [t.root]
    while stack:
        node = stack.pop()
        if isinstance(node, Decision):
            idx = choices[node.id]
            out.add((node.id, idx))
            stack.append(_child(node, idx))
        elif isinstance(node, Chance):
            for e in node.edges:
                out.add((node.id, e.index))
                stack.append(e.child)
    return frozenset(out)


def count_strategies(t: DecisionTree, node_id: str | None = None) -> int:
    start, _ = _start(t, node_id)

    def count(node: Node) -> int:
        if isinstance(node, Leaf):
            return 1
        if isinstance(node, Decision):
            return sum(count(e.child) for e in node.edges)
        return math.prod(count(e.child) for e in node.edges)

    return count(start)


def enumerate_strategies(
    t: DecisionTree, node_id: str | None = None, cap: int | None = None
) -> list[Strategy]:
    """All (sub)strategies from the node, depth-first in edge-index order."""
    cap = default_cap() if cap is None else cap
    total = count_strategies(t, node_id)
    if total > cap:
        raise CapExceeded(total, cap)
    start, _ = _start(t, node_id)

    def walk(node: Node) -> list[tuple[tuple[str, int], ...]]:
        if isinstance(node, Leaf):
            return [()]
        if isinstance(node, Decision):
            return [((node.id, e.index),) + rest for e in node.edges for rest in walk(e.child)]
        parts = [walk(e.child) for e in node.edges]
        return [sum(combo, ()) for combo in itertools.product(*parts)]

    return [Strategy(c) for c in walk(start)]


@dataclass(frozen=True)
class SubtreeMask:
    allowed: frozenset[EdgeId] = field(default_factory=frozenset)

    @classmethod
    def full(cls, t: DecisionTree) -> SubtreeMask:
        return cls(frozenset(t.edge_ids()))

    def __contains__(self, edge_id: EdgeId) -> bool:
        return edge_id in self.allowed

    def __or__(self, other: SubtreeMask) -> SubtreeMask:
        return SubtreeMask(self.allowed | other.allowed)


def restrict(t: DecisionTree, mask: SubtreeMask) -> DecisionTree:
    """Keep only the allowed decision edges; chance nodes keep every edge."""

    def rebuild(node: Node) -> Node:
        if isinstance(node, Leaf):
            return node
        if isinstance(node, Chance):
            return Chance(
                node.id, tuple(ChanceEdge(e.event, rebuild(e.child), e.index) for e in node.edges)
            )
        kept = tuple(
            DecisionEdge(e.action, rebuild(e.child), e.index)
            for e in node.edges
            if (node.id, e.index) in mask.allowed
        )
        if not kept:
            raise InvalidModel(f"mask removes every edge of decision node {node.id!r}")
        return Decision(node.id, kept)

    return DecisionTree(t.space, rebuild(t.root))


def uses_only(s: Strategy, mask: SubtreeMask) -> bool:
    return all(edge in mask.allowed for edge in s.choices)
