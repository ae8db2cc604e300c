"""JSON model format.

Rationals are written as ``"p/q"`` strings (integers are accepted on input);
JSON floats are rejected.  A model file looks like::

    {"events": ["H", "T"],
     "capacity": {"masses": [{"set": ["H"], "mass": "1/2"}, {"set": ["H", "T"], "mass": "1/2"}]},
     "root": {"kind": "decision", "id": "0", "edges": [{"action": "a", "to": {"kind": "leaf", "gain": "1"}}]},
     "pay_edges": [["0", 1]],
     "criterion": {"kind": "ceu", "utility": {"kind": "identity"}, "epsilon0": "0"}}
"""

from __future__ import annotations

import json
from importlib import resources
from fractions import Fraction
from pathlib import Path

from .criteria import IDENTITY, Affine, CriterionConfig, PiecewiseLinear, Utility
from .errors import RCUError
from .fixtures import Model
from .tree import (
    Chance,
    ChanceEdge,
    Decision,
    DecisionEdge,
    DecisionTree,
    Leaf,
    Node,
    Strategy,
)
from .uncertainty import (
    Capacity,
    EnvelopeCapacity,
    EventSpace,
    MassAssignment,
    MassCapacity,
    ProbabilityVector,
    TableCapacity,
)


class ModelParseError(RCUError, ValueError):
    """Malformed input; ``where`` is a JSON path or a line/column position."""

    def __init__(self, message: str, where: str = "$"):
        self.where = where
        super().__init__(f"{where}: {message}")


def fmt(q: Fraction) -> str:
    return str(q)


def parse_rational(x, where: str) -> Fraction:
    if isinstance(x, bool) or not isinstance(x, (int, str)):
        raise ModelParseError(f"expected a rational as an integer or 'p/q' string, got {x!r}", where)
    try:
        return Fraction(x.strip() if isinstance(x, str) else x)
    except (ValueError, ZeroDivisionError) as exc:
        raise ModelParseError(f"malformed rational {x!r} ({exc})", where) from None


def _require(obj, key: str, where: str, kind=None):
    if not isinstance(obj, dict):
        raise ModelParseError("expected an object", where)
    if key not in obj:
        raise ModelParseError(f"missing key {key!r}", where)
    value = obj[key]
    if kind is not None and not isinstance(value, kind):
        raise ModelParseError(f"{key!r} has the wrong type", f"{where}.{key}")
    return value


def _event(space: EventSpace, names, where: str):
    if not isinstance(names, list) or not all(isinstance(n, str) for n in names):
        raise ModelParseError("an event is a list of elementary event names", where)
    try:
        return space.event(names)
    except RCUError as exc:
        raise ModelParseError(str(exc), where) from None


def _table_key(space: EventSpace, key: str, where: str) -> int:
    key = key.strip()
    if key.isdigit():
        mask = int(key)
        if mask > space.full:
            raise ModelParseError(f"bitmask {mask} outside the event space", where)
        return mask
    if key in ("", "{}", "[]"):
        return 0
    if key.startswith("["):
        try:
            names = json.loads(key)
        except json.JSONDecodeError:
            raise ModelParseError(f"bad set key {key!r}", where) from None
    else:
        names = [n.strip() for n in key.strip("{}").split(",") if n.strip()]
    return _event(space, names, where).mask


def capacity_from_json(obj, space: EventSpace | None = None, where: str = "$") -> Capacity:
    if not isinstance(obj, dict):
        raise ModelParseError("capacity must be an object", where)
    if "events" in obj:
        own = parse_space(obj["events"], f"{where}.events")
        if space is not None and own != space:
            raise ModelParseError("capacity events differ from the model events", f"{where}.events")
        space = own
    if space is None:
        raise ModelParseError("capacity needs an 'events' list", where)
    kinds = [k for k in ("masses", "envelope", "table") if k in obj]
    if len(kinds) != 1:
        raise ModelParseError("exactly one of 'masses', 'envelope', 'table' is required", where)
    kind = kinds[0]
    body = obj[kind]
    try:
        if kind == "masses":
            if not isinstance(body, list):
                raise ModelParseError("'masses' must be a list", f"{where}.masses")
            entries = []
            for i, item in enumerate(body):
                at = f"{where}.masses[{i}]"
                entries.append(
                    (
                        _event(space, _require(item, "set", at), f"{at}.set"),
                        parse_rational(_require(item, "mass", at), f"{at}.mass"),
                    )
                )
            return MassCapacity(MassAssignment(space, entries))
        if kind == "envelope":
            if not isinstance(body, list) or not body:
                raise ModelParseError("'envelope' must be a non-empty list", f"{where}.envelope")
            ps = []
            for i, row in enumerate(body):
                if not isinstance(row, list):
                    raise ModelParseError("each envelope member is a list", f"{where}.envelope[{i}]")
                ps.append(
                    ProbabilityVector(
                        space, [parse_rational(x, f"{where}.envelope[{i}][{j}]") for j, x in enumerate(row)]
                    )
                )
            return EnvelopeCapacity(ps)
        if not isinstance(body, dict):
            raise ModelParseError("'table' must be an object", f"{where}.table")
        table = {}
        for key, value in body.items():
            at = f"{where}.table[{key!r}]"
            table[_table_key(space, key, at)] = parse_rational(value, at)
        return TableCapacity(space, table)
    except ModelParseError:
        raise
    except RCUError as exc:
        raise ModelParseError(str(exc), f"{where}.{kind}") from None


def capacity_to_json(c: Capacity, with_events: bool = False) -> dict:
    out: dict = {"events": list(c.space.labels)} if with_events else {}
    if isinstance(c, MassCapacity):
        out["masses"] = [{"set": c.space.names(f), "mass": fmt(m)} for f, m in c.masses.entries]
    elif isinstance(c, EnvelopeCapacity):
        out["envelope"] = [[fmt(x) for x in p.p] for p in c.probabilities]
    else:
        out["table"] = {str(mask): fmt(v) for mask, v in enumerate(c.table())}
    return out


def parse_space(obj, where: str = "$.events") -> EventSpace:
    if not isinstance(obj, list):
        raise ModelParseError("'events' must be a list of names", where)
    try:
        return EventSpace(obj)
    except RCUError as exc:
        raise ModelParseError(str(exc), where) from None


def node_from_json(obj, space: EventSpace, where: str = "$.root") -> Node:
    kind = _require(obj, "kind", where, str)
    if kind == "leaf":
        node_id = obj.get("id")
        return Leaf(parse_rational(_require(obj, "gain", where), f"{where}.gain"), None if node_id is None else str(node_id))
    if kind not in ("decision", "chance"):
        raise ModelParseError(f"unknown node kind {kind!r}", f"{where}.kind")
    node_id = _require(obj, "id", where)
    if not isinstance(node_id, (str, int)) or isinstance(node_id, bool):
        raise ModelParseError("node id must be a string", f"{where}.id")
    edges = _require(obj, "edges", where, list)
    built = []
    for i, e in enumerate(edges):
        at = f"{where}.edges[{i}]"
        index = e.get("index", i) if isinstance(e, dict) else i
        if not isinstance(index, int) or isinstance(index, bool):
            raise ModelParseError("edge index must be an integer", f"{at}.index")
        child = node_from_json(_require(e, "to", at), space, f"{at}.to")
        if kind == "decision":
            built.append(DecisionEdge(str(e.get("action", f"edge{i}")), child, index))
        else:
            built.append(ChanceEdge(_event(space, _require(e, "event", at), f"{at}.event"), child, index))
    if kind == "decision":
        return Decision(str(node_id), tuple(built))
    return Chance(str(node_id), tuple(built))


def node_to_json(node: Node) -> dict:
    if isinstance(node, Leaf):
        out = {"kind": "leaf", "gain": fmt(node.gain)}
        if node.id is not None:
            out["id"] = node.id
        return out
    edges = []
    for pos, e in enumerate(node.edges):
        if isinstance(e, DecisionEdge):
            item = {"action": e.action, "to": node_to_json(e.child)}
        else:
            item = {"event": e.event.names(), "to": node_to_json(e.child)}
        if e.index != pos:
            item["index"] = e.index
        edges.append(item)
    kind = "decision" if isinstance(node, Decision) else "chance"
    return {"kind": kind, "id": node.id, "edges": edges}


def utility_from_json(obj, where: str) -> Utility:
    kind = _require(obj, "kind", where, str)
    try:
        if kind == "identity":
            return IDENTITY
        if kind == "affine":
            return Affine(
                parse_rational(_require(obj, "a", where), f"{where}.a"),
                parse_rational(obj.get("b", 0), f"{where}.b"),
            )
        if kind == "piecewise":
            pts = _require(obj, "points", where, list)
            return PiecewiseLinear(
                [
                    (parse_rational(p[0], f"{where}.points[{i}]"), parse_rational(p[1], f"{where}.points[{i}]"))
                    for i, p in enumerate(pts)
                ]
            )
    except RCUError as exc:
        if isinstance(exc, ModelParseError):
            raise
        raise ModelParseError(str(exc), where) from None
    raise ModelParseError(f"unknown utility kind {kind!r}", f"{where}.kind")


def criterion_from_json(obj, space: EventSpace, where: str = "$.criterion") -> CriterionConfig:
    if not isinstance(obj, dict):
        raise ModelParseError("criterion must be an object", where)
    utility = utility_from_json(obj["utility"], f"{where}.utility") if "utility" in obj else IDENTITY
    probability = None
    if "probability" in obj:
        probability = probability_from_json(obj["probability"], space, f"{where}.probability")
    try:
        return CriterionConfig(
            obj.get("kind", "ceu"),
            utility,
            probability,
            parse_rational(obj.get("epsilon0", 0), f"{where}.epsilon0"),
        )
    except ModelParseError:
        raise
    except RCUError as exc:
        raise ModelParseError(str(exc), where) from None


def criterion_to_json(cfg: CriterionConfig) -> dict:
    out = {"kind": cfg.kind, "utility": cfg.utility.as_dict(), "epsilon0": fmt(cfg.epsilon0)}
    if cfg.probability is not None:
        out["probability"] = [fmt(x) for x in cfg.probability.p]
    return out


def probability_from_json(obj, space: EventSpace, where: str) -> ProbabilityVector:
    try:
        if isinstance(obj, dict):
            return ProbabilityVector(space, {k: parse_rational(v, f"{where}.{k}") for k, v in obj.items()})
        if not isinstance(obj, list):
            raise ModelParseError("probability must be a list or an object", where)
        return ProbabilityVector(space, [parse_rational(x, f"{where}[{i}]") for i, x in enumerate(obj)])
    except ModelParseError:
        raise
    except RCUError as exc:
        raise ModelParseError(str(exc), where) from None


def model_from_json(obj) -> Model:
    if not isinstance(obj, dict):
        raise ModelParseError("a model is a JSON object")
    space = parse_space(_require(obj, "events", "$"))
    capacity = capacity_from_json(_require(obj, "capacity", "$"), space, "$.capacity")
    tree = DecisionTree(space, node_from_json(_require(obj, "root", "$"), space))
    pay = []
    for i, edge in enumerate(obj.get("pay_edges", [])):
        if not (isinstance(edge, list) and len(edge) == 2 and isinstance(edge[1], int)):
            raise ModelParseError("a pay edge is a [node id, edge index] pair", f"$.pay_edges[{i}]")
        pay.append((str(edge[0]), edge[1]))
    criterion = criterion_from_json(obj["criterion"], space) if "criterion" in obj else None
    return Model(tree, capacity, tuple(pay), criterion, dict(obj.get("meta", {})))


def model_to_json(model: Model) -> dict:
    out = {
        "events": list(model.space.labels),
        "capacity": capacity_to_json(model.capacity),
        "root": node_to_json(model.tree.root),
    }
    if model.pay_edges:
        out["pay_edges"] = [[n, i] for n, i in model.pay_edges]
    if model.criterion is not None:
        out["criterion"] = criterion_to_json(model.criterion)
    if model.meta:
        out["meta"] = {k: fmt(v) if isinstance(v, Fraction) else v for k, v in model.meta.items()}
    return out


def loads_json(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelParseError(exc.msg, f"line {exc.lineno} column {exc.colno}") from None


def load_model(path) -> Model:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ModelParseError(str(exc), str(path)) from None
    return model_from_json(loads_json(text))


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def strategy_to_json(s: Strategy) -> dict:
    return {"choices": s.as_dict()}


def strategy_from_json(obj, where: str = "$") -> Strategy:
    choices = _require(obj, "choices", where, dict)
    for k, v in choices.items():
        if not isinstance(v, int) or isinstance(v, bool):
            raise ModelParseError("edge indices must be integers", f"{where}.choices.{k}")
    return Strategy(choices)


def data_path(name: str):
    """Path of a model shipped with the package (``example1.json`` and friends)."""
    return resources.files("rcu").joinpath("data", name)
