"""Command line: ``rcu validate | solve | audit | export-dot``.

Exit codes: 0 success, 2 invalid model, 3 parse or I/O error,
4 limited cooperation failed, 5 strategy cap exceeded.
"""

from __future__ import annotations

import argparse
import logging
import sys
from fractions import Fraction
from pathlib import Path

from .criteria import IDENTITY
from .audits import METHODS, audit_money_pump, run_method
from .dot import to_dot
from .errors import CapExceeded, ConditioningOnImplausibleEvent, RCUError
from .io import (
    ModelParseError,
    dumps,
    load_model,
    loads_json,
    parse_rational,
    probability_from_json,
    strategy_from_json,
)
from .solve import generate_weight_systems, make_alpha_systems
from .tree import gain_mapping, validate_tree
from .uncertainty import validate_capacity

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_PARSE = 3
EXIT_FAILURE = 4
EXIT_CAP = 5

log = logging.getLogger("rcu")


class _Exit(Exception):
    def __init__(self, code: int, message: str):
        self.code = code
        self.message = message


def _rational_arg(text: str) -> Fraction:
    try:
        return parse_rational(text, "argument")
    except ModelParseError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _violations(model) -> list[dict]:
    out = [v.as_dict() for v in validate_capacity(model.capacity)]
    out += [v.as_dict() for v in validate_tree(model.tree)]
    for node, idx in model.pay_edges:
        try:
            model.tree.edge((node, idx))
        except RCUError as exc:
            out.append({"kind": "pay-edge", "node": node, "detail": str(exc)})
    return out


def _load_valid(path: str):
    model = load_model(path)
    problems = _violations(model)
    if problems:
        print(dumps({"violations": problems}), end="")
        raise _Exit(EXIT_INVALID, f"{path}: model is invalid ({len(problems)} violations)")
    return model


def _read_json(path: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ModelParseError(str(exc), path) from None
    return loads_json(text)


def _alphas(args, model, capacity):
    if args.alphas == "auto":
        return generate_weight_systems(capacity, count=args.count, seed=args.seed, eta=args.eta)
    obj = _read_json(args.alphas)
    if isinstance(obj, dict):
        obj = obj.get("alphas")
    if not isinstance(obj, list) or not obj:
        raise ModelParseError("expected a non-empty list of probability vectors", f"{args.alphas}: $.alphas")
    vectors = [probability_from_json(v, model.space, f"{args.alphas}: $.alphas[{i}]") for i, v in enumerate(obj)]
    return make_alpha_systems(vectors, args.eta)


def _criterion(model):
    if model.criterion is None:
        return model.capacity, IDENTITY
    return model.criterion.resolve(model.capacity)


def _solve(args, model):
    capacity, utility = _criterion(model)
    eps0 = args.epsilon0
    if eps0 is None:
        eps0 = model.criterion.epsilon0 if model.criterion is not None else Fraction(0)
    alphas = None
    if args.method in ("justifiable-approx", "resolute", "resolute-limited"):
        alphas = _alphas(args, model, capacity)
    return run_method(
        args.method, model.tree, capacity, utility, alphas, eps0, args.check_dominance, args.cap
    )


def cmd_validate(args) -> int:
    model = load_model(args.model)
    problems = _violations(model)
    print(dumps({"violations": problems}), end="")
    return EXIT_INVALID if problems else EXIT_OK


def cmd_solve(args) -> int:
    model = _load_valid(args.model)
    report = _solve(args, model)
    print(dumps(report.as_dict()), end="")
    if report.failure:
        log.error("cooperation failed: no alpha-substrategy is acceptable at the root")
        return EXIT_FAILURE
    return EXIT_OK


def cmd_audit(args) -> int:
    model = _load_valid(args.model)
    if not model.pay_edges:
        raise _Exit(EXIT_INVALID, f"{args.model}: the model declares no pay_edges")
    report = _solve(args, model)
    if report.failure:
        print(dumps({"pass": False, "failure": True}), end="")
        return EXIT_FAILURE
    verdict = audit_money_pump(model.tree, model.pay_edges, report.strategy)
    print(dumps(verdict.as_dict()), end="")
    return EXIT_OK


def cmd_export_dot(args) -> int:
    model = _load_valid(args.model)
    strategy = None
    if args.strategy:
        strategy = strategy_from_json(_read_json(args.strategy), f"{args.strategy}: $")
        try:
            model.tree.check()
            gain_mapping(model.tree, strategy)
        except RCUError as exc:
            raise _Exit(EXIT_INVALID, f"strategy does not fit the tree: {exc}") from None
    text = to_dot(model.tree, strategy)
    if args.out:
        try:
            Path(args.out).write_text(text)
        except OSError as exc:
            raise _Exit(EXIT_PARSE, str(exc)) from None
    else:
        print(text, end="")
    return EXIT_OK


def _add_solver_flags(p: argparse.ArgumentParser, default_method: str) -> None:
    p.add_argument("model", help="model JSON file")
    p.add_argument("--method", choices=METHODS, default=default_method)
    p.add_argument("--epsilon0", type=_rational_arg, default=None,
                   help="cooperation slack for resolute-limited (p/q); defaults to the model's criterion")
    p.add_argument("--alphas", default="auto", help="'auto' or a JSON file with a list of probability vectors")
    p.add_argument("--seed", type=int, default=0, help="seed for generated weighting systems")
    p.add_argument("--count", type=int, default=128, help="number of generated weighting systems")
    p.add_argument("--eta", type=_rational_arg, default=Fraction(1, 100),
                   help="weight of the uniform vector mixed into every system")
    p.add_argument("--check-dominance", action="store_true", help="run the dominance oracle on the result")
    p.add_argument("--cap", type=int, default=None, help="strategy enumeration cap (default $RCU_STRATEGY_CAP or 10^6)")
    p.add_argument("--threads", type=int, default=1, help="accepted for compatibility; solving is single-threaded")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rcu", description="Sequential choice under belief-function uncertainty.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log diagnostics to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a model file")
    p.add_argument("model")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("solve", help="select a strategy")
    _add_solver_flags(p, "sophisticated")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("audit", help="money-pump audit against the model's declared pay edges")
    _add_solver_flags(p, "justifiable-exact")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("export-dot", help="write the tree as a Graphviz digraph")
    p.add_argument("model")
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--strategy", help='strategy JSON {"choices": {...}} drawn in bold')
    p.set_defaults(func=cmd_export_dot)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="rcu: %(message)s")
    if getattr(args, "threads", 1) < 1:
        print("rcu: --threads must be at least 1", file=sys.stderr)
        return EXIT_INVALID
    try:
        return args.func(args)
    except _Exit as exc:
        print(f"rcu: {exc.message}", file=sys.stderr)
        return exc.code
    except ModelParseError as exc:
        print(f"rcu: parse error at {exc}", file=sys.stderr)
        return EXIT_PARSE
    except CapExceeded as exc:
        print(f"rcu: {exc.count} strategies exceed the cap of {exc.cap}", file=sys.stderr)
        return EXIT_CAP
    except (ConditioningOnImplausibleEvent, RCUError, ValueError) as exc:
        print(f"rcu: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
