"""Acceptance checks, one per criterion, each printing a single PASS/FAIL line.

Run ``pytest tests/test_acceptance.py -s`` to see the lines inside pytest, or
``python tests/test_acceptance.py`` for the lines alone.
"""

from __future__ import annotations

import itertools
import random
import time
from fractions import Fraction as F

import pytest

from rcu.audits import audit_information_price, audit_money_pump, build_money_pump_gadget, seu_dynamic_consistency_check
from rcu.criteria import choquet_value, local_value, seu_value
from rcu.fixtures import DOWN, UP_BY, UP_RR, example1, example2_blocks, example2_masses
from rcu.generators import (
    random_gain_mapping,
    random_information_instance,
    random_masses,
    random_probability,
    random_space,
    random_tree,
)
from rcu.io import data_path, load_model
from rcu.solve import (
    Relation,
    dominates,
    generate_weight_systems,
    is_undominated,
    justifiable,
    make_alpha_systems,
    resolute_limited,
    resolute_unlimited,
    sophisticated,
)
from rcu.tree import GainMapping, Strategy, gain_mapping
from rcu.uncertainty import (
    EventSpace,
    MassAssignment,
    ProbabilityVector,
    additive_capacity,
    capacity_from_masses,
    condition,
    core_extreme_points,
    lower_probability,
    min_envelope,
)

EPS = F(1, 1000)
ETA = F(1, 100)


def _line(n: int, ok: bool, detail: str) -> str:
    return f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"


def _instance(seed: int):
    rng = random.Random(seed)
    space = random_space(rng, 2, 4)
    c = capacity_from_masses(random_masses(rng, space))
    return rng, random_tree(rng, space, depth=4, max_strategies=200), c


def criterion_1():
    start = time.perf_counter()
    m = example2_masses()
    c = capacity_from_masses(m)
    E = example2_blocks(m.space)
    got = [
        condition(c, E["E1"] | E["E2"])(E["E1"]),
        condition(c, E["E3"] | E["E4"])(E["E4"]),
        condition(c, E["E1"] | E["E3"])(E["E1"]),
        condition(c, E["E2"] | E["E4"])(E["E4"]),
    ]
    elapsed = time.perf_counter() - start
    ok = got == [F(1, 4), F(1, 8), F(2, 9), F(1, 7)] and elapsed < 1
    return ok, f"conditionals {[str(x) for x in got]} in {elapsed:.3f}s"


def criterion_2():
    m = example2_masses()
    E = example2_blocks(m.space)
    got = [lower_probability(m, e) for e in (E["E1"], E["E2"], E["E3"], E["E4"], E["E1"] | E["E3"], E["E1"] | E["E4"])]
    want = [F(1, 8), F(1, 8), F(1, 16), F(1, 16), F(3, 16), F(3, 16)]
    return got == want, f"lower probabilities {[str(x) for x in got]}"


def criterion_3():
    S = EventSpace(["R", "B", "Y"])
    acts = {
        "d_R": GainMapping.total(S, [100, 0, 0]),
        "d_B": GainMapping.total(S, [0, 100, 0]),
        "d_RY": GainMapping.total(S, [100, 0, 100]),
        "d_BY": GainMapping.total(S, [0, 100, 100]),
    }
    third = F(1, 3)
    capacities = [
        capacity_from_masses(MassAssignment(S, {"R": third, ("B", "Y"): 2 * third})),
        min_envelope([ProbabilityVector(S, [third, 2 * third, 0]), ProbabilityVector(S, [third, 0, 2 * third])]),
        capacity_from_masses(MassAssignment(S, {"R": third, "B": F(1, 6), ("B", "Y"): F(1, 2)})),
    ]
    ceu_ok = True
    for c in capacities:
        assert c(S.event("R")) == third > c(S.event("B"))
        assert c(S.event(["B", "Y"])) == 2 * third > c(S.event(["R", "Y"]))
        v = {k: choquet_value(g, c) for k, g in acts.items()}
        ceu_ok &= v["d_R"] > v["d_B"] and v["d_BY"] > v["d_RY"]
    # exhaustive rational grid: no probability orders the four acts the same way
    grid = 60
    hits = 0
    points = 0
    for i in range(grid + 1):
        for j in range(grid + 1 - i):
            p = ProbabilityVector(S, [F(i, grid), F(j, grid), F(grid - i - j, grid)])
            points += 1
            v = {k: seu_value(g, p) for k, g in acts.items()}
            if v["d_R"] > v["d_B"] and v["d_BY"] > v["d_RY"]:
                hits += 1
    ok = ceu_ok and hits == 0
    return ok, f"CEU pattern on {len(capacities)} capacities; SEU grid {points} points, {hits} reproduce it"


def criterion_4():
    m = example1(EPS)
    t, c = m.tree, m.capacity
    rep = sophisticated(t, c)
    margins = {a - b for a, b in zip(gain_mapping(t, UP_BY).vector(), gain_mapping(t, DOWN).vector())}
    dom = dominates(gain_mapping(t, UP_BY), gain_mapping(t, DOWN))
    v1 = local_value(t, "1", Strategy({"1": 0}), c)
    v0 = local_value(t, "0", UP_RR, c)
    ok = (
        rep.strategy == DOWN
        and rep.root_value == EPS + F(100, 3)
        and dom.relation is Relation.STRICT
        and margins == {EPS}
        and v1 == F(100, 3)
        and v0 == F(100, 3)
    )
    return ok, f"sophisticated={rep.strategy} value={rep.root_value}; margins={[str(x) for x in margins]}; V1(d_R)={v1}, V0(U,d_R,d_R)={v0}"


def criterion_5(n: int = 500):
    start = time.perf_counter()
    bad_resolute = bad_justifiable = soph_dominated = 0
    for seed in range(n):
        _, t, c = _instance(seed)
        systems = generate_weight_systems(c, count=12, seed=seed)
        assert all(a.strictly_positive for a in systems)
        if not resolute_unlimited(t, c, alphas=systems, check_dominance=True).undominated:
            bad_resolute += 1
        if not justifiable(t, c).undominated:
            bad_justifiable += 1
        if not sophisticated(t, c, check_dominance=True).undominated:
            soph_dominated += 1
    elapsed = time.perf_counter() - start
    ok = bad_resolute == 0 and bad_justifiable == 0 and soph_dominated >= 1 and elapsed < 60
    return ok, (
        f"{n} trees: resolute dominated {bad_resolute}, justifiable dominated {bad_justifiable}, "
        f"sophisticated dominated {soph_dominated}; {elapsed:.1f}s"
    )


def criterion_6(n: int = 100):
    pump_fail = {"justifiable": 0, "resolute": 0, "sophisticated": 0}
    for seed in range(n):
        rng, t, c = _instance(10_000 + seed)
        at = rng.choice([None] + t.decision_ids())
        gadget, pay = build_money_pump_gadget(t, F(rng.randint(1, 4), 2), at=at)
        systems = generate_weight_systems(c, count=12, seed=seed)
        picks = {
            "justifiable": justifiable(gadget, c, check_dominance=False).strategy,
            "resolute": resolute_unlimited(gadget, c, alphas=systems).strategy,
            "sophisticated": sophisticated(gadget, c).strategy,
        }
        for name, s in picks.items():
            pump_fail[name] += not audit_money_pump(gadget, [pay], s).passed
    info_fail = {"justifiable": 0, "resolute": 0, "sophisticated": 0}
    for seed in range(n):
        rng = random.Random(20_000 + seed)
        space = random_space(rng, 2, 4)
        c = capacity_from_masses(random_masses(rng, space))
        acts, cells, price = random_information_instance(rng, space)
        systems = generate_weight_systems(c, count=12, seed=seed)
        info_fail["justifiable"] += not audit_information_price(acts, cells, price, c).passed
        info_fail["resolute"] += not audit_information_price(acts, cells, price, c, method="resolute", alphas=systems).passed
        info_fail["sophisticated"] += not audit_information_price(acts, cells, price, c, method="sophisticated").passed
    ok = (
        pump_fail["justifiable"] == pump_fail["resolute"] == 0
        and info_fail["justifiable"] == info_fail["resolute"] == 0
        and pump_fail["sophisticated"] + info_fail["sophisticated"] >= 1
    )
    return ok, f"{n} money pumps, failures {pump_fail}; {n} information prices, failures {info_fail}"


def criterion_7(n: int = 500):
    failures = 0
    for seed in range(n):
        rng = random.Random(30_000 + seed)
        space = random_space(rng, 2, 4)
        t = random_tree(rng, space, depth=4, max_strategies=200)
        failures += not seu_dynamic_consistency_check(t, random_probability(rng, space))
    return failures == 0, f"{n} (tree, probability) pairs, {failures} inconsistent"


def criterion_8(n: int = 1000):
    rng = random.Random(40_000)
    passed = dict.fromkeys(["additive", "monotone", "translation", "scaling", "lower-expectation"], 0)
    for _ in range(n):
        space = random_space(rng, 1, 4)
        g = random_gain_mapping(rng, space)
        p = random_probability(rng, space, positive=False)
        passed["additive"] += choquet_value(g, additive_capacity(p)) == seu_value(g, p)
        m = random_masses(rng, space)
        c = capacity_from_masses(m)
        v = choquet_value(g, c)
        bumped = GainMapping.total(space, [x + rng.randint(0, 3) for x in g.vector()])
        passed["monotone"] += v <= choquet_value(bumped, c)
        k = F(rng.randint(-20, 20), rng.randint(1, 6))
        passed["translation"] += choquet_value(GainMapping.total(space, [x + k for x in g.vector()]), c) == v + k
        s = F(rng.randint(0, 20), rng.randint(1, 6))
        passed["scaling"] += choquet_value(GainMapping.total(space, [s * x for x in g.vector()]), c) == s * v
        passed["lower-expectation"] += v == min(seu_value(g, q) for q in core_extreme_points(m))
    ok = all(count == n for count in passed.values())
    return ok, f"{n} cases each: {passed}"


def criterion_9(n: int = 200):
    m = example1(EPS)
    t, c, S = m.tree, m.capacity, m.space
    systems = make_alpha_systems(
        [ProbabilityVector.uniform(S), ProbabilityVector(S, {"HR": F(1, 2), "TR": F(1, 2)})], ETA
    )
    bar = F(100, 3) - 2 * EPS
    fixture_ok = (
        resolute_limited(t, c, alphas=systems, eps0=0).strategy == UP_RR
        and all(resolute_limited(t, c, alphas=systems, eps0=e).strategy == UP_BY for e in (bar, bar + 1, 1000))
    )
    crossed = make_alpha_systems(
        [ProbabilityVector(S, {"HR": F(1, 2), "TY": F(1, 2)}), ProbabilityVector(S, {"HB": F(1, 2), "TR": F(1, 2)})], ETA
    )
    failure_shown = resolute_limited(t, c, alphas=crossed, eps0=0).failure
    ladder = [F(0), F(1, 4), F(1), F(3), F(10), F(1000)]
    violations = 0
    for seed in range(n):
        _, tree, cap = _instance(50_000 + seed)
        alphas = generate_weight_systems(cap, count=10, seed=seed)
        reports = [resolute_limited(tree, cap, alphas=alphas, eps0=e) for e in ladder]
        for lo, hi in itertools.combinations(reports, 2):
            if hi.failure and not lo.failure:
                violations += 1
            elif not lo.failure and hi.root_value < lo.root_value:
                violations += 1
    ok = fixture_ok and failure_shown and violations == 0
    return ok, (
        f"fixture thresholds {'ok' if fixture_ok else 'wrong'}; constructed failure "
        f"{'shown' if failure_shown else 'missing'}; {n} random ladders, {violations} monotonicity violations"
    )


def criterion_10():
    model = load_model(data_path("justifiable-dominated.json"))
    t, c = model.tree, model.capacity
    rep = justifiable(t, c)
    recorded = Strategy(model.meta["justifiable_exact"])
    better = Strategy(model.meta["dominated_by"])
    verdict = dominates(gain_mapping(t, better), gain_mapping(t, recorded))
    ok = (
        model.meta.get("provenance") == "search-derived"
        and rep.strategy == recorded
        and rep.undominated is False
        and verdict.dominated
        and is_undominated(t, better)
    )
    return ok, (
        "original tree unavailable; checked on the shipped search-derived fixture "
        f"(seed {model.meta.get('seed')}): justifiable choice {rep.strategy} is {verdict.relation.value}ly dominated"
    )


CRITERIA = {n: globals()[f"criterion_{n}"] for n in range(1, 11)}


@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_criterion(n, capsys):
    ok, detail = CRITERIA[n]()
    with capsys.disabled():
        print("\n" + _line(n, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    for n, check in sorted(CRITERIA.items()):
        print(_line(n, *check()), flush=True)
