import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rcu.errors import CapExceeded, InvalidModel, InvalidStrategy
from rcu.fixtures import DOWN, UP_BY, UP_RR
from rcu.generators import random_space, random_tree
from rcu.tree import (
    DecisionTree,
    Strategy,
    SubtreeMask,
    chance,
    count_strategies,
    decision,
    enumerate_strategies,
    gain_mapping,
    leaf,
    path_event,
    restrict,
    strategy_edges,
    uses_only,
    validate_tree,
)
from rcu.uncertainty import EventSpace

seeds = st.integers(0, 10**6)


def small_tree(seed):
    rng = random.Random(seed)
    return random_tree(rng, random_space(rng, 2, 4), depth=3, max_strategies=60)


class TestValidation:
    def test_fixture_valid(self, ex1):
        assert validate_tree(ex1.tree) == []

    def test_single_leaf_valid(self):
        assert validate_tree(DecisionTree(EventSpace(["a"]), leaf(3))) == []

    def test_overlapping_chance_edges(self):
        S = EventSpace(["a", "b", "c"])
        root = chance("c0", [(S.event(["a", "b"]), leaf(1)), (S.event(["b", "c"]), leaf(2))])
        kinds = [(v.kind, v.node) for v in validate_tree(DecisionTree(S, root))]
        assert ("partition", "c0") in kinds

    def test_missing_event(self):
        S = EventSpace(["a", "b", "c"])
        root = chance("c0", [(S.event("a"), leaf(1)), (S.event("b"), leaf(2))])
        assert [v.kind for v in validate_tree(DecisionTree(S, root))] == ["partition"]

    def test_event_outside_path(self):
        S = EventSpace(["a", "b"])
        inner = chance("c1", [(S.event("a"), leaf(0)), (S.event("b"), leaf(1))])
        root = chance("c0", [(S.event("a"), inner), (S.event("b"), leaf(2))])
        bad = validate_tree(DecisionTree(S, root))
        assert any(v.node == "c1" and "leaves the path" in v.detail for v in bad)

    def test_empty_decision_and_duplicates(self):
        S = EventSpace(["a"])
        t = DecisionTree(S, decision("d", [("x", decision("e", [])), ("y", leaf(1))]))
        assert [v.kind for v in validate_tree(t)] == ["empty-decision"]
        dup = DecisionTree(S, decision("d", [("x", decision("d", [("z", leaf(0))])), ("y", leaf(1))]))
        assert [v.kind for v in validate_tree(dup)] == ["duplicate-id"]
        with pytest.raises(InvalidModel):
            t.check()


class TestPaths:
    def test_root_is_omega(self, ex1):
        assert path_event(ex1.tree, "0").mask == ex1.space.full

    def test_node1_is_heads(self, ex1):
        assert path_event(ex1.tree, "1").names() == ["HR", "HB", "HY"]

    def test_nested(self):
        S = EventSpace(["a", "b", "c", "d"])
        inner = chance("c1", [(S.event("a"), leaf(0)), (S.event("b"), decision("k", [("z", leaf(1))]))])
        root = chance("c0", [(S.event(["a", "b"]), inner), (S.event(["c", "d"]), leaf(2))])
        assert path_event(DecisionTree(S, root), "k").names() == ["b"]

    def test_unknown_node(self, ex1):
        with pytest.raises(InvalidModel):
            path_event(ex1.tree, "nope")


class TestStrategies:
    def test_fixture_count(self, ex1):
        got = enumerate_strategies(ex1.tree)
        assert len(got) == 5 and DOWN in got and UP_BY in got

    def test_leaf_and_fan(self):
        S = EventSpace(["a"])
        assert enumerate_strategies(DecisionTree(S, leaf(1))) == [Strategy()]
        fan = decision("d", [(str(i), leaf(i)) for i in range(4)])
        assert len(enumerate_strategies(DecisionTree(S, fan))) == 4

    def test_cap(self, ex1):
        with pytest.raises(CapExceeded) as info:
            enumerate_strategies(ex1.tree, cap=4)
        assert info.value.count == 5

    def test_cap_from_environment(self, ex1, monkeypatch):
        monkeypatch.setenv("RCU_STRATEGY_CAP", "3")
        with pytest.raises(CapExceeded):
            enumerate_strategies(ex1.tree)

    def test_gain_mappings(self, ex1, eps):
        S = ex1.space
        g = gain_mapping(ex1.tree, UP_BY)
        assert g["HB"] == g["TY"] == 100 + 2 * eps
        assert {g[e] for e in ["HR", "HY", "TR", "TB"]} == {2 * eps}
        d = gain_mapping(ex1.tree, DOWN)
        assert d["HB"] == d["TY"] == 100 + eps and d["HR"] == eps

    def test_constant_leaf(self):
        S = EventSpace(["a", "b"])
        assert gain_mapping(DecisionTree(S, leaf(F(7, 2))), Strategy()).vector() == (F(7, 2), F(7, 2))

    def test_invalid_strategies(self, ex1):
        with pytest.raises(InvalidStrategy):
            gain_mapping(ex1.tree, Strategy({"0": 0, "1": 0}))
        with pytest.raises(InvalidStrategy):
            gain_mapping(ex1.tree, Strategy({"0": 1, "1": 0}))
        with pytest.raises(InvalidStrategy):
            gain_mapping(ex1.tree, Strategy({"0": 5}))

    @settings(max_examples=40, deadline=None)
    @given(seeds)
    def test_count_matches_enumeration(self, seed):
        t = small_tree(seed)
        got = enumerate_strategies(t)
        assert len(got) == count_strategies(t) == len(set(got))
        for s in got:
            assert gain_mapping(t, s).support == t.space.full

    @settings(max_examples=40, deadline=None)
    @given(seeds)
    def test_gain_ignores_unreached_choices(self, seed):
        t = small_tree(seed)
        s = enumerate_strategies(t)[0]
        extra = {k: 0 for k in t.decision_ids() if k not in s}
        padded = Strategy({**extra, **s.as_dict()})
        assert gain_mapping(t, padded, strict=False) == gain_mapping(t, s)


class TestRestrict:
    def test_full_mask_identity(self, ex1):
        t = ex1.tree
        assert restrict(t, SubtreeMask.full(t)) == t

    def test_drop_down(self, ex1):
        t = ex1.tree
        mask = SubtreeMask(frozenset(e for e in t.edge_ids() if e != ("0", 1)))
        sub = restrict(t, mask)
        assert validate_tree(sub) == [] and len(enumerate_strategies(sub)) == 4

    def test_drop_all_root_edges(self, ex1):
        t = ex1.tree
        mask = SubtreeMask(frozenset(e for e in t.edge_ids() if e[0] != "0"))
        with pytest.raises(InvalidModel):
            restrict(t, mask)

    @settings(max_examples=40, deadline=None)
    @given(seeds, st.data())
    def test_restrict_then_enumerate(self, seed, data):
        t = small_tree(seed)
        strategies = enumerate_strategies(t)
        keep = data.draw(st.lists(st.sampled_from(strategies), min_size=1, max_size=3))
        mask = SubtreeMask(frozenset().union(*(strategy_edges(t, s) for s in keep)))
        inside = set(enumerate_strategies(restrict(t, mask)))
        assert inside == {s for s in strategies if uses_only(s, mask)}
        assert set(keep) <= inside
