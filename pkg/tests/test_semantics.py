from __future__ import annotations

import math

import pytest
from hypothesis import given, settings

from procsem import (
    EventLog,
    LanguageTooLargeError,
    Relation,
    dfg_of_log,
    dfg_of_model,
    eventually_follows,
    footprint,
    footprint_of_model,
    language,
    leaf,
    loop,
    par,
    parse_tree,
    playout,
    seq,
    tau,
    xor,
)
from procsem.semantics import MAX_PLAYOUT_LEAVES

from conftest import (
    oracle_dfg_edges,
    oracle_ef_pairs,
    oracle_language,
    tree_strategy,
)


class TestLanguage:
    def test_leaf(self):
        assert language(leaf("a")) == {("a",)}

    def test_tau(self):
        assert language(tau()) == {()}

    def test_seq_concatenates(self):
        assert language(seq(leaf("a"), leaf("b"))) == {("a", "b")}

    def test_xor_unions(self):
        assert language(xor(leaf("a"), leaf("b"))) == {("a",), ("b",)}

    def test_tau_under_xor_makes_branch_optional(self):
        tree = seq(leaf("a"), xor(leaf("b"), tau()))
        assert language(tree) == {("a",), ("a", "b")}

    def test_and_interleaves(self):
        assert language(par(leaf("a"), leaf("b"))) == {("a", "b"), ("b", "a")}

    def test_and_counts_are_binomial(self):
        # interleavings of disjoint sequences of lengths p and q: C(p+q, p)
        tree = par(seq(leaf("a"), leaf("b"), leaf("c")), seq(leaf("x"), leaf("y")))
        assert len(language(tree)) == math.comb(5, 2)

    def test_loop_runs_redo_at_most_once(self):
        assert language(loop(leaf("a"), leaf("b"))) == {("a",), ("a", "b", "a")}

    def test_loop_multiple_redo_children(self):
        got = language(loop(leaf("a"), leaf("b"), leaf("c")))
        assert got == {("a",), ("a", "b", "a"), ("a", "c", "a")}

    def test_duplicate_labels_collapse_sequences(self):
        assert language(xor(leaf("a"), leaf("a"))) == {("a",)}

    def test_cap_enforced(self):
        wide = par(*[leaf(f"a{i}") for i in range(8)])  # 8! = 40,320 sequences
        with pytest.raises(LanguageTooLargeError):
            language(wide, max_sequences=1000)

    def test_leaf_count_guard(self):
        huge = xor(*[leaf(f"a{i}") for i in range(MAX_PLAYOUT_LEAVES + 1)])
        with pytest.raises(LanguageTooLargeError):
            language(huge)

    @given(tree_strategy(max_leaves=8))
    @settings(max_examples=150, deadline=None)
    def test_matches_reference_recursion(self, tree):
        assert language(tree) == oracle_language(tree)


class TestPlayout:
    def test_worked_example_sequences(self, m1_model):
        assert m1_model.sequences == {
            ("receive order", "accept order", "deliver package"),
            ("receive order", "reject order"),
        }

    def test_model_metadata(self, m1_tree):
        model = playout(m1_tree, model_id="x", name="orders")
        assert model.model_id == "x"
        assert model.name == "orders"
        assert model.activity_set == {
            "receive order",
            "accept order",
            "deliver package",
            "reject order",
        }


class TestDfg:
    def test_worked_example_edges(self, m1_model):
        assert dfg_of_model(m1_model).edges == {
            ("receive order", "accept order"),
            ("accept order", "deliver package"),
            ("receive order", "reject order"),
        }

    def test_log_dfg_adds_observed_edge(self):
        # same traces as the model plus one skipping the middle step
        log = EventLog.from_traces(
            [
                ("receive order", "accept order", "deliver package"),
                ("receive order", "reject order"),
                ("receive order", "deliver package"),
            ]
        )
        assert dfg_of_log(log).edges == {
            ("receive order", "accept order"),
            ("accept order", "deliver package"),
            ("receive order", "reject order"),
            ("receive order", "deliver package"),
        }

    def test_duplicate_traces_change_nothing(self):
        once = EventLog.from_traces([("a", "b"), ("b", "c")])
        twice = EventLog.from_traces([("a", "b"), ("a", "b"), ("b", "c")])
        assert dfg_of_log(once) == dfg_of_log(twice)

    @given(tree_strategy(max_leaves=8))
    @settings(max_examples=100, deadline=None)
    def test_edges_match_oracle(self, tree):
        model = playout(tree, model_id="t")
        assert dfg_of_model(model).edges == oracle_dfg_edges(model.sequences)


class TestFootprint:
    def test_worked_example_relations(self, m1_model):
        fp = footprint_of_model(m1_model)
        forward = {
            ("receive order", "accept order"),
            ("accept order", "deliver package"),
            ("receive order", "reject order"),
        }
        for x in m1_model.activity_set:
            for y in m1_model.activity_set:
                if (x, y) in forward:
                    expected = Relation.FORWARD
                elif (y, x) in forward:
                    expected = Relation.BACKWARD
                else:
                    expected = Relation.NONE
                assert fp.relation(x, y) is expected

    def test_parallel_when_both_directions(self):
        fp = footprint_of_model(playout(par(leaf("a"), leaf("b")), model_id="p"))
        assert fp.relation("a", "b") is Relation.PARALLEL
        assert fp.relation("b", "a") is Relation.PARALLEL

    def test_self_loop_gives_parallel_diagonal(self):
        # a trace with a directly repeated activity: ->('a','a') via loop redo tau
        model = playout(loop(leaf("a"), tau()), model_id="l")
        assert ("a", "a", "a") not in model.sequences
        assert ("a", "a") in model.sequences
        fp = footprint_of_model(model)
        assert fp.relation("a", "a") is Relation.PARALLEL

    @given(tree_strategy(max_leaves=8))
    @settings(max_examples=100, deadline=None)
    def test_total_and_mirror_consistent(self, tree):
        model = playout(tree, model_id="t")
        fp = footprint_of_model(model)
        n = len(model.activity_set)
        assert len(fp.relations) == n * n


class TestEventuallyFollows:
    def test_worked_example(self, m1_model):
        assert eventually_follows(m1_model).pairs == {
            ("receive order", "accept order"),
            ("receive order", "reject order"),
            ("receive order", "deliver package"),
            ("accept order", "deliver package"),
        }

    def test_repeats_create_self_pairs(self):
        model = playout(loop(leaf("a"), leaf("b")), model_id="l")
        assert eventually_follows(model).pairs == {
            ("a", "b"),
            ("b", "a"),
            ("a", "a"),
        }

    @given(tree_strategy(max_leaves=8))
    @settings(max_examples=100, deadline=None)
    def test_matches_oracle_and_contains_dfg(self, tree):
        model = playout(tree, model_id="t")
        ef = eventually_follows(model)
        assert ef.pairs == oracle_ef_pairs(model.sequences)
        assert dfg_of_model(model).edges <= ef.pairs


class TestTreeTextIntegration:
    def test_parse_then_playout(self):
        tree = parse_tree("*(->('a', 'b'), tau)")
        assert language(tree) == {("a", "b"), ("a", "b", "a", "b")}
