import itertools

import pytest
from hypothesis import given, settings, strategies as st

from labellink.evaluation import confusion_matrix, full_type_map, pr_curve, type_accuracy
from labellink.model import RelationEdge, RelationGraph, RelationType

I = RelationType.IDENTITY
P = RelationType.PARENT
C = RelationType.CHILD
N = RelationType.NONE


def ranking(*strengths):
    """Distinct pairs p0, p1, ... with the given strengths."""
    return [(f"a{k}", f"b{k}", s) for k, s in enumerate(strengths)]


def average_precision_oracle(flags):
    """AP for a ranking of distinct strengths, one relevant/irrelevant flag per
    rank: the mean over positives of precision at their position."""
    total = sum(flags)
    hits = 0
    ap = 0.0
    for k, flag in enumerate(flags, start=1):
        if flag:
            hits += 1
            ap += hits / k
    return ap / total


class TestPRCurve:
    def test_three_pair_example(self):
        # positives at ranks 1 and 3: AP = (1/1 + 2/3) / 2 = 5/6
        ranked = ranking(0.9, 0.5, 0.1)
        gt = {("a0", "b0"), ("a2", "b2")}
        result = pr_curve(ranked, gt)
        assert result.auc == pytest.approx(0.8333333333333333)
        assert result.points == [
            (0.5, 1.0),
            (0.5, 0.5),
            (1.0, pytest.approx(2 / 3)),
        ]

    def test_positives_last(self):
        # [miss, hit, hit]: AP = (1/2 + 2/3) / 2 = 7/12
        ranked = ranking(0.9, 0.5, 0.1)
        gt = {("a1", "b1"), ("a2", "b2")}
        assert pr_curve(ranked, gt).auc == pytest.approx(0.5833333333333333)

    def test_perfect_ranking(self):
        ranked = ranking(0.9, 0.8, 0.1)
        gt = {("a0", "b0"), ("a1", "b1")}
        result = pr_curve(ranked, gt)
        assert result.auc == 1.0
        assert result.points[-1] == (1.0, pytest.approx(2 / 3))

    def test_single_positive_ranked_worst(self):
        ranked = ranking(0.9, 0.8, 0.7, 0.1)
        gt = {("a3", "b3")}
        assert pr_curve(ranked, gt).auc == pytest.approx(0.25)

    def test_ties_enter_as_one_group(self):
        # one positive tied with three negatives at the top: the whole group
        # arrives at once, so precision at the positive is 1/4 regardless of
        # how a sort would happen to break the tie
        ranked = [("a0", "b0", 0.5), ("a1", "b1", 0.5), ("a2", "b2", 0.5),
                  ("a3", "b3", 0.5), ("a4", "b4", 0.1)]
        gt = {("a0", "b0")}
        result = pr_curve(ranked, gt)
        assert result.auc == pytest.approx(0.25)
        assert result.points[0] == (1.0, 0.25)

    def test_tie_order_is_irrelevant(self):
        base = [("a0", "b0", 0.5), ("a1", "b1", 0.5), ("a2", "b2", 0.3)]
        swapped = [base[1], base[0], base[2]]
        gt = {("a0", "b0"), ("a2", "b2")}
        assert pr_curve(base, gt).auc == pr_curve(swapped, gt).auc

    def test_all_positive(self):
        result = pr_curve(ranking(0.9, 0.5), {("a0", "b0"), ("a1", "b1")})
        assert result.auc == 1.0
        assert result.points == [(0.5, 1.0), (1.0, 1.0)]

    def test_duplicate_pair_rejected(self):
        ranked = [("a0", "b0", 0.9), ("a0", "b0", 0.5)]
        with pytest.raises(ValueError, match="more than once"):
            pr_curve(ranked, {("a0", "b0")})

    def test_gt_outside_ranking_rejected(self):
        with pytest.raises(ValueError, match="missing"):
            pr_curve(ranking(0.9), {("zz", "zz")})

    def test_no_positives_rejected(self):
        with pytest.raises(ValueError, match="positives"):
            pr_curve(ranking(0.9), set())

    def test_matches_rank_by_rank_oracle_exhaustively(self):
        # every relevance pattern for rankings of up to 8 distinct strengths
        for n in range(1, 9):
            strengths = [1.0 - k / 10.0 for k in range(n)]
            for flags in itertools.product([0, 1], repeat=n):
                if not any(flags):
                    continue
                ranked = ranking(*strengths)
                gt = {(f"a{k}", f"b{k}") for k, flag in enumerate(flags) if flag}
                assert pr_curve(ranked, gt).auc == pytest.approx(
                    average_precision_oracle(flags), abs=1e-9
                ), flags

    @given(st.lists(st.booleans(), min_size=1, max_size=12).filter(any))
    @settings(max_examples=100, deadline=None)
    def test_auc_within_unit_interval(self, flags):
        ranked = ranking(*[1.0 - k / 100.0 for k in range(len(flags))])
        gt = {(f"a{k}", f"b{k}") for k, flag in enumerate(flags) if flag}
        result = pr_curve(ranked, gt)
        assert 0.0 < result.auc <= 1.0
        assert result.points[-1][0] == 1.0  # recall always ends at 1

    @given(st.lists(st.booleans(), min_size=1, max_size=10).filter(any))
    @settings(max_examples=100, deadline=None)
    def test_strictly_monotone_rescaling_preserves_auc(self, flags):
        gt = {(f"a{k}", f"b{k}") for k, flag in enumerate(flags) if flag}
        base = ranking(*[1.0 - k / 100.0 for k in range(len(flags))])
        squashed = [(a, b, s ** 3) for a, b, s in base]
        assert pr_curve(base, gt).auc == pytest.approx(pr_curve(squashed, gt).auc)


class TestFullTypeMap:
    def test_defaults_to_none(self):
        graph = RelationGraph("A", "B", (RelationEdge("a1", "b1", 1.0, P),))
        out = full_type_map(graph, ["a1", "a2"], ["b1", "b2"])
        assert out == {
            ("a1", "b1"): P,
            ("a1", "b2"): N,
            ("a2", "b1"): N,
            ("a2", "b2"): N,
        }

    def test_untyped_edge_rejected(self):
        graph = RelationGraph("A", "B", (RelationEdge("a1", "b1", 1.0),))
        with pytest.raises(ValueError, match="untyped"):
            full_type_map(graph, ["a1"], ["b1"])

    def test_out_of_space_edge_rejected(self):
        graph = RelationGraph("A", "B", (RelationEdge("zz", "b1", 1.0, P),))
        with pytest.raises(ValueError, match="outside"):
            full_type_map(graph, ["a1"], ["b1"])


class TestTypeAccuracy:
    def test_per_type_recall(self):
        gt = {("a1", "b1"): I, ("a2", "b2"): I, ("a3", "b3"): P, ("a4", "b4"): N}
        pred = {("a1", "b1"): I, ("a2", "b2"): P, ("a3", "b3"): P, ("a4", "b4"): N}
        recall, macro = type_accuracy(pred, gt)
        assert recall[I] == 0.5
        assert recall[P] == 1.0
        assert recall[N] == 1.0
        assert macro == pytest.approx((0.5 + 1.0 + 1.0) / 3.0)

    def test_missing_pairs_default_to_none_on_both_sides(self):
        gt = {("a1", "b1"): I}
        pred = {("a2", "b2"): P}  # pair unknown to gt: gt type none, predicted parent
        recall, macro = type_accuracy(pred, gt)
        assert recall[I] == 0.0   # pair absent from pred defaults to none != identity
        assert recall[N] == 0.0   # the (a2, b2) pair is a false parent
        assert macro == 0.0

    def test_macro_ignores_types_absent_from_gt(self):
        gt = {("a1", "b1"): I}
        pred = {("a1", "b1"): I}
        recall, macro = type_accuracy(pred, gt)
        assert recall == {I: 1.0}
        assert macro == 1.0

    def test_empty_universe_rejected(self):
        with pytest.raises(ValueError):
            type_accuracy({}, {})

    @given(st.lists(st.sampled_from(list(RelationType)), min_size=1, max_size=20))
    @settings(max_examples=50, deadline=None)
    def test_duplicating_every_pair_keeps_macro(self, gt_types):
        # macro recall is a ratio per type, so cloning the whole universe
        # (same gt and pred types under new pair names) cannot change it
        gt = {}
        pred = {}
        for k, t in enumerate(gt_types):
            predicted = list(RelationType)[(k * 3 + 1) % len(RelationType)]
            for copy in ("x", "y"):
                gt[(f"{copy}{k}", f"b{k}")] = t
                pred[(f"{copy}{k}", f"b{k}")] = predicted
        single_gt = {pair: t for pair, t in gt.items() if pair[0].startswith("x")}
        single_pred = {pair: t for pair, t in pred.items() if pair[0].startswith("x")}
        _, macro_single = type_accuracy(single_pred, single_gt)
        _, macro_double = type_accuracy(pred, gt)
        assert macro_double == pytest.approx(macro_single)


class TestConfusionMatrix:
    def test_counts(self):
        gt = {("a1", "b1"): I, ("a2", "b2"): I, ("a3", "b3"): P}
        pred = {("a1", "b1"): I, ("a2", "b2"): P, ("a3", "b3"): P}
        counts = confusion_matrix(pred, gt)
        assert counts == {(I, I): 1, (I, P): 1, (P, P): 1}

    def test_rows_sum_to_gt_type_counts(self):
        gt = {("a1", "b1"): I, ("a2", "b2"): I, ("a3", "b3"): P, ("a4", "b4"): C}
        pred = {("a1", "b1"): P, ("a4", "b4"): C}
        counts = confusion_matrix(pred, gt)
        for gt_type in (I, P, C):
            row_total = sum(n for (g, _), n in counts.items() if g is gt_type)
            expected = sum(1 for t in gt.values() if t is gt_type)
            assert row_total == expected

    def test_total_is_universe_size(self):
        gt = {("a1", "b1"): I}
        pred = {("a2", "b2"): P}
        counts = confusion_matrix(pred, gt)
        assert sum(counts.values()) == 2
