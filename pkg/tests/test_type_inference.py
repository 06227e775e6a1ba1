import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from labellink.model import (
    DirectionalScoreMatrix,
    LinkScoreMatrix,
    PipelineConfig,
    RelationEdge,
    RelationGraph,
    RelationType,
)
from labellink.type_inference import (
    CalibrationInputs,
    asymmetry_types,
    calibrate,
    combine_strengths,
    combine_types,
    predict_types,
    set_theory_types,
)

I = RelationType.IDENTITY
P = RelationType.PARENT
C = RelationType.CHILD
O = RelationType.OVERLAP


def graph_of(*pairs):
    return RelationGraph("A", "B", tuple(RelationEdge(a, b, 1.0) for a, b in pairs))


def types_of(graph):
    return {(e.a, e.b): (e.type, e.relaxed) for e in graph.edges}


def directional(from_space, to_space, rows, cols, values):
    values = np.asarray(values, dtype=np.float64)
    return DirectionalScoreMatrix(
        from_space, to_space, tuple(rows), tuple(cols), values,
        np.ones_like(values, dtype=np.int64),
    )


class TestSetTheoryTypes:
    def test_identity(self):
        typed = set_theory_types(graph_of(("a1", "b1")))
        assert types_of(typed) == {("a1", "b1"): (I, False)}

    def test_parent_star(self):
        typed = set_theory_types(graph_of(("a1", "b1"), ("a1", "b2")))
        assert types_of(typed) == {
            ("a1", "b1"): (P, False),
            ("a1", "b2"): (P, False),
        }

    def test_child_star(self):
        typed = set_theory_types(graph_of(("a1", "b1"), ("a2", "b1")))
        assert types_of(typed) == {
            ("a1", "b1"): (C, False),
            ("a2", "b1"): (C, False),
        }

    def test_overlap_square(self):
        typed = set_theory_types(
            graph_of(("a1", "b1"), ("a1", "b2"), ("a2", "b1"), ("a2", "b2"))
        )
        assert all(t == (O, False) for t in types_of(typed).values())

    def test_relaxed_fallback_on_chain(self):
        # a1 - b1, a1 - b2, a2 - b2: a1's only exclusive partner is b1, so the
        # strict parent rule fails and (a1, b1) falls back to relaxed parent;
        # (a2, b2) mirrors as relaxed child; (a1, b2) has two busy endpoints.
        typed = set_theory_types(graph_of(("a1", "b1"), ("a1", "b2"), ("a2", "b2")))
        assert types_of(typed) == {
            ("a1", "b1"): (P, True),
            ("a1", "b2"): (O, False),
            ("a2", "b2"): (C, True),
        }

    def test_parent_with_extra_overlap_neighbor(self):
        # a1 covers two exclusive children plus one shared label; the shared
        # edge types as overlap, the exclusive ones stay strict parent.
        typed = set_theory_types(
            graph_of(("a1", "b1"), ("a1", "b2"), ("a1", "b3"), ("a2", "b3"))
        )
        result = types_of(typed)
        assert result[("a1", "b1")] == (P, False)
        assert result[("a1", "b2")] == (P, False)
        assert result[("a1", "b3")] == (O, False)
        assert result[("a2", "b3")] == (C, True)

    def test_empty_graph(self):
        typed = set_theory_types(RelationGraph("A", "B", ()))
        assert typed.edges == ()

    def test_strengths_preserved(self):
        graph = RelationGraph("A", "B", (RelationEdge("a1", "b1", 0.73),))
        typed = set_theory_types(graph)
        assert typed.edge("a1", "b1").strength == 0.73

    @staticmethod
    def random_graph(rng, n=4):
        labels_a = [f"a{i}" for i in range(n)]
        labels_b = [f"b{i}" for i in range(n)]
        pairs = [
            (a, b) for a in labels_a for b in labels_b if rng.random() < 0.35
        ]
        return RelationGraph(
            "A", "B", tuple(RelationEdge(a, b, 1.0) for a, b in pairs)
        )

    def test_mirror_property(self):
        # typing commutes with swapping the two datasets
        rng = np.random.default_rng(42)
        for _ in range(30):
            graph = self.random_graph(rng)
            forward = set_theory_types(graph).mirrored()
            backward = set_theory_types(graph.mirrored())
            assert types_of(forward) == types_of(backward)

    def test_every_edge_gets_a_type(self):
        rng = np.random.default_rng(43)
        for _ in range(30):
            typed = set_theory_types(self.random_graph(rng, n=5))
            assert all(e.type in (I, P, C, O) for e in typed.edges)


class TestAsymmetryTypes:
    def asymmetric_pair(self, s_ab, s_ba):
        S_ab = directional("A", "B", ["a1"], ["b1"], [[s_ab]])
        S_ba = directional("B", "A", ["b1"], ["a1"], [[s_ba]])
        graph = graph_of(("a1", "b1"))
        return S_ab, S_ba, graph

    def classify(self, s_ab, s_ba, T=2.0):
        S_ab, S_ba, graph = self.asymmetric_pair(s_ab, s_ba)
        return asymmetry_types(graph, S_ab, S_ba, T).edge("a1", "b1").type

    def test_ratio_above_threshold_is_parent(self):
        assert self.classify(0.9, 0.3) is P  # ratio 3 > 2

    def test_inverse_ratio_is_child(self):
        assert self.classify(0.3, 0.9) is C

    def test_balanced_is_identity(self):
        assert self.classify(0.9, 0.5) is I  # ratio 1.8 <= 2

    def test_ratio_exactly_T_is_identity(self):
        assert self.classify(0.8, 0.4) is I  # ratio exactly 2, strict >

    def test_zero_denominator_counts_as_infinite(self):
        assert self.classify(0.4, 0.0) is P
        assert self.classify(0.0, 0.4) is C

    def test_both_zero_rejected(self):
        with pytest.raises(ValueError, match="both"):
            self.classify(0.0, 0.0)

    def test_threshold_must_exceed_one(self):
        S_ab, S_ba, graph = self.asymmetric_pair(0.9, 0.3)
        with pytest.raises(ValueError):
            asymmetry_types(graph, S_ab, S_ba, 1.0)

    @given(
        st.floats(min_value=0.001, max_value=1),
        st.floats(min_value=0.001, max_value=1),
        st.floats(min_value=1.01, max_value=10),
    )
    @settings(max_examples=100, deadline=None)
    def test_never_overlap(self, s_ab, s_ba, T):
        assert self.classify(s_ab, s_ba, T) in (I, P, C)

    @given(
        st.floats(min_value=0.001, max_value=1),
        st.floats(min_value=0.001, max_value=1),
        st.floats(min_value=1.01, max_value=10),
        st.floats(min_value=0.01, max_value=1),
    )
    @settings(max_examples=100, deadline=None)
    def test_scale_invariance(self, s_ab, s_ba, T, scale):
        # Only the ratio matters, so rescaling both scores changes nothing —
        # except within a float rounding whisker of the threshold itself.
        ratio = s_ab / s_ba
        assume(abs(ratio - T) > 1e-9 * T and abs(1.0 / ratio - T) > 1e-9 * T)
        assert self.classify(s_ab * scale, s_ba * scale, T) is self.classify(s_ab, s_ba, T)

    @given(
        st.floats(min_value=0.001, max_value=1),
        st.floats(min_value=0.001, max_value=1),
        st.floats(min_value=1.01, max_value=10),
    )
    @settings(max_examples=100, deadline=None)
    def test_mirror_property(self, s_ab, s_ba, T):
        from labellink.model import mirror_type

        forward = self.classify(s_ab, s_ba, T)
        backward = self.classify(s_ba, s_ab, T)
        assert backward is mirror_type(forward)


class TestCombineStrengths:
    R = LinkScoreMatrix("A", "B", ("a1", "a2"), ("b1", "b2"),
                        np.array([[0.2, 0.3], [0.4, 0.5]]))

    def test_boost_applies_only_to_taxonomy_related_pairs(self):
        hints = {("a1", "b1"): I, ("a1", "b2"): O, ("a2", "b1"): RelationType.NONE}
        boosted = combine_strengths(self.R, hints, n=2.0)
        np.testing.assert_allclose(boosted.values, [[0.4, 0.6], [0.4, 0.5]])

    def test_part_of_not_boosted(self):
        boosted = combine_strengths(self.R, {("a1", "b1"): RelationType.PART_OF}, n=2.0)
        np.testing.assert_array_equal(boosted.values, self.R.values)

    def test_n_equal_one_is_bit_identical(self):
        hints = {("a1", "b1"): I, ("a2", "b2"): P}
        boosted = combine_strengths(self.R, hints, n=1.0)
        assert boosted.values.tobytes() == self.R.values.tobytes()

    def test_n_below_one_rejected(self):
        with pytest.raises(ValueError):
            combine_strengths(self.R, {}, n=0.5)

    def test_input_not_mutated(self):
        before = self.R.values.copy()
        combine_strengths(self.R, {("a1", "b1"): I}, n=3.0)
        np.testing.assert_array_equal(self.R.values, before)


class TestCombineTypes:
    def classify(self, s_ab, s_ba, hint, T=2.0, m=2.0):
        S_ab = directional("A", "B", ["a1"], ["b1"], [[s_ab]])
        S_ba = directional("B", "A", ["b1"], ["a1"], [[s_ba]])
        graph = graph_of(("a1", "b1"))
        hints = {} if hint is None else {("a1", "b1"): hint}
        return combine_types(graph, S_ab, S_ba, T, hints, m).edge("a1", "b1").type

    def test_identity_hint_raises_the_bar(self):
        # ratio 3 clears T=2 but not T*m=4
        assert self.classify(0.9, 0.3, hint=None) is P
        assert self.classify(0.9, 0.3, hint=I) is I

    def test_parent_hint_lowers_the_bar(self):
        # ratio 1.8 misses T=2 but clears T/m=1
        assert self.classify(0.9, 0.5, hint=None) is I
        assert self.classify(0.9, 0.5, hint=P) is P

    def test_child_hint_lowers_the_bar_same_way(self):
        assert self.classify(0.5, 0.9, hint=C) is C

    def test_overlap_and_none_hints_leave_threshold_alone(self):
        assert self.classify(0.9, 0.3, hint=O) is P
        assert self.classify(0.9, 0.5, hint=RelationType.NONE) is I

    def test_parent_wins_when_effective_threshold_below_one(self):
        # T/m < 1 can make both directions clear the bar; the parent rule is
        # checked first, so even a slightly child-leaning pair types parent.
        assert self.classify(0.9, 1.0, hint=P, T=1.5, m=4.0) is P

    def test_m_equal_one_matches_plain_asymmetry(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            s_ab = float(rng.uniform(0.01, 1.0))
            s_ba = float(rng.uniform(0.01, 1.0))
            hint = [I, P, C, O, RelationType.NONE, None][rng.integers(0, 6)]
            combined = self.classify(s_ab, s_ba, hint=hint, T=2.0, m=1.0)
            S_ab = directional("A", "B", ["a1"], ["b1"], [[s_ab]])
            S_ba = directional("B", "A", ["b1"], ["a1"], [[s_ba]])
            plain = asymmetry_types(graph_of(("a1", "b1")), S_ab, S_ba, 2.0)
            assert combined is plain.edge("a1", "b1").type

    def test_m_below_one_rejected(self):
        with pytest.raises(ValueError):
            self.classify(0.9, 0.3, hint=None, m=0.5)


def calibration_fixture():
    # Edge (a1, b1) has directional ratio 3, edge (a2, b2) ratio 1.8; the
    # remaining pairs stay below any positive link threshold.
    S_ab = directional("A", "B", ["a1", "a2"], ["b1", "b2"], [[0.9, 0.0], [0.0, 0.54]])
    S_ba = directional("B", "A", ["b1", "b2"], ["a1", "a2"], [[0.3, 0.0], [0.0, 0.3]])
    return CalibrationInputs(S_ab=S_ab, S_ba=S_ba, method="asymmetry",
                             config=PipelineConfig())


class TestPredictTypes:
    def test_full_universe_with_none(self):
        predicted = predict_types(calibration_fixture())
        assert predicted == {
            ("a1", "b1"): P,       # ratio 3 > 2
            ("a2", "b2"): I,       # ratio 1.8 <= 2
            ("a1", "b2"): RelationType.NONE,
            ("a2", "b1"): RelationType.NONE,
        }

    def test_unknown_method_rejected(self):
        inputs = calibration_fixture()
        inputs.method = "majority-vote"
        with pytest.raises(ValueError, match="method"):
            predict_types(inputs)


class TestCalibrate:
    REFERENCE = {
        ("a1", "b1"): P,
        ("a2", "b2"): I,
        ("a1", "b2"): RelationType.NONE,
        ("a2", "b1"): RelationType.NONE,
    }

    def test_picks_unique_maximizer(self):
        # T=1.5 mislabels the identity edge, T=4 mislabels the parent edge,
        # T=2 gets both: accuracies 2/3, 1, 2/3.
        result = calibrate([1.5, 2.0, 4.0], "asymmetry_T", calibration_fixture(),
                           self.REFERENCE)
        assert result.best_value == 2.0
        assert result.accuracy == pytest.approx(1.0)
        table = dict(result.table)
        assert table[1.5] == pytest.approx(2.0 / 3.0)
        assert table[4.0] == pytest.approx(2.0 / 3.0)

    def test_tie_goes_to_smallest_candidate(self):
        result = calibrate([3.5, 2.0], "asymmetry_T", calibration_fixture(),
                           self.REFERENCE)
        assert result.best_value == 2.0  # both reach accuracy 1

    def test_candidate_order_is_irrelevant(self):
        forward = calibrate([1.5, 2.0, 4.0], "asymmetry_T", calibration_fixture(),
                            self.REFERENCE)
        backward = calibrate([4.0, 2.0, 1.5], "asymmetry_T", calibration_fixture(),
                             self.REFERENCE)
        assert forward.best_value == backward.best_value
        assert sorted(forward.table) == sorted(backward.table)

    def test_relation_threshold_parameter(self):
        # At threshold 0.1 the weak (a2, b2) link (R = 0.42) survives and gets
        # typed identity, clashing with a reference that calls it none.
        reference = {
            ("a1", "b1"): P,
            ("a2", "b2"): RelationType.NONE,
            ("a1", "b2"): RelationType.NONE,
            ("a2", "b1"): RelationType.NONE,
        }
        result = calibrate([0.1, 0.5], "relation_threshold", calibration_fixture(),
                           reference)
        assert result.best_value == 0.5

    def test_empty_candidates_rejected(self):
        with pytest.raises(ValueError):
            calibrate([], "asymmetry_T", calibration_fixture(), self.REFERENCE)

    def test_unknown_parameter_rejected(self):
        with pytest.raises(ValueError):
            calibrate([2.0], "easy_threshold", calibration_fixture(), self.REFERENCE)
