import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra import numpy as hnp

from labellink.discovery import binarize, link_scores, rank_pairs
from labellink.model import DirectionalScoreMatrix, LinkScoreMatrix


def directional(from_space, to_space, rows, cols, values):
    values = np.asarray(values, dtype=np.float64)
    return DirectionalScoreMatrix(
        from_space, to_space, tuple(rows), tuple(cols), values,
        np.ones_like(values, dtype=np.int64),
    )


S_AB = directional("A", "B", ["a1", "a2"], ["b1", "b2"], [[0.8, 0.0], [0.2, 0.6]])
S_BA = directional("B", "A", ["b1", "b2"], ["a1", "a2"], [[0.4, 0.0], [0.0, 1.0]])


class TestLinkScores:
    def test_symmetric_average(self):
        R = link_scores(S_AB, S_BA)
        # R[a][b] = (S_ab[a][b] + S_ba[b][a]) / 2, hand-checked cell by cell
        np.testing.assert_allclose(R.values, [[0.6, 0.0], [0.1, 0.8]])
        assert R.labels_a == ("a1", "a2")
        assert R.labels_b == ("b1", "b2")

    def test_orientation_mismatch_rejected(self):
        with pytest.raises(ValueError, match="opposite"):
            link_scores(S_AB, S_AB)

    def test_label_order_mismatch_rejected(self):
        flipped = directional("B", "A", ["b2", "b1"], ["a1", "a2"], [[0.0, 1.0], [0.4, 0.0]])
        with pytest.raises(ValueError):
            link_scores(S_AB, flipped)

    @given(
        hnp.arrays(np.float64, (3, 2), elements=st.floats(0, 1)),
        hnp.arrays(np.float64, (2, 3), elements=st.floats(0, 1)),
    )
    @settings(max_examples=50, deadline=None)
    def test_swapping_inputs_transposes_result(self, ab, ba):
        s_ab = directional("A", "B", ["a1", "a2", "a3"], ["b1", "b2"], ab)
        s_ba = directional("B", "A", ["b1", "b2"], ["a1", "a2", "a3"], ba)
        forward = link_scores(s_ab, s_ba)
        backward = link_scores(s_ba, s_ab)
        np.testing.assert_array_equal(backward.values, forward.values.T)


class TestBinarize:
    R = LinkScoreMatrix("A", "B", ("a1", "a2"), ("b1", "b2"),
                        np.array([[0.6, 0.0], [0.25, 0.8]]))

    def test_strictly_greater(self):
        graph = binarize(self.R, 0.25)
        # 0.25 itself must not pass
        assert graph.pairs() == {("a1", "b1"), ("a2", "b2")}

    def test_zero_threshold_excludes_exact_zeros(self):
        graph = binarize(self.R, 0.0)
        assert ("a1", "b2") not in graph.pairs()
        assert len(graph.edges) == 3

    def test_strength_is_link_score(self):
        graph = binarize(self.R, 0.25)
        assert graph.edge("a2", "b2").strength == pytest.approx(0.8)

    def test_edges_start_untyped(self):
        graph = binarize(self.R, 0.25)
        assert all(e.type is None for e in graph.edges)

    def test_non_finite_threshold_rejected(self):
        with pytest.raises(ValueError):
            binarize(self.R, float("nan"))

    @given(
        hnp.arrays(np.float64, (3, 3), elements=st.floats(0, 1)),
        st.floats(min_value=0, max_value=1),
        st.floats(min_value=0, max_value=1),
    )
    @settings(max_examples=50, deadline=None)
    def test_raising_threshold_never_adds_edges(self, values, t1, t2):
        low, high = min(t1, t2), max(t1, t2)
        R = LinkScoreMatrix("A", "B", ("a1", "a2", "a3"), ("b1", "b2", "b3"), values)
        assert binarize(R, high).pairs() <= binarize(R, low).pairs()


class TestRankPairs:
    def test_descending_with_lexicographic_ties(self):
        R = LinkScoreMatrix("A", "B", ("a2", "a1"), ("b1", "b2"),
                            np.array([[0.5, 0.9], [0.5, 0.1]]))
        ranked = rank_pairs(R)
        assert ranked[0] == ("a2", "b2", 0.9)
        # the two 0.5 entries tie; (a1, b1) sorts before (a2, b1)
        assert [(a, b) for a, b, _ in ranked[1:3]] == [("a1", "b1"), ("a2", "b1")]
        assert ranked[3] == ("a1", "b2", 0.1)

    def test_covers_every_pair(self):
        R = LinkScoreMatrix("A", "B", ("a1", "a2"), ("b1", "b2", "b3"),
                            np.arange(6, dtype=np.float64).reshape(2, 3))
        assert len(rank_pairs(R)) == 6
