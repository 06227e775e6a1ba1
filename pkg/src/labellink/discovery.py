"""Link scores and binary relation discovery.

The symmetric link score R[a][b] averages the two directional scores; relations
are the pairs whose link score clears a threshold (strictly, so threshold 0
excludes exactly the zero-score pairs).
"""

from __future__ import annotations

import math

import numpy as np

from .model import (
    DirectionalScoreMatrix,
    LinkScoreMatrix,
    RelationEdge,
    RelationGraph,
)


def link_scores(
    S_ab: DirectionalScoreMatrix, S_ba: DirectionalScoreMatrix
) -> LinkScoreMatrix:
    """R[a][b] = (S_ab[a][b] + S_ba[b][a]) / 2."""
    if (
        S_ab.from_space != S_ba.to_space
        or S_ab.to_space != S_ba.from_space
        or S_ab.row_labels != S_ba.col_labels
        or S_ab.col_labels != S_ba.row_labels
    ):
        raise ValueError(
            "directional matrices do not cover the same two label spaces "
            f"in opposite directions: {S_ab.from_space}->{S_ab.to_space} vs "
            f"{S_ba.from_space}->{S_ba.to_space}"
        )
    return LinkScoreMatrix(
        space_a=S_ab.from_space,
        space_b=S_ab.to_space,
        labels_a=S_ab.row_labels,
        labels_b=S_ab.col_labels,
        values=(S_ab.values + S_ba.values.T) / 2.0,
    )


def binarize(R: LinkScoreMatrix, threshold: float) -> RelationGraph:
    """Edges are the pairs with R strictly above the threshold (strength = R)."""
    if not math.isfinite(threshold):
        raise ValueError("threshold must be finite")
    edges = []
    for i, a in enumerate(R.labels_a):
        for j, b in enumerate(R.labels_b):
            value = float(R.values[i, j])
            if value > threshold:
                edges.append(RelationEdge(a=a, b=b, strength=value))
    return RelationGraph(space_a=R.space_a, space_b=R.space_b, edges=tuple(edges))


def rank_pairs(R: LinkScoreMatrix) -> list[tuple[str, str, float]]:
    """All pairs ordered by descending strength; ties in (a, b) lexicographic order."""
    triples = [
        (a, b, float(R.values[i, j]))
        for i, a in enumerate(R.labels_a)
        for j, b in enumerate(R.labels_b)
    ]
    return sorted(triples, key=lambda t: (-t[2], t[0], t[1]))
