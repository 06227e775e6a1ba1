"""Directional score matrices from per-instance prediction records.

The central quantity is S[a][b]: the mean probability, over the easy instances
of label b (dataset B), that A's classifier assigns to its label a.  Records
come either from pixel-probability models or from 1-NN classification of
embeddings; both land in the same InstanceScoreRecord shape.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .model import (
    DirectionalScoreMatrix,
    EmbeddingRecord,
    InstanceScoreRecord,
    LabelSpace,
)

_MODES = ("pixel_probability", "embedding_1nn")


@dataclass(frozen=True)
class AggregationRequest:
    """How to turn records into a directional score matrix.

    In embedding mode an instance is easy iff its self prediction is exactly 1;
    in pixel-probability mode iff self_score > easy_threshold.
    """

    mode: str = "pixel_probability"
    easy_filter: bool = True
    easy_threshold: float = 0.5
    aggregation_mode: str = "mean"

    def __post_init__(self) -> None:
        if self.mode not in _MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.aggregation_mode not in ("mean", "max"):
            raise ValueError(f"unknown aggregation_mode {self.aggregation_mode!r}")

    def is_easy(self, record: InstanceScoreRecord) -> bool:
        if not self.easy_filter:
            return True
        if self.mode == "embedding_1nn":
            return record.self_score == 1.0
        return record.self_score > self.easy_threshold


def aggregate_directional(
    records: Sequence[InstanceScoreRecord],
    space_a: LabelSpace,
    space_b: LabelSpace,
    req: AggregationRequest,
    parallelism: int = 1,
) -> tuple[DirectionalScoreMatrix, list[str]]:
    """Average easy-instance foreign scores into S[a][b].

    ``records`` are instances of dataset B scored under A's labels.  Returns
    the matrix plus a report of labels with zero easy support (their columns
    are zero).  Record order does not matter: per-cell summation happens in
    sorted instance_id order, so results are bit-identical for any worker
    count.
    """
    if not records:
        raise ValueError("no records to aggregate")
    allowed = set(space_a.labels) | {space_a.background_label}
    for rec in records:
        unknown = set(rec.foreign_scores) - allowed
        if unknown:
            raise ValueError(
                f"{rec.instance_id}: foreign labels {sorted(unknown)} are not in "
                f"label space {space_a.dataset_id!r} (mixed label spaces?)"
            )
        if rec.true_label not in space_b:
            raise ValueError(
                f"{rec.instance_id}: true_label {rec.true_label!r} not in "
                f"label space {space_b.dataset_id!r}"
            )

    by_label: dict[str, list[InstanceScoreRecord]] = {b: [] for b in space_b.labels}
    for rec in records:
        by_label[rec.true_label].append(rec)

    n_rows = len(space_a.labels)

    def column(b: str) -> tuple[np.ndarray, int]:
        easy = sorted(
            (r for r in by_label[b] if req.is_easy(r)), key=lambda r: r.instance_id
        )
        if not easy:
            return np.zeros(n_rows), 0
        stacked = np.array(
            [[r.foreign_scores.get(a, 0.0) for a in space_a.labels] for r in easy],
            dtype=np.float64,
        )
        return np.sum(stacked, axis=0) / len(easy), len(easy)

    columns = _ordered_map(column, space_b.labels, parallelism)
    values = np.column_stack([c for c, _ in columns]) if columns else np.zeros((n_rows, 0))
    counts = np.array([n for _, n in columns], dtype=np.int64)
    support = np.tile(counts, (n_rows, 1))
    warnings = [
        f"label {b!r}: no easy instances, scores set to 0"
        for b, (_, n) in zip(space_b.labels, columns)
        if n == 0
    ]
    matrix = DirectionalScoreMatrix(
        from_space=space_a.dataset_id,
        to_space=space_b.dataset_id,
        row_labels=space_a.labels,
        col_labels=space_b.labels,
        values=values,
        support=support,
    )
    return matrix, warnings


def _ordered_map(func, items, parallelism: int) -> list:
    if parallelism <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=parallelism) as pool:
        return list(pool.map(func, items))


def _normalized(vectors: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(vectors, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    return vectors / norms


def nn_classify(
    queries: Sequence[EmbeddingRecord],
    references: Sequence[EmbeddingRecord],
    space_a: LabelSpace,
    parallelism: int = 1,
    source_dataset: str = "",
) -> list[InstanceScoreRecord]:
    """1-NN classification of embedded instances against reference embeddings.

    Distances are Euclidean on L2-normalized vectors (equivalent to cosine
    ranking).  Each query becomes a record whose foreign_scores are one-hot at
    the nearest reference's label; exact distance ties go to the reference
    with the lexicographically smallest instance_id.  self_score is filled
    with 1.0 — compute real self scores with :func:`self_scores_1nn`.
    """
    if not references:
        raise ValueError("no reference embeddings")
    dims = {len(r.vector) for r in references} | {len(q.vector) for q in queries}
    if len(dims) > 1:
        raise ValueError(f"embedding dimensions differ: {sorted(dims)}")
    for ref in references:
        if ref.true_label not in space_a:
            raise ValueError(
                f"{ref.instance_id}: reference label {ref.true_label!r} not in "
                f"label space {space_a.dataset_id!r}"
            )

    ref_matrix = _normalized(np.array([r.vector for r in references], dtype=np.float64))
    # Among equidistant references the smallest instance_id must win, so order
    # rows by id and take the first minimum.
    order = sorted(range(len(references)), key=lambda i: references[i].instance_id)
    ref_matrix = ref_matrix[order]
    ref_labels = [references[i].true_label for i in order]

    def classify(query: EmbeddingRecord) -> InstanceScoreRecord:
        q = _normalized(np.array([query.vector], dtype=np.float64))[0]
        distances = np.sum((ref_matrix - q) ** 2, axis=1)
        best = int(np.argmin(distances))  # first minimum == smallest id
        winner = ref_labels[best]
        scores = {label: 0.0 for label in space_a.labels}
        scores[space_a.background_label] = 0.0
        scores[winner] = 1.0
        return InstanceScoreRecord(
            instance_id=query.instance_id,
            source_dataset=source_dataset,
            true_label=query.true_label,
            self_score=1.0,
            foreign_scores=scores,
        )

    return _ordered_map(classify, list(queries), parallelism)


def self_scores_1nn(
    queries: Sequence[EmbeddingRecord],
    references: Sequence[EmbeddingRecord],
    space: LabelSpace,
    parallelism: int = 1,
) -> dict[str, float]:
    """Binary self scores: 1.0 iff 1-NN against the dataset's own references
    returns the instance's own label (the embedding-mode easy criterion)."""
    classified = nn_classify(queries, references, space, parallelism=parallelism)
    out: dict[str, float] = {}
    for query, rec in zip(queries, classified):
        predicted = max(rec.foreign_scores, key=lambda k: rec.foreign_scores[k])
        out[query.instance_id] = 1.0 if predicted == query.true_label else 0.0
    return out


def embedding_scores(
    queries: Sequence[EmbeddingRecord],
    foreign_references: Sequence[EmbeddingRecord],
    own_references: Sequence[EmbeddingRecord],
    foreign_space: LabelSpace,
    own_space: LabelSpace,
    parallelism: int = 1,
) -> list[InstanceScoreRecord]:
    """Complete embedding-mode records: one-hot foreign scores from 1-NN against
    the foreign dataset plus binary self scores from 1-NN against the own one."""
    self_scores = self_scores_1nn(queries, own_references, own_space, parallelism)
    records = nn_classify(
        queries,
        foreign_references,
        foreign_space,
        parallelism=parallelism,
        source_dataset=own_space.dataset_id,
    )
    return [
        InstanceScoreRecord(
            instance_id=r.instance_id,
            source_dataset=r.source_dataset,
            true_label=r.true_label,
            self_score=self_scores[r.instance_id],
            foreign_scores=r.foreign_scores,
        )
        for r in records
    ]


def max_over_pixels(pixel_scores: np.ndarray) -> np.ndarray:
    """Collapse a pixels × labels matrix to the column-wise maximum."""
    matrix = np.asarray(pixel_scores, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[0] == 0:
        raise ValueError("need at least one pixel row")
    return matrix.max(axis=0)


def mean_over_pixels(pixel_scores: np.ndarray) -> np.ndarray:
    """Collapse a pixels × labels matrix to the column-wise mean."""
    matrix = np.asarray(pixel_scores, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[0] == 0:
        raise ValueError("need at least one pixel row")
    return matrix.mean(axis=0)


def pixel_records_to_score_records(
    columns: Sequence[str],
    records: Iterable[Mapping],
    source_dataset: str,
    aggregation_mode: str = "mean",
) -> list[InstanceScoreRecord]:
    """Turn per-pixel score rows into per-instance records by column mean/max."""
    collapse = mean_over_pixels if aggregation_mode == "mean" else max_over_pixels
    out = []
    for rec in records:
        vector = collapse(rec["rows"])
        out.append(
            InstanceScoreRecord(
                instance_id=rec["instance_id"],
                source_dataset=source_dataset,
                true_label=rec["true_label"],
                self_score=float(rec.get("self_score", 1.0)),
                foreign_scores={c: float(v) for c, v in zip(columns, vector)},
            )
        )
    return out
