"""What discovered relations are good for: predicting transfer-learning gains,
refining coarse annotations, and inspecting shared embedding space clusters."""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np
from sklearn.cluster import KMeans

from .model import (
    DirectionalScoreMatrix,
    EmbeddingRecord,
    InputError,
    InstanceScoreRecord,
    RelationGraph,
    RelationType,
)

DEFAULT_CLUSTER_SEED = 17


@dataclass(frozen=True)
class TransferGainRecord:
    """Per-label performance difference between two training setups (IoU points)."""

    target_label: str
    gain: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.gain):
            raise ValueError(f"gain for {self.target_label!r} must be finite")


def link_strength(
    S_ab: DirectionalScoreMatrix,
    relations: RelationGraph,
    b: str,
    type_filter: set[RelationType] | None = None,
) -> float:
    """Mean directional score from all labels related to b (optionally only
    certain relation types); 0 with a warning when nothing is related."""
    if b not in S_ab.col_labels:
        raise ValueError(f"label {b!r} not in {S_ab.to_space!r}")
    related = [
        e.a
        for e in relations.edges
        if e.b == b and (type_filter is None or e.type in type_filter)
    ]
    if not related:
        warnings.warn(f"label {b!r} has no related labels; link strength set to 0")
        return 0.0
    return float(np.mean([S_ab.value(a, b) for a in related]))


def all_link_strengths(
    S_ab: DirectionalScoreMatrix,
    relations: RelationGraph,
    type_filter: set[RelationType] | None = None,
) -> dict[str, float]:
    return {
        b: link_strength(S_ab, relations, b, type_filter) for b in S_ab.col_labels
    }


@dataclass
class GainGroups:
    """Mean transfer gain for the weakest-linked, middle, and strongest-linked labels."""

    low: tuple[str, ...]
    mid: tuple[str, ...]
    top: tuple[str, ...]
    low_mean: float
    mid_mean: float | None  # None when 2n covers every label
    top_mean: float


def group_gains(
    strengths: Mapping[str, float],
    gains: Sequence[TransferGainRecord],
    n: int,
) -> GainGroups:
    """Split labels by link strength into low-n / middle / top-n and average gains."""
    if n < 1:
        raise ValueError("group size n must be >= 1")
    if 2 * n > len(strengths):
        raise ValueError(f"2n = {2 * n} exceeds the {len(strengths)} labels")
    gain_map = {g.target_label: g.gain for g in gains}
    missing = sorted(set(strengths) - set(gain_map))
    if missing:
        raise ValueError(f"no gain recorded for label(s): {', '.join(missing)}")
    ordered = sorted(strengths, key=lambda label: (strengths[label], label))
    low, mid, top = ordered[:n], ordered[n:-n], ordered[-n:]

    def mean(labels: Sequence[str]) -> float:
        return float(np.mean([gain_map[l] for l in labels]))

    return GainGroups(
        low=tuple(low),
        mid=tuple(mid),
        top=tuple(top),
        low_mean=mean(low),
        mid_mean=mean(mid) if mid else None,
        top_mean=mean(top),
    )


@dataclass
class RefineResult:
    assignments: dict[str, str]  # instance_id -> fine label
    confusion: dict[tuple[str, str], int] | None  # (reference, assigned) counts
    accuracy: float | None


def refine_labels(
    parent: str,
    records: Sequence[InstanceScoreRecord],
    relations: RelationGraph,
    reference: Mapping[str, str] | None = None,
) -> RefineResult:
    """Assign each parent-labeled instance the strongest-scoring child label.

    The argmax is restricted to labels related to ``parent`` as children;
    scores on unrelated labels are ignored.  Ties go to the alphabetically
    first child.  With reference labels, also reports a confusion table and
    top-1 accuracy.
    """
    children = sorted(
        e.b for e in relations.edges if e.a == parent and e.type is RelationType.PARENT
    )
    if not children:
        raise ValueError(f"label {parent!r} has no child relations to refine into")

    assignments: dict[str, str] = {}
    for rec in records:
        # max() keeps the first of equal keys, and children is sorted
        best = max(children, key=lambda c: rec.foreign_scores.get(c, 0.0))
        assignments[rec.instance_id] = best

    confusion: dict[tuple[str, str], int] | None = None
    accuracy: float | None = None
    if reference is not None:
        confusion = {}
        hits = 0
        for rec in records:
            if rec.instance_id not in reference:
                raise ValueError(f"no reference label for instance {rec.instance_id!r}")
            truth = reference[rec.instance_id]
            assigned = assignments[rec.instance_id]
            confusion[(truth, assigned)] = confusion.get((truth, assigned), 0) + 1
            hits += assigned == truth
        accuracy = hits / len(records) if records else 0.0
    return RefineResult(assignments=assignments, confusion=confusion, accuracy=accuracy)


@dataclass
class ClusterResult:
    assignments: dict[tuple[str, str], int]  # (dataset, instance_id) -> cluster
    composition: dict[int, dict[str, int]]  # cluster -> dataset -> count


def cluster_embeddings(
    records_by_dataset: Mapping[str, Sequence[EmbeddingRecord]],
    k: int,
    seed: int = DEFAULT_CLUSTER_SEED,
) -> ClusterResult:
    """k-means over the pooled embeddings with per-cluster dataset composition.

    Deterministic: k-means++ seeded from ``seed``, datasets pooled in sorted
    order.
    """
    datasets = sorted(records_by_dataset)
    keys: list[tuple[str, str]] = []
    rows: list[tuple[float, ...]] = []
    for dataset in datasets:
        for rec in records_by_dataset[dataset]:
            keys.append((dataset, rec.instance_id))
            rows.append(rec.vector)
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > len(rows):
        raise ValueError(f"k = {k} exceeds the {len(rows)} records")
    dims = {len(r) for r in rows}
    if len(dims) > 1:
        raise ValueError(f"embedding dimensions differ across datasets: {sorted(dims)}")

    matrix = np.array(rows, dtype=np.float64)
    labels = KMeans(n_clusters=k, n_init=10, random_state=seed).fit_predict(matrix)

    assignments = {key: int(cluster) for key, cluster in zip(keys, labels)}
    composition: dict[int, dict[str, int]] = {c: {} for c in range(k)}
    for (dataset, _), cluster in zip(keys, labels):
        per = composition[int(cluster)]
        per[dataset] = per.get(dataset, 0) + 1
    return ClusterResult(assignments=assignments, composition=composition)


def load_gains_csv(path: str | Path) -> list[TransferGainRecord]:
    """Read a label,gain CSV (header row required)."""
    records = []
    with open(path, "r", encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:2]] != ["label", "gain"]:
            raise InputError(f"{path}: expected header 'label,gain'")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) < 2:
                raise InputError(f"{path}:{lineno}: expected 'label,gain'")
            try:
                records.append(TransferGainRecord(target_label=row[0], gain=float(row[1])))
            except ValueError as exc:
                raise InputError(f"{path}:{lineno}: {exc}") from None
    return records
