"""Scoring predicted relations against ground truth.

AUC here is average precision over a ranking of all label pairs, with
equal-strength groups entering the curve atomically so tie order cannot affect
the result.  Type accuracy is per-ground-truth-type recall, macro-averaged over
the types present in the ground truth.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .model import RelationGraph, RelationType

PairTypes = Mapping[tuple[str, str], RelationType]


@dataclass
class PRResult:
    points: list[tuple[float, float]]  # (recall, precision), one per tie group
    auc: float


def full_type_map(
    graph: RelationGraph,
    labels_a: Sequence[str],
    labels_b: Sequence[str],
) -> dict[tuple[str, str], RelationType]:
    """Expand a typed graph to every label pair, defaulting to `none`."""
    out = {(a, b): RelationType.NONE for a in labels_a for b in labels_b}
    for edge in graph.edges:
        if edge.type is None:
            raise ValueError(f"edge ({edge.a!r}, {edge.b!r}) is untyped")
        if (edge.a, edge.b) not in out:
            raise ValueError(
                f"edge ({edge.a!r}, {edge.b!r}) lies outside the given label spaces"
            )
        out[(edge.a, edge.b)] = edge.type
    return out


def pr_curve(
    ranked: Sequence[tuple[str, str, float]],
    gt: set[tuple[str, str]],
) -> PRResult:
    """Precision-recall points and average precision for a full ranking.

    ``ranked`` must cover every label pair exactly once, in descending
    strength order; ``gt`` is the set of truly related pairs.  Pairs of equal
    strength enter as one group, contributing a single PR point; AP sums, over
    positives, the precision at their group's end, divided by total positives.
    """
    pairs = [(a, b) for a, b, _ in ranked]
    seen_pairs = set(pairs)
    if len(seen_pairs) != len(pairs):
        raise ValueError("ranking lists some pair more than once")
    unknown = gt - seen_pairs
    if unknown:
        raise ValueError(f"ground truth references pairs missing from the ranking: {sorted(unknown)[:5]}")
    total_positives = len(gt)
    if total_positives == 0:
        raise ValueError("no ground-truth positives; recall is undefined")

    points: list[tuple[float, float]] = []
    ap_sum = 0.0
    seen = 0
    true_positives = 0
    index = 0
    while index < len(ranked):
        # one group = maximal run of equal strengths
        strength = ranked[index][2]
        group_end = index
        while group_end < len(ranked) and ranked[group_end][2] == strength:
            group_end += 1
        group = ranked[index:group_end]
        group_positives = sum(1 for a, b, _ in group if (a, b) in gt)
        seen += len(group)
        true_positives += group_positives
        precision = true_positives / seen
        recall = true_positives / total_positives
        points.append((recall, precision))
        ap_sum += group_positives * precision
        index = group_end

    return PRResult(points=points, auc=ap_sum / total_positives)


def type_accuracy(
    pred: PairTypes, gt: PairTypes
) -> tuple[dict[RelationType, float], float]:
    """Per-ground-truth-type recall and its unweighted mean.

    Both mappings default missing pairs to `none`; the universe is the union
    of their keys.  Only types actually present in the ground truth enter the
    macro average.
    """
    universe = set(gt) | set(pred)
    if not universe:
        raise ValueError("no pairs to evaluate")
    counts: dict[RelationType, int] = {}
    correct: dict[RelationType, int] = {}
    for pair in universe:
        gt_type = gt.get(pair, RelationType.NONE)
        counts[gt_type] = counts.get(gt_type, 0) + 1
        if pred.get(pair, RelationType.NONE) is gt_type:
            correct[gt_type] = correct.get(gt_type, 0) + 1
    recall = {t: correct.get(t, 0) / n for t, n in counts.items()}
    macro = sum(recall.values()) / len(recall)
    return recall, macro


def confusion_matrix(
    pred: PairTypes, gt: PairTypes
) -> dict[tuple[RelationType, RelationType], int]:
    """Counts of (ground-truth type, predicted type) over the pair universe."""
    universe = set(gt) | set(pred)
    counts: dict[tuple[RelationType, RelationType], int] = {}
    for pair in universe:
        key = (gt.get(pair, RelationType.NONE), pred.get(pair, RelationType.NONE))
        counts[key] = counts.get(key, 0) + 1
    return counts
