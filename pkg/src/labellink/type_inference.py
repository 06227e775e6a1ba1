"""Relation typing: set-theory rules, score asymmetry, and their combination
with taxonomy predictions, plus threshold calibration.

Set-theory typing exploits within-dataset mutual exclusivity: the degree
structure of the binary graph alone determines identity/parent/child/overlap.
Score asymmetry compares the two directional scores and can never produce
overlap.  The combined method adjusts the asymmetry threshold per edge using
what a taxonomy predicts for that pair.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

from .model import (
    DirectionalScoreMatrix,
    LinkScoreMatrix,
    PipelineConfig,
    RelationEdge,
    RelationGraph,
    RelationType,
)
from . import discovery, evaluation

PairTypes = Mapping[tuple[str, str], RelationType]


def set_theory_types(graph: RelationGraph) -> RelationGraph:
    """Type every edge from the degree structure of the graph.

    Strict rules, in order: identity when both endpoints have no other edge;
    parent when b is a's only-partnered neighbor and a has a second neighbor
    that is also only partnered with a (child with the roles swapped); overlap
    when both endpoints have several edges.  Edges the strict rules leave
    undefined fall back to "the multi-edge endpoint is the broader concept"
    and are flagged ``relaxed``.
    """
    degree_a = {a: graph.degree_a(a) for a in {e.a for e in graph.edges}}
    degree_b = {b: graph.degree_b(b) for b in {e.b for e in graph.edges}}

    typed = []
    for edge in graph.edges:
        da, db = degree_a[edge.a], degree_b[edge.b]
        if da == 1 and db == 1:
            rel, relaxed = RelationType.IDENTITY, False
        elif db == 1 and _sole_partner_count_a(graph, edge.a, degree_b) >= 2:
            rel, relaxed = RelationType.PARENT, False
        elif da == 1 and _sole_partner_count_b(graph, edge.b, degree_a) >= 2:
            rel, relaxed = RelationType.CHILD, False
        elif da >= 2 and db >= 2:
            rel, relaxed = RelationType.OVERLAP, False
        elif da >= 2:  # b has degree 1 but a lacks a second exclusive partner
            rel, relaxed = RelationType.PARENT, True
        else:
            rel, relaxed = RelationType.CHILD, True
        typed.append(replace(edge, type=rel, relaxed=relaxed))
    return RelationGraph(space_a=graph.space_a, space_b=graph.space_b, edges=tuple(typed))


def _sole_partner_count_a(graph: RelationGraph, a: str, degree_b: dict[str, int]) -> int:
    """How many of a's neighbors have no partner besides a."""
    return sum(1 for b in graph.neighbors_of_a(a) if degree_b[b] == 1)


def _sole_partner_count_b(graph: RelationGraph, b: str, degree_a: dict[str, int]) -> int:
    return sum(1 for a in graph.neighbors_of_b(b) if degree_a[a] == 1)


def _classify_by_ratio(s_ab: float, s_ba: float, T: float, a: str, b: str) -> RelationType:
    if s_ab == 0.0 and s_ba == 0.0:
        raise ValueError(
            f"edge ({a!r}, {b!r}) has both directional scores 0; "
            "it cannot satisfy a positive link threshold"
        )
    # A zero denominator with a positive numerator counts as an infinite ratio.
    if s_ba == 0.0 or (s_ab / s_ba) > T:
        return RelationType.PARENT
    if s_ab == 0.0 or (s_ba / s_ab) > T:
        return RelationType.CHILD
    return RelationType.IDENTITY


def asymmetry_types(
    graph: RelationGraph,
    S_ab: DirectionalScoreMatrix,
    S_ba: DirectionalScoreMatrix,
    T: float,
    parallelism: int = 1,
) -> RelationGraph:
    """Type edges by the ratio of directional scores (never overlap).

    parent if S_ab/S_ba > T, child if S_ba/S_ab > T, identity otherwise.
    """
    if not T > 1.0:
        raise ValueError("asymmetry threshold T must be > 1")

    def classify(edge: RelationEdge) -> RelationEdge:
        s_ab = S_ab.value(edge.a, edge.b)
        s_ba = S_ba.value(edge.b, edge.a)
        return replace(edge, type=_classify_by_ratio(s_ab, s_ba, T, edge.a, edge.b), relaxed=False)

    typed = _ordered_map(classify, graph.edges, parallelism)
    return RelationGraph(space_a=graph.space_a, space_b=graph.space_b, edges=tuple(typed))


_BOOSTED = (
    RelationType.IDENTITY,
    RelationType.PARENT,
    RelationType.CHILD,
    RelationType.OVERLAP,
)


def combine_strengths(
    R: LinkScoreMatrix, taxonomy_relations: PairTypes, n: float
) -> LinkScoreMatrix:
    """Multiply R[a][b] by n exactly where the taxonomy predicts a relation."""
    if n < 1.0:
        raise ValueError("boost factor n must be >= 1")
    values = R.values.copy()
    for i, a in enumerate(R.labels_a):
        for j, b in enumerate(R.labels_b):
            if taxonomy_relations.get((a, b)) in _BOOSTED:
                values[i, j] *= n
    return LinkScoreMatrix(
        space_a=R.space_a,
        space_b=R.space_b,
        labels_a=R.labels_a,
        labels_b=R.labels_b,
        values=values,
    )


def combine_types(
    graph: RelationGraph,
    S_ab: DirectionalScoreMatrix,
    S_ba: DirectionalScoreMatrix,
    T: float,
    taxonomy_relations: PairTypes,
    m: float,
    parallelism: int = 1,
) -> RelationGraph:
    """Asymmetry typing with a per-edge threshold nudged by the taxonomy.

    T' = T*m where the taxonomy says identity (harder to call parent/child),
    T' = T/m where it says parent or child (easier), T' = T otherwise.
    """
    if m < 1.0:
        raise ValueError("threshold factor m must be >= 1")
    if not T > 1.0:
        raise ValueError("asymmetry threshold T must be > 1")

    def classify(edge: RelationEdge) -> RelationEdge:
        hint = taxonomy_relations.get((edge.a, edge.b))
        if hint is RelationType.IDENTITY:
            effective = T * m
        elif hint in (RelationType.PARENT, RelationType.CHILD):
            effective = T / m
        else:
            effective = T
        s_ab = S_ab.value(edge.a, edge.b)
        s_ba = S_ba.value(edge.b, edge.a)
        return replace(
            edge, type=_classify_by_ratio(s_ab, s_ba, effective, edge.a, edge.b), relaxed=False
        )

    typed = _ordered_map(classify, graph.edges, parallelism)
    return RelationGraph(space_a=graph.space_a, space_b=graph.space_b, edges=tuple(typed))


def _ordered_map(func, items, parallelism: int) -> list:
    if parallelism <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=parallelism) as pool:
        return list(pool.map(func, items))


@dataclass
class CalibrationInputs:
    """Everything needed to rerun discovery + typing for one candidate value."""

    S_ab: DirectionalScoreMatrix
    S_ba: DirectionalScoreMatrix
    method: str = "asymmetry"  # set-theory | asymmetry | combined
    config: PipelineConfig = field(default_factory=PipelineConfig)
    taxonomy_relations: PairTypes | None = None


@dataclass
class CalibrationResult:
    best_value: float
    accuracy: float
    table: list[tuple[float, float]]  # (candidate, macro accuracy)


def predict_types(
    inputs: CalibrationInputs,
    relation_threshold: float | None = None,
    asymmetry_T: float | None = None,
) -> dict[tuple[str, str], RelationType]:
    """Full discovery + typing pass, returning types over the whole pair universe
    (unrelated pairs become `none`)."""
    cfg = inputs.config
    threshold = cfg.relation_threshold if relation_threshold is None else relation_threshold
    T = cfg.asymmetry_T if asymmetry_T is None else asymmetry_T
    taxonomy = inputs.taxonomy_relations or {}

    R = discovery.link_scores(inputs.S_ab, inputs.S_ba)
    if inputs.method == "combined":
        R = combine_strengths(R, taxonomy, cfg.taxonomy_boost_n)
    graph = discovery.binarize(R, threshold)
    if inputs.method == "set-theory":
        typed = set_theory_types(graph)
    elif inputs.method == "asymmetry":
        typed = asymmetry_types(graph, inputs.S_ab, inputs.S_ba, T)
    elif inputs.method == "combined":
        typed = combine_types(
            graph, inputs.S_ab, inputs.S_ba, T, taxonomy, cfg.taxonomy_T_factor_m
        )
    else:
        raise ValueError(f"unknown typing method {inputs.method!r}")
    return evaluation.full_type_map(typed, R.labels_a, R.labels_b)


def calibrate(
    candidate_values: Sequence[float],
    parameter: str,
    inputs: CalibrationInputs,
    reference_types: PairTypes,
) -> CalibrationResult:
    """Pick the candidate value maximizing macro type accuracy against a
    reference typing (ties go to the smallest candidate)."""
    if not candidate_values:
        raise ValueError("no candidate values")
    if parameter not in ("relation_threshold", "asymmetry_T"):
        raise ValueError(f"unknown parameter {parameter!r}")

    table: list[tuple[float, float]] = []
    best_value: float | None = None
    best_accuracy = -1.0
    for value in sorted(candidate_values):
        if parameter == "relation_threshold":
            predicted = predict_types(inputs, relation_threshold=value)
        else:
            predicted = predict_types(inputs, asymmetry_T=value)
        _, macro = evaluation.type_accuracy(predicted, reference_types)
        table.append((value, macro))
        if macro > best_accuracy:
            best_value, best_accuracy = value, macro
    assert best_value is not None
    return CalibrationResult(best_value=best_value, accuracy=best_accuracy, table=table)
