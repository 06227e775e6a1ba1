"""Ground-truth relations from relabel counts, manual overrides, and composition.

An instance relabeled with strictly more than half of its pixels mapped to an
intermediate label supports the (original, intermediate) pair.  Typed A↔M and
B↔M relations then compose through shared intermediate labels into direct
A↔B relations; chains the composition table cannot settle land on an explicit
needs-review list instead of being guessed.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .io import iter_jsonl, read_json, write_jsonl, _require
from .model import (
    InputError,
    RelationEdge,
    RelationGraph,
    RelationType,
    mirror_type,
)


@dataclass(frozen=True)
class RelabelRecord:
    """One instance's relabeling outcome against the intermediate label space."""

    instance_id: str
    original_label: str
    pixel_counts: Mapping[str, int]
    total_pixels: int

    def __post_init__(self) -> None:
        if self.total_pixels <= 0:
            raise ValueError(f"{self.instance_id}: total_pixels must be positive")
        for label, count in self.pixel_counts.items():
            if count < 0:
                raise ValueError(f"{self.instance_id}: negative count for {label!r}")
        if sum(self.pixel_counts.values()) > self.total_pixels:
            raise ValueError(
                f"{self.instance_id}: pixel counts exceed total_pixels"
            )


@dataclass(frozen=True)
class Override:
    """A manual correction to a derived candidate pair."""

    a: str
    m: str
    action: str  # "remove" | "set_type"
    type: RelationType | None = None
    why: str = ""

    def __post_init__(self) -> None:
        if self.action not in ("remove", "set_type"):
            raise ValueError(f"unknown override action {self.action!r}")
        if self.action == "set_type" and self.type is None:
            raise ValueError(f"override for ({self.a!r}, {self.m!r}) needs a type")


def derive_candidates(records: Sequence[RelabelRecord]) -> list[tuple[str, str, int]]:
    """Count instances relabeled by strict pixel majority to each intermediate label.

    An instance supports (original, m) iff pixel_counts[m] > total_pixels/2 —
    compared in integers, so exactly 50% never qualifies.  Returns (original,
    intermediate, count) sorted by pair; zero-count pairs don't appear.
    """
    counts: dict[tuple[str, str], int] = {}
    for rec in records:
        for m, pixels in rec.pixel_counts.items():
            if 2 * pixels > rec.total_pixels:
                key = (rec.original_label, m)
                counts[key] = counts.get(key, 0) + 1
                break  # >50% can hold for at most one label
    return [(a, m, n) for (a, m), n in sorted(counts.items())]


def candidate_graph(
    candidates: Sequence[tuple[str, str, int]], space_orig: str, space_intermediate: str
) -> RelationGraph:
    """Candidates as an untyped relation graph with counts as strengths."""
    return RelationGraph(
        space_a=space_orig,
        space_b=space_intermediate,
        edges=tuple(
            RelationEdge(a=a, b=m, strength=float(n)) for a, m, n in candidates
        ),
    )


def apply_overrides(graph: RelationGraph, overrides: Sequence[Override]) -> RelationGraph:
    """Remove or retype pairs; every override must hit an existing pair."""
    edges = {(e.a, e.b): e for e in graph.edges}
    for override in overrides:
        key = (override.a, override.m)
        if key not in edges:
            raise ValueError(
                f"override targets unknown pair ({override.a!r}, {override.m!r})"
            )
        if override.action == "remove":
            del edges[key]
        else:
            edges[key] = replace(edges[key], type=override.type, relaxed=False)
    # preserve original edge order, substituting retyped edges in place
    ordered = []
    for e in graph.edges:
        key = (e.a, e.b)
        if key in edges:
            ordered.append(edges[key])
    return RelationGraph(space_a=graph.space_a, space_b=graph.space_b, edges=tuple(ordered))


@dataclass(frozen=True)
class ChainVerdict:
    """What one intermediate label says about a pair (a, b)."""

    intermediate: str
    type_am: RelationType
    type_bm: RelationType
    result: RelationType | None  # None = needs review
    strength: float


@dataclass(frozen=True)
class ReviewItem:
    a: str
    b: str
    chains: tuple[ChainVerdict, ...]


def _chain_type(type_am: RelationType, type_bm: RelationType) -> RelationType | None:
    """Compose a→m with m→b (the second leg is stored from b's side and mirrored).

    identity∘identity → identity; chains of identity/child → child; chains of
    identity/parent → parent; a part_of leg wins outright; anything with
    overlap, or a parent-then-child chain, is undecidable → None.
    """
    if RelationType.PART_OF in (type_am, type_bm):
        return RelationType.PART_OF
    type_mb = mirror_type(type_bm)  # m's relation to b
    legs = (type_am, type_mb)
    if RelationType.OVERLAP in legs:
        return None
    if all(t in (RelationType.IDENTITY, RelationType.CHILD) for t in legs):
        if legs == (RelationType.IDENTITY, RelationType.IDENTITY):
            return RelationType.IDENTITY
        return RelationType.CHILD
    if all(t in (RelationType.IDENTITY, RelationType.PARENT) for t in legs):
        return RelationType.PARENT
    return None  # mixed parent/child directions


def compose(
    rel_am: RelationGraph, rel_bm: RelationGraph
) -> tuple[RelationGraph, list[ReviewItem]]:
    """Compose typed A↔M and B↔M relations into A↔B through shared labels.

    Every (a, b) pair sharing at least one intermediate ends up either as a
    typed edge (all chains agree) or as a needs-review item (any chain is
    undecidable, or chains disagree).  Edge strength is the best chain's
    weakest leg.  Legs typed `none` assert no relation and form no chains.
    """
    if rel_am.space_b != rel_bm.space_b:
        raise ValueError(
            f"intermediate spaces differ: {rel_am.space_b!r} vs {rel_bm.space_b!r}"
        )
    for graph in (rel_am, rel_bm):
        for edge in graph.edges:
            if edge.type is None:
                raise ValueError(
                    f"edge ({edge.a!r}, {edge.b!r}) is untyped; composition needs typed inputs"
                )

    bm_by_m: dict[str, list[RelationEdge]] = {}
    for edge in rel_bm.edges:
        bm_by_m.setdefault(edge.b, []).append(edge)

    verdicts: dict[tuple[str, str], list[ChainVerdict]] = {}
    for am_edge in rel_am.edges:
        if am_edge.type is RelationType.NONE:
            continue
        for bm_edge in bm_by_m.get(am_edge.b, []):
            if bm_edge.type is RelationType.NONE:
                continue
            verdicts.setdefault((am_edge.a, bm_edge.a), []).append(
                ChainVerdict(
                    intermediate=am_edge.b,
                    type_am=am_edge.type,
                    type_bm=bm_edge.type,
                    result=_chain_type(am_edge.type, bm_edge.type),
                    strength=min(am_edge.strength, bm_edge.strength),
                )
            )

    edges: list[RelationEdge] = []
    review: list[ReviewItem] = []
    for (a, b), chains in sorted(verdicts.items()):
        types = {c.result for c in chains}
        if None in types or len(types) > 1:
            review.append(ReviewItem(a=a, b=b, chains=tuple(chains)))
        else:
            (agreed,) = types
            strength = max(c.strength for c in chains)
            edges.append(RelationEdge(a=a, b=b, strength=strength, type=agreed))
    graph = RelationGraph(space_a=rel_am.space_a, space_b=rel_bm.space_a, edges=tuple(edges))
    return graph, review


# --- file formats ---------------------------------------------------------------

def load_relabel_records(path: str | Path) -> list[RelabelRecord]:
    records = []
    for lineno, obj in iter_jsonl(path):
        where = f"{path}:{lineno}"
        counts = _require(obj, "pixel_counts", where)
        if not isinstance(counts, dict):
            raise InputError(f"{where}: 'pixel_counts' must be an object")
        try:
            records.append(
                RelabelRecord(
                    instance_id=str(_require(obj, "instance_id", where)),
                    original_label=str(_require(obj, "original_label", where)),
                    pixel_counts={str(k): int(v) for k, v in counts.items()},
                    total_pixels=int(_require(obj, "total_pixels", where)),
                )
            )
        except (TypeError, ValueError) as exc:
            raise InputError(f"{where}: {exc}") from None
    return records


def load_overrides(path: str | Path) -> list[Override]:
    obj = read_json(path)
    if not isinstance(obj, list):
        raise InputError(f"{path}: expected a JSON list of overrides")
    overrides = []
    for index, entry in enumerate(obj):
        where = f"{path}[{index}]"
        type_name = entry.get("type")
        try:
            overrides.append(
                Override(
                    a=str(_require(entry, "a", where)),
                    m=str(_require(entry, "m", where)),
                    action=str(_require(entry, "action", where)),
                    type=RelationType(type_name) if type_name is not None else None,
                    why=str(entry.get("why", "")),
                )
            )
        except ValueError as exc:
            raise InputError(f"{where}: {exc}") from None
    return overrides


def save_review_items(items: Iterable[ReviewItem], path: str | Path) -> None:
    write_jsonl(
        path,
        (
            {
                "a": item.a,
                "b": item.b,
                "chains": [
                    {
                        "via": c.intermediate,
                        "a_type": c.type_am.value,
                        "b_type": c.type_bm.value,
                        "strength": float(c.strength),
                    }
                    for c in item.chains
                ],
            }
            for item in items
        ),
    )
