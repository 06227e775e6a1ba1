"""Language-side relation prediction: taxonomy graphs and word embeddings.

A taxonomy is a DAG of synsets with hypernym (parent → child) edges and a map
from (dataset, label) to synset.  Relations follow from graph structure:
identity (same synset), parent/child (strict ancestry), overlap (shared
descendant).  Path similarity 1/(1+d) uses the shortest undirected path.

Word-embedding similarity is plain cosine between mean-of-word vectors; being
symmetric, it supports discovery and set-theory typing but says nothing about
direction.
"""

from __future__ import annotations

import re
import threading
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

import numpy as np

from .io import read_json, _require
from .model import (
    InputError,
    LabelLinkError,
    LabelSpace,
    LinkScoreMatrix,
    RelationType,
)

UNMAPPED_SYNSET = "__unmapped__"

LabelRef = tuple[str, str]  # (dataset_id, label)


class UnmappedLabelError(LabelLinkError):
    """A label has no usable synset mapping."""


@dataclass(eq=False)
class TaxonomyGraph:
    """DAG of synsets with hypernym edges and a label → synset mapping."""

    synsets: frozenset[str]
    hypernym_edges: frozenset[tuple[str, str]]
    label_map: Mapping[LabelRef, str]

    def __post_init__(self) -> None:
        self.synsets = frozenset(self.synsets)
        self.hypernym_edges = frozenset(
            (str(p), str(c)) for p, c in self.hypernym_edges
        )
        for parent, child in self.hypernym_edges:
            for node in (parent, child):
                if node not in self.synsets:
                    raise ValueError(f"edge endpoint {node!r} is not a declared synset")
        for ref, synset in self.label_map.items():
            if synset != UNMAPPED_SYNSET and synset not in self.synsets:
                raise ValueError(f"label {ref!r} maps to unknown synset {synset!r}")
        self._children: dict[str, list[str]] = {s: [] for s in self.synsets}
        self._undirected: dict[str, list[str]] = {s: [] for s in self.synsets}
        for parent, child in sorted(self.hypernym_edges):
            self._children[parent].append(child)
            self._undirected[parent].append(child)
            self._undirected[child].append(parent)
        self._assert_acyclic()
        self._descendants: dict[str, frozenset[str]] = {}
        self._distances: dict[str, dict[str, int]] = {}
        self._lock = threading.Lock()

    def _assert_acyclic(self) -> None:
        indegree = {s: 0 for s in self.synsets}
        for _, child in self.hypernym_edges:
            indegree[child] += 1
        queue = deque(s for s, d in indegree.items() if d == 0)
        visited = 0
        while queue:
            node = queue.popleft()
            visited += 1
            for child in self._children[node]:
                indegree[child] -= 1
                if indegree[child] == 0:
                    queue.append(child)
        if visited != len(self.synsets):
            raise ValueError("hypernym edges contain a directed cycle")

    def synset_of(self, ref: LabelRef, unmapped_ok: bool = False) -> str | None:
        """Resolve a (dataset, label) pair; None means 'treat as unmapped'."""
        if ref not in self.label_map:
            raise UnmappedLabelError(f"label {ref[1]!r} of dataset {ref[0]!r} has no synset mapping")
        synset = self.label_map[ref]
        if synset == UNMAPPED_SYNSET:
            if unmapped_ok:
                return None
            raise UnmappedLabelError(
                f"label {ref[1]!r} of dataset {ref[0]!r} is mapped to the unmapped sentinel"
            )
        return synset

    def descendants_with_self(self, synset: str) -> frozenset[str]:
        """All synsets reachable over hypernym edges, including the start node."""
        with self._lock:
            cached = self._descendants.get(synset)
        if cached is not None:
            return cached
        seen = {synset}
        stack = [synset]
        while stack:
            node = stack.pop()
            for child in self._children[node]:
                if child not in seen:
                    seen.add(child)
                    stack.append(child)
        result = frozenset(seen)
        with self._lock:
            self._descendants[synset] = result
        return result

    def is_strict_ancestor(self, ancestor: str, descendant: str) -> bool:
        return ancestor != descendant and descendant in self.descendants_with_self(ancestor)

    def undirected_distance(self, start: str, goal: str) -> int | None:
        """Shortest path length ignoring edge direction; None if disconnected."""
        if start == goal:
            return 0
        with self._lock:
            cached = self._distances.get(start)
        if cached is None:
            cached = {start: 0}
            queue = deque([start])
            while queue:
                node = queue.popleft()
                for neighbor in self._undirected[node]:
                    if neighbor not in cached:
                        cached[neighbor] = cached[node] + 1
                        queue.append(neighbor)
            with self._lock:
                self._distances[start] = cached
        return cached.get(goal)


def load_taxonomy(path: str | Path) -> TaxonomyGraph:
    """Read a taxonomy file: synsets, hypernym edges, and a "dataset/label" map."""
    obj = read_json(path)
    where = str(path)
    synsets = _require(obj, "synsets", where)
    edges = _require(obj, "hypernym_edges", where)
    raw_map = _require(obj, "label_map", where)
    if not isinstance(raw_map, dict):
        raise InputError(f"{where}: 'label_map' must be an object")
    label_map: dict[LabelRef, str] = {}
    for key, synset in raw_map.items():
        if "/" not in key:
            raise InputError(f"{where}: label_map key {key!r} is not 'dataset/label'")
        dataset, label = key.split("/", 1)
        label_map[(dataset, label)] = str(synset)
    try:
        return TaxonomyGraph(
            synsets=frozenset(str(s) for s in synsets),
            hypernym_edges=frozenset((e[0], e[1]) for e in edges),
            label_map=label_map,
        )
    except (ValueError, IndexError, TypeError) as exc:
        raise InputError(f"{where}: {exc}") from None


def taxonomy_relation(
    tax: TaxonomyGraph, a: LabelRef, b: LabelRef, unmapped_ok: bool = False
) -> RelationType:
    """Relation type implied by the taxonomy for two mapped labels.

    Checked in order: identity (same synset), parent/child (strict ancestry),
    overlap (some synset reachable from both — ancestral pairs never get
    here), none.
    """
    sa = tax.synset_of(a, unmapped_ok)
    sb = tax.synset_of(b, unmapped_ok)
    if sa is None or sb is None:
        return RelationType.NONE
    if sa == sb:
        return RelationType.IDENTITY
    if tax.is_strict_ancestor(sa, sb):
        return RelationType.PARENT
    if tax.is_strict_ancestor(sb, sa):
        return RelationType.CHILD
    if tax.descendants_with_self(sa) & tax.descendants_with_self(sb):
        return RelationType.OVERLAP
    return RelationType.NONE


def path_similarity(
    tax: TaxonomyGraph, a: LabelRef, b: LabelRef, unmapped_ok: bool = False
) -> float:
    """1/(1+d) for the shortest undirected synset distance d; 0 if disconnected."""
    sa = tax.synset_of(a, unmapped_ok)
    sb = tax.synset_of(b, unmapped_ok)
    if sa is None or sb is None:
        return 0.0
    distance = tax.undirected_distance(sa, sb)
    if distance is None:
        return 0.0
    return 1.0 / (1.0 + distance)


def taxonomy_strength(
    tax: TaxonomyGraph, a: LabelRef, b: LabelRef, unmapped_ok: bool = False
) -> float:
    """Path similarity, plus 1 when the taxonomy predicts a relation.

    Identity pairs (distance 0) therefore score exactly 2.
    """
    relation = taxonomy_relation(tax, a, b, unmapped_ok)
    similarity = path_similarity(tax, a, b, unmapped_ok)
    if relation in (
        RelationType.IDENTITY,
        RelationType.PARENT,
        RelationType.CHILD,
        RelationType.OVERLAP,
    ):
        return similarity + 1.0
    return similarity


def relate_spaces(
    tax: TaxonomyGraph,
    space_a: LabelSpace,
    space_b: LabelSpace,
    unmapped_ok: bool = False,
) -> tuple[dict[tuple[str, str], RelationType], LinkScoreMatrix]:
    """Taxonomy predictions for every label pair of two spaces.

    Returns the type per (label_a, label_b) pair and a strength matrix
    (taxonomy_strength values, in [0, 2])."""
    types: dict[tuple[str, str], RelationType] = {}
    values = np.zeros((len(space_a.labels), len(space_b.labels)))
    for i, la in enumerate(space_a.labels):
        for j, lb in enumerate(space_b.labels):
            ra = (space_a.dataset_id, la)
            rb = (space_b.dataset_id, lb)
            types[(la, lb)] = taxonomy_relation(tax, ra, rb, unmapped_ok)
            values[i, j] = taxonomy_strength(tax, ra, rb, unmapped_ok)
    matrix = LinkScoreMatrix(
        space_a=space_a.dataset_id,
        space_b=space_b.dataset_id,
        labels_a=space_a.labels,
        labels_b=space_b.labels,
        values=values,
    )
    return types, matrix


# --- word embeddings ----------------------------------------------------------

_TOKEN_SPLIT = re.compile(r"[^a-z0-9]+")


def tokenize_label(label: str) -> list[str]:
    """Lowercase and split on non-alphanumeric characters ("potted plant" → potted, plant)."""
    return [t for t in _TOKEN_SPLIT.split(label.lower()) if t]


@dataclass(eq=False)
class WordEmbeddingTable:
    """Token → vector table; labels embed as the mean of their token vectors."""

    vectors: Mapping[str, np.ndarray]

    def __post_init__(self) -> None:
        cleaned: dict[str, np.ndarray] = {}
        dim: int | None = None
        for token, vector in self.vectors.items():
            array = np.asarray(vector, dtype=np.float64)
            if array.ndim != 1:
                raise ValueError(f"vector for {token!r} is not one-dimensional")
            if dim is None:
                dim = array.shape[0]
            elif array.shape[0] != dim:
                raise ValueError(
                    f"vector for {token!r} has dimension {array.shape[0]}, expected {dim}"
                )
            if not np.all(np.isfinite(array)):
                raise ValueError(f"vector for {token!r} contains NaN or Inf")
            if np.linalg.norm(array) == 0.0:
                raise ValueError(f"vector for {token!r} has zero norm")
            cleaned[str(token)] = array
        if not cleaned:
            raise ValueError("embedding table is empty")
        self.vectors = cleaned

    @classmethod
    def from_tsv(cls, path: str | Path) -> "WordEmbeddingTable":
        vectors: dict[str, list[float]] = {}
        with open(path, "r", encoding="utf-8") as handle:
            for lineno, line in enumerate(handle, start=1):
                line = line.rstrip("\n")
                if not line:
                    continue
                parts = line.split("\t")
                if len(parts) < 2:
                    raise InputError(f"{path}:{lineno}: expected token TAB floats")
                try:
                    vectors[parts[0]] = [float(p) for p in parts[1:]]
                except ValueError:
                    raise InputError(f"{path}:{lineno}: non-numeric vector entry") from None
        try:
            return cls(vectors=vectors)
        except ValueError as exc:
            raise InputError(f"{path}: {exc}") from None

    def label_vector(self, label: str) -> np.ndarray:
        tokens = tokenize_label(label)
        if not tokens:
            raise ValueError(f"label {label!r} contains no embeddable tokens")
        missing = [t for t in tokens if t not in self.vectors]
        if missing:
            raise LabelLinkError(
                f"label {label!r}: no embedding for token(s) {', '.join(missing)}"
            )
        return np.mean([self.vectors[t] for t in tokens], axis=0)


def embedding_similarity(table: WordEmbeddingTable, a: str, b: str) -> float:
    """Cosine similarity between the mean-of-word vectors of two labels."""
    va = table.label_vector(a)
    vb = table.label_vector(b)
    na = np.linalg.norm(va)
    nb = np.linalg.norm(vb)
    if na == 0.0 or nb == 0.0:
        raise ValueError(f"zero-norm label vector for {a!r} or {b!r}")
    return float(np.dot(va, vb) / (na * nb))


def similarity_matrix(
    table: WordEmbeddingTable, space_a: LabelSpace, space_b: LabelSpace
) -> LinkScoreMatrix:
    """Pairwise label similarities rescaled from [-1, 1] to [0, 1].

    The rescale (c+1)/2 keeps link scores non-negative so the usual threshold
    machinery applies; it is monotone, so rankings are unchanged.
    """
    values = np.zeros((len(space_a.labels), len(space_b.labels)))
    for i, la in enumerate(space_a.labels):
        for j, lb in enumerate(space_b.labels):
            values[i, j] = (embedding_similarity(table, la, lb) + 1.0) / 2.0
    return LinkScoreMatrix(
        space_a=space_a.dataset_id,
        space_b=space_b.dataset_id,
        labels_a=space_a.labels,
        labels_b=space_b.labels,
        values=values,
    )
