"""Core data model: label spaces, score records, matrices and relation graphs.

Everything downstream (aggregation, discovery, typing, evaluation) works on the
types defined here.  Construction validates structural invariants; content-level
problems in raw inputs are reported by :func:`validate_inputs` instead of raised,
so a caller can collect every violation in one pass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable, Mapping, Sequence

import numpy as np

BACKGROUND_LABEL = "__background__"


class LabelLinkError(Exception):
    """Base class for errors raised by this package."""


class InputError(LabelLinkError):
    """A file or record could not be parsed or refers to unknown entities."""


class RelationType(str, Enum):
    IDENTITY = "identity"
    PARENT = "parent"
    CHILD = "child"
    OVERLAP = "overlap"
    PART_OF = "part_of"
    NONE = "none"

    def __str__(self) -> str:  # so "%s" and f-strings give the bare value
        return self.value


def mirror_type(t: RelationType | None) -> RelationType | None:
    """Type of the reversed pair: parent and child swap, everything else is symmetric."""
    if t is RelationType.PARENT:
        return RelationType.CHILD
    if t is RelationType.CHILD:
        return RelationType.PARENT
    return t


@dataclass(frozen=True)
class LabelSpace:
    """The set of class labels of one dataset.

    ``labels`` are the foreground classes; the background label is implicit and
    must not be listed.  Order is meaningful: matrices use it for their axes.
    """

    dataset_id: str
    labels: tuple[str, ...]
    background_label: str = BACKGROUND_LABEL

    def __post_init__(self) -> None:
        if not self.dataset_id:
            raise ValueError("dataset_id must be non-empty")
        object.__setattr__(self, "labels", tuple(self.labels))
        if len(set(self.labels)) != len(self.labels):
            dupes = sorted({l for l in self.labels if self.labels.count(l) > 1})
            raise ValueError(f"duplicate labels in {self.dataset_id}: {dupes}")
        if self.background_label in self.labels:
            raise ValueError(
                f"background label {self.background_label!r} listed as a class label"
            )

    def __len__(self) -> int:
        return len(self.labels)

    def __contains__(self, label: str) -> bool:
        return label in self.labels

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"{label!r} not in label space {self.dataset_id!r}") from None


@dataclass(frozen=True)
class InstanceScoreRecord:
    """Per-instance classifier output: self score plus scores under a foreign label space.

    ``foreign_scores`` maps foreign label -> probability; the background entry is
    optional on input (validation checks the sum either way).  The constructor is
    deliberately permissive about value ranges so bad files can be loaded and then
    reported by :func:`validate_inputs`.
    """

    instance_id: str
    source_dataset: str
    true_label: str
    self_score: float
    foreign_scores: Mapping[str, float]


@dataclass(frozen=True)
class EmbeddingRecord:
    """A single instance embedded in a shared feature space."""

    instance_id: str
    true_label: str
    vector: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "vector", tuple(float(v) for v in self.vector))


@dataclass(eq=False)
class DirectionalScoreMatrix:
    """S[a][b]: how strongly labels of one space fire on instances of another.

    Rows are labels of ``from_space`` (the space whose labels are scored), columns
    are labels of ``to_space`` (the space whose instances were aggregated over).
    ``support`` holds, per cell, the number of easy instances averaged over (in
    practice constant along each column).
    """

    from_space: str
    to_space: str
    row_labels: tuple[str, ...]
    col_labels: tuple[str, ...]
    values: np.ndarray
    support: np.ndarray

    def __post_init__(self) -> None:
        self.row_labels = tuple(self.row_labels)
        self.col_labels = tuple(self.col_labels)
        self.values = np.asarray(self.values, dtype=np.float64)
        self.support = np.asarray(self.support, dtype=np.int64)
        if self.values.shape != (len(self.row_labels), len(self.col_labels)):
            raise ValueError(
                f"values shape {self.values.shape} does not match "
                f"{len(self.row_labels)}x{len(self.col_labels)} labels"
            )
        if self.support.shape != self.values.shape:
            raise ValueError("support must have the same shape as values")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("directional scores must be finite")
        if np.any(self.values < 0.0) or np.any(self.values > 1.0):
            raise ValueError("directional scores must lie in [0, 1]")

    def value(self, row_label: str, col_label: str) -> float:
        return float(
            self.values[self.row_labels.index(row_label), self.col_labels.index(col_label)]
        )


@dataclass(eq=False)
class LinkScoreMatrix:
    """Symmetric link strength R[a][b] between two label spaces (rows: space A)."""

    space_a: str
    space_b: str
    labels_a: tuple[str, ...]
    labels_b: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self) -> None:
        self.labels_a = tuple(self.labels_a)
        self.labels_b = tuple(self.labels_b)
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != (len(self.labels_a), len(self.labels_b)):
            raise ValueError(
                f"values shape {self.values.shape} does not match "
                f"{len(self.labels_a)}x{len(self.labels_b)} labels"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("link scores must be finite")
        if np.any(self.values < 0.0):
            raise ValueError("link scores must be >= 0")

    def value(self, label_a: str, label_b: str) -> float:
        return float(
            self.values[self.labels_a.index(label_a), self.labels_b.index(label_b)]
        )


@dataclass(frozen=True)
class RelationEdge:
    """One related label pair: ``a`` from space A, ``b`` from space B.

    ``type`` is None while the edge is merely discovered but not yet typed.
    ``relaxed`` marks edges whose parent/child direction came from the
    degree-based fallback rather than the strict rule.
    """

    a: str
    b: str
    strength: float
    type: RelationType | None = None
    relaxed: bool = False

    def __post_init__(self) -> None:
        if not math.isfinite(self.strength) or self.strength < 0.0:
            raise ValueError(
                f"edge ({self.a!r}, {self.b!r}) has invalid strength {self.strength!r}"
            )


@dataclass(frozen=True)
class RelationGraph:
    """A bipartite relation graph between two label spaces."""

    space_a: str
    space_b: str
    edges: tuple[RelationEdge, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "edges", tuple(self.edges))
        seen: set[tuple[str, str]] = set()
        for e in self.edges:
            key = (e.a, e.b)
            if key in seen:
                raise ValueError(f"duplicate edge for pair {key}")
            seen.add(key)

    def __len__(self) -> int:
        return len(self.edges)

    def pairs(self) -> set[tuple[str, str]]:
        return {(e.a, e.b) for e in self.edges}

    def edge(self, a: str, b: str) -> RelationEdge:
        for e in self.edges:
            if e.a == a and e.b == b:
                return e
        raise KeyError(f"no edge ({a!r}, {b!r})")

    def degree_a(self, a: str) -> int:
        """Number of partners of label ``a`` (a label of space A)."""
        return sum(1 for e in self.edges if e.a == a)

    def degree_b(self, b: str) -> int:
        return sum(1 for e in self.edges if e.b == b)

    def neighbors_of_a(self, a: str) -> list[str]:
        return [e.b for e in self.edges if e.a == a]

    def neighbors_of_b(self, b: str) -> list[str]:
        return [e.a for e in self.edges if e.b == b]

    def type_map(self) -> dict[tuple[str, str], RelationType]:
        out: dict[tuple[str, str], RelationType] = {}
        for e in self.edges:
            if e.type is None:
                raise ValueError(f"edge ({e.a!r}, {e.b!r}) is untyped")
            out[(e.a, e.b)] = e.type
        return out

    def mirrored(self) -> "RelationGraph":
        """The same graph seen from the other dataset's side."""
        return RelationGraph(
            space_a=self.space_b,
            space_b=self.space_a,
            edges=tuple(
                replace(e, a=e.b, b=e.a, type=mirror_type(e.type)) for e in self.edges
            ),
        )


@dataclass
class PipelineConfig:
    """Tunable parameters shared across the pipeline, with their defaults."""

    relation_threshold: float = 0.25
    asymmetry_T: float = 2.0  # directional-score ratio separating parent from child
    taxonomy_boost_n: float = 2.0  # link-score multiplier where the taxonomy agrees
    taxonomy_T_factor_m: float = 2.0  # per-edge adjustment of T from the taxonomy
    easy_threshold: float = 0.5
    aggregation_mode: str = "mean"  # or "max" (pixel mode only)
    parallelism: int = 1

    def validate(self) -> None:
        if not (math.isfinite(self.asymmetry_T) and self.asymmetry_T > 1.0):
            raise ValueError("asymmetry_T must be finite and > 1")
        if not (math.isfinite(self.taxonomy_boost_n) and self.taxonomy_boost_n >= 1.0):
            raise ValueError("taxonomy_boost_n must be finite and >= 1")
        if not (
            math.isfinite(self.taxonomy_T_factor_m) and self.taxonomy_T_factor_m >= 1.0
        ):
            raise ValueError("taxonomy_T_factor_m must be finite and >= 1")
        if not math.isfinite(self.relation_threshold):
            raise ValueError("relation_threshold must be finite")
        if not math.isfinite(self.easy_threshold):
            raise ValueError("easy_threshold must be finite")
        if self.aggregation_mode not in ("mean", "max"):
            raise ValueError(f"unknown aggregation_mode {self.aggregation_mode!r}")
        if self.parallelism < 1:
            raise ValueError("parallelism must be >= 1")

    @classmethod
    def from_mapping(cls, data: Mapping[str, object]) -> "PipelineConfig":
        cfg = cls()
        for key, value in data.items():
            if not hasattr(cfg, key):
                raise InputError(f"unknown config key {key!r}")
            setattr(cfg, key, value)
        cfg.validate()
        return cfg


_SUM_TOLERANCE = 1e-6


def validate_inputs(
    space_a: LabelSpace,
    space_b: LabelSpace,
    records: Iterable[InstanceScoreRecord],
    mode: str = "pixel_probability",
) -> list[str]:
    """Check score records of space B instances scored under space A's labels.

    Returns one human-readable message per violation (empty list means valid):
    unknown true or foreign labels, scores outside [0, 1], foreign score
    vectors that do not sum to ~1 (pixel-probability mode), and vectors that
    are not one-hot / self scores that are not binary (embedding mode).
    """
    if mode not in ("pixel_probability", "embedding_1nn"):
        raise ValueError(f"unknown mode {mode!r}")
    problems: list[str] = []
    known_foreign = set(space_a.labels) | {space_a.background_label}
    seen_ids: set[str] = set()
    for rec in records:
        rid = rec.instance_id
        if rid in seen_ids:
            problems.append(f"{rid}: duplicate instance_id")
        seen_ids.add(rid)
        if rec.source_dataset != space_b.dataset_id:
            problems.append(
                f"{rid}: source_dataset {rec.source_dataset!r} is not {space_b.dataset_id!r}"
            )
        if rec.true_label not in space_b and rec.true_label != space_b.background_label:
            problems.append(f"{rid}: true_label {rec.true_label!r} not in {space_b.dataset_id}")
        if not (math.isfinite(rec.self_score) and 0.0 <= rec.self_score <= 1.0):
            problems.append(f"{rid}: self_score {rec.self_score!r} outside [0, 1]")
        elif mode == "embedding_1nn" and rec.self_score not in (0.0, 1.0):
            problems.append(
                f"{rid}: self_score {rec.self_score!r} must be 0 or 1 in embedding mode"
            )
        in_range = True
        for label, score in rec.foreign_scores.items():
            if label not in known_foreign:
                problems.append(f"{rid}: unknown foreign label {label!r}")
            if not (math.isfinite(score) and 0.0 <= score <= 1.0):
                problems.append(f"{rid}: score {score!r} for {label!r} outside [0, 1]")
                in_range = False
        if not in_range:
            continue
        values = list(rec.foreign_scores.values())
        if mode == "pixel_probability":
            total = sum(values)
            if abs(total - 1.0) > _SUM_TOLERANCE:
                problems.append(f"{rid}: foreign scores sum to {total:.9g}, expected 1")
        else:
            ones = sum(1 for v in values if v == 1.0)
            zeros = sum(1 for v in values if v == 0.0)
            if ones != 1 or zeros != len(values) - 1:
                problems.append(f"{rid}: foreign scores must be one-hot in embedding mode")
    return problems
