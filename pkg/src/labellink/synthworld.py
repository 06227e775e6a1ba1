"""Synthetic worlds with known ground truth, for end-to-end verification.

A world assigns each label a set of latent concepts (disjoint within a
dataset, mirroring within-dataset mutual exclusivity).  True relations follow
from set algebra on those concept sets, and generated instance records are
noisy one-hot vectors pointing at the foreign label owning the instance's
concept — so the whole pipeline can be checked against an exact oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

import numpy as np

from .io import read_json, write_json, _require
from .model import (
    BACKGROUND_LABEL,
    InputError,
    InstanceScoreRecord,
    LabelSpace,
    RelationEdge,
    RelationGraph,
    RelationType,
)


@dataclass(frozen=True)
class LatentWorld:
    concepts: tuple[str, ...]
    space_a: Mapping[str, frozenset[str]]  # label -> owned concepts
    space_b: Mapping[str, frozenset[str]]
    noise_sigma: float = 0.0
    instances_per_concept: int = 10
    seed: int = 0
    dataset_a: str = "A"
    dataset_b: str = "B"

    def __post_init__(self) -> None:
        object.__setattr__(self, "concepts", tuple(self.concepts))
        object.__setattr__(
            self, "space_a", {l: frozenset(c) for l, c in self.space_a.items()}
        )
        object.__setattr__(
            self, "space_b", {l: frozenset(c) for l, c in self.space_b.items()}
        )
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be >= 0")
        if self.instances_per_concept < 1:
            raise ValueError("instances_per_concept must be >= 1")
        universe = set(self.concepts)
        for name, space in (("space_a", self.space_a), ("space_b", self.space_b)):
            claimed: set[str] = set()
            for label, owned in space.items():
                if not owned:
                    raise ValueError(f"{name}: label {label!r} owns no concepts")
                stray = owned - universe
                if stray:
                    raise ValueError(f"{name}: unknown concepts {sorted(stray)}")
                if claimed & owned:
                    raise ValueError(
                        f"{name}: concepts {sorted(claimed & owned)} owned by several labels"
                    )
                claimed |= owned

    def label_space_a(self) -> LabelSpace:
        return LabelSpace(dataset_id=self.dataset_a, labels=tuple(self.space_a))

    def label_space_b(self) -> LabelSpace:
        return LabelSpace(dataset_id=self.dataset_b, labels=tuple(self.space_b))


def relation_from_sets(owned_a: frozenset[str], owned_b: frozenset[str]) -> RelationType:
    """Relation of two concept sets under plain set algebra."""
    if owned_a == owned_b:
        return RelationType.IDENTITY
    if owned_a > owned_b:
        return RelationType.PARENT
    if owned_a < owned_b:
        return RelationType.CHILD
    if owned_a & owned_b:
        return RelationType.OVERLAP
    return RelationType.NONE


def true_relations(world: LatentWorld) -> RelationGraph:
    """The exact typed relation graph implied by the concept sets (strength 1)."""
    edges = []
    for la, ca in world.space_a.items():
        for lb, cb in world.space_b.items():
            relation = relation_from_sets(ca, cb)
            if relation is not RelationType.NONE:
                edges.append(RelationEdge(a=la, b=lb, strength=1.0, type=relation))
    return RelationGraph(
        space_a=world.dataset_a, space_b=world.dataset_b, edges=tuple(edges)
    )


def _owner_map(space: Mapping[str, frozenset[str]]) -> dict[str, str]:
    owners: dict[str, str] = {}
    for label, owned in space.items():
        for concept in owned:
            owners[concept] = label
    return owners


def _generate_side(
    rng: np.random.Generator,
    own_space: Mapping[str, frozenset[str]],
    own_dataset: str,
    foreign_labels: tuple[str, ...],
    foreign_owner: Mapping[str, str],
    sigma: float,
    per_concept: int,
) -> list[InstanceScoreRecord]:
    columns = list(foreign_labels) + [BACKGROUND_LABEL]
    index = {label: i for i, label in enumerate(columns)}
    records = []
    for label, owned in own_space.items():
        for concept in sorted(owned):
            target = index[foreign_owner.get(concept, BACKGROUND_LABEL)]
            for i in range(per_concept):
                onehot = np.zeros(len(columns))
                onehot[target] = 1.0
                noisy = np.clip(onehot + sigma * rng.standard_normal(len(columns)), 0.0, 1.0)
                total = noisy.sum()
                vector = onehot if total == 0.0 else noisy / total
                records.append(
                    InstanceScoreRecord(
                        instance_id=f"{own_dataset}:{label}:{concept}:{i:04d}",
                        source_dataset=own_dataset,
                        true_label=label,
                        self_score=1.0,
                        foreign_scores={c: float(v) for c, v in zip(columns, vector)},
                    )
                )
    return records


def generate_instances(
    world: LatentWorld,
) -> tuple[list[InstanceScoreRecord], list[InstanceScoreRecord]]:
    """Noisy one-hot records for both directions, from one seeded stream.

    Returns (records of B's instances scored under A's labels, records of A's
    instances scored under B's labels) — B's side is drawn first.  Each
    instance's foreign vector is one-hot at the foreign label owning its
    concept (background if unowned), perturbed by clipped Gaussian noise and
    renormalized.  Self scores are 1: each dataset's own model is perfect by
    construction.
    """
    rng = np.random.default_rng(world.seed)
    owner_a = _owner_map(world.space_a)
    owner_b = _owner_map(world.space_b)
    records_b = _generate_side(
        rng,
        world.space_b,
        world.dataset_b,
        tuple(world.space_a),
        owner_a,
        world.noise_sigma,
        world.instances_per_concept,
    )
    records_a = _generate_side(
        rng,
        world.space_a,
        world.dataset_a,
        tuple(world.space_b),
        owner_b,
        world.noise_sigma,
        world.instances_per_concept,
    )
    return records_b, records_a


def random_world(
    n_concepts: int,
    n_labels_a: int,
    n_labels_b: int,
    sigma: float,
    per_concept: int,
    seed: int,
) -> LatentWorld:
    """A world whose label spaces are random contiguous partitions of the concepts.

    Both spaces cover all concepts, so every cross-dataset pair lands in one of
    identity/parent/child/overlap/none purely by how the two partitions cut.
    """
    if n_concepts < 1:
        raise ValueError("need at least one concept")
    for n_labels in (n_labels_a, n_labels_b):
        if not 1 <= n_labels <= n_concepts:
            raise ValueError("label counts must be between 1 and the concept count")
    concepts = tuple(f"c{i:03d}" for i in range(n_concepts))
    rng = np.random.default_rng(seed)

    def partition(n_labels: int, prefix: str) -> dict[str, frozenset[str]]:
        shuffled = list(concepts)
        rng.shuffle(shuffled)
        if n_labels == 1:
            cuts: list[int] = []
        else:
            cuts = sorted(
                int(c) for c in rng.choice(
                    np.arange(1, n_concepts), size=n_labels - 1, replace=False
                )
            )
        bounds = [0] + cuts + [n_concepts]
        return {
            f"{prefix}{i:02d}": frozenset(shuffled[bounds[i] : bounds[i + 1]])
            for i in range(n_labels)
        }

    return LatentWorld(
        concepts=concepts,
        space_a=partition(n_labels_a, "a"),
        space_b=partition(n_labels_b, "b"),
        noise_sigma=sigma,
        instances_per_concept=per_concept,
        seed=seed,
    )


def save_world(world: LatentWorld, path: str | Path) -> None:
    write_json(
        path,
        {
            "concepts": list(world.concepts),
            "space_a": {l: sorted(c) for l, c in world.space_a.items()},
            "space_b": {l: sorted(c) for l, c in world.space_b.items()},
            "noise_sigma": float(world.noise_sigma),
            "instances_per_concept": world.instances_per_concept,
            "seed": world.seed,
            "dataset_a": world.dataset_a,
            "dataset_b": world.dataset_b,
        },
    )


def load_world(path: str | Path) -> LatentWorld:
    obj = read_json(path)
    where = str(path)
    try:
        return LatentWorld(
            concepts=tuple(_require(obj, "concepts", where)),
            space_a={l: frozenset(c) for l, c in _require(obj, "space_a", where).items()},
            space_b={l: frozenset(c) for l, c in _require(obj, "space_b", where).items()},
            noise_sigma=float(obj.get("noise_sigma", 0.0)),
            instances_per_concept=int(obj.get("instances_per_concept", 10)),
            seed=int(obj.get("seed", 0)),
            dataset_a=str(obj.get("dataset_a", "A")),
            dataset_b=str(obj.get("dataset_b", "B")),
        )
    except (TypeError, ValueError, AttributeError) as exc:
        raise InputError(f"{where}: {exc}") from None
