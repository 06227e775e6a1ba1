"""File formats and stable serialization.

All floating-point output goes through :func:`format_float` (9 significant
digits) so that repeated runs produce byte-identical files and diffs stay
readable.  Parse problems raise :class:`InputError` with file/line context.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import platform
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Iterable, Iterator, Mapping, Sequence

import numpy as np

from .model import (
    EmbeddingRecord,
    InputError,
    InstanceScoreRecord,
    LabelSpace,
    LinkScoreMatrix,
    DirectionalScoreMatrix,
    RelationEdge,
    RelationGraph,
    RelationType,
)

UNTYPED = "untyped"


def format_float(x: float) -> str:
    """Render a float with 9 significant digits, as compact as possible."""
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite float {x!r}")
    return f"{x:.9g}"


def _emit(obj: Any, out: list[str]) -> None:
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(format_float(float(obj)))
    elif isinstance(obj, (list, tuple)) or isinstance(obj, np.ndarray):
        out.append("[")
        seq = obj.tolist() if isinstance(obj, np.ndarray) else obj
        for i, item in enumerate(seq):
            if i:
                out.append(", ")
            _emit(item, out)
        out.append("]")
    elif isinstance(obj, Mapping):
        out.append("{")
        for i, (key, value) in enumerate(obj.items()):
            if not isinstance(key, str):
                raise TypeError(f"JSON object keys must be strings, got {key!r}")
            if i:
                out.append(", ")
            out.append(json.dumps(key, ensure_ascii=False))
            out.append(": ")
            _emit(value, out)
        out.append("}")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}: {obj!r}")


def dumps_stable(obj: Any) -> str:
    """JSON text with deterministic key order and %.9g floats."""
    out: list[str] = []
    _emit(obj, out)
    return "".join(out)


def write_json(path: str | Path, obj: Any) -> None:
    Path(path).write_text(dumps_stable(obj) + "\n", encoding="utf-8")


def read_json(path: str | Path) -> Any:
    text = Path(path).read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}: invalid JSON: {exc.msg}") from None


def iter_jsonl(path: str | Path) -> Iterator[tuple[int, Any]]:
    """Yield (line_number, parsed_object) for each non-empty line."""
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                yield lineno, json.loads(line)
            except json.JSONDecodeError as exc:
                raise InputError(f"{path}:{lineno}: invalid JSON: {exc.msg}") from None


def write_jsonl(path: str | Path, objs: Iterable[Any]) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for obj in objs:
            handle.write(dumps_stable(obj))
            handle.write("\n")


def _require(obj: Mapping[str, Any], key: str, where: str) -> Any:
    if key not in obj:
        raise InputError(f"{where}: missing field {key!r}")
    return obj[key]


# --- label spaces -----------------------------------------------------------

def load_label_space(path: str | Path) -> LabelSpace:
    obj = read_json(path)
    if not isinstance(obj, dict):
        raise InputError(f"{path}: expected a JSON object")
    dataset = _require(obj, "dataset", str(path))
    labels = _require(obj, "labels", str(path))
    if not isinstance(labels, list) or not all(isinstance(l, str) for l in labels):
        raise InputError(f"{path}: 'labels' must be a list of strings")
    try:
        return LabelSpace(dataset_id=str(dataset), labels=tuple(labels))
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None


def save_label_space(space: LabelSpace, path: str | Path) -> None:
    write_json(path, {"dataset": space.dataset_id, "labels": list(space.labels)})


# --- instance score records -------------------------------------------------

def load_score_records(path: str | Path) -> list[InstanceScoreRecord]:
    records = []
    for lineno, obj in iter_jsonl(path):
        where = f"{path}:{lineno}"
        if not isinstance(obj, dict):
            raise InputError(f"{where}: expected a JSON object")
        foreign = _require(obj, "foreign_scores", where)
        if not isinstance(foreign, dict):
            raise InputError(f"{where}: 'foreign_scores' must be an object")
        try:
            records.append(
                InstanceScoreRecord(
                    instance_id=str(_require(obj, "instance_id", where)),
                    source_dataset=str(_require(obj, "source_dataset", where)),
                    true_label=str(_require(obj, "true_label", where)),
                    self_score=float(_require(obj, "self_score", where)),
                    foreign_scores={str(k): float(v) for k, v in foreign.items()},
                )
            )
        except (TypeError, ValueError) as exc:
            raise InputError(f"{where}: {exc}") from None
    return records


def save_score_records(records: Iterable[InstanceScoreRecord], path: str | Path) -> None:
    write_jsonl(
        path,
        (
            {
                "instance_id": r.instance_id,
                "source_dataset": r.source_dataset,
                "true_label": r.true_label,
                "self_score": float(r.self_score),
                "foreign_scores": {k: float(v) for k, v in r.foreign_scores.items()},
            }
            for r in records
        ),
    )


# --- embedding records ------------------------------------------------------

def load_embedding_records(path: str | Path) -> list[EmbeddingRecord]:
    records: list[EmbeddingRecord] = []
    dim: int | None = None
    for lineno, obj in iter_jsonl(path):
        where = f"{path}:{lineno}"
        if not isinstance(obj, dict):
            raise InputError(f"{where}: expected a JSON object")
        vector = _require(obj, "vector", where)
        if not isinstance(vector, list):
            raise InputError(f"{where}: 'vector' must be a list of numbers")
        try:
            values = tuple(float(v) for v in vector)
        except (TypeError, ValueError):
            raise InputError(f"{where}: 'vector' must be a list of numbers") from None
        if not all(math.isfinite(v) for v in values):
            raise InputError(f"{where}: vector contains NaN or Inf")
        if dim is None:
            dim = len(values)
        elif len(values) != dim:
            raise InputError(f"{where}: vector dimension {len(values)} != {dim}")
        records.append(
            EmbeddingRecord(
                instance_id=str(_require(obj, "instance_id", where)),
                true_label=str(_require(obj, "true_label", where)),
                vector=values,
            )
        )
    return records


def save_embedding_records(records: Iterable[EmbeddingRecord], path: str | Path) -> None:
    write_jsonl(
        path,
        (
            {
                "instance_id": r.instance_id,
                "true_label": r.true_label,
                "vector": [float(v) for v in r.vector],
            }
            for r in records
        ),
    )


# --- relation graphs --------------------------------------------------------

def load_relation_graph(
    path: str | Path, space_a: str, space_b: str
) -> RelationGraph:
    """Read edges from a relations file; dataset ids come from the caller."""
    edges = []
    for lineno, obj in iter_jsonl(path):
        where = f"{path}:{lineno}"
        if not isinstance(obj, dict):
            raise InputError(f"{where}: expected a JSON object")
        type_name = _require(obj, "type", where)
        if type_name == UNTYPED:
            rel_type = None
        else:
            try:
                rel_type = RelationType(type_name)
            except ValueError:
                raise InputError(f"{where}: unknown relation type {type_name!r}") from None
        try:
            edges.append(
                RelationEdge(
                    a=str(_require(obj, "a", where)),
                    b=str(_require(obj, "b", where)),
                    strength=float(_require(obj, "strength", where)),
                    type=rel_type,
                    relaxed=bool(obj.get("relaxed", False)),
                )
            )
        except (TypeError, ValueError) as exc:
            raise InputError(f"{where}: {exc}") from None
    try:
        return RelationGraph(space_a=space_a, space_b=space_b, edges=tuple(edges))
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None


def save_relation_graph(graph: RelationGraph, path: str | Path) -> None:
    def line(e: RelationEdge) -> dict[str, Any]:
        obj: dict[str, Any] = {
            "a": e.a,
            "b": e.b,
            "strength": float(e.strength),
            "type": UNTYPED if e.type is None else e.type.value,
        }
        if e.relaxed:
            obj["relaxed"] = True
        return obj

    write_jsonl(path, (line(e) for e in graph.edges))


# --- score matrices ---------------------------------------------------------

def save_directional_matrix(matrix: DirectionalScoreMatrix, path: str | Path) -> None:
    write_json(
        path,
        {
            "from_space": matrix.from_space,
            "to_space": matrix.to_space,
            "row_labels": list(matrix.row_labels),
            "col_labels": list(matrix.col_labels),
            "values": matrix.values,
            "support": matrix.support,
        },
    )


def load_directional_matrix(path: str | Path) -> DirectionalScoreMatrix:
    obj = read_json(path)
    where = str(path)
    try:
        return DirectionalScoreMatrix(
            from_space=str(_require(obj, "from_space", where)),
            to_space=str(_require(obj, "to_space", where)),
            row_labels=tuple(_require(obj, "row_labels", where)),
            col_labels=tuple(_require(obj, "col_labels", where)),
            values=np.asarray(_require(obj, "values", where), dtype=np.float64),
            support=np.asarray(_require(obj, "support", where), dtype=np.int64),
        )
    except (TypeError, ValueError) as exc:
        raise InputError(f"{where}: {exc}") from None


def save_link_matrix(matrix: LinkScoreMatrix, path: str | Path) -> None:
    write_json(
        path,
        {
            "space_a": matrix.space_a,
            "space_b": matrix.space_b,
            "labels_a": list(matrix.labels_a),
            "labels_b": list(matrix.labels_b),
            "values": matrix.values,
        },
    )


def load_link_matrix(path: str | Path) -> LinkScoreMatrix:
    obj = read_json(path)
    where = str(path)
    try:
        return LinkScoreMatrix(
            space_a=str(_require(obj, "space_a", where)),
            space_b=str(_require(obj, "space_b", where)),
            labels_a=tuple(_require(obj, "labels_a", where)),
            labels_b=tuple(_require(obj, "labels_b", where)),
            values=np.asarray(_require(obj, "values", where), dtype=np.float64),
        )
    except (TypeError, ValueError) as exc:
        raise InputError(f"{where}: {exc}") from None


# --- per-pixel score rows ----------------------------------------------------

def load_pixel_records(
    path: str | Path, labels_path: str | Path
) -> tuple[list[str], list[dict[str, Any]]]:
    """Read per-pixel score rows plus the sidecar column-label order.

    Returns (column_labels, records) where each record has instance_id,
    true_label, self_score (default 1.0) and a pixels × labels float array.
    """
    columns = read_json(labels_path)
    if not isinstance(columns, list) or not all(isinstance(c, str) for c in columns):
        raise InputError(f"{labels_path}: expected a JSON list of column labels")
    records = []
    for lineno, obj in iter_jsonl(path):
        where = f"{path}:{lineno}"
        rows = _require(obj, "rows", where)
        try:
            matrix = np.asarray(rows, dtype=np.float64)
        except ValueError:
            raise InputError(f"{where}: 'rows' must be a rectangular numeric matrix") from None
        if matrix.ndim != 2 or matrix.shape[1] != len(columns):
            raise InputError(
                f"{where}: expected rows of width {len(columns)}, got shape {matrix.shape}"
            )
        records.append(
            {
                "instance_id": str(_require(obj, "instance_id", where)),
                "true_label": str(_require(obj, "true_label", where)),
                "self_score": float(obj.get("self_score", 1.0)),
                "rows": matrix,
            }
        )
    return list(columns), records


# --- CSV --------------------------------------------------------------------

def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(
                [format_float(v) if isinstance(v, float) else v for v in row]
            )


# --- run manifest -------------------------------------------------------------

def _sha256(path: str | Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_manifest(
    path: str | Path,
    command: str,
    inputs: Mapping[str, str | Path],
    outputs: Mapping[str, str | Path],
    config: Mapping[str, Any],
) -> None:
    """Record what a run consumed and produced, with content hashes."""
    from . import __version__

    manifest = {
        "command": command,
        "inputs": {
            name: {"path": str(p), "sha256": _sha256(p)} for name, p in inputs.items()
        },
        "outputs": {
            name: {"path": str(p), "sha256": _sha256(p)} for name, p in outputs.items()
        },
        "config": dict(config),
        "versions": {
            "labellink": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
        },
        "created_utc": datetime.now(timezone.utc).isoformat(),
    }
    write_json(path, manifest)
