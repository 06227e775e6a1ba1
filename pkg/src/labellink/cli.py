"""Command-line interface: every pipeline stage as a subcommand.

Exit codes: 0 on success, 1 for validation problems (bad flags, inconsistent
inputs), 2 for I/O problems (missing or unreadable files).  Every run writes a
manifest recording inputs, outputs (with content hashes), configuration, and
library versions.  Outputs are byte-identical across runs and worker counts;
only the manifest carries a timestamp.
"""

from __future__ import annotations

import argparse
import sys
import warnings as warnings_module
from pathlib import Path

from . import (
    __version__,
    aggregation,
    applications,
    discovery,
    evaluation,
    groundtruth,
    io,
    synthworld,
    taxonomy,
    type_inference,
)
from .model import (
    InputError,
    LabelLinkError,
    PipelineConfig,
    RelationEdge,
    RelationGraph,
    RelationType,
    validate_inputs,
)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_IO = 2

_MODES = {"pixel": "pixel_probability", "embedding": "embedding_1nn"}


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors; this artifact reserves 2 for I/O."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _manifest_path(args, default_anchor: str | Path) -> Path:
    if getattr(args, "manifest", None):
        return Path(args.manifest)
    anchor = Path(default_anchor)
    if anchor.is_dir():
        return anchor / "manifest.json"
    return anchor.with_name(anchor.name + ".manifest.json")


def _write_manifest(args, command, inputs, outputs, config) -> None:
    io.write_manifest(
        _manifest_path(args, next(iter(outputs.values()))) if outputs else
        _manifest_path(args, next(iter(inputs.values()))),
        command,
        inputs,
        outputs,
        config,
    )


def _load_spaces(args):
    return io.load_label_space(args.space_a), io.load_label_space(args.space_b)


def _load_pair_types(path, space_a, space_b):
    """Read a relations file into a (label_a, label_b) → RelationType map."""
    graph = io.load_relation_graph(path, space_a.dataset_id, space_b.dataset_id)
    types = {}
    for edge in graph.edges:
        if edge.type is None:
            raise ValueError(f"{path}: edge ({edge.a!r}, {edge.b!r}) is untyped")
        types[(edge.a, edge.b)] = edge.type
    return types


def _positive_pairs(graph):
    """Edges asserting a relation (every type except `none`)."""
    return {
        (e.a, e.b) for e in graph.edges if e.type is not RelationType.NONE
    }


# --- subcommand implementations ------------------------------------------------


def cmd_validate(args) -> int:
    space_a, space_b = _load_spaces(args)
    records = io.load_score_records(args.scores)
    violations = validate_inputs(space_a, space_b, records, _MODES[args.mode])
    for violation in violations:
        print(violation)
    if args.out:
        io.write_json(args.out, {"violations": violations})
        _write_manifest(
            args,
            "validate",
            {"space_a": args.space_a, "space_b": args.space_b, "scores": args.scores},
            {"report": args.out},
            {"mode": args.mode},
        )
    print(f"{len(violations)} violation(s)")
    return EXIT_OK if not violations else EXIT_INVALID


def cmd_aggregate(args) -> int:
    space_a, space_b = _load_spaces(args)
    inputs = {"space_a": args.space_a, "space_b": args.space_b}
    mode = _MODES[args.mode]

    sources = [bool(args.scores), bool(args.pixels), bool(args.embeddings)]
    if sum(sources) != 1:
        raise ValueError(
            "exactly one input form is required: --scores, --pixels, or --embeddings"
        )
    if args.scores:
        records = io.load_score_records(args.scores)
        inputs["scores"] = args.scores
    elif args.pixels:
        if not args.pixel_labels:
            raise ValueError("--pixels needs --pixel-labels (the column order sidecar)")
        columns, pixel_records = io.load_pixel_records(args.pixels, args.pixel_labels)
        records = aggregation.pixel_records_to_score_records(
            columns, pixel_records, space_b.dataset_id, args.agg
        )
        inputs["pixels"] = args.pixels
        inputs["pixel_labels"] = args.pixel_labels
    else:
        if not args.references or not args.own_references:
            raise ValueError("--embeddings needs --references and --own-references")
        queries = io.load_embedding_records(args.embeddings)
        foreign_refs = io.load_embedding_records(args.references)
        own_refs = io.load_embedding_records(args.own_references)
        records = aggregation.embedding_scores(
            queries, foreign_refs, own_refs, space_a, space_b, args.parallelism
        )
        inputs["embeddings"] = args.embeddings
        inputs["references"] = args.references
        inputs["own_references"] = args.own_references
        mode = "embedding_1nn"

    req = aggregation.AggregationRequest(
        mode=mode,
        easy_filter=not args.no_easy_filter,
        easy_threshold=args.easy_threshold,
        aggregation_mode=args.agg,
    )
    matrix, notes = aggregation.aggregate_directional(
        records, space_a, space_b, req, parallelism=args.parallelism
    )
    for note in notes:
        print(f"warning: {note}", file=sys.stderr)
    io.save_directional_matrix(matrix, args.out)
    _write_manifest(
        args,
        "aggregate",
        inputs,
        {"matrix": args.out},
        {
            "mode": mode,
            "easy_filter": not args.no_easy_filter,
            "easy_threshold": args.easy_threshold,
            "aggregation_mode": args.agg,
            "parallelism": args.parallelism,
        },
    )
    return EXIT_OK


def cmd_discover(args) -> int:
    S_ab = io.load_directional_matrix(args.scores_ab)
    S_ba = io.load_directional_matrix(args.scores_ba)
    R = discovery.link_scores(S_ab, S_ba)
    graph = discovery.binarize(R, args.threshold)
    io.save_relation_graph(graph, args.out)
    outputs = {"relations": args.out}
    if args.link_scores:
        io.save_link_matrix(R, args.link_scores)
        outputs["link_scores"] = args.link_scores
    _write_manifest(
        args,
        "discover",
        {"scores_ab": args.scores_ab, "scores_ba": args.scores_ba},
        outputs,
        {"threshold": args.threshold, "parallelism": args.parallelism},
    )
    print(f"{len(graph)} relation(s) above threshold {io.format_float(args.threshold)}")
    return EXIT_OK


def cmd_classify_types(args) -> int:
    space_a, space_b = _load_spaces(args)
    graph = io.load_relation_graph(args.relations, space_a.dataset_id, space_b.dataset_id)
    inputs = {"relations": args.relations, "space_a": args.space_a, "space_b": args.space_b}

    if args.method == "set-theory":
        typed = type_inference.set_theory_types(graph)
    else:
        if not args.scores_ab or not args.scores_ba:
            raise ValueError(f"method {args.method!r} needs --scores-ab and --scores-ba")
        S_ab = io.load_directional_matrix(args.scores_ab)
        S_ba = io.load_directional_matrix(args.scores_ba)
        inputs["scores_ab"] = args.scores_ab
        inputs["scores_ba"] = args.scores_ba
        if args.method == "asymmetry":
            typed = type_inference.asymmetry_types(
                graph, S_ab, S_ba, args.T, parallelism=args.parallelism
            )
        else:
            if not args.taxonomy_relations:
                raise ValueError("method 'combined' needs --taxonomy-relations")
            hints = _load_pair_types(args.taxonomy_relations, space_a, space_b)
            inputs["taxonomy_relations"] = args.taxonomy_relations
            typed = type_inference.combine_types(
                graph, S_ab, S_ba, args.T, hints, args.m, parallelism=args.parallelism
            )
    io.save_relation_graph(typed, args.out)
    _write_manifest(
        args,
        "classify-types",
        inputs,
        {"relations": args.out},
        {"method": args.method, "T": args.T, "m": args.m, "parallelism": args.parallelism},
    )
    return EXIT_OK


def cmd_taxonomy_relate(args) -> int:
    tax = taxonomy.load_taxonomy(args.taxonomy)
    space_a, space_b = _load_spaces(args)
    types, strengths = taxonomy.relate_spaces(
        tax, space_a, space_b, unmapped_ok=args.allow_unmapped
    )
    edges = []
    for i, la in enumerate(space_a.labels):
        for j, lb in enumerate(space_b.labels):
            edges.append(
                RelationEdge(
                    a=la,
                    b=lb,
                    strength=float(strengths.values[i, j]),
                    type=types[(la, lb)],
                )
            )
    graph = RelationGraph(
        space_a=space_a.dataset_id, space_b=space_b.dataset_id, edges=tuple(edges)
    )
    io.save_relation_graph(graph, args.out)
    outputs = {"relations": args.out}
    if args.strengths:
        io.save_link_matrix(strengths, args.strengths)
        outputs["strengths"] = args.strengths
    _write_manifest(
        args,
        "taxonomy-relate",
        {"taxonomy": args.taxonomy, "space_a": args.space_a, "space_b": args.space_b},
        outputs,
        {"allow_unmapped": args.allow_unmapped},
    )
    return EXIT_OK


def cmd_embed_relate(args) -> int:
    table = taxonomy.WordEmbeddingTable.from_tsv(args.word_vectors)
    space_a, space_b = _load_spaces(args)
    R = taxonomy.similarity_matrix(table, space_a, space_b)
    graph = discovery.binarize(R, args.threshold)
    typed = type_inference.set_theory_types(graph)
    io.save_relation_graph(typed, args.out)
    outputs = {"relations": args.out}
    if args.link_scores:
        io.save_link_matrix(R, args.link_scores)
        outputs["link_scores"] = args.link_scores
    _write_manifest(
        args,
        "embed-relate",
        {"word_vectors": args.word_vectors, "space_a": args.space_a, "space_b": args.space_b},
        outputs,
        {"threshold": args.threshold},
    )
    return EXIT_OK


def cmd_combine(args) -> int:
    R = io.load_link_matrix(args.link_scores)
    space_a = io.load_label_space(args.space_a)
    space_b = io.load_label_space(args.space_b)
    hints = _load_pair_types(args.taxonomy_relations, space_a, space_b)
    boosted = type_inference.combine_strengths(R, hints, args.n)
    io.save_link_matrix(boosted, args.out)
    _write_manifest(
        args,
        "combine",
        {
            "link_scores": args.link_scores,
            "taxonomy_relations": args.taxonomy_relations,
            "space_a": args.space_a,
            "space_b": args.space_b,
        },
        {"link_scores": args.out},
        {"n": args.n},
    )
    return EXIT_OK


def _parse_grid(text: str) -> list[float]:
    """start:stop:step, inclusive of stop up to float fuzz."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"grid must be start:stop:step, got {text!r}")
    start, stop, step = (float(p) for p in parts)
    if step <= 0 or stop < start:
        raise ValueError(f"bad grid {text!r}")
    values = []
    k = 0
    while True:
        value = start + k * step
        if value > stop + 1e-12:
            break
        values.append(round(value, 12))
        k += 1
    return values


def cmd_calibrate(args) -> int:
    space_a, space_b = _load_spaces(args)
    S_ab = io.load_directional_matrix(args.scores_ab)
    S_ba = io.load_directional_matrix(args.scores_ba)
    reference = _load_pair_types(args.reference, space_a, space_b)
    config = PipelineConfig(
        relation_threshold=args.threshold,
        asymmetry_T=args.T,
        taxonomy_boost_n=args.n,
        taxonomy_T_factor_m=args.m,
    )
    config.validate()
    hints = None
    inputs = {
        "scores_ab": args.scores_ab,
        "scores_ba": args.scores_ba,
        "reference": args.reference,
        "space_a": args.space_a,
        "space_b": args.space_b,
    }
    if args.taxonomy_relations:
        hints = _load_pair_types(args.taxonomy_relations, space_a, space_b)
        inputs["taxonomy_relations"] = args.taxonomy_relations
    candidates = _parse_grid(args.grid)
    result = type_inference.calibrate(
        candidates,
        args.param,
        type_inference.CalibrationInputs(
            S_ab=S_ab,
            S_ba=S_ba,
            method=args.method,
            config=config,
            taxonomy_relations=hints,
        ),
        reference,
    )
    io.write_json(
        args.out,
        {
            "parameter": args.param,
            "best_value": result.best_value,
            "accuracy": result.accuracy,
            "table": [{"value": v, "accuracy": acc} for v, acc in result.table],
        },
    )
    _write_manifest(
        args,
        "calibrate",
        inputs,
        {"calibration": args.out},
        {
            "param": args.param,
            "grid": args.grid,
            "method": args.method,
            "relation_threshold": args.threshold,
            "asymmetry_T": args.T,
            "n": args.n,
            "m": args.m,
        },
    )
    print(
        f"best {args.param} = {io.format_float(result.best_value)} "
        f"(macro accuracy {io.format_float(result.accuracy)})"
    )
    return EXIT_OK


def cmd_gt_derive(args) -> int:
    space_orig = io.load_label_space(args.space_orig)
    space_intermediate = io.load_label_space(args.space_intermediate)
    records = groundtruth.load_relabel_records(args.relabels)
    candidates = groundtruth.derive_candidates(records)
    for a, m, _ in candidates:
        if a not in space_orig:
            raise ValueError(f"candidate label {a!r} not in {space_orig.dataset_id!r}")
        if m not in space_intermediate:
            raise ValueError(
                f"candidate label {m!r} not in {space_intermediate.dataset_id!r}"
            )
    graph = groundtruth.candidate_graph(
        candidates, space_orig.dataset_id, space_intermediate.dataset_id
    )
    typed = type_inference.set_theory_types(graph)
    inputs = {
        "relabels": args.relabels,
        "space_orig": args.space_orig,
        "space_intermediate": args.space_intermediate,
    }
    if args.overrides:
        overrides = groundtruth.load_overrides(args.overrides)
        typed = groundtruth.apply_overrides(typed, overrides)
        inputs["overrides"] = args.overrides
    io.save_relation_graph(typed, args.out)
    _write_manifest(args, "gt-derive", inputs, {"relations": args.out}, {})
    print(f"{len(typed)} ground-truth pair(s)")
    return EXIT_OK


def cmd_gt_compose(args) -> int:
    space_a = io.load_label_space(args.space_a)
    space_b = io.load_label_space(args.space_b)
    space_m = io.load_label_space(args.space_intermediate)
    rel_am = io.load_relation_graph(args.gt_am, space_a.dataset_id, space_m.dataset_id)
    rel_bm = io.load_relation_graph(args.gt_bm, space_b.dataset_id, space_m.dataset_id)
    composed, review = groundtruth.compose(rel_am, rel_bm)
    io.save_relation_graph(composed, args.out)
    groundtruth.save_review_items(review, args.review)
    _write_manifest(
        args,
        "gt-compose",
        {
            "gt_am": args.gt_am,
            "gt_bm": args.gt_bm,
            "space_a": args.space_a,
            "space_b": args.space_b,
            "space_intermediate": args.space_intermediate,
        },
        {"relations": args.out, "needs_review": args.review},
        {},
    )
    print(f"{len(composed)} composed pair(s), {len(review)} for review")
    return EXIT_OK


def cmd_eval_pr(args) -> int:
    R = io.load_link_matrix(args.link_scores)
    gt_graph = io.load_relation_graph(args.gt, R.space_a, R.space_b)
    ranked = discovery.rank_pairs(R)
    result = evaluation.pr_curve(ranked, _positive_pairs(gt_graph))
    io.write_csv(args.out, ["recall", "precision"], result.points)
    outputs = {"pr_curve": args.out}
    if args.summary:
        io.write_json(args.summary, {"auc": result.auc, "points": len(result.points)})
        outputs["summary"] = args.summary
    _write_manifest(
        args, "eval-pr", {"link_scores": args.link_scores, "gt": args.gt}, outputs, {}
    )
    print(f"AUC {io.format_float(result.auc)}")
    return EXIT_OK


def cmd_eval_types(args) -> int:
    space_a, space_b = _load_spaces(args)
    pred_graph = io.load_relation_graph(args.pred, space_a.dataset_id, space_b.dataset_id)
    gt_graph = io.load_relation_graph(args.gt, space_a.dataset_id, space_b.dataset_id)
    pred = evaluation.full_type_map(pred_graph, space_a.labels, space_b.labels)
    gt = evaluation.full_type_map(gt_graph, space_a.labels, space_b.labels)
    recall, macro = evaluation.type_accuracy(pred, gt)
    confusion = evaluation.confusion_matrix(pred, gt)
    rows = sorted(
        ((g.value, p.value, count) for (g, p), count in confusion.items()),
    )
    io.write_csv(args.out_confusion, ["gt_type", "pred_type", "count"], rows)
    summary = {
        "macro_accuracy": macro,
        "per_type_recall": {t.value: r for t, r in sorted(recall.items(), key=lambda kv: kv[0].value)},
    }
    outputs = {"confusion": args.out_confusion}
    if args.summary:
        io.write_json(args.summary, summary)
        outputs["summary"] = args.summary
    _write_manifest(
        args,
        "eval-types",
        {
            "pred": args.pred,
            "gt": args.gt,
            "space_a": args.space_a,
            "space_b": args.space_b,
        },
        outputs,
        {},
    )
    for rel_type, value in sorted(recall.items(), key=lambda kv: kv[0].value):
        print(f"{rel_type.value}: {io.format_float(value)}")
    print(f"macro accuracy {io.format_float(macro)}")
    return EXIT_OK


def _parse_type_filter(text: str | None):
    if not text:
        return None
    return {RelationType(part.strip()) for part in text.split(",") if part.strip()}


def cmd_transfer_strength(args) -> int:
    S_ab = io.load_directional_matrix(args.scores_ab)
    graph = io.load_relation_graph(args.relations, S_ab.from_space, S_ab.to_space)
    type_filter = _parse_type_filter(args.types)
    with warnings_module.catch_warnings(record=True) as caught:
        warnings_module.simplefilter("always")
        strengths = applications.all_link_strengths(S_ab, graph, type_filter)
    for warning in caught:
        print(f"warning: {warning.message}", file=sys.stderr)
    io.write_csv(
        args.out,
        ["label", "strength"],
        [(label, float(strengths[label])) for label in S_ab.col_labels],
    )
    outputs = {"strengths": args.out}
    inputs = {"scores_ab": args.scores_ab, "relations": args.relations}
    if args.gains:
        gains = applications.load_gains_csv(args.gains)
        groups = applications.group_gains(strengths, gains, args.n)
        rows = [("low", len(groups.low), groups.low_mean)]
        if groups.mid_mean is not None:
            rows.append(("mid", len(groups.mid), groups.mid_mean))
        rows.append(("top", len(groups.top), groups.top_mean))
        io.write_csv(args.out_groups, ["group", "size", "mean_gain"], rows)
        inputs["gains"] = args.gains
        outputs["groups"] = args.out_groups
    _write_manifest(
        args,
        "transfer-strength",
        inputs,
        outputs,
        {"types": args.types or "", "n": args.n},
    )
    return EXIT_OK


def cmd_refine(args) -> int:
    space_a, space_b = _load_spaces(args)
    graph = io.load_relation_graph(args.relations, space_a.dataset_id, space_b.dataset_id)
    records = io.load_score_records(args.scores)
    reference = None
    inputs = {
        "scores": args.scores,
        "relations": args.relations,
        "space_a": args.space_a,
        "space_b": args.space_b,
    }
    if args.reference:
        raw = io.read_json(args.reference)
        if not isinstance(raw, dict):
            raise ValueError(f"{args.reference}: expected instance_id -> label object")
        reference = {str(k): str(v) for k, v in raw.items()}
        inputs["reference"] = args.reference
    result = applications.refine_labels(args.parent, records, graph, reference)
    io.write_csv(
        args.out,
        ["instance_id", "label"],
        sorted(result.assignments.items()),
    )
    outputs = {"assignments": args.out}
    if result.confusion is not None and args.out_confusion:
        rows = sorted((ref, assigned, count) for (ref, assigned), count in result.confusion.items())
        io.write_csv(args.out_confusion, ["reference", "assigned", "count"], rows)
        outputs["confusion"] = args.out_confusion
    _write_manifest(args, "refine", inputs, outputs, {"parent": args.parent})
    if result.accuracy is not None:
        print(f"top-1 accuracy {io.format_float(result.accuracy)}")
    return EXIT_OK


def cmd_cluster(args) -> int:
    records_a = io.load_embedding_records(args.embeddings_a)
    records_b = io.load_embedding_records(args.embeddings_b)
    name_a = args.dataset_a or Path(args.embeddings_a).stem
    name_b = args.dataset_b or Path(args.embeddings_b).stem
    if name_a == name_b:
        raise ValueError(f"both embedding files map to dataset name {name_a!r}")
    result = applications.cluster_embeddings(
        {name_a: records_a, name_b: records_b}, args.k, seed=args.seed
    )
    io.write_csv(
        args.out,
        ["dataset", "instance_id", "cluster"],
        [(d, i, c) for (d, i), c in sorted(result.assignments.items())],
    )
    outputs = {"clusters": args.out}
    if args.out_composition:
        rows = []
        for cluster in sorted(result.composition):
            for dataset in sorted(result.composition[cluster]):
                rows.append((cluster, dataset, result.composition[cluster][dataset]))
        io.write_csv(args.out_composition, ["cluster", "dataset", "count"], rows)
        outputs["composition"] = args.out_composition
    _write_manifest(
        args,
        "cluster",
        {"embeddings_a": args.embeddings_a, "embeddings_b": args.embeddings_b},
        outputs,
        {"k": args.k, "seed": args.seed},
    )
    return EXIT_OK


def cmd_synth(args) -> int:
    world = synthworld.random_world(
        args.concepts, args.labels_a, args.labels_b, args.sigma, args.per_concept, args.seed
    )
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    records_b, records_a = synthworld.generate_instances(world)
    truth = synthworld.true_relations(world)

    io.save_label_space(world.label_space_a(), out_dir / "space_a.json")
    io.save_label_space(world.label_space_b(), out_dir / "space_b.json")
    io.save_score_records(records_b, out_dir / "scores_b_under_a.jsonl")
    io.save_score_records(records_a, out_dir / "scores_a_under_b.jsonl")
    io.save_relation_graph(truth, out_dir / "true_relations.jsonl")
    synthworld.save_world(world, out_dir / "world.json")
    io.write_manifest(
        _manifest_path(args, out_dir),
        "synth",
        {},
        {
            "space_a": out_dir / "space_a.json",
            "space_b": out_dir / "space_b.json",
            "scores_b_under_a": out_dir / "scores_b_under_a.jsonl",
            "scores_a_under_b": out_dir / "scores_a_under_b.jsonl",
            "true_relations": out_dir / "true_relations.jsonl",
            "world": out_dir / "world.json",
        },
        {
            "concepts": args.concepts,
            "labels_a": args.labels_a,
            "labels_b": args.labels_b,
            "sigma": args.sigma,
            "per_concept": args.per_concept,
            "seed": args.seed,
        },
    )
    print(f"world with {len(truth)} true relation(s) written to {out_dir}")
    return EXIT_OK


# --- parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="labellink", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="SUBCOMMAND")

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        p.add_argument("--manifest", help="override the manifest path")
        return p

    p = add("validate", cmd_validate, "check score records against two label spaces")
    p.add_argument("--space-a", required=True, help="label space whose labels appear in foreign_scores")
    p.add_argument("--space-b", required=True, help="label space the instances belong to")
    p.add_argument("--scores", required=True)
    p.add_argument("--mode", choices=sorted(_MODES), default="pixel")
    p.add_argument("--out", help="optional JSON report path")

    p = add("aggregate", cmd_aggregate, "build a directional score matrix from records")
    p.add_argument("--space-a", required=True, help="foreign space (matrix rows)")
    p.add_argument("--space-b", required=True, help="own space of the scored instances (matrix columns)")
    p.add_argument("--scores", help="per-instance score records")
    p.add_argument("--pixels", help="per-pixel score rows (jsonl)")
    p.add_argument("--pixel-labels", help="sidecar JSON list with the pixel column order")
    p.add_argument("--embeddings", help="embedding records of space B's instances")
    p.add_argument("--references", help="embedding records of space A, used as 1-NN references")
    p.add_argument("--own-references", help="embedding records of space B, for self scores")
    p.add_argument("--mode", choices=sorted(_MODES), default="pixel")
    p.add_argument("--no-easy-filter", action="store_true")
    p.add_argument("--easy-threshold", type=float, default=0.5)
    p.add_argument("--agg", choices=("mean", "max"), default="mean")
    p.add_argument("--parallelism", type=int, default=1)
    p.add_argument("--out", required=True)

    p = add("discover", cmd_discover, "threshold link scores into a relation set")
    p.add_argument("--scores-ab", required=True)
    p.add_argument("--scores-ba", required=True)
    p.add_argument("--threshold", type=float, default=0.25)
    p.add_argument("--link-scores", help="optionally save the link-score matrix")
    p.add_argument("--parallelism", type=int, default=1)
    p.add_argument("--out", required=True)

    p = add("classify-types", cmd_classify_types, "assign relation types to discovered edges")
    p.add_argument("--relations", required=True)
    p.add_argument("--space-a", required=True)
    p.add_argument("--space-b", required=True)
    p.add_argument("--method", choices=("set-theory", "asymmetry", "combined"), required=True)
    p.add_argument("--scores-ab")
    p.add_argument("--scores-ba")
    p.add_argument("--T", type=float, default=2.0, help="directional-score ratio threshold")
    p.add_argument("--taxonomy-relations", help="taxonomy predictions (combined method)")
    p.add_argument("--m", type=float, default=2.0, help="taxonomy adjustment of T")
    p.add_argument("--parallelism", type=int, default=1)
    p.add_argument("--out", required=True)

    p = add("taxonomy-relate", cmd_taxonomy_relate, "predict relations from a taxonomy")
    p.add_argument("--taxonomy", required=True)
    p.add_argument("--space-a", required=True)
    p.add_argument("--space-b", required=True)
    p.add_argument("--allow-unmapped", action="store_true",
                   help="labels mapped to the unmapped sentinel predict none instead of failing")
    p.add_argument("--strengths", help="optionally save the strength matrix")
    p.add_argument("--out", required=True)

    p = add("embed-relate", cmd_embed_relate, "discover + type relations from word embeddings")
    p.add_argument("--word-vectors", required=True)
    p.add_argument("--space-a", required=True)
    p.add_argument("--space-b", required=True)
    p.add_argument("--threshold", type=float, default=0.25,
                   help="applied to cosine similarity rescaled to [0,1]")
    p.add_argument("--link-scores", help="optionally save the similarity matrix")
    p.add_argument("--out", required=True)

    p = add("combine", cmd_combine, "boost link scores where a taxonomy agrees")
    p.add_argument("--link-scores", required=True)
    p.add_argument("--taxonomy-relations", required=True)
    p.add_argument("--space-a", required=True)
    p.add_argument("--space-b", required=True)
    p.add_argument("--n", type=float, default=2.0)
    p.add_argument("--out", required=True)

    p = add("calibrate", cmd_calibrate, "grid-search a threshold against reference types")
    p.add_argument("--scores-ab", required=True)
    p.add_argument("--scores-ba", required=True)
    p.add_argument("--param", choices=("relation_threshold", "asymmetry_T"), required=True)
    p.add_argument("--grid", required=True, help="start:stop:step, stop inclusive")
    p.add_argument("--reference", required=True, help="typed relations to calibrate against")
    p.add_argument("--space-a", required=True)
    p.add_argument("--space-b", required=True)
    p.add_argument("--method", choices=("set-theory", "asymmetry", "combined"), default="asymmetry")
    p.add_argument("--taxonomy-relations")
    p.add_argument("--threshold", type=float, default=0.25, help="fixed relation threshold")
    p.add_argument("--T", type=float, default=2.0, help="fixed asymmetry threshold")
    p.add_argument("--n", type=float, default=2.0)
    p.add_argument("--m", type=float, default=2.0)
    p.add_argument("--out", required=True)

    p = add("gt-derive", cmd_gt_derive, "derive ground-truth pairs from relabel counts")
    p.add_argument("--relabels", required=True)
    p.add_argument("--overrides")
    p.add_argument("--space-orig", required=True)
    p.add_argument("--space-intermediate", required=True)
    p.add_argument("--out", required=True)

    p = add("gt-compose", cmd_gt_compose, "compose two ground-truth sides through the intermediate space")
    p.add_argument("--gt-am", required=True)
    p.add_argument("--gt-bm", required=True)
    p.add_argument("--space-a", required=True)
    p.add_argument("--space-b", required=True)
    p.add_argument("--space-intermediate", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--review", required=True, help="needs-review output path")

    p = add("eval-pr", cmd_eval_pr, "precision-recall curve of link scores vs ground truth")
    p.add_argument("--link-scores", required=True)
    p.add_argument("--gt", required=True)
    p.add_argument("--summary", help="optional JSON summary with the AUC")
    p.add_argument("--out", required=True, help="CSV of recall,precision points")

    p = add("eval-types", cmd_eval_types, "per-type recall and confusion matrix")
    p.add_argument("--pred", required=True)
    p.add_argument("--gt", required=True)
    p.add_argument("--space-a", required=True)
    p.add_argument("--space-b", required=True)
    p.add_argument("--summary", help="optional JSON summary")
    p.add_argument("--out-confusion", required=True)

    p = add("transfer-strength", cmd_transfer_strength, "link strength per target label (+ gain groups)")
    p.add_argument("--scores-ab", required=True)
    p.add_argument("--relations", required=True)
    p.add_argument("--types", help="comma-separated relation types to include")
    p.add_argument("--gains", help="label,gain CSV to group")
    p.add_argument("--n", type=int, default=2, help="size of the low/top groups")
    p.add_argument("--out", required=True)
    p.add_argument("--out-groups", help="CSV for the low/mid/top gain means")

    p = add("refine", cmd_refine, "relabel a coarse label's instances with fine child labels")
    p.add_argument("--parent", required=True)
    p.add_argument("--scores", required=True)
    p.add_argument("--relations", required=True)
    p.add_argument("--space-a", required=True)
    p.add_argument("--space-b", required=True)
    p.add_argument("--reference", help="JSON instance_id -> expected fine label")
    p.add_argument("--out", required=True)
    p.add_argument("--out-confusion")

    p = add("cluster", cmd_cluster, "k-means over pooled embeddings of two datasets")
    p.add_argument("--embeddings-a", required=True)
    p.add_argument("--embeddings-b", required=True)
    p.add_argument("--dataset-a", help="name for the first dataset (default: file stem)")
    p.add_argument("--dataset-b", help="name for the second dataset (default: file stem)")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--seed", type=int, default=applications.DEFAULT_CLUSTER_SEED)
    p.add_argument("--out", required=True)
    p.add_argument("--out-composition")

    p = add("synth", cmd_synth, "generate a synthetic world with known relations")
    p.add_argument("--concepts", type=int, required=True)
    p.add_argument("--labels-a", type=int, required=True)
    p.add_argument("--labels-b", type=int, required=True)
    p.add_argument("--sigma", type=float, default=0.0)
    p.add_argument("--per-concept", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", required=True)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (LabelLinkError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
