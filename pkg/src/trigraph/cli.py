"""Command-line surface: one subcommand per pipeline stage plus the experiment sweeps.

All artifacts land under --out and are written atomically (temp file, then
rename). Existing artifacts are only replaced with --force. Every source of
randomness derives from --seed (or the TRIGRAPH_SEED environment variable).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from contextlib import contextmanager
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import cluster as cluster_mod
from . import figures
from .embed import init_model, load_model, model_to_bytes, trace_to_csv, train
from .errors import ConfigError, TrigraphError
from .evaluate import baseline_authorlist, baseline_rand, macro_f1, paired_t_test
from .graphs import build_trigraph, edge_list_text
from .ingest import (
    anonymize,
    class_sizes,
    generate_synthetic,
    load_records,
    select_instance,
    serialize_records,
    serialize_truth,
)
from .pipeline import (
    COMPONENT_CHOICES,
    RunConfig,
    load_instance,
    multi_run,
    resolve_n_clusters,
    run_once,
)

ABLATION_MASKS = (("pd",), ("pd", "dd"), ("pd", "dd", "pp"))


class StageError(TrigraphError):
    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"{stage}: {cause}")
        self.stage = stage


@contextmanager
def _stage(name: str):
    try:
        yield
    except StageError:
        raise
    except (TrigraphError, OSError, ValueError) as exc:
        raise StageError(name, exc) from exc


def _check_fresh(path: Path, force: bool) -> None:
    if path.exists() and not force:
        raise ConfigError(f"{path} exists (use --force to overwrite)")


def _write_text(path: Path, text: str, force: bool) -> Path:
    _check_fresh(path, force)
    tmp = path.with_name(f".{path.name}.tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)
    return path


def _write_bytes(path: Path, data: bytes, force: bool) -> Path:
    _check_fresh(path, force)
    tmp = path.with_name(f".{path.name}.tmp")
    tmp.write_bytes(data)
    os.replace(tmp, path)
    return path


def _write_figure(path: Path, force: bool, render) -> Path:
    _check_fresh(path, force)
    tmp = path.with_name(f".{path.name}.tmp{path.suffix}")
    render(tmp)
    os.replace(tmp, path)
    return path


def _write_json(path: Path, obj, force: bool) -> Path:
    return _write_text(path, json.dumps(obj, indent=2, sort_keys=True) + "\n", force)


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _resolve_seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    return int(os.environ.get("TRIGRAPH_SEED", "0"))


def _config_from_args(args) -> RunConfig:
    cfg = RunConfig(
        records=Path(args.records) if args.records else None,
        truth=Path(args.truth) if getattr(args, "truth", None) else None,
        name_ref=args.name_ref or "",
        dim=args.dim,
        l2=args.l2,
        lr=args.lr,
        epochs=args.epochs,
        n_clusters=args.clusters,
        metric=args.metric,
        seed=_resolve_seed(args),
        n_runs=args.runs,
        components=tuple(args.components),
        lr_decay=getattr(args, "lr_decay", False),
        out_dir=Path(args.out),
        force=args.force,
    )
    cfg.validate()
    return cfg


def _config_echo(cfg: RunConfig) -> dict:
    return {
        "dim": cfg.dim,
        "l2": cfg.l2,
        "lr": cfg.lr,
        "epochs": cfg.epochs,
        "clusters": cfg.n_clusters,
        "metric": cfg.metric,
        "seed": cfg.seed,
        "runs": cfg.n_runs,
        "components": list(cfg.components),
        "lr_decay": cfg.lr_decay,
    }


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_synth(args) -> int:
    out = _out_dir(args)
    with _stage("synth"):
        rs = generate_synthetic(
            args.entities,
            args.alpha,
            args.docs_min,
            args.pool,
            args.within_collab,
            _resolve_seed(args),
            name_ref=args.name_ref,
        )
        _write_text(out / "records.tsv", serialize_records(rs), args.force)
        _write_text(out / "truth.tsv", serialize_truth(rs), args.force)
        sizes = class_sizes(rs.truth.values())
        _write_figure(
            out / "class_sizes.png", args.force, lambda p: figures.plot_class_sizes(sizes, p)
        )
    print(f"synthesized {len(rs)} documents over {len(sizes)} entities -> {out}")
    return 0


def cmd_anonymize(args) -> int:
    out = _out_dir(args)
    with _stage("anonymize"):
        rs = load_records(args.records, args.truth)
        renamed, mapping = anonymize(rs, _resolve_seed(args))
        _write_text(out / "records.tsv", serialize_records(renamed), args.force)
        if renamed.truth is not None:
            _write_text(out / "truth.tsv", serialize_truth(renamed), args.force)
        keymap = "".join(f"{old}\t{new}\n" for old, new in mapping.items())
        _write_text(out / "keymap.tsv", keymap, args.force)
    print(f"anonymized {len(renamed)} records, {len(mapping)} keys -> {out}")
    return 0


def cmd_build_graphs(args) -> int:
    out = _out_dir(args)
    with _stage("ingest"):
        rs = load_records(args.records)
        inst = select_instance(rs, args.name_ref)
    with _stage("graphs"):
        tg = build_trigraph(inst)
        _write_text(out / "gpp.tsv", edge_list_text(tg.g_pp.edge_list), args.force)
        _write_text(out / "gpd.tsv", edge_list_text(tg.g_pd.edges), args.force)
        _write_text(out / "gdd.tsv", edge_list_text(tg.g_dd.edge_list), args.force)
    print(
        f"{inst.n_docs} docs, {inst.n_collaborators} collaborators; edges "
        f"pp={tg.g_pp.n_edges} pd={tg.g_pd.n_edges} dd={tg.g_dd.n_edges} -> {out}"
    )
    return 0


def cmd_train(args) -> int:
    out = _out_dir(args)
    cfg = _config_from_args(args)
    with _stage("ingest"):
        inst = load_instance(cfg)
    with _stage("graphs"):
        tg = build_trigraph(inst)
    with _stage("train"):
        model = init_model(inst.n_collaborators, inst.n_docs, cfg.dim, cfg.l2, cfg.lr, cfg.seed)
        model, trace = train(model, tg, cfg.epochs, components=cfg.components, lr_decay=cfg.lr_decay)
        _write_bytes(out / "model.bin", model_to_bytes(model), args.force)
        _write_text(out / "trace.csv", trace_to_csv(trace), args.force)
        if trace:
            _write_figure(out / "trace.png", args.force, lambda p: figures.plot_trace(trace, p))
    final = f"loss={trace[-1].loss:.4f} auc={trace[-1].auc:.4f}" if trace else "no epochs"
    print(f"trained {cfg.epochs} epochs ({final}) -> {out}")
    return 0


def cmd_cluster(args) -> int:
    out = _out_dir(args)
    with _stage("ingest"):
        rs = load_records(args.records, args.truth)
        inst = select_instance(rs, args.name_ref)
    with _stage("cluster"):
        model = load_model(args.model)
        if model.n_docs != inst.n_docs:
            raise ConfigError(
                f"checkpoint has {model.n_docs} documents, instance has {inst.n_docs}"
            )
        n_clusters = args.clusters
        if n_clusters is None:
            if inst.truth is None:
                raise ConfigError("no --clusters given and no truth to infer it from")
            n_clusters = inst.n_classes
        dist = cluster_mod.pairwise_distances(model.doc_vecs, args.metric)
        dendrogram = cluster_mod.hac_group_average(dist)
        assignment = cluster_mod.cut(dendrogram, n_clusters)
        _write_text(out / "assignment.csv", cluster_mod.assignment_to_csv(inst.docs, assignment), args.force)
        _write_text(out / "dendrogram.csv", cluster_mod.dendrogram_to_csv(dendrogram), args.force)
    print(f"cut {inst.n_docs} documents into {n_clusters} clusters -> {out}")
    return 0


def _read_assignment(path: Path, doc_keys: list[str]) -> list[int]:
    by_key: dict[str, int] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line == "doc_key,cluster_id":
                continue
            key, _, label = line.rpartition(",")
            if not key:
                raise ConfigError(f"{path}: line {line_no}: expected doc_key,cluster_id")
            by_key[key] = int(label)
    missing = [key for key in doc_keys if key not in by_key]
    if missing:
        raise ConfigError(f"{path}: no cluster for {missing[0]!r} (and {len(missing) - 1} more)")
    return [by_key[key] for key in doc_keys]


def cmd_eval(args) -> int:
    out = _out_dir(args)
    with _stage("ingest"):
        if not args.truth:
            raise ConfigError("eval requires --truth")
        rs = load_records(args.records, args.truth)
        inst = select_instance(rs, args.name_ref)
    with _stage("eval"):
        labels = _read_assignment(Path(args.assignment), inst.docs)
        report = macro_f1(labels, inst.truth)
        n_clusters = args.clusters if args.clusters is not None else inst.n_classes
        seed = _resolve_seed(args)
        rand_score = macro_f1(baseline_rand(inst.n_docs, n_clusters, seed), inst.truth).macro_f1
        author_score = macro_f1(baseline_authorlist(inst, n_clusters, args.metric), inst.truth).macro_f1
        payload = {
            "name_ref": inst.name_ref,
            "method": "assignment",
            "L": n_clusters,
            "seed": seed,
            "macro_f1": report.macro_f1,
            "per_class_f1": report.per_class_f1,
            "baselines": {"rand": rand_score, "authorlist": author_score},
        }
        if args.external_scores:
            payload["external"] = json.loads(Path(args.external_scores).read_text())
        _write_json(out / "report.json", payload, args.force)
    print(f"macro_f1={report.macro_f1:.4f} (rand={rand_score:.4f}, authorlist={author_score:.4f})")
    return 0


def cmd_pipeline(args) -> int:
    out = _out_dir(args)
    cfg = _config_from_args(args)
    with _stage("ingest"):
        inst = load_instance(cfg)
    with _stage("graphs"):
        tg = build_trigraph(inst)
        _write_text(out / "gpp.tsv", edge_list_text(tg.g_pp.edge_list), args.force)
        _write_text(out / "gpd.tsv", edge_list_text(tg.g_pd.edges), args.force)
        _write_text(out / "gdd.tsv", edge_list_text(tg.g_dd.edge_list), args.force)
    with _stage("pipeline"):
        report, results = multi_run(cfg, inst=inst, tg=tg)
        base = results[0]
        _write_bytes(out / "model.bin", model_to_bytes(base.model), args.force)
        _write_text(out / "trace.csv", trace_to_csv(base.trace), args.force)
        _write_text(
            out / "assignment.csv",
            cluster_mod.assignment_to_csv(inst.docs, base.assignment),
            args.force,
        )
        _write_text(out / "dendrogram.csv", cluster_mod.dendrogram_to_csv(base.dendrogram), args.force)
        if base.trace:
            _write_figure(out / "trace.png", args.force, lambda p: figures.plot_trace(base.trace, p))
        if inst.truth is not None:
            sizes = class_sizes(inst.truth)
            _write_figure(
                out / "class_sizes.png", args.force, lambda p: figures.plot_class_sizes(sizes, p)
            )
        report.traces = ["trace.csv"]
        n_clusters = resolve_n_clusters(cfg, inst) if inst.truth or cfg.n_clusters else None
        payload = {
            "name_ref": inst.name_ref,
            "method": "pipeline",
            "config": _config_echo(cfg),
            "n_docs": inst.n_docs,
            "n_collaborators": inst.n_collaborators,
            "L": n_clusters,
            "macro_f1": report.macro_f1 if inst.truth else None,
            "std": report.std,
            "per_run": report.per_run,
            "per_class_f1": report.per_class_f1,
            "baselines": report.baselines,
            "isolated_docs": report.isolated_docs,
            "failed_runs": report.failed_runs,
            "traces": report.traces,
        }
        if args.external_scores:
            payload["external"] = json.loads(Path(args.external_scores).read_text())
        _write_json(out / "report.json", payload, args.force)
        _write_text(out / "runs.jsonl", _runs_jsonl(inst, cfg, results), args.force)
    if inst.truth is not None:
        print(
            f"macro_f1={report.macro_f1:.4f} (std={report.std:.4f}, "
            f"rand={report.baselines['rand']:.4f}, authorlist={report.baselines['authorlist']:.4f})"
        )
    else:
        print(f"pipeline finished, no truth labels; artifacts -> {out}")
    return 0


def _runs_jsonl(inst, cfg: RunConfig, results) -> str:
    """Per-run records including wall time; kept out of report.json so reruns byte-match."""
    n_clusters = resolve_n_clusters(cfg, inst) if inst.truth or cfg.n_clusters else None
    lines = []
    for res in results:
        rec = {
            "name_ref": inst.name_ref,
            "method": "pipeline",
            "L": n_clusters,
            "seed": res.seed,
            "macro_f1": res.report.macro_f1 if res.report else None,
            "per_class_f1": res.report.per_class_f1 if res.report else None,
            "runtime_ms": round(res.runtime_ms, 3),
        }
        lines.append(json.dumps(rec, sort_keys=True))
    if inst.truth is not None and n_clusters is not None:
        for res in results:
            started = time.perf_counter()
            score = macro_f1(baseline_rand(inst.n_docs, n_clusters, res.seed), inst.truth)
            lines.append(
                json.dumps(
                    {
                        "name_ref": inst.name_ref,
                        "method": "rand",
                        "L": n_clusters,
                        "seed": res.seed,
                        "macro_f1": score.macro_f1,
                        "per_class_f1": score.per_class_f1,
                        "runtime_ms": round((time.perf_counter() - started) * 1000.0, 3),
                    },
                    sort_keys=True,
                )
            )
        started = time.perf_counter()
        score = macro_f1(baseline_authorlist(inst, n_clusters, cfg.metric), inst.truth)
        lines.append(
            json.dumps(
                {
                    "name_ref": inst.name_ref,
                    "method": "authorlist",
                    "L": n_clusters,
                    "seed": cfg.seed,
                    "macro_f1": score.macro_f1,
                    "per_class_f1": score.per_class_f1,
                    "runtime_ms": round((time.perf_counter() - started) * 1000.0, 3),
                },
                sort_keys=True,
            )
        )
    return "".join(line + "\n" for line in lines)


def cmd_sweep_dim(args) -> int:
    out = _out_dir(args)
    cfg = _config_from_args(args)
    with _stage("ingest"):
        inst = load_instance(cfg)
        if inst.truth is None:
            raise ConfigError("sweep-dim requires truth labels")
    with _stage("graphs"):
        tg = build_trigraph(inst)
    rows = []
    for dim in args.dims:
        try:
            report, _ = multi_run(replace(cfg, dim=dim), inst=inst, tg=tg)
            rows.append((dim, report.mean, report.std))
        except TrigraphError as exc:
            print(f"sweep-dim: dim={dim} failed: {exc}", file=sys.stderr)
            rows.append((dim, float("nan"), float("nan")))
    with _stage("report"):
        csv = "k,mean_macro_f1,std\n" + "".join(
            f"{k},{mean!r},{std!r}\n" for k, mean, std in rows
        )
        _write_text(out / "sweep_dim.csv", csv, args.force)
        ok = [(k, m, s) for k, m, s in rows if np.isfinite(m)]
        if ok:
            _write_figure(
                out / "sweep_dim.png",
                args.force,
                lambda p: figures.plot_sweep(
                    [r[0] for r in ok], [r[1] for r in ok], [r[2] for r in ok], "embedding dimension", p
                ),
            )
    for k, mean, std in rows:
        print(f"dim={k}: macro_f1={mean:.4f} (std={std:.4f})")
    return 0


def cmd_sweep_l(args) -> int:
    out = _out_dir(args)
    cfg = _config_from_args(args)
    with _stage("ingest"):
        inst = load_instance(cfg)
        if inst.truth is None:
            raise ConfigError("sweep-l requires truth labels")
    with _stage("graphs"):
        tg = build_trigraph(inst)
    with _stage("train"):
        # One embedding serves every cut; the merge tree is reused across L.
        base = run_once(inst, tg, replace(cfg, n_clusters=None), cfg.seed)
    l_values = args.l_values
    if not l_values:
        true_l = inst.n_classes
        grid = [true_l - 10, true_l - 5, true_l, true_l + 5, true_l + 10]
        l_values = sorted({min(max(1, l), inst.n_docs) for l in grid})
    rows = []
    for l_value in l_values:
        try:
            assignment = cluster_mod.cut(base.dendrogram, l_value)
            rows.append((l_value, macro_f1(assignment, inst.truth).macro_f1))
        except (ValueError, TrigraphError) as exc:
            print(f"sweep-l: L={l_value} failed: {exc}", file=sys.stderr)
            rows.append((l_value, float("nan")))
    with _stage("report"):
        csv = "L,macro_f1\n" + "".join(f"{l},{score!r}\n" for l, score in rows)
        _write_text(out / "sweep_l.csv", csv, args.force)
        ok = [(l, s) for l, s in rows if np.isfinite(s)]
        if ok:
            _write_figure(
                out / "sweep_l.png",
                args.force,
                lambda p: figures.plot_sweep(
                    [r[0] for r in ok], [r[1] for r in ok], [0.0] * len(ok), "cluster count", p
                ),
            )
    for l_value, score in rows:
        print(f"L={l_value}: macro_f1={score:.4f}")
    return 0


def cmd_ablation(args) -> int:
    out = _out_dir(args)
    cfg = _config_from_args(args)
    with _stage("ingest"):
        inst = load_instance(cfg)
        if inst.truth is None:
            raise ConfigError("ablation requires truth labels")
    with _stage("graphs"):
        tg = build_trigraph(inst)
    masks = [tuple(args.components)] if args.mask_only else list(ABLATION_MASKS)
    rows = []
    for mask in masks:
        try:
            report, _ = multi_run(replace(cfg, components=mask), inst=inst, tg=tg)
            rows.append(("+".join(mask), report.mean, report.std))
        except TrigraphError as exc:
            print(f"ablation: {'+'.join(mask)} failed: {exc}", file=sys.stderr)
            rows.append(("+".join(mask), float("nan"), float("nan")))
    with _stage("report"):
        csv = "components,mean_macro_f1,std\n" + "".join(
            f"{name},{mean!r},{std!r}\n" for name, mean, std in rows
        )
        _write_text(out / "ablation.csv", csv, args.force)
        ok = [(n, m, s) for n, m, s in rows if np.isfinite(m)]
        if ok:
            _write_figure(
                out / "ablation.png",
                args.force,
                lambda p: figures.plot_ablation(
                    [r[0] for r in ok], [r[1] for r in ok], [r[2] for r in ok], p
                ),
            )
    for name, mean, std in rows:
        print(f"{name}: macro_f1={mean:.4f} (std={std:.4f})")
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _add_io_args(parser) -> None:
    parser.add_argument("--out", required=True, help="output directory for artifacts")
    parser.add_argument("--force", action="store_true", help="overwrite existing artifacts")


def _add_data_args(parser, records_required=True) -> None:
    parser.add_argument("--records", required=records_required, help="record TSV path")
    parser.add_argument("--truth", default=None, help="truth TSV path")
    parser.add_argument("--name-ref", dest="name_ref", default=None, help="ambiguous name key")


def _add_model_args(parser) -> None:
    parser.add_argument("--dim", type=int, default=20, help="embedding dimension")
    parser.add_argument("--lambda", dest="l2", type=float, default=0.01, help="l2 penalty weight")
    parser.add_argument("--lr", type=float, default=0.02, help="SGD learning rate")
    parser.add_argument("--epochs", type=int, default=50, help="training epochs")
    parser.add_argument("--clusters", type=int, default=None, help="cluster count (default: truth classes)")
    parser.add_argument("--metric", choices=["cosine", "euclidean"], default="cosine")
    parser.add_argument("--runs", type=int, default=10, help="seeded repetitions to average")
    parser.add_argument(
        "--components",
        nargs="+",
        choices=list(COMPONENT_CHOICES),
        default=list(COMPONENT_CHOICES),
        help="networks used in training",
    )
    parser.add_argument("--lr-decay", dest="lr_decay", action="store_true", help="linear learning-rate decay")


def _add_seed_arg(parser) -> None:
    parser.add_argument("--seed", type=int, default=None, help="base seed (default: $TRIGRAPH_SEED or 0)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trigraph",
        description="Disambiguate namesake entities in anonymized document-author records.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic ambiguous-name record set")
    p.add_argument("--entities", type=int, default=20, help="hidden entity count")
    p.add_argument("--alpha", type=float, default=2.1, help="power-law exponent for class sizes")
    p.add_argument("--docs-min", dest="docs_min", type=int, default=15, help="minimum documents per entity")
    p.add_argument("--pool", type=int, default=200, help="global collaborator pool size")
    p.add_argument("--within-collab", dest="within_collab", type=float, default=0.9,
                   help="probability a co-author comes from the owner's private pool")
    p.add_argument("--name-ref", dest="name_ref", default="focal", help="ambiguous name key to embed")
    _add_seed_arg(p)
    _add_io_args(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("anonymize", help="replace every key with a random hex token")
    _add_data_args(p)
    _add_seed_arg(p)
    _add_io_args(p)
    p.set_defaults(func=cmd_anonymize)

    p = sub.add_parser("build-graphs", help="dump the three networks as edge lists")
    _add_data_args(p)
    _add_io_args(p)
    p.set_defaults(func=cmd_build_graphs)

    p = sub.add_parser("train", help="train the joint embedding and write a checkpoint")
    _add_data_args(p)
    _add_model_args(p)
    _add_seed_arg(p)
    _add_io_args(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("cluster", help="cluster a trained checkpoint's document vectors")
    _add_data_args(p)
    p.add_argument("--model", required=True, help="model checkpoint path")
    p.add_argument("--clusters", type=int, default=None)
    p.add_argument("--metric", choices=["cosine", "euclidean"], default="cosine")
    _add_io_args(p)
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("eval", help="score a stored assignment against truth")
    _add_data_args(p)
    p.add_argument("--assignment", required=True, help="assignment CSV path")
    p.add_argument("--clusters", type=int, default=None)
    p.add_argument("--metric", choices=["cosine", "euclidean"], default="cosine")
    p.add_argument("--external-scores", dest="external_scores", default=None,
                   help="JSON file of externally computed scores to include")
    _add_seed_arg(p)
    _add_io_args(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("pipeline", help="run ingest, graphs, training, clustering, and scoring")
    _add_data_args(p)
    _add_model_args(p)
    _add_seed_arg(p)
    p.add_argument("--external-scores", dest="external_scores", default=None,
                   help="JSON file of externally computed scores to include")
    _add_io_args(p)
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("sweep-dim", help="pipeline once per embedding dimension")
    _add_data_args(p)
    _add_model_args(p)
    _add_seed_arg(p)
    p.add_argument("--dims", nargs="+", type=int, default=[10, 20, 30, 40, 50])
    _add_io_args(p)
    p.set_defaults(func=cmd_sweep_dim)

    p = sub.add_parser("sweep-l", help="train once, cut the dendrogram at several cluster counts")
    _add_data_args(p)
    _add_model_args(p)
    _add_seed_arg(p)
    p.add_argument("--l-values", dest="l_values", nargs="+", type=int, default=None)
    _add_io_args(p)
    p.set_defaults(func=cmd_sweep_l)

    p = sub.add_parser("ablation", help="add the networks cumulatively and compare scores")
    _add_data_args(p)
    _add_model_args(p)
    _add_seed_arg(p)
    p.add_argument("--mask-only", dest="mask_only", action="store_true",
                   help="run only the mask given via --components instead of the cumulative series")
    _add_io_args(p)
    p.set_defaults(func=cmd_ablation)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except StageError as exc:
        print(f"trigraph: {exc}", file=sys.stderr)
        return 1
    except TrigraphError as exc:
        print(f"trigraph: {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
