"""Batch command-line entry points; thin wrappers over the core package.

Exit codes: 0 success, 1 runtime error, 2 usage or validation failure.
"""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click

from . import metrics as metrics_mod
from .config import ServiceConfig, load_config
from .dataset import (
    IngestOptions,
    dataset_from_json,
    dataset_to_json,
    ingest_dataset,
)
from .distribution import DistributionEngine
from .errors import DatasetError, QueryError
from .matching import MatchingConfig, match_dataset
from .matrix import MatrixSpec, build_matrix, matrix_to_csv, matrix_to_json
from .records import (
    fallback_hierarchy,
    hierarchy_from_meta,
    read_meta,
    read_records,
    write_meta,
    write_records,
)
from .subsets import DiscretizationSpec, mine_subsets, rank_subsets, subsets_to_json

TASK_FLAGS = {"cls": "classification", "det": "detection", "seg": "segmentation"}


def handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (DatasetError, QueryError, FileNotFoundError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)
        except click.ClickException:
            raise
        except Exception as exc:  # noqa: BLE001 - boundary between CLI and engine
            click.echo(f"error: {exc}", err=True)
            sys.exit(1)

    return wrapper


@click.group()
def main():
    """Unified evaluation of classification, detection and segmentation models."""


@main.command()
@click.argument("ground_truth", type=click.Path(exists=True, dir_okay=False))
@click.argument("predictions", type=click.Path(exists=True, dir_okay=False))
@click.option("--task", type=click.Choice(["cls", "det", "seg"]), default=None, help="Override schema auto-detection.")
@click.option("--features", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Write the validated dataset cache.")
@handle_errors
def ingest(ground_truth, predictions, task, features, out):
    """Validate a ground-truth / predictions file pair and cache the dataset."""
    options = IngestOptions(task=TASK_FLAGS.get(task), feature_file=features)
    dataset = ingest_dataset(ground_truth, predictions, options)
    n_images, n_gts, n_preds = dataset.counts()
    if out:
        Path(out).write_text(json.dumps(dataset_to_json(dataset), sort_keys=True, separators=(",", ":")) + "\n")
    click.echo(f"{n_images} images, {n_gts} gts, {n_preds} preds")


def _load_dataset_cache(path: str):
    return dataset_from_json(json.loads(Path(path).read_text()))


@main.command()
@click.argument("dataset", type=click.Path(exists=True, dir_okay=False))
@click.option("--alpha", type=float, default=0.1, show_default=True, help="Minimum IoU for a candidate pair.")
@click.option("--lambda1", type=float, default=0.5, show_default=True, help="Label-consistency weight.")
@click.option("--lambda2", type=float, default=0.25, show_default=True, help="Position-consistency weight.")
@click.option("--include-crowd", is_flag=True, default=False)
@click.option("--out", type=click.Path(dir_okay=False), default="records.ndjson", show_default=True)
@handle_errors
def match(dataset, alpha, lambda1, lambda2, include_crowd, out):
    """Match predictions to ground truth and cache the evaluation records."""
    ds = _load_dataset_cache(dataset)
    cfg = MatchingConfig(lambda1=lambda1, lambda2=lambda2, alpha=alpha, include_crowd=include_crowd)
    click.echo(f"matching with lambda1={cfg.lambda1:g} lambda2={cfg.lambda2:g} alpha={cfg.alpha:g}")
    records = match_dataset(ds, cfg)
    write_records(out, records)
    write_meta(
        out,
        {
            "task": ds.task,
            "background_id": ds.hierarchy.background_id,
            "classes": [
                {"id": n.class_id, "name": n.name, "parent": n.parent_id}
                for n in ds.hierarchy.nodes
            ],
            "images": [
                {"id": im.image_id, "width": im.width, "height": im.height, "file_name": im.file_name}
                for im in sorted(ds.images.values(), key=lambda im: im.image_id)
            ],
            "counts": {
                "images": len(ds.images),
                "ground_truth": len(ds.ground_truth),
                "predictions": len(ds.predictions),
            },
            "matching": {"lambda1": cfg.lambda1, "lambda2": cfg.lambda2, "alpha": cfg.alpha},
        },
    )
    click.echo(f"{len(records)} records -> {out}")


def _records_context(records_path: str, config: ServiceConfig):
    records = read_records(records_path)
    meta = read_meta(records_path)
    if meta is not None:
        hierarchy = hierarchy_from_meta(meta)
        task = meta["task"]
    else:
        hierarchy = fallback_hierarchy(records)
        task = "detection" if any(r.gt_box or r.pred_box for r in records) else "classification"
    engine = DistributionEngine(
        records,
        hierarchy,
        task,
        size_tolerance=config.size_tolerance,
        direction_tolerance=config.direction_tolerance,
    )
    return records, hierarchy, task, engine


def _write_or_echo(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        click.echo(text, nl=False)


@main.command("eval")
@click.argument("records", type=click.Path(exists=True, dir_okay=False))
@click.option("--iou", type=float, default=0.5, show_default=True)
@click.option("--conf", type=float, default=0.5, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["table", "csv"]), default="table", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@handle_errors
def eval_command(records, iou, conf, fmt, out):
    """Per-class precision/recall/AP table and dataset mAP."""
    recs, hierarchy, _, _ = _records_context(records, load_config())
    summaries = metrics_mod.class_summaries(recs, hierarchy, iou_threshold=iou, confidence_threshold=conf)
    if fmt == "csv":
        _write_or_echo(metrics_mod.summaries_to_csv(summaries), out)
        return
    lines = [f"{'class':<24}{'precision':>10}{'recall':>10}{'ap':>10}{'objects':>9}"]
    for s in summaries:
        lines.append(
            f"{s.name:<24}"
            f"{'-' if s.precision is None else format(s.precision, '.4f'):>10}"
            f"{'-' if s.recall is None else format(s.recall, '.4f'):>10}"
            f"{'-' if s.ap is None else format(s.ap, '.4f'):>10}"
            f"{s.object_count:>9}"
        )
    m_ap = metrics_mod.mean_average_precision(summaries)
    lines.append(f"mAP: {'-' if m_ap is None else format(m_ap, '.6f')}")
    _write_or_echo("\n".join(lines) + "\n", out)


@main.command()
@click.argument("records", type=click.Path(exists=True, dir_okay=False))
@click.option("--class", "class_name", required=True, help="Class to explore (name).")
@click.option("--beta", type=float, default=0.1, show_default=True, help="Minimum subset size fraction.")
@click.option("--sort", default="support:desc", show_default=True, help="attr:asc|desc[:weight], comma-separated.")
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@handle_errors
def subsets(records, class_name, beta, sort, fmt, out):
    """Mine and rank candidate data subsets for one class."""
    from .service.app import parse_sort_keys

    _, hierarchy, _, engine = _records_context(records, load_config())
    try:
        class_id = hierarchy.id_of(class_name)
    except KeyError:
        raise QueryError(f"unknown class {class_name!r}") from None
    mined = mine_subsets(engine, class_id, DiscretizationSpec(beta=beta))
    ranked = rank_subsets(mined, parse_sort_keys(sort))
    rows = subsets_to_json(ranked)
    if fmt == "json":
        _write_or_echo(json.dumps(rows, indent=1, sort_keys=True) + "\n", out)
        return
    import csv as csv_mod
    import io as io_mod

    buf = io_mod.StringIO()
    writer = csv_mod.writer(buf, lineterminator="\n")
    metric_names = ["precision", "recall", "ap", "meanSize", "meanAspect", "meanConfidence"]
    writer.writerow(["subset", "support"] + metric_names)
    for row in rows:
        writer.writerow(
            [row["label"], row["support"]]
            + ["" if row["metrics"].get(m) is None else repr(row["metrics"][m]) for m in metric_names]
        )
    _write_or_echo(buf.getvalue(), out)


@main.command()
@click.argument("records", type=click.Path(exists=True, dir_okay=False))
@click.option("--mode", type=click.Choice(["confusion", "size", "direction"]), default="confusion", show_default=True)
@click.option("--subtree", default=None, help="Restrict to one super-class (name).")
@click.option("--normalize", type=click.Choice(["none", "row", "column"]), default="none", show_default=True)
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@handle_errors
def matrix(records, mode, subtree, normalize, fmt, out):
    """Export the class matrix in confusion, size or direction mode."""
    _, hierarchy, _, engine = _records_context(records, load_config())
    subtree_root = None
    if subtree is not None:
        try:
            subtree_root = hierarchy.id_of(subtree)
        except KeyError:
            raise QueryError(f"unknown class {subtree!r}") from None
    spec = MatrixSpec(mode=mode, subtree_root=subtree_root, normalization=normalize)
    result = build_matrix(engine, spec)
    if fmt == "csv":
        _write_or_echo(matrix_to_csv(result, engine), out)
    else:
        _write_or_echo(json.dumps(matrix_to_json(result, engine), indent=1, sort_keys=True) + "\n", out)


@main.command()
@click.argument("records", type=click.Path(exists=True, dir_okay=False))
@click.option("--port", type=int, default=None, help="Override the configured port.")
@click.option("--images", type=click.Path(file_okay=False), default=None, help="Image root for crop serving.")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--ui", type=click.Path(file_okay=False), default=None, help="Static UI directory to mount at /ui.")
@handle_errors
def serve(records, port, images, config_path, ui):
    """Serve the analysis API (and optionally the web UI) over HTTP."""
    from dataclasses import replace

    import uvicorn

    from .service import SessionState, create_app

    config = load_config(config_path)
    if images is not None:
        config = replace(config, image_root=images)
    if port is not None:
        config = replace(config, port=port)
    state = SessionState(config)
    dataset_id = Path(records).stem
    state.load_records_file(dataset_id, records)
    app = create_app(state, ui_dir=ui)
    click.echo(f"serving dataset {dataset_id!r} on port {config.port}")
    uvicorn.run(app, host="127.0.0.1", port=config.port, log_level="warning")


if __name__ == "__main__":
    main()
