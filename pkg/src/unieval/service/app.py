"""HTTP API over the evaluation engine.

Every endpoint is a pure function of the loaded dataset snapshot and the request,
so identical requests return identical bodies and arbitrary concurrent reads are
safe. Spec-violating requests map to 400, unknown ids to 404.
"""

from __future__ import annotations

import io
import math
from pathlib import Path

from fastapi import FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, Response
from fastapi.staticfiles import StaticFiles
from PIL import Image

from .. import metrics as metrics_mod
from ..distribution import Condition, KeepVariable
from ..errors import (
    EmptySelectionError,
    QueryError,
    UndefinedConditionalError,
    ValidationError,
)
from ..grid import fallback_feature_vector, layout_grid
from ..matrix import MatrixSpec, build_matrix, matrix_to_json
from ..records import EvaluationRecord
from ..subsets import RankKey, rank_subsets, min_support_count, subsets_to_json
from . import schemas
from .state import LoadedDataset, SessionState


def _conditions(models: list[schemas.ConditionModel]) -> tuple[Condition, ...]:
    return tuple(Condition(var=m.var, op=m.op, value=m.value) for m in models)


def _http_error(status: int, detail: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"detail": detail})


def parse_sort_keys(sort: str) -> list[RankKey]:
    """Parse "attr:asc|desc[:weight]" specs, comma-separated."""
    keys = []
    for chunk in sort.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = chunk.split(":")
        attribute = parts[0]
        descending = len(parts) > 1 and parts[1].lower() == "desc"
        if len(parts) > 1 and parts[1].lower() not in ("asc", "desc"):
            raise QueryError(f"bad sort direction {parts[1]!r}")
        weight = 1.0
        if len(parts) > 2:
            weight = float(parts[2])
        keys.append(RankKey(attribute=attribute, weight=weight, descending=descending))
    if not keys:
        raise QueryError(f"empty sort specification {sort!r}")
    return keys


def create_app(state: SessionState, ui_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="unieval", docs_url="/api/docs", openapi_url="/api/openapi.json")
    config = state.config

    @app.exception_handler(RequestValidationError)
    async def bad_request(_: Request, exc: RequestValidationError):
        return _http_error(400, str(exc.errors()[:3]))

    @app.exception_handler(QueryError)
    async def query_error(_: Request, exc: QueryError):
        return _http_error(400, str(exc))

    @app.exception_handler(ValidationError)
    async def validation_error(_: Request, exc: ValidationError):
        return _http_error(400, str(exc))

    @app.exception_handler(EmptySelectionError)
    async def empty_selection(_: Request, exc: EmptySelectionError):
        return _http_error(400, str(exc))

    def dataset_or_none(dataset_id: str) -> LoadedDataset | None:
        return state.get(dataset_id)

    @app.get("/api/datasets", response_model=schemas.DatasetListResponse)
    def list_datasets():
        return schemas.DatasetListResponse(
            datasets=[
                schemas.DatasetInfo(
                    id=ds, task=state.get(ds).task, records=len(state.get(ds).records)
                )
                for ds in state.ids()
            ]
        )

    @app.get("/api/datasets/{dataset_id}/summary", response_model=schemas.SummaryResponse)
    def dataset_summary(dataset_id: str):
        loaded = dataset_or_none(dataset_id)
        if loaded is None:
            return _http_error(404, f"unknown dataset {dataset_id!r}")
        summaries = metrics_mod.class_summaries(
            loaded.records,
            loaded.hierarchy,
            iou_threshold=config.iou_threshold,
            confidence_threshold=config.confidence_threshold,
        )
        return schemas.SummaryResponse(
            datasetId=dataset_id,
            task=loaded.task,
            images=loaded.counts.get("images", 0),
            groundTruth=loaded.counts.get("ground_truth", 0),
            predictions=loaded.counts.get("predictions", 0),
            records=len(loaded.records),
            map=metrics_mod.mean_average_precision(summaries),
            classes=[
                schemas.ClassSummaryModel(
                    classId=s.class_id,
                    name=s.name,
                    precision=s.precision,
                    recall=s.recall,
                    ap=s.ap,
                    objectCount=s.object_count,
                )
                for s in summaries
            ],
        )

    @app.post(
        "/api/datasets/{dataset_id}/matrix",
        response_model=schemas.MatrixResponse,
        response_model_exclude_none=True,
    )
    def dataset_matrix(dataset_id: str, request: schemas.MatrixRequest):
        loaded = dataset_or_none(dataset_id)
        if loaded is None:
            return _http_error(404, f"unknown dataset {dataset_id!r}")
        spec = MatrixSpec(
            mode=request.mode,
            subtree_root=request.subtreeRoot,
            normalization=request.normalization,
            conditions=_conditions(request.where),
        )
        return matrix_to_json(build_matrix(loaded.engine, spec), loaded.engine)

    @app.post("/api/datasets/{dataset_id}/query", response_model=schemas.QueryResponse)
    def dataset_query(dataset_id: str, request: schemas.QueryRequest):
        loaded = dataset_or_none(dataset_id)
        if loaded is None:
            return _http_error(404, f"unknown dataset {dataset_id!r}")
        engine = loaded.engine
        where = _conditions(request.where)
        if request.given is not None:
            try:
                value = engine.conditional_probability(where, _conditions(request.given))
            except UndefinedConditionalError as exc:
                return _http_error(400, str(exc))
            return schemas.QueryResponse(probability=value)
        if request.keep:
            keep = tuple(
                KeepVariable(k) if isinstance(k, str)
                else KeepVariable(k.var, tuple(k.bins) if k.bins else None)
                for k in request.keep
            )
            rows = engine.marginal_table(keep, where)
            return schemas.QueryResponse(
                table=[
                    schemas.MarginalRowModel(
                        values=list(row.values), count=row.count, probability=row.probability
                    )
                    for row in rows
                ]
            )
        return schemas.QueryResponse(probability=engine.probability(where))

    @app.get("/api/datasets/{dataset_id}/subsets", response_model=schemas.SubsetsResponse)
    def dataset_subsets(
        dataset_id: str,
        class_name: str = Query(alias="class"),
        beta: float | None = None,
        sort: str = "support:desc",
    ):
        loaded = dataset_or_none(dataset_id)
        if loaded is None:
            return _http_error(404, f"unknown dataset {dataset_id!r}")
        beta = config.beta if beta is None else beta
        if not 0.0 < beta <= 1.0:
            return _http_error(400, f"beta must lie in (0, 1], got {beta}")
        try:
            class_id = loaded.hierarchy.id_of(class_name)
        except KeyError:
            return _http_error(400, f"unknown class {class_name!r}")
        mined = loaded.mined_subsets(class_id, beta)
        ranked = rank_subsets(mined, parse_sort_keys(sort))
        population = sum(
            1 for r in loaded.records if r.gt_class == class_id or r.pred_class == class_id
        )
        return schemas.SubsetsResponse(
            classId=class_id,
            className=class_name,
            beta=beta,
            minSupport=min_support_count(beta, population),
            rows=[schemas.SubsetRowModel(**row) for row in subsets_to_json(ranked)],
        )

    def _crop_url(loaded: LoadedDataset, record: EvaluationRecord) -> str | None:
        boxes = [b for b in (record.gt_box, record.pred_box) if b is not None]
        if not boxes or record.image_id not in loaded.images:
            return None
        x0 = min(b[0] for b in boxes)
        y0 = min(b[1] for b in boxes)
        x1 = max(b[0] + b[2] for b in boxes)
        y1 = max(b[1] + b[3] for b in boxes)
        return (
            f"/api/images/{record.image_id}/crop?x={x0:g}&y={y0:g}"
            f"&w={x1 - x0:g}&h={y1 - y0:g}&pad={config.crop_padding:g}"
        )

    def _overlay(loaded: LoadedDataset, class_id: int, box, confidence=None):
        return schemas.ObjectOverlay(
            box=list(box) if box else None,
            classId=class_id,
            className=loaded.hierarchy.name(class_id),
            confidence=confidence,
        )

    @app.post("/api/datasets/{dataset_id}/grid", response_model=schemas.GridResponse)
    def dataset_grid(dataset_id: str, request: schemas.GridRequest):
        loaded = dataset_or_none(dataset_id)
        if loaded is None:
            return _http_error(404, f"unknown dataset {dataset_id!r}")
        if request.records is not None:
            selection = [loaded.record_by_id(rid) for rid in request.records]
            missing = [rid for rid, r in zip(request.records, selection) if r is None]
            if missing:
                return _http_error(400, f"unknown record ids: {missing[:5]}")
        else:
            selection = loaded.engine.select(_conditions(request.where))
        if not selection:
            raise EmptySelectionError("grid selection matched no records")
        cap = min(request.limit or config.grid_cap, config.grid_cap)
        selection = selection[:cap]

        keys = []
        vectors = []
        for record in selection:
            key = f"pred:{record.pred_id}" if record.pred_id is not None else f"gt:{record.gt_id}"
            keys.append(key)
            vector = loaded.features.get(key) if loaded.features else None
            if vector is None:
                image = loaded.images.get(record.image_id)
                box = record.pred_box or record.gt_box
                cx = box[0] + box[2] / 2 if box else None
                cy = box[1] + box[3] / 2 if box else None
                vector = fallback_feature_vector(
                    record.pred_size or record.gt_size,
                    record.pred_aspect or record.gt_aspect,
                    record.confidence,
                    cx,
                    cy,
                    image.width if image else 1,
                    image.height if image else 1,
                )
            vectors.append(vector)

        assignment = layout_grid(keys, vectors, seed=request.seed)
        cells = []
        for record, (key, row, col) in zip(selection, assignment.placements):
            cells.append(
                schemas.GridCellModel(
                    objectKey=key,
                    recordId=record.record_id,
                    row=row,
                    col=col,
                    imageId=record.image_id,
                    cropUrl=_crop_url(loaded, record),
                    gt=(
                        _overlay(loaded, record.gt_class, record.gt_box)
                        if record.gt_id is not None
                        else None
                    ),
                    pred=(
                        _overlay(loaded, record.pred_class, record.pred_box, record.confidence)
                        if record.pred_id is not None
                        else None
                    ),
                )
            )
        return schemas.GridResponse(
            rows=assignment.grid_rows,
            cols=assignment.grid_cols,
            cost=assignment.cost,
            cells=cells,
        )

    @app.get("/api/images/{image_id}/crop")
    def image_crop(
        image_id: int,
        x: float,
        y: float,
        w: float,
        h: float,
        pad: float = 0.15,
        dataset: str | None = None,
    ):
        if w <= 0 or h <= 0:
            return _http_error(400, f"degenerate crop {w}x{h}")
        candidates = [dataset] if dataset else state.ids()
        image = None
        for ds in candidates:
            loaded = state.get(ds)
            if loaded and image_id in loaded.images:
                image = loaded.images[image_id]
                break
        if image is None or not image.file_name:
            return _http_error(404, f"unknown image {image_id}")
        if config.image_root is None:
            return _http_error(404, "no image root configured")
        path = Path(config.image_root) / image.file_name
        if not path.exists():
            return _http_error(404, f"image file missing: {image.file_name}")

        x0 = max(0.0, x - pad * w)
        y0 = max(0.0, y - pad * h)
        x1 = min(float(image.width), x + w + pad * w)
        y1 = min(float(image.height), y + h + pad * h)
        if x1 <= x0 or y1 <= y0:
            return _http_error(400, "crop lies outside the image")
        with Image.open(path) as img:
            fmt = img.format or "PNG"
            box = (
                int(math.floor(x0)),
                int(math.floor(y0)),
                min(img.width, int(math.ceil(x1))),
                min(img.height, int(math.ceil(y1))),
            )
            cropped = img.crop(box)
            buf = io.BytesIO()
            cropped.save(buf, format=fmt)
        media = Image.MIME.get(fmt, "application/octet-stream")
        return Response(content=buf.getvalue(), media_type=media)

    if ui_dir is not None and Path(ui_dir).exists():
        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
