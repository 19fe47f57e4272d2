"""Canonical data model and ingestion.

Ground truth is COCO-format JSON (images / annotations / categories), predictions
are COCO-results-format JSON (a list of detections). Classification datasets use
the same envelope without bbox fields: one annotation per image carries the label,
predictions carry (image_id, category_id, score).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from . import rle
from .errors import ParseError, UnknownReferenceError, ValidationError

BACKGROUND_NAME = "background"

TASK_CLASSIFICATION = "classification"
TASK_DETECTION = "detection"
TASK_SEGMENTATION = "segmentation"

Box = tuple[float, float, float, float]


@dataclass(frozen=True)
class ClassNode:
    class_id: int
    name: str
    parent_id: int | None = None


@dataclass(frozen=True)
class ClassHierarchy:
    """User classes arranged as a forest, plus the reserved background class.

    The background id is distinct from every user class id and has no parent; it
    absorbs unmatched predictions (false positives) and unmatched ground truth.
    """

    nodes: tuple[ClassNode, ...]
    background_id: int

    def __post_init__(self):
        ids = [n.class_id for n in self.nodes]
        if len(set(ids)) != len(ids):
            raise ValidationError("class ids are not unique")
        if self.background_id in ids:
            raise ValidationError("background id collides with a user class id")
        by_id = {n.class_id: n for n in self.nodes}
        for node in self.nodes:
            if node.parent_id is not None and node.parent_id not in by_id:
                raise ValidationError(f"class {node.class_id} has unknown parent {node.parent_id}")
            # walk to the root to reject cycles
            seen = {node.class_id}
            cur = node.parent_id
            while cur is not None:
                if cur in seen:
                    raise ValidationError(f"cycle in class hierarchy at id {cur}")
                seen.add(cur)
                cur = by_id[cur].parent_id

    def __contains__(self, class_id: int) -> bool:
        return class_id == self.background_id or any(n.class_id == class_id for n in self.nodes)

    def node(self, class_id: int) -> ClassNode:
        for n in self.nodes:
            if n.class_id == class_id:
                return n
        raise KeyError(class_id)

    def name(self, class_id: int) -> str:
        if class_id == self.background_id:
            return BACKGROUND_NAME
        return self.node(class_id).name

    def id_of(self, name: str) -> int:
        if name == BACKGROUND_NAME:
            return self.background_id
        for n in self.nodes:
            if n.name == name:
                return n.class_id
        raise KeyError(name)

    def children(self, class_id: int | None) -> list[int]:
        """Child ids of a node, or the forest roots when class_id is None."""
        return sorted(n.class_id for n in self.nodes if n.parent_id == class_id)

    def leaves_under(self, class_id: int | None) -> list[int]:
        """All leaf class ids in the subtree (a leaf returns itself)."""
        if class_id is not None and not self.children(class_id):
            return [class_id]
        out: list[int] = []
        for child in self.children(class_id):
            out.extend(self.leaves_under(child))
        return out

    def leaf_ids(self) -> list[int]:
        parents = {n.parent_id for n in self.nodes if n.parent_id is not None}
        return sorted(n.class_id for n in self.nodes if n.class_id not in parents)


@dataclass(frozen=True)
class ImageRecord:
    image_id: int
    width: int
    height: int
    file_name: str

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValidationError(f"image {self.image_id}: non-positive dimensions")


@dataclass(frozen=True)
class ObjectAttributes:
    """Derived per-object features: pixel size, aspect ratio in (0,1], box center."""

    size: float
    aspect_ratio: float
    center_x: float
    center_y: float


def compute_attributes(box: Box, mask: dict | None = None) -> ObjectAttributes:
    """Size is the mask pixel area when a mask is present, else box area.

    Aspect ratio is min(w, h) / max(w, h). Boxes are used as given; no clamping.
    """
    x, y, w, h = box
    if w <= 0 or h <= 0:
        raise ValidationError(f"box has non-positive dimensions: {box!r}")
    size = float(rle.area(mask)) if mask is not None else float(w * h)
    if size <= 0:
        raise ValidationError("object has zero area")
    return ObjectAttributes(
        size=size,
        aspect_ratio=min(w, h) / max(w, h),
        center_x=x + w / 2.0,
        center_y=y + h / 2.0,
    )


@dataclass(frozen=True)
class GroundTruthObject:
    gt_id: int
    image_id: int
    class_id: int
    box: Box | None
    mask: dict | None = None
    is_crowd: bool = False
    attributes: ObjectAttributes | None = None


@dataclass(frozen=True)
class PredictedObject:
    pred_id: int
    image_id: int
    class_id: int
    box: Box | None
    confidence: float
    mask: dict | None = None
    attributes: ObjectAttributes | None = None

    def __post_init__(self):
        if not 0.0 <= self.confidence <= 1.0:
            raise ValidationError(f"prediction {self.pred_id}: confidence {self.confidence} outside [0,1]")


@dataclass(frozen=True)
class FeatureTable:
    """Optional object features keyed "pred:<id>" / "gt:<id>", all the same dimension."""

    vectors: dict[str, tuple[float, ...]]

    def __post_init__(self):
        dims = {len(v) for v in self.vectors.values()}
        if len(dims) > 1:
            raise ValidationError(f"feature vectors have mixed dimensions: {sorted(dims)}")

    def get(self, key: str) -> tuple[float, ...] | None:
        return self.vectors.get(key)


@dataclass(frozen=True)
class IngestOptions:
    task: str | None = None  # None = auto-detect from the schema
    include_crowd: bool = False
    feature_file: str | Path | None = None


@dataclass(frozen=True)
class Dataset:
    """Immutable snapshot of one evaluation run's inputs."""

    task: str
    images: dict[int, ImageRecord]
    ground_truth: tuple[GroundTruthObject, ...]
    predictions: tuple[PredictedObject, ...]
    hierarchy: ClassHierarchy
    features: FeatureTable | None = None
    gts_by_image: dict[int, tuple[GroundTruthObject, ...]] = field(default_factory=dict)
    preds_by_image: dict[int, tuple[PredictedObject, ...]] = field(default_factory=dict)

    def counts(self) -> tuple[int, int, int]:
        return (len(self.images), len(self.ground_truth), len(self.predictions))


def _load_json(path: str | Path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc.msg}", offset=exc.pos) from exc


def _pick_background_id(used: set[int]) -> int:
    return 0 if 0 not in used else max(used) + 1


def build_hierarchy(categories: list[dict]) -> ClassHierarchy:
    """Leaf nodes from COCO categories; super-class nodes from their supercategory names."""
    if not categories:
        raise ValidationError("ground-truth file declares no categories")
    leaf_ids = {int(c["id"]) for c in categories}
    if len(leaf_ids) != len(categories):
        raise ValidationError("duplicate category ids")
    background_id = _pick_background_id(leaf_ids)
    used = leaf_ids | {background_id}
    supers = sorted({c["supercategory"] for c in categories if c.get("supercategory")})
    next_id = max(used) + 1
    super_ids: dict[str, int] = {}
    nodes: list[ClassNode] = []
    for name in supers:
        super_ids[name] = next_id
        nodes.append(ClassNode(next_id, name, None))
        next_id += 1
    for c in sorted(categories, key=lambda c: int(c["id"])):
        parent = super_ids.get(c.get("supercategory") or "")
        nodes.append(ClassNode(int(c["id"]), str(c["name"]), parent))
    return ClassHierarchy(tuple(nodes), background_id)


def _parse_box(raw, where: str) -> Box:
    if not isinstance(raw, (list, tuple)) or len(raw) != 4:
        raise ValidationError(f"{where}: bbox must be [x, y, w, h], got {raw!r}")
    x, y, w, h = (float(v) for v in raw)
    if w <= 0 or h <= 0:
        raise ValidationError(f"{where}: non-positive box dimensions ({w}, {h})")
    return (x, y, w, h)


def _check_mask(mask: dict | None, image: ImageRecord, where: str) -> dict | None:
    if mask is None:
        return None
    if isinstance(mask, list):
        raise ValidationError(f"{where}: polygon segmentation is not supported, supply RLE")
    (h, w), _ = rle.normalize_rle(mask)
    if (h, w) != (image.height, image.width):
        raise ValidationError(
            f"{where}: mask size {h}x{w} differs from image {image.height}x{image.width}"
        )
    return mask


def _detect_task(annotations: list[dict], predictions: list[dict]) -> str:
    has_boxes = any("bbox" in a for a in annotations) or any("bbox" in p for p in predictions)
    if not has_boxes:
        return TASK_CLASSIFICATION
    has_masks = any(a.get("segmentation") for a in annotations) or any(
        p.get("segmentation") for p in predictions
    )
    return TASK_SEGMENTATION if has_masks else TASK_DETECTION


def ingest_dataset(
    ground_truth_file: str | Path,
    predictions_file: str | Path,
    options: IngestOptions = IngestOptions(),
) -> Dataset:
    """Parse, validate and derive attributes for one (ground truth, predictions) pair."""
    gt_doc = _load_json(ground_truth_file)
    pred_doc = _load_json(predictions_file)

    for key in ("images", "annotations", "categories"):
        if key not in gt_doc:
            raise ValidationError(f"{ground_truth_file}: missing '{key}' section")
    if not isinstance(pred_doc, list):
        raise ValidationError(f"{predictions_file}: expected a COCO-results list")

    hierarchy = build_hierarchy(gt_doc["categories"])
    category_ids = {n.class_id for n in hierarchy.nodes}

    images: dict[int, ImageRecord] = {}
    for img in gt_doc["images"]:
        rec = ImageRecord(
            image_id=int(img["id"]),
            width=int(img["width"]),
            height=int(img["height"]),
            file_name=str(img.get("file_name", "")),
        )
        if rec.image_id in images:
            raise ValidationError(f"duplicate image id {rec.image_id}")
        images[rec.image_id] = rec

    annotations = gt_doc["annotations"]
    task = options.task or _detect_task(annotations, pred_doc)
    if task not in (TASK_CLASSIFICATION, TASK_DETECTION, TASK_SEGMENTATION):
        raise ValidationError(f"unknown task {task!r}")
    schema_task = _detect_task(annotations, pred_doc)
    if task == TASK_CLASSIFICATION and schema_task != TASK_CLASSIFICATION:
        raise ValidationError("task 'cls' requested but the files carry bbox fields")
    if task != TASK_CLASSIFICATION and schema_task == TASK_CLASSIFICATION:
        raise ValidationError(f"task {task!r} requested but the files carry no bbox fields")

    gts: list[GroundTruthObject] = []
    for i, ann in enumerate(annotations):
        cat = int(ann["category_id"])
        if cat not in category_ids:
            raise UnknownReferenceError("category", cat)
        image_id = int(ann["image_id"])
        if image_id not in images:
            raise UnknownReferenceError("image", image_id)
        gt_id = int(ann.get("id", i + 1))
        where = f"annotation {gt_id}"
        if task == TASK_CLASSIFICATION:
            gts.append(GroundTruthObject(gt_id, image_id, cat, box=None))
            continue
        box = _parse_box(ann["bbox"], where)
        mask = _check_mask(ann.get("segmentation"), images[image_id], where) if task == TASK_SEGMENTATION else None
        gts.append(
            GroundTruthObject(
                gt_id,
                image_id,
                cat,
                box=box,
                mask=mask,
                is_crowd=bool(ann.get("iscrowd", 0)),
                attributes=compute_attributes(box, mask),
            )
        )

    if len({g.gt_id for g in gts}) != len(gts):
        raise ValidationError("duplicate annotation ids")

    preds: list[PredictedObject] = []
    for j, det in enumerate(pred_doc):
        cat = int(det["category_id"])
        if cat not in category_ids:
            raise UnknownReferenceError("category", cat)
        image_id = int(det["image_id"])
        if image_id not in images:
            raise UnknownReferenceError("image", image_id)
        pred_id = int(det.get("id", j + 1))
        where = f"prediction {pred_id}"
        score = float(det.get("score", 1.0))
        if task == TASK_CLASSIFICATION:
            preds.append(PredictedObject(pred_id, image_id, cat, box=None, confidence=score))
            continue
        box = _parse_box(det["bbox"], where)
        mask = _check_mask(det.get("segmentation"), images[image_id], where) if task == TASK_SEGMENTATION else None
        preds.append(
            PredictedObject(
                pred_id,
                image_id,
                cat,
                box=box,
                confidence=score,
                mask=mask,
                attributes=compute_attributes(box, mask),
            )
        )

    if len({p.pred_id for p in preds}) != len(preds):
        raise ValidationError("duplicate prediction ids")

    if task == TASK_CLASSIFICATION:
        per_image: dict[int, int] = {}
        for g in gts:
            per_image[g.image_id] = per_image.get(g.image_id, 0) + 1
        bad = [i for i, n in per_image.items() if n != 1]
        if bad:
            raise ValidationError(f"classification samples must have exactly one label; images {bad[:5]}")

    features = load_features(options.feature_file) if options.feature_file else None

    gts_by_image: dict[int, list[GroundTruthObject]] = {}
    for g in gts:
        gts_by_image.setdefault(g.image_id, []).append(g)
    preds_by_image: dict[int, list[PredictedObject]] = {}
    for p in preds:
        preds_by_image.setdefault(p.image_id, []).append(p)

    return Dataset(
        task=task,
        images=images,
        ground_truth=tuple(gts),
        predictions=tuple(preds),
        hierarchy=hierarchy,
        features=features,
        gts_by_image={k: tuple(v) for k, v in gts_by_image.items()},
        preds_by_image={k: tuple(v) for k, v in preds_by_image.items()},
    )


def load_features(path: str | Path) -> FeatureTable:
    doc = _load_json(path)
    if not isinstance(doc, dict):
        raise ValidationError(f"{path}: feature file must map object keys to vectors")
    vectors = {str(k): tuple(float(x) for x in v) for k, v in doc.items()}
    return FeatureTable(vectors)


def dataset_to_json(dataset: Dataset) -> dict:
    """Serializable snapshot used by the CLI's ingest cache."""
    return {
        "task": dataset.task,
        "background_id": dataset.hierarchy.background_id,
        "classes": [
            {"id": n.class_id, "name": n.name, "parent": n.parent_id}
            for n in dataset.hierarchy.nodes
        ],
        "images": [
            {"id": im.image_id, "width": im.width, "height": im.height, "file_name": im.file_name}
            for im in sorted(dataset.images.values(), key=lambda im: im.image_id)
        ],
        "ground_truth": [
            {
                "id": g.gt_id,
                "image_id": g.image_id,
                "category_id": g.class_id,
                "bbox": list(g.box) if g.box else None,
                "segmentation": g.mask,
                "iscrowd": int(g.is_crowd),
            }
            for g in dataset.ground_truth
        ],
        "predictions": [
            {
                "id": p.pred_id,
                "image_id": p.image_id,
                "category_id": p.class_id,
                "bbox": list(p.box) if p.box else None,
                "segmentation": p.mask,
                "score": p.confidence,
            }
            for p in dataset.predictions
        ],
        "features": dict(sorted(dataset.features.vectors.items())) if dataset.features else None,
    }


def dataset_from_json(doc: dict) -> Dataset:
    hierarchy = ClassHierarchy(
        tuple(ClassNode(c["id"], c["name"], c.get("parent")) for c in doc["classes"]),
        background_id=doc["background_id"],
    )
    task = doc["task"]
    images = {
        im["id"]: ImageRecord(im["id"], im["width"], im["height"], im["file_name"])
        for im in doc["images"]
    }
    gts = []
    for g in doc["ground_truth"]:
        box = tuple(g["bbox"]) if g.get("bbox") else None
        gts.append(
            GroundTruthObject(
                g["id"],
                g["image_id"],
                g["category_id"],
                box=box,
                mask=g.get("segmentation"),
                is_crowd=bool(g.get("iscrowd", 0)),
                attributes=compute_attributes(box, g.get("segmentation")) if box else None,
            )
        )
    preds = []
    for p in doc["predictions"]:
        box = tuple(p["bbox"]) if p.get("bbox") else None
        preds.append(
            PredictedObject(
                p["id"],
                p["image_id"],
                p["category_id"],
                box=box,
                confidence=p["score"],
                mask=p.get("segmentation"),
                attributes=compute_attributes(box, p.get("segmentation")) if box else None,
            )
        )
    features = FeatureTable({k: tuple(v) for k, v in doc["features"].items()}) if doc.get("features") else None
    gts_by_image: dict[int, list[GroundTruthObject]] = {}
    for g in gts:
        gts_by_image.setdefault(g.image_id, []).append(g)
    preds_by_image: dict[int, list[PredictedObject]] = {}
    for p in preds:
        preds_by_image.setdefault(p.image_id, []).append(p)
    return Dataset(
        task=task,
        images=images,
        ground_truth=tuple(gts),
        predictions=tuple(preds),
        hierarchy=hierarchy,
        features=features,
        gts_by_image={k: tuple(v) for k, v in gts_by_image.items()},
        preds_by_image={k: tuple(v) for k, v in preds_by_image.items()},
    )
