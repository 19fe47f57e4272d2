"""Shared builders for synthetic fixtures."""

from __future__ import annotations

import json
import random

from unieval.dataset import (
    ClassHierarchy,
    ClassNode,
    Dataset,
    GroundTruthObject,
    ImageRecord,
    PredictedObject,
    compute_attributes,
)
from unieval.records import EvaluationRecord


def make_hierarchy(names=("cat", "dog"), parents=None, background_id=0) -> ClassHierarchy:
    nodes = []
    for i, name in enumerate(names, start=1):
        parent = parents.get(name) if parents else None
        nodes.append(ClassNode(i, name, parent))
    return ClassHierarchy(tuple(nodes), background_id=background_id)


def gt_obj(gt_id, image_id, class_id, box, is_crowd=False) -> GroundTruthObject:
    return GroundTruthObject(
        gt_id, image_id, class_id, box=box, is_crowd=is_crowd, attributes=compute_attributes(box)
    )


def pred_obj(pred_id, image_id, class_id, box, confidence) -> PredictedObject:
    return PredictedObject(
        pred_id, image_id, class_id, box=box, confidence=confidence, attributes=compute_attributes(box)
    )


def pair_record(
    record_id,
    gt_class,
    pred_class,
    confidence=0.9,
    iou=0.8,
    image_id=1,
    gt_id=None,
    pred_id=None,
    gt_size=100.0,
    pred_size=100.0,
    gt_aspect=1.0,
    pred_aspect=1.0,
    shift=(0.0, 0.0),
    gt_box=(0.0, 0.0, 10.0, 10.0),
    pred_box=(0.0, 0.0, 10.0, 10.0),
) -> EvaluationRecord:
    return EvaluationRecord(
        record_id=record_id,
        image_id=image_id,
        gt_class=gt_class,
        pred_class=pred_class,
        gt_id=record_id * 2 + 1 if gt_id is None else gt_id,
        pred_id=record_id * 2 + 2 if pred_id is None else pred_id,
        confidence=confidence,
        gt_size=gt_size,
        pred_size=pred_size,
        gt_aspect=gt_aspect,
        pred_aspect=pred_aspect,
        size_ratio=pred_size / gt_size,
        shift_x=shift[0],
        shift_y=shift[1],
        iou=iou,
        gt_box=gt_box,
        pred_box=pred_box,
    )


def fp_record(record_id, pred_class, confidence=0.5, image_id=1, background=0, pred_size=50.0):
    return EvaluationRecord(
        record_id=record_id,
        image_id=image_id,
        gt_class=background,
        pred_class=pred_class,
        pred_id=record_id * 2 + 2,
        confidence=confidence,
        pred_size=pred_size,
        pred_aspect=0.8,
        pred_box=(0.0, 0.0, 10.0, 5.0),
    )


def missed_record(record_id, gt_class, image_id=1, background=0, gt_size=70.0):
    return EvaluationRecord(
        record_id=record_id,
        image_id=image_id,
        gt_class=gt_class,
        pred_class=background,
        gt_id=record_id * 2 + 1,
        gt_size=gt_size,
        gt_aspect=0.7,
        gt_box=(0.0, 0.0, 10.0, 7.0),
    )


def random_image_objects(rng: random.Random, image_id, n_gts, n_preds, n_classes=4, extent=60.0):
    gts = [
        gt_obj(
            gt_id=image_id * 1000 + i,
            image_id=image_id,
            class_id=rng.randint(1, n_classes),
            box=(
                rng.uniform(0, extent),
                rng.uniform(0, extent),
                rng.uniform(2, 18),
                rng.uniform(2, 18),
            ),
        )
        for i in range(n_gts)
    ]
    preds = [
        pred_obj(
            pred_id=image_id * 1000 + 500 + j,
            image_id=image_id,
            class_id=rng.randint(1, n_classes),
            box=(
                rng.uniform(0, extent),
                rng.uniform(0, extent),
                rng.uniform(2, 18),
                rng.uniform(2, 18),
            ),
            confidence=rng.random(),
        )
        for j in range(n_preds)
    ]
    return gts, preds


def synthetic_dataset(n_images, rng: random.Random, max_side=10, n_classes=4) -> Dataset:
    hierarchy = make_hierarchy(tuple(f"c{i}" for i in range(1, n_classes + 1)))
    images = {}
    gts = []
    preds = []
    for image_id in range(1, n_images + 1):
        images[image_id] = ImageRecord(image_id, 80, 80, f"im{image_id}.png")
        g, p = random_image_objects(
            rng, image_id, rng.randint(0, max_side), rng.randint(0, max_side), n_classes
        )
        gts.extend(g)
        preds.extend(p)
    gts_by_image = {}
    for g in gts:
        gts_by_image.setdefault(g.image_id, []).append(g)
    preds_by_image = {}
    for p in preds:
        preds_by_image.setdefault(p.image_id, []).append(p)
    return Dataset(
        task="detection",
        images=images,
        ground_truth=tuple(gts),
        predictions=tuple(preds),
        hierarchy=hierarchy,
        gts_by_image={k: tuple(v) for k, v in gts_by_image.items()},
        preds_by_image={k: tuple(v) for k, v in preds_by_image.items()},
    )


def write_fixture_coco(tmp_path):
    """The counting fixture: 2 images, 3 annotations, 2 predictions."""
    gt = {
        "images": [
            {"id": 1, "width": 100, "height": 80, "file_name": "im1.png"},
            {"id": 2, "width": 64, "height": 64, "file_name": "im2.png"},
        ],
        "categories": [
            {"id": 1, "name": "cat", "supercategory": "animal"},
            {"id": 2, "name": "dog", "supercategory": "animal"},
        ],
        "annotations": [
            {"id": 1, "image_id": 1, "category_id": 1, "bbox": [10, 10, 20, 20], "iscrowd": 0},
            {"id": 2, "image_id": 1, "category_id": 2, "bbox": [50, 10, 14, 28], "iscrowd": 0},
            {"id": 3, "image_id": 2, "category_id": 1, "bbox": [5, 5, 30, 15], "iscrowd": 0},
        ],
    }
    preds = [
        {"image_id": 1, "category_id": 1, "bbox": [12, 12, 20, 20], "score": 0.9},
        {"image_id": 2, "category_id": 2, "bbox": [6, 6, 28, 16], "score": 0.8},
    ]
    gt_path = tmp_path / "gt.json"
    pred_path = tmp_path / "pred.json"
    gt_path.write_text(json.dumps(gt))
    pred_path.write_text(json.dumps(preds))
    return gt_path, pred_path
