"""Per-class precision/recall, COCO-style average precision, and dataset mAP.

These headline metrics re-derive true/false positives from the cached evaluation
records at the requested IoU threshold, independently of the award matching that
drives the diagnostic views, so they stay comparable to standard tooling.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .dataset import ClassHierarchy
from .records import EvaluationRecord

DEFAULT_IOU_THRESHOLD = 0.5
DEFAULT_CONFIDENCE_THRESHOLD = 0.5
COCO_IOU_THRESHOLDS = tuple(round(0.5 + 0.05 * i, 2) for i in range(10))
RECALL_POINTS = 101


@dataclass(frozen=True)
class ClassSummary:
    class_id: int
    name: str
    precision: float | None
    recall: float | None
    ap: float | None
    object_count: int


def _class_gt_count(records: list[EvaluationRecord], class_id: int) -> int:
    return len({r.gt_id for r in records if r.gt_class == class_id and r.gt_id is not None})


def _iou_ok(record: EvaluationRecord, threshold: float) -> bool:
    # classification pairs carry no IoU: the pairing itself is the match
    return record.iou is None or record.iou >= threshold


def precision_recall(
    records: list[EvaluationRecord],
    class_id: int,
    iou_threshold: float = DEFAULT_IOU_THRESHOLD,
    confidence_threshold: float = DEFAULT_CONFIDENCE_THRESHOLD,
) -> tuple[float | None, float | None]:
    """Operating-point precision and recall for one class.

    A ground truth contributes at most one true positive: among its same-class
    pairs above both thresholds the highest-confidence prediction wins and the
    rest count as false positives. Undefined values (no predictions / no ground
    truth) are returned as None, distinct from 0.0.
    """
    detections = [
        r
        for r in records
        if r.pred_class == class_id
        and r.confidence is not None
        and r.confidence >= confidence_threshold
    ]
    by_gt: dict[int, list[EvaluationRecord]] = {}
    for r in detections:
        if r.gt_class == class_id and r.gt_id is not None and _iou_ok(r, iou_threshold):
            by_gt.setdefault(r.gt_id, []).append(r)
    tp = len(by_gt)
    fp = len(detections) - tp
    total_gts = _class_gt_count(records, class_id)
    precision = tp / (tp + fp) if (tp + fp) > 0 else None
    recall = tp / total_gts if total_gts > 0 else None
    return precision, recall


def _interpolated_ap(tp_flags: np.ndarray, total_gts: int) -> float:
    cum_tp = np.cumsum(tp_flags)
    cum_fp = np.cumsum(~tp_flags)
    recall = cum_tp / total_gts
    precision = cum_tp / (cum_tp + cum_fp)
    # precision envelope: best precision achievable at recall >= r
    envelope = np.maximum.accumulate(precision[::-1])[::-1]
    grid = np.linspace(0.0, 1.0, RECALL_POINTS)
    idx = np.searchsorted(recall, grid, side="left")
    points = np.where(idx < len(envelope), envelope[np.minimum(idx, len(envelope) - 1)], 0.0)
    return float(points.mean())


def average_precision(
    records: list[EvaluationRecord],
    class_id: int,
    iou_thresholds: tuple[float, ...] = COCO_IOU_THRESHOLDS,
) -> float | None:
    """COCO-style AP: 101-point interpolation averaged over the IoU threshold grid.

    Detections are ranked by descending confidence (ties toward the lower
    prediction id). None when the class has no ground truth.
    """
    total_gts = _class_gt_count(records, class_id)
    if total_gts == 0:
        return None
    detections = sorted(
        (r for r in records if r.pred_class == class_id and r.confidence is not None),
        key=lambda r: (-r.confidence, r.pred_id),
    )
    if not detections:
        return 0.0
    ap_values = []
    for threshold in iou_thresholds:
        matched_gts: set[int] = set()
        flags = np.zeros(len(detections), dtype=bool)
        for rank, r in enumerate(detections):
            if (
                r.gt_class == class_id
                and r.gt_id is not None
                and _iou_ok(r, threshold)
                and r.gt_id not in matched_gts
            ):
                matched_gts.add(r.gt_id)
                flags[rank] = True
        ap_values.append(_interpolated_ap(flags, total_gts))
    return float(np.mean(ap_values))


def class_summaries(
    records: list[EvaluationRecord],
    hierarchy: ClassHierarchy,
    iou_threshold: float = DEFAULT_IOU_THRESHOLD,
    confidence_threshold: float = DEFAULT_CONFIDENCE_THRESHOLD,
) -> list[ClassSummary]:
    out = []
    for class_id in hierarchy.leaf_ids():
        p, r = precision_recall(records, class_id, iou_threshold, confidence_threshold)
        out.append(
            ClassSummary(
                class_id=class_id,
                name=hierarchy.name(class_id),
                precision=p,
                recall=r,
                ap=average_precision(records, class_id),
                object_count=_class_gt_count(records, class_id),
            )
        )
    return out


def mean_average_precision(summaries: list[ClassSummary]) -> float | None:
    defined = [s.ap for s in summaries if s.ap is not None]
    if not defined:
        return None
    return sum(defined) / len(defined)


def summaries_to_csv(summaries: list[ClassSummary]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["class_id", "name", "precision", "recall", "ap", "object_count"])
    for s in summaries:
        writer.writerow(
            [
                s.class_id,
                s.name,
                "" if s.precision is None else repr(s.precision),
                "" if s.recall is None else repr(s.recall),
                "" if s.ap is None else repr(s.ap),
                s.object_count,
            ]
        )
    return buf.getvalue()
