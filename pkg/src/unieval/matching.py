"""Greedy award-maximizing assignment of predictions to ground truth.

Each prediction is matched to at most one ground-truth object; a ground-truth
object may collect several predictions. The award for a candidate pair combines
a label-consistency score (1 when classes agree), a position-consistency score
(IoU), and a uniqueness score exp(-k) that decays with the number of predictions
k already assigned to that ground truth. Predictions are processed in descending
confidence order and take the candidate with the highest award among those with
IoU at or above the minimum overlap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from . import rle
from .dataset import (
    TASK_CLASSIFICATION,
    TASK_SEGMENTATION,
    Box,
    Dataset,
    GroundTruthObject,
    PredictedObject,
)
from .errors import ValidationError
from .records import EvaluationRecord

DEFAULT_LAMBDA1 = 0.5
DEFAULT_LAMBDA2 = 0.25
DEFAULT_ALPHA = 0.1


@dataclass(frozen=True)
class MatchingConfig:
    lambda1: float = DEFAULT_LAMBDA1  # label-consistency weight
    lambda2: float = DEFAULT_LAMBDA2  # position-consistency weight
    alpha: float = DEFAULT_ALPHA      # minimum IoU for a candidate pair
    use_masks: bool = False
    include_crowd: bool = False

    def __post_init__(self):
        if self.lambda1 < 0 or self.lambda2 < 0:
            raise ValidationError("lambda weights must be non-negative")
        if self.lambda1 + self.lambda2 > 1:
            raise ValidationError("lambda1 + lambda2 must not exceed 1")
        if not 0.0 <= self.alpha < 1.0:
            raise ValidationError("alpha must lie in [0, 1)")


@dataclass(frozen=True)
class AwardBreakdown:
    label_consistency: float
    position_consistency: float
    uniqueness: float
    total: float


@dataclass(frozen=True)
class MatchedPair:
    pred_id: int
    gt_id: int
    iou: float
    award: AwardBreakdown


@dataclass(frozen=True)
class MatchResult:
    pairs: tuple[MatchedPair, ...]
    unmatched_predictions: tuple[int, ...]
    unmatched_ground_truth: tuple[int, ...]


def box_iou(a: Box, b: Box) -> float:
    ax, ay, aw, ah = a
    bx, by, bw, bh = b
    if aw <= 0 or ah <= 0 or bw <= 0 or bh <= 0:
        raise ValidationError("IoU of a zero-area box is undefined")
    ix = min(ax + aw, bx + bw) - max(ax, bx)
    if ix <= 0:
        return 0.0
    iy = min(ay + ah, by + bh) - max(ay, by)
    if iy <= 0:
        return 0.0
    inter = ix * iy
    return inter / (aw * ah + bw * bh - inter)


def iou(
    a: GroundTruthObject | PredictedObject,
    b: GroundTruthObject | PredictedObject,
    use_masks: bool = False,
) -> float:
    """Overlap between two objects; mask IoU when masks are in play, else box IoU."""
    if use_masks and (a.mask is not None or b.mask is not None):
        size = rle.normalize_rle(a.mask if a.mask is not None else b.mask)[0]
        ma = rle.decode(a.mask) if a.mask is not None else rle.box_to_mask(a.box, size)
        mb = rle.decode(b.mask) if b.mask is not None else rle.box_to_mask(b.box, size)
        return rle.mask_iou(ma, mb)
    if a.box is None or b.box is None:
        raise ValidationError("objects carry no geometry")
    return box_iou(a.box, b.box)


def match_image(
    gts: list[GroundTruthObject],
    preds: list[PredictedObject],
    cfg: MatchingConfig = MatchingConfig(),
) -> MatchResult:
    """Match one image's predictions against its ground truth.

    Deterministic: confidence ties break toward the lower prediction id, and
    award ties toward the earlier ground-truth object.
    """
    candidates = [g for g in gts if cfg.include_crowd or not g.is_crowd]
    u_weight = 1.0 - cfg.lambda1 - cfg.lambda2
    assigned = [0] * len(candidates)
    pairs: list[MatchedPair] = []
    unmatched_preds: list[int] = []

    for pred in sorted(preds, key=lambda p: (-p.confidence, p.pred_id)):
        best_idx = -1
        best_award = None
        best_iou = 0.0
        for idx, gt in enumerate(candidates):
            overlap = iou(gt, pred, cfg.use_masks)
            if overlap < cfg.alpha:
                continue
            label = 1.0 if gt.class_id == pred.class_id else 0.0
            uniq = math.exp(-assigned[idx])
            award = cfg.lambda1 * label + cfg.lambda2 * overlap + u_weight * uniq
            if best_award is None or award > best_award:
                best_award = award
                best_idx = idx
                best_iou = overlap
        if best_idx < 0:
            unmatched_preds.append(pred.pred_id)
            continue
        gt = candidates[best_idx]
        breakdown = AwardBreakdown(
            label_consistency=1.0 if gt.class_id == pred.class_id else 0.0,
            position_consistency=best_iou,
            uniqueness=math.exp(-assigned[best_idx]),
            total=best_award,
        )
        assigned[best_idx] += 1
        pairs.append(MatchedPair(pred.pred_id, gt.gt_id, best_iou, breakdown))

    unmatched_gts = [g.gt_id for i, g in enumerate(candidates) if assigned[i] == 0]
    return MatchResult(tuple(pairs), tuple(unmatched_preds), tuple(unmatched_gts))


def _pair_record(
    record_id: int,
    gt: GroundTruthObject,
    pred: PredictedObject,
    pair: MatchedPair,
) -> EvaluationRecord:
    ga, pa = gt.attributes, pred.attributes
    gx, gy, gw, gh = gt.box
    return EvaluationRecord(
        record_id=record_id,
        image_id=gt.image_id,
        gt_class=gt.class_id,
        pred_class=pred.class_id,
        gt_id=gt.gt_id,
        pred_id=pred.pred_id,
        confidence=pred.confidence,
        gt_size=ga.size,
        pred_size=pa.size,
        gt_aspect=ga.aspect_ratio,
        pred_aspect=pa.aspect_ratio,
        size_ratio=pa.size / ga.size,
        shift_x=(pa.center_x - ga.center_x) / gw,
        shift_y=(pa.center_y - ga.center_y) / gh,
        iou=pair.iou,
        gt_box=gt.box,
        pred_box=pred.box,
    )


def _false_positive_record(record_id: int, pred: PredictedObject, background_id: int) -> EvaluationRecord:
    pa = pred.attributes
    return EvaluationRecord(
        record_id=record_id,
        image_id=pred.image_id,
        gt_class=background_id,
        pred_class=pred.class_id,
        pred_id=pred.pred_id,
        confidence=pred.confidence,
        pred_size=pa.size if pa else None,
        pred_aspect=pa.aspect_ratio if pa else None,
        pred_box=pred.box,
    )


def _missed_record(record_id: int, gt: GroundTruthObject, background_id: int) -> EvaluationRecord:
    ga = gt.attributes
    return EvaluationRecord(
        record_id=record_id,
        image_id=gt.image_id,
        gt_class=gt.class_id,
        pred_class=background_id,
        gt_id=gt.gt_id,
        gt_size=ga.size if ga else None,
        gt_aspect=ga.aspect_ratio if ga else None,
        gt_box=gt.box,
    )


def _classification_records(dataset: Dataset) -> list[EvaluationRecord]:
    background = dataset.hierarchy.background_id
    out: list[EvaluationRecord] = []
    for image_id in sorted(dataset.images):
        gts = dataset.gts_by_image.get(image_id, ())
        if not gts:
            continue
        gt = gts[0]
        preds = dataset.preds_by_image.get(image_id, ())
        if preds:
            top = min(preds, key=lambda p: (-p.confidence, p.pred_id))
            out.append(
                EvaluationRecord(
                    record_id=len(out),
                    image_id=image_id,
                    gt_class=gt.class_id,
                    pred_class=top.class_id,
                    gt_id=gt.gt_id,
                    pred_id=top.pred_id,
                    confidence=top.confidence,
                )
            )
        else:
            out.append(
                EvaluationRecord(
                    record_id=len(out),
                    image_id=image_id,
                    gt_class=gt.class_id,
                    pred_class=background,
                    gt_id=gt.gt_id,
                )
            )
    return out


def match_dataset(dataset: Dataset, cfg: MatchingConfig = MatchingConfig()) -> list[EvaluationRecord]:
    """One-time pass over all images; the output record list is the cacheable artifact.

    Images are processed in ascending image id order, so the result is
    reproducible regardless of input ordering. Classification datasets skip
    matching entirely: the pairing is given per sample.
    """
    if dataset.task == TASK_CLASSIFICATION:
        return _classification_records(dataset)

    if dataset.task == TASK_SEGMENTATION and not cfg.use_masks:
        cfg = replace(cfg, use_masks=True)
    background = dataset.hierarchy.background_id
    records: list[EvaluationRecord] = []
    for image_id in sorted(dataset.images):
        gts = list(dataset.gts_by_image.get(image_id, ()))
        preds = list(dataset.preds_by_image.get(image_id, ()))
        result = match_image(gts, preds, cfg)
        gt_by_id = {g.gt_id: g for g in gts}
        pred_by_id = {p.pred_id: p for p in preds}
        for pair in result.pairs:
            records.append(_pair_record(len(records), gt_by_id[pair.gt_id], pred_by_id[pair.pred_id], pair))
        for pred_id in result.unmatched_predictions:
            records.append(_false_positive_record(len(records), pred_by_id[pred_id], background))
        for gt_id in result.unmatched_ground_truth:
            records.append(_missed_record(len(records), gt_by_id[gt_id], background))
    return records
