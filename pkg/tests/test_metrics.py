import random

import pytest

from helpers import fp_record, make_hierarchy, missed_record, pair_record
from oracles import ap_oracle

from unieval.metrics import (
    COCO_IOU_THRESHOLDS,
    average_precision,
    class_summaries,
    mean_average_precision,
    precision_recall,
    summaries_to_csv,
)


def test_perfect_single_detection():
    records = [pair_record(0, 1, 1, confidence=0.9, iou=1.0)]
    assert precision_recall(records, 1, 0.5, 0.5) == (1.0, 1.0)
    assert average_precision(records, 1) == 1.0


def test_no_predictions_precision_undefined():
    records = [missed_record(0, 1)]
    precision, recall = precision_recall(records, 1)
    assert precision is None
    assert recall == 0.0


def test_undefined_when_class_absent():
    records = [pair_record(0, 1, 1)]
    precision, recall = precision_recall(records, 2)
    assert precision is None and recall is None
    assert average_precision(records, 2) is None


def test_hand_enumeration_two_gts_three_preds():
    # two pairs on gt A (confidences .9/.7), one on gt B (.8); best-per-gt wins
    records = [
        pair_record(0, 1, 1, confidence=0.9, iou=0.8, gt_id=101, pred_id=1),
        pair_record(1, 1, 1, confidence=0.7, iou=0.6, gt_id=101, pred_id=2),
        pair_record(2, 1, 1, confidence=0.8, iou=0.7, gt_id=102, pred_id=3),
    ]
    precision, recall = precision_recall(records, 1, 0.5, 0.5)
    assert precision == pytest.approx(2 / 3)
    assert recall == 1.0


def test_all_wrong_class_ap_zero():
    records = [
        pair_record(0, 1, 2, confidence=0.9, iou=0.9, gt_id=101, pred_id=1),
        missed_record(1, 2),
    ]
    assert average_precision(records, 2) == 0.0


def test_ranked_tp_fp_tp_matches_oracle():
    records = [
        pair_record(0, 1, 1, confidence=0.9, iou=0.95, gt_id=101, pred_id=1),
        fp_record(1, 1, confidence=0.8),
        pair_record(2, 1, 1, confidence=0.7, iou=0.95, gt_id=102, pred_id=3),
    ]
    detections = [
        (0.9, 1, 101, 0.95, True),
        (0.8, 4, None, None, False),
        (0.7, 3, 102, 0.95, True),
    ]
    expected = ap_oracle(detections, total_gts=2, iou_thresholds=COCO_IOU_THRESHOLDS)
    assert expected == pytest.approx(253 / 303, abs=1e-12)  # frozen from the oracle
    assert average_precision(records, 1) == pytest.approx(expected, abs=1e-9)


def test_ap_matches_oracle_random():
    rng = random.Random(17)
    for _ in range(40):
        n_gts = rng.randint(1, 5)
        gt_ids = list(range(101, 101 + n_gts))
        records = []
        detections = []
        rid = 0
        for pred_id in range(1, rng.randint(1, 8) + 1):
            conf = rng.random()
            if rng.random() < 0.6:
                gt_id = rng.choice(gt_ids)
                overlap = rng.random()
                records.append(
                    pair_record(rid, 1, 1, confidence=conf, iou=overlap, gt_id=gt_id, pred_id=pred_id)
                )
                detections.append((conf, pred_id, gt_id, overlap, True))
            else:
                records.append(
                    fp_record(rid, 1, confidence=conf)
                )
                fp_pred_id = rid * 2 + 2
                detections.append((conf, fp_pred_id, None, None, False))
            rid += 1
        seen_gts = {r.gt_id for r in records if r.gt_id is not None}
        for gt_id in gt_ids:
            if gt_id not in seen_gts:
                records.append(missed_record(rid, 1))
                rid += 1
        total_gts = len({r.gt_id for r in records if r.gt_id is not None})
        expected = ap_oracle(detections, total_gts=total_gts, iou_thresholds=COCO_IOU_THRESHOLDS)
        assert average_precision(records, 1) == pytest.approx(expected, abs=1e-9)


def test_confidence_threshold_monotonicity():
    rng = random.Random(3)
    records = [
        pair_record(i, 1, 1, confidence=rng.random(), iou=rng.random(), gt_id=100 + i, pred_id=i + 1)
        for i in range(10)
    ]
    last = 1.0
    for threshold in (0.1, 0.3, 0.5, 0.7, 0.9):
        _, recall = precision_recall(records, 1, 0.3, threshold)
        assert recall <= last + 1e-12
        last = recall


def test_map_ignores_empty_classes():
    hierarchy = make_hierarchy(("cat", "dog", "bird"))
    records = [
        pair_record(0, 1, 1, confidence=0.9, iou=1.0, gt_id=1, pred_id=1),
        pair_record(1, 2, 2, confidence=0.9, iou=1.0, gt_id=2, pred_id=2),
    ]
    summaries = class_summaries(records, hierarchy)
    with_empty = mean_average_precision(summaries)
    no_empty = mean_average_precision([s for s in summaries if s.name != "bird"])
    assert with_empty == no_empty == 1.0


def test_csv_export():
    hierarchy = make_hierarchy(("cat",))
    records = [pair_record(0, 1, 1, confidence=0.9, iou=0.9)]
    text = summaries_to_csv(class_summaries(records, hierarchy))
    lines = text.strip().split("\n")
    assert lines[0] == "class_id,name,precision,recall,ap,object_count"
    assert lines[1].startswith("1,cat,1.0,1.0,")
