import random

import numpy as np
import pytest

from helpers import fp_record, make_hierarchy, missed_record, pair_record
from oracles import best_leaf_order_cost, order_cost

from unieval.distribution import Condition, DistributionEngine, KeepVariable
from unieval.errors import QueryError
from unieval.matrix import (
    MatrixSpec,
    build_matrix,
    cosine_dissimilarities,
    matrix_to_csv,
    matrix_to_json,
    order_from_dissimilarities,
    order_leaves,
)


def engine_for(records, names=("cat", "dog"), parents=None, task="detection"):
    return DistributionEngine(records, make_hierarchy(names, parents), task)


def test_perfect_classifier_diagonal():
    records = [pair_record(i, (i % 2) + 1, (i % 2) + 1) for i in range(8)]
    engine = engine_for(records)
    result = build_matrix(engine, MatrixSpec())
    assert result.cell(1, 1).count == 4
    assert result.cell(2, 2).count == 4
    assert result.cell(1, 2).count == 0
    assert result.cell(2, 1).count == 0


def test_single_confusion_cell(four_record_engine):
    records = list(four_record_engine.records) + [pair_record(4, 1, 2)]
    engine = DistributionEngine(records, four_record_engine.hierarchy, "detection")
    result = build_matrix(engine, MatrixSpec())
    assert result.cell(1, 2).count == 1


def test_row_normalization_sums_to_one():
    rng = random.Random(2)
    records = [
        pair_record(i, rng.randint(1, 2), rng.randint(1, 2)) for i in range(30)
    ]
    engine = engine_for(records)
    result = build_matrix(engine, MatrixSpec(normalization="row"))
    for r in result.classes:
        row_sum = sum(result.normalized[(r, c)] for c in result.classes)
        row_count = sum(result.cell(r, c).count for c in result.classes)
        if row_count:
            assert row_sum == pytest.approx(1.0, abs=1e-12)


def test_cell_total_equals_record_count():
    rng = random.Random(4)
    records = []
    for i in range(40):
        kind = rng.random()
        if kind < 0.5:
            records.append(pair_record(i, rng.randint(1, 2), rng.randint(1, 2)))
        elif kind < 0.75:
            records.append(fp_record(i, rng.randint(1, 2)))
        else:
            records.append(missed_record(i, rng.randint(1, 2)))
    engine = engine_for(records)
    result = build_matrix(engine, MatrixSpec())
    assert sum(cell.count for cell in result.cells.values()) == len(records)


def test_matches_marginal_table(four_record_engine):
    result = build_matrix(four_record_engine, MatrixSpec())
    rows = four_record_engine.marginal_table((KeepVariable("Label_X"), KeepVariable("Label_Y")))
    names = four_record_engine.hierarchy
    for row in rows:
        gt_id = names.id_of(row.values[0])
        pred_id = names.id_of(row.values[1])
        assert result.cell(gt_id, pred_id).count == row.count


def test_superclass_aggregation():
    from unieval.dataset import ClassHierarchy, ClassNode

    hierarchy = ClassHierarchy(
        (
            ClassNode(10, "animal", None),
            ClassNode(11, "vehicle", None),
            ClassNode(1, "cat", 10),
            ClassNode(2, "dog", 10),
            ClassNode(3, "car", 11),
        ),
        background_id=0,
    )
    records = [
        pair_record(0, 1, 1),
        pair_record(1, 1, 2),
        pair_record(2, 2, 3),
        pair_record(3, 3, 3),
        missed_record(4, 2),
    ]
    engine = DistributionEngine(records, hierarchy, "detection")
    top = build_matrix(engine, MatrixSpec())
    assert top.classes[:-1] and top.background_id == 0
    assert top.cell(10, 10).count == 2  # cat->cat, cat->dog
    assert top.cell(10, 11).count == 1  # dog->car
    assert top.cell(11, 11).count == 1
    assert top.cell(10, 0).count == 1   # missed dog

    drill = build_matrix(engine, MatrixSpec(subtree_root=10))
    assert drill.cell(1, 1).count == 1
    assert drill.cell(1, 2).count == 1
    assert drill.cell(2, 0).count == 1
    # records whose prediction leaves the subtree vanish from the view
    assert sum(cell.count for cell in drill.cells.values()) == 3


def test_drilldown_equals_filtered_full_matrix():
    from unieval.dataset import ClassHierarchy, ClassNode

    hierarchy = ClassHierarchy(
        (
            ClassNode(10, "animal", None),
            ClassNode(1, "cat", 10),
            ClassNode(2, "dog", 10),
        ),
        background_id=0,
    )
    rng = random.Random(8)
    records = []
    for i in range(30):
        kind = rng.random()
        if kind < 0.7:
            records.append(pair_record(i, rng.randint(1, 2), rng.randint(1, 2)))
        else:
            records.append(fp_record(i, rng.randint(1, 2)))
    engine = DistributionEngine(records, hierarchy, "detection")
    drill = build_matrix(engine, MatrixSpec(subtree_root=10))
    # the same cells computed straight from the records
    for gt_class in (1, 2, 0):
        for pred_class in (1, 2, 0):
            expected = sum(
                1 for r in records if r.gt_class == gt_class and r.pred_class == pred_class
            )
            assert drill.cell(gt_class, pred_class).count == expected


def test_mode_partition_consistency():
    rng = random.Random(12)
    records = []
    for i in range(50):
        if rng.random() < 0.8:
            records.append(
                pair_record(
                    i,
                    rng.randint(1, 2),
                    rng.randint(1, 2),
                    pred_size=rng.uniform(10, 300),
                    gt_size=rng.uniform(10, 300),
                    shift=(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)),
                )
            )
        else:
            records.append(missed_record(i, rng.randint(1, 2)))
    engine = engine_for(records)
    result = build_matrix(engine, MatrixSpec(mode="size"))
    for cell in result.cells.values():
        geometry_pairs = sum(
            1
            for r in records
            if r.gt_class == cell.gt_class
            and r.pred_class == cell.pred_class
            and r.has_geometry
        )
        assert sum(cell.size_stats.values()) == geometry_pairs
        assert sum(cell.direction_stats.values()) == geometry_pairs


def test_conditions_drill_matrix(four_record_engine):
    spec = MatrixSpec(conditions=(Condition("Confidence_Y", ">", 0.5),))
    result = build_matrix(four_record_engine, spec)
    # confidences 0.9, 0.6, 0.8 survive the filter; 0.3 does not
    assert sum(cell.count for cell in result.cells.values()) == 3


def test_unknown_subtree():
    engine = engine_for([pair_record(0, 1, 1)])
    with pytest.raises(QueryError):
        build_matrix(engine, MatrixSpec(subtree_root=999))


def test_bad_mode_rejected():
    with pytest.raises(QueryError):
        MatrixSpec(mode="sideways")


def test_background_pinned_last():
    records = [pair_record(0, 1, 1), fp_record(1, 2)]
    engine = engine_for(records)
    result = build_matrix(engine, MatrixSpec())
    assert result.classes[-1] == engine.hierarchy.background_id


def test_order_single_class():
    assert order_from_dissimilarities(np.zeros((1, 1))) == [0]


def test_order_places_middle_class_between():
    d = np.array(
        [
            [0.0, 1.0, 10.0],
            [1.0, 0.0, 1.0],
            [10.0, 1.0, 0.0],
        ]
    )
    order = order_from_dissimilarities(d)
    assert order[1] == 1  # B sits between A and C
    assert order_cost(d, order) == best_leaf_order_cost(d)


def test_order_is_permutation():
    rng = np.random.default_rng(3)
    for _ in range(10):
        n = int(rng.integers(1, 8))
        profiles = rng.random((n, n)) * 10
        order = order_leaves(profiles)
        assert sorted(order) == list(range(n))


def test_order_cost_never_worse_than_best_for_small():
    # dendrogram-constrained optimum equals the global optimum often at n=3..4;
    # at minimum it must beat the identity ordering or match the brute force
    rng = np.random.default_rng(9)
    for _ in range(20):
        n = 4
        raw = rng.random((n, n))
        d = (raw + raw.T) / 2
        np.fill_diagonal(d, 0.0)
        order = order_from_dissimilarities(d)
        assert order_cost(d, order) <= order_cost(d, list(range(n))) + 1e-9


def test_zero_rows_cosine():
    d = cosine_dissimilarities(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 0.0]]))
    assert d[0, 2] == 0.0
    assert d[0, 1] == 1.0


def test_json_shape(four_record_engine):
    result = build_matrix(four_record_engine, MatrixSpec(normalization="row"))
    doc = matrix_to_json(result, four_record_engine)
    assert doc["mode"] == "confusion"
    assert len(doc["cells"]) == len(doc["rows"]) * len(doc["cols"])
    zero_cells = [c for c in doc["cells"] if c["zero"]]
    for cell in doc["cells"]:
        assert set(cell) >= {"r", "c", "count", "zero", "size", "dir", "value"}
        assert len(cell["size"]) == 3
        assert len(cell["dir"]) == 9
    assert all(c["count"] == 0 for c in zero_cells)


def test_csv_confusion(four_record_engine):
    result = build_matrix(four_record_engine, MatrixSpec())
    text = matrix_to_csv(result, four_record_engine)
    lines = text.strip().split("\n")
    assert lines[0].startswith(",")
    assert len(lines) == 1 + len(result.classes)
