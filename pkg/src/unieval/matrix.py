"""Class-confusion matrices over any level of the class tree.

Rows are ground-truth classes, columns predicted classes; a cell aggregates every
record whose leaf classes fall under the row/column classes. Besides raw counts
(confusion mode), each cell carries a smaller/precise/larger size triple and a
9-way center-shift histogram for the size and direction modes. Rows are reordered
by hierarchical clustering plus optimal leaf ordering; the background row/column
is pinned last and never reordered.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np
from scipy.cluster.hierarchy import leaves_list, linkage, optimal_leaf_ordering
from scipy.spatial.distance import squareform

from .dataset import TASK_CLASSIFICATION
from .distribution import (
    DIRECTION_CENTER,
    DIRECTIONS,
    Condition,
    DistributionEngine,
    direction_bin,
    size_sector,
)
from .errors import QueryError

MODES = ("confusion", "size", "direction")
NORMALIZATIONS = ("none", "row", "column")

DIRECTION_ORDER = DIRECTIONS + (DIRECTION_CENTER,)
SECTOR_ORDER = ("smaller", "precise", "larger")


@dataclass(frozen=True)
class MatrixSpec:
    mode: str = "confusion"
    subtree_root: int | None = None  # None = whole class forest
    normalization: str = "none"
    conditions: tuple[Condition, ...] = ()

    def __post_init__(self):
        if self.mode not in MODES:
            raise QueryError(f"unknown matrix mode {self.mode!r}")
        if self.normalization not in NORMALIZATIONS:
            raise QueryError(f"unknown normalization {self.normalization!r}")


@dataclass
class MatrixCell:
    gt_class: int
    pred_class: int
    count: int = 0
    size_stats: dict[str, int] = field(default_factory=lambda: dict.fromkeys(SECTOR_ORDER, 0))
    direction_stats: dict[str, int] = field(default_factory=lambda: dict.fromkeys(DIRECTION_ORDER, 0))

    @property
    def geometry_pairs(self) -> int:
        return sum(self.size_stats.values())


@dataclass
class MatrixResult:
    spec: MatrixSpec
    classes: list[int]          # display order, background last when present
    cells: dict[tuple[int, int], MatrixCell]
    background_id: int | None   # None for classification matrices
    normalized: dict[tuple[int, int], float] | None = None

    def cell(self, gt_class: int, pred_class: int) -> MatrixCell:
        return self.cells.get(
            (gt_class, pred_class), MatrixCell(gt_class=gt_class, pred_class=pred_class)
        )


def cosine_dissimilarities(profiles: np.ndarray) -> np.ndarray:
    """1 - cosine similarity between row profiles; zero rows are maximally distant
    from non-zero rows and at distance zero from each other."""
    profiles = np.asarray(profiles, dtype=float)
    norms = np.linalg.norm(profiles, axis=1)
    n = len(profiles)
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            if norms[i] == 0.0 and norms[j] == 0.0:
                d = 0.0
            elif norms[i] == 0.0 or norms[j] == 0.0:
                d = 1.0
            else:
                d = 1.0 - float(np.dot(profiles[i], profiles[j]) / (norms[i] * norms[j]))
            out[i, j] = out[j, i] = max(d, 0.0)
    return out


def order_from_dissimilarities(dissimilarities: np.ndarray) -> list[int]:
    """Leaf order of an average-linkage dendrogram, optimally rotated so the sum
    of adjacent-leaf dissimilarities is minimal for that tree."""
    n = len(dissimilarities)
    if n <= 2:
        return list(range(n))
    condensed = squareform(np.asarray(dissimilarities, dtype=float), checks=False)
    tree = linkage(condensed, method="average")
    ordered = optimal_leaf_ordering(tree, condensed)
    return [int(i) for i in leaves_list(ordered)]


def order_leaves(count_matrix: np.ndarray) -> list[int]:
    """Permutation of row indices from confusion-count row profiles."""
    return order_from_dissimilarities(cosine_dissimilarities(np.asarray(count_matrix, dtype=float)))


def build_matrix(engine: DistributionEngine, spec: MatrixSpec) -> MatrixResult:
    hierarchy = engine.hierarchy
    if spec.subtree_root is not None and spec.subtree_root not in hierarchy:
        raise QueryError(f"unknown class {spec.subtree_root}")
    row_classes = hierarchy.children(spec.subtree_root)
    if not row_classes:
        if spec.subtree_root is None:
            raise QueryError("class hierarchy is empty")
        row_classes = [spec.subtree_root]

    leaf_to_view: dict[int, int] = {}
    for view_class in row_classes:
        for leaf in hierarchy.leaves_under(view_class):
            leaf_to_view[leaf] = view_class

    background = None if engine.task == TASK_CLASSIFICATION else hierarchy.background_id
    if background is not None:
        leaf_to_view[background] = background

    classes = list(row_classes) + ([background] if background is not None else [])
    cells: dict[tuple[int, int], MatrixCell] = {
        (r, c): MatrixCell(gt_class=r, pred_class=c) for r in classes for c in classes
    }

    for record in engine.select(spec.conditions):
        row = leaf_to_view.get(record.gt_class)
        col = leaf_to_view.get(record.pred_class)
        if row is None or col is None:
            continue  # outside the requested subtree
        cell = cells[(row, col)]
        cell.count += 1
        sector = size_sector(record, engine.size_tolerance)
        if sector is not None:
            cell.size_stats[sector] += 1
        direction = direction_bin(record, engine.direction_tolerance)
        if direction is not None:
            cell.direction_stats[direction] += 1

    counts = np.array(
        [[cells[(r, c)].count for c in row_classes] for r in row_classes], dtype=float
    )
    permutation = order_leaves(counts) if len(row_classes) > 1 else list(range(len(row_classes)))
    display = [row_classes[i] for i in permutation]
    if background is not None:
        display.append(background)

    normalized = None
    if spec.normalization != "none":
        normalized = {}
        axis_totals: dict[int, int] = {}
        for (r, c), cell in cells.items():
            key = r if spec.normalization == "row" else c
            axis_totals[key] = axis_totals.get(key, 0) + cell.count
        for (r, c), cell in cells.items():
            total = axis_totals[r if spec.normalization == "row" else c]
            normalized[(r, c)] = cell.count / total if total else 0.0

    return MatrixResult(
        spec=spec,
        classes=display,
        cells=cells,
        background_id=background,
        normalized=normalized,
    )


def matrix_to_json(result: MatrixResult, engine: DistributionEngine) -> dict:
    hierarchy = engine.hierarchy
    names = hierarchy.name
    axis = [
        {
            "id": cid,
            "name": names(cid),
            "leaf": cid == result.background_id or not hierarchy.children(cid),
        }
        for cid in result.classes
    ]
    cell_list = []
    for ri, r in enumerate(result.classes):
        for ci, c in enumerate(result.classes):
            cell = result.cell(r, c)
            entry = {
                "r": ri,
                "c": ci,
                "count": cell.count,
                "zero": cell.count == 0,
                "size": [cell.size_stats[s] for s in SECTOR_ORDER],
                "dir": [cell.direction_stats[d] for d in DIRECTION_ORDER],
            }
            if result.normalized is not None:
                entry["value"] = result.normalized[(r, c)]
            cell_list.append(entry)
    return {
        "mode": result.spec.mode,
        "normalization": result.spec.normalization,
        "rows": axis,
        "cols": axis,
        "order": list(result.classes),
        "cells": cell_list,
    }


def matrix_to_csv(result: MatrixResult, engine: DistributionEngine) -> str:
    names = engine.hierarchy.name
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if result.spec.mode == "confusion":
        writer.writerow([""] + [names(c) for c in result.classes])
        for r in result.classes:
            values: list[object] = [names(r)]
            for c in result.classes:
                if result.normalized is not None:
                    values.append(repr(result.normalized[(r, c)]))
                else:
                    values.append(result.cell(r, c).count)
            writer.writerow(values)
        return buf.getvalue()
    header = ["gt", "pred", "count"]
    if result.spec.mode == "size":
        header += list(SECTOR_ORDER)
    else:
        header += list(DIRECTION_ORDER)
    writer.writerow(header)
    for r in result.classes:
        for c in result.classes:
            cell = result.cell(r, c)
            row: list[object] = [names(r), names(c), cell.count]
            if result.spec.mode == "size":
                row += [cell.size_stats[s] for s in SECTOR_ORDER]
            else:
                row += [cell.direction_stats[d] for d in DIRECTION_ORDER]
            writer.writerow(row)
    return buf.getvalue()
