"""Candidate problematic subsets via discretization and frequent pattern mining.

Continuous attributes are split into d equal-frequency intervals; every
conjunction of per-attribute predicates whose support reaches the minimum subset
size (a fraction beta of the explored class's records) is enumerated level-wise,
pruning by downward closure. Each surviving subset is scored with the standard
metrics and can be ranked by one attribute or a weighted combination.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass, field

import numpy as np

from . import metrics as metrics_mod
from .distribution import DistributionEngine
from .errors import QueryError
from .records import EvaluationRecord

DEFAULT_BETA = 0.1

# attribute -> is_discrete; continuous ones are discretized before mining
DEFAULT_ATTRIBUTES = (
    "Size_X",
    "AspectRatio_X",
    "Confidence_Y",
    "Size_Y",
    "Density",
    "Label_Y",
)

RANKABLE = ("support", "precision", "recall", "ap", "meanSize", "meanAspect", "meanConfidence")


@dataclass(frozen=True)
class Discretization:
    boundaries: tuple[float, ...]
    degenerate: bool  # fewer effective intervals than requested

    def interval_of(self, value: float) -> int:
        # ties go to the lower interval: interval i is (b[i-1], b[i]]
        return bisect_left(self.boundaries, value)

    def bounds(self, index: int) -> tuple[float, float]:
        lo = self.boundaries[index - 1] if index > 0 else -math.inf
        hi = self.boundaries[index] if index < len(self.boundaries) else math.inf
        return lo, hi


@dataclass(frozen=True)
class DiscretizationSpec:
    beta: float = DEFAULT_BETA
    d: int = field(default=0)  # 0 = derive from beta
    attributes: tuple[str, ...] = DEFAULT_ATTRIBUTES

    def __post_init__(self):
        if not 0.0 < self.beta <= 1.0:
            raise QueryError(f"beta must lie in (0, 1], got {self.beta}")
        if self.d == 0:
            object.__setattr__(self, "d", max(1, round(1.0 / self.beta)))
        if self.d < 1:
            raise QueryError("interval count must be at least 1")


@dataclass(frozen=True)
class Predicate:
    attribute: str
    value: object = None                      # discrete attributes
    interval: tuple[float, float] | None = None  # continuous: [lo, hi), interval index in `index`
    index: int | None = None

    def label(self) -> str:
        if self.interval is not None:
            lo, hi = self.interval
            return f"{self.attribute}∈({lo:.6g}, {hi:.6g}]"
        return f"{self.attribute}={self.value}"


@dataclass(frozen=True)
class SubsetDescriptor:
    predicates: tuple[Predicate, ...]
    support: int
    metrics: dict[str, float | None]

    def key(self) -> str:
        return " & ".join(sorted(p.label() for p in self.predicates)) or "(all)"


def min_support_count(beta: float, class_size: int) -> int:
    """Smallest integer support satisfying support >= beta * class_size.

    Guarded against float noise so e.g. beta=0.1 with 30 records yields 3, not 4.
    """
    return max(1, math.ceil(beta * class_size - 1e-9))


def discretize(values: list[float], d: int) -> Discretization:
    """Equal-frequency boundaries at the k/d empirical quantiles, k = 1..d-1.

    Duplicate quantiles collapse, which flags the result as degenerate (fewer
    effective intervals than requested); that happens when d exceeds the number
    of distinct values.
    """
    if not values:
        raise QueryError("cannot discretize an empty value list")
    if d < 1:
        raise QueryError("interval count must be at least 1")
    if d == 1:
        return Discretization((), degenerate=False)
    quantiles = np.quantile(np.asarray(values, dtype=float), [k / d for k in range(1, d)])
    boundaries: list[float] = []
    for q in quantiles:
        q = float(q)
        if not boundaries or q > boundaries[-1]:
            boundaries.append(q)
    # a boundary at or above the maximum leaves an empty top interval; drop it
    top = max(values)
    while boundaries and boundaries[-1] >= top:
        boundaries.pop()
    return Discretization(tuple(boundaries), degenerate=len(boundaries) < d - 1)


def _subset_metrics(
    subset: list[EvaluationRecord],
    class_id: int,
    iou_threshold: float,
    confidence_threshold: float,
) -> dict[str, float | None]:
    precision, recall = metrics_mod.precision_recall(
        subset, class_id, iou_threshold, confidence_threshold
    )
    gt_sizes = [r.gt_size for r in subset if r.gt_size is not None]
    gt_aspects = [r.gt_aspect for r in subset if r.gt_aspect is not None]
    confidences = [r.confidence for r in subset if r.confidence is not None]
    return {
        "precision": precision,
        "recall": recall,
        "ap": metrics_mod.average_precision(subset, class_id),
        "meanSize": sum(gt_sizes) / len(gt_sizes) if gt_sizes else None,
        "meanAspect": sum(gt_aspects) / len(gt_aspects) if gt_aspects else None,
        "meanConfidence": sum(confidences) / len(confidences) if confidences else None,
    }


def mine_subsets(
    engine: DistributionEngine,
    class_id: int,
    spec: DiscretizationSpec = DiscretizationSpec(),
    include_metrics: bool = True,
    iou_threshold: float = metrics_mod.DEFAULT_IOU_THRESHOLD,
    confidence_threshold: float = metrics_mod.DEFAULT_CONFIDENCE_THRESHOLD,
) -> list[SubsetDescriptor]:
    """All predicate conjunctions over the class's records meeting minimum support.

    The explored population is every record that involves the class on either
    side (its ground-truth objects, matched or missed, and its predictions).
    The empty conjunction — the whole class — is always included; predicates
    satisfied by every record slice nothing and are dropped, so a beta of 1
    yields exactly the whole-class row.
    """
    if class_id not in engine.hierarchy:
        raise QueryError(f"unknown class {class_id}")
    population = [
        r for r in engine.records if r.gt_class == class_id or r.pred_class == class_id
    ]
    class_size = len(population)
    if class_size == 0:
        raise QueryError(f"class {engine.hierarchy.name(class_id)} has no records")
    min_count = min_support_count(spec.beta, class_size)

    variables = engine.variables()
    item_records: dict[tuple, set[int]] = {}
    item_meta: dict[tuple, Predicate] = {}
    for attribute in spec.attributes:
        if attribute not in variables:
            continue  # not applicable to this task
        kind, getter = engine.variable(attribute)
        values = [(i, getter(r)) for i, r in enumerate(population)]
        present = [(i, v) for i, v in values if v is not None]
        if not present:
            continue
        if kind == "discrete":
            for i, v in present:
                key = (attribute, v)
                item_records.setdefault(key, set()).add(i)
                item_meta.setdefault(key, Predicate(attribute=attribute, value=v))
        else:
            disc = discretize([v for _, v in present], spec.d)
            for i, v in present:
                idx = disc.interval_of(v)
                key = (attribute, idx)
                item_records.setdefault(key, set()).add(i)
                item_meta.setdefault(
                    key,
                    Predicate(attribute=attribute, interval=disc.bounds(idx), index=idx),
                )

    item_records = {
        item: rows for item, rows in item_records.items() if len(rows) < class_size
    }
    frequent: dict[frozenset, set[int]] = {
        frozenset({item}): rows
        for item, rows in item_records.items()
        if len(rows) >= min_count
    }
    levels: list[dict[frozenset, set[int]]] = [dict(frequent)]
    while levels[-1]:
        previous = levels[-1]
        keys = sorted(previous, key=lambda s: sorted(map(str, s)))
        candidates: dict[frozenset, set[int]] = {}
        for a in range(len(keys)):
            for b in range(a + 1, len(keys)):
                union = keys[a] | keys[b]
                if len(union) != len(keys[a]) + 1:
                    continue
                if union in candidates:
                    continue
                attrs = [item[0] for item in union]
                if len(set(attrs)) != len(attrs):
                    continue  # one interval per attribute
                if any(union - {item} not in frequent for item in union):
                    continue  # downward closure
                rows = set.intersection(*(item_records[item] for item in union))
                if len(rows) >= min_count:
                    candidates[union] = rows
        frequent.update(candidates)
        levels.append(candidates)

    all_rows = set(range(class_size))
    itemsets: list[tuple[frozenset, set[int]]] = [(frozenset(), all_rows)]
    itemsets += sorted(frequent.items(), key=lambda kv: (len(kv[0]), sorted(map(str, kv[0]))))

    descriptors = []
    for itemset, rows in itemsets:
        predicates = tuple(
            sorted((item_meta[item] for item in itemset), key=lambda p: p.attribute)
        )
        subset = [population[i] for i in sorted(rows)]
        stats = (
            _subset_metrics(subset, class_id, iou_threshold, confidence_threshold)
            if include_metrics
            else {}
        )
        descriptors.append(
            SubsetDescriptor(predicates=predicates, support=len(rows), metrics=stats)
        )
    return descriptors


@dataclass(frozen=True)
class RankKey:
    attribute: str
    weight: float = 1.0
    descending: bool = False


def _attribute_value(subset: SubsetDescriptor, attribute: str) -> float | None:
    if attribute == "support":
        return float(subset.support)
    if attribute in subset.metrics:
        return subset.metrics[attribute]
    raise QueryError(f"unknown ranking attribute {attribute!r}")


def rank_subsets(subsets: list[SubsetDescriptor], keys: list[RankKey]) -> list[SubsetDescriptor]:
    """Ascending weighted-score order; min-max normalization per key over the
    candidate list, with descending keys negated before normalizing. Undefined
    attribute values rank last within their key. Ties break by higher support,
    then by predicate text."""
    if not keys:
        raise QueryError("at least one ranking key is required")
    if any(k.weight < 0 for k in keys):
        raise QueryError("ranking weights must be non-negative")

    columns: list[list[float]] = []
    for key in keys:
        raw = [_attribute_value(s, key.attribute) for s in subsets]
        signed = [None if v is None else (-v if key.descending else v) for v in raw]
        defined = [v for v in signed if v is not None]
        lo = min(defined) if defined else 0.0
        hi = max(defined) if defined else 0.0
        span = hi - lo
        normalized = [
            1.0 if v is None else ((v - lo) / span if span > 0 else 0.0) for v in signed
        ]
        columns.append(normalized)

    scores = [
        sum(key.weight * columns[k][i] for k, key in enumerate(keys))
        for i in range(len(subsets))
    ]
    order = sorted(
        range(len(subsets)),
        key=lambda i: (scores[i], -subsets[i].support, subsets[i].key()),
    )
    return [subsets[i] for i in order]


def subsets_to_json(subsets: list[SubsetDescriptor]) -> list[dict]:
    def bound(value: float) -> float | None:
        return value if math.isfinite(value) else None  # null = unbounded side

    rows = []
    for s in subsets:
        rows.append(
            {
                "predicates": [
                    {
                        "attribute": p.attribute,
                        **(
                            {"interval": [bound(p.interval[0]), bound(p.interval[1])], "index": p.index}
                            if p.interval is not None
                            else {"value": p.value}
                        ),
                    }
                    for p in s.predicates
                ],
                "label": s.key(),
                "support": s.support,
                "metrics": s.metrics,
            }
        )
    return rows
