"""Empirical joint distribution over evaluation records.

All evaluation variables — ground-truth/predicted class labels, confidences,
sizes, aspect ratios, shifts — live in one record store. Probabilities are exact
counts over that store: the probability mass function for discrete variables and
the empirical CDF convention for continuous ones (a predicate such as v < a is
the observed frequency of values below a). Marginalization keeps a subset of
variables; conditioning restricts records by value or interval predicates.

Records missing a variable referenced by a query are excluded from both the
numerator and the denominator of that query.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass
from typing import Callable

from .dataset import TASK_CLASSIFICATION, ClassHierarchy
from .errors import QueryError, UndefinedConditionalError
from .records import EvaluationRecord

DISCRETE = "discrete"
CONTINUOUS = "continuous"

DIRECTIONS = ("N", "NE", "E", "SE", "S", "SW", "W", "NW")
DIRECTION_CENTER = "center"
SIZE_SECTORS = ("smaller", "precise", "larger")

# predicate operators accepted in the query grammar
_CONTINUOUS_OPS = ("<", "<=", ">", ">=", "in")
_DISCRETE_OPS = ("=", "==")


@dataclass(frozen=True)
class Condition:
    var: str
    op: str
    value: object  # scalar for comparisons, (lo, hi) for "in" (half-open interval)


@dataclass(frozen=True)
class KeepVariable:
    """A variable kept by marginalization; continuous ones need bin boundaries."""

    var: str
    bins: tuple[float, ...] | None = None


@dataclass(frozen=True)
class DistributionQuery:
    keep: tuple[KeepVariable, ...] = ()
    conditions: tuple[Condition, ...] = ()


@dataclass(frozen=True)
class MarginalRow:
    values: tuple
    count: int
    probability: float


def size_sector(record: EvaluationRecord, tolerance: float = 0.1) -> str | None:
    """smaller / precise / larger by the pred-to-gt size ratio; None for non-pairs.

    The boundary is inclusive: a ratio exactly tolerance away from 1 is precise
    (guarded against one-ulp float noise in the ratio).
    """
    r = record.size_ratio
    if r is None:
        return None
    if abs(r - 1.0) <= tolerance + 1e-12:
        return "precise"
    return "smaller" if r < 1.0 else "larger"


def direction_bin(record: EvaluationRecord, tolerance: float = 0.05) -> str | None:
    """Compass bin of the prediction's center shift, y-down (positive dy = S)."""
    dx, dy = record.shift_x, record.shift_y
    if dx is None or dy is None:
        return None
    if math.hypot(dx, dy) <= tolerance:
        return DIRECTION_CENTER
    angle = math.degrees(math.atan2(dy, dx))  # E = 0, S = +90 in image space
    sector = math.floor((angle + 22.5) / 45.0) % 8
    return ("E", "SE", "S", "SW", "W", "NW", "N", "NE")[sector]


class DistributionEngine:
    """Query facade over an immutable record store."""

    def __init__(
        self,
        records: list[EvaluationRecord],
        hierarchy: ClassHierarchy,
        task: str,
        size_tolerance: float = 0.1,
        direction_tolerance: float = 0.05,
    ):
        self.records = list(records)
        self.hierarchy = hierarchy
        self.task = task
        self.size_tolerance = size_tolerance
        self.direction_tolerance = direction_tolerance
        gt_counts: dict[int, set] = {}
        for r in self.records:
            if r.gt_id is not None:
                gt_counts.setdefault(r.image_id, set()).add(r.gt_id)
        self._density = {img: len(s) for img, s in gt_counts.items()}
        self._variables = self._build_registry()

    def _build_registry(self) -> dict[str, tuple[str, Callable[[EvaluationRecord], object]]]:
        names = self.hierarchy.name
        registry: dict[str, tuple[str, Callable]] = {
            "Label_X": (DISCRETE, lambda r: names(r.gt_class)),
            "Label_Y": (DISCRETE, lambda r: names(r.pred_class)),
            "Confidence_Y": (CONTINUOUS, lambda r: r.confidence),
        }
        if self.task != TASK_CLASSIFICATION:
            registry.update(
                {
                    "Size_X": (CONTINUOUS, lambda r: r.gt_size),
                    "Size_Y": (CONTINUOUS, lambda r: r.pred_size),
                    "AspectRatio_X": (CONTINUOUS, lambda r: r.gt_aspect),
                    "AspectRatio_Y": (CONTINUOUS, lambda r: r.pred_aspect),
                    "SizeRatio": (CONTINUOUS, lambda r: r.size_ratio),
                    "ShiftX": (CONTINUOUS, lambda r: r.shift_x),
                    "ShiftY": (CONTINUOUS, lambda r: r.shift_y),
                    "IoU": (CONTINUOUS, lambda r: r.iou),
                    "Density": (CONTINUOUS, lambda r: float(self._density.get(r.image_id, 0))),
                    "SizeSector": (DISCRETE, lambda r: size_sector(r, self.size_tolerance)),
                    "DirectionBin": (DISCRETE, lambda r: direction_bin(r, self.direction_tolerance)),
                }
            )
        return registry

    def variables(self) -> dict[str, str]:
        return {name: kind for name, (kind, _) in self._variables.items()}

    def variable(self, name: str) -> tuple[str, Callable[[EvaluationRecord], object]]:
        """(kind, accessor) for a registered variable; QueryError when unknown."""
        return self._accessor(name)

    def _accessor(self, var: str) -> tuple[str, Callable]:
        try:
            return self._variables[var]
        except KeyError:
            raise QueryError(f"unknown variable {var!r} for task {self.task!r}") from None

    def _normalize_value(self, var: str, kind: str, value):
        if kind == DISCRETE and var in ("Label_X", "Label_Y"):
            if isinstance(value, str):
                try:
                    self.hierarchy.id_of(value)
                except KeyError:
                    raise QueryError(f"unknown class name {value!r}") from None
                return value
            try:
                return self.hierarchy.name(int(value))
            except (KeyError, ValueError, TypeError):
                raise QueryError(f"unknown class {value!r}") from None
        return value

    def _compile(self, conditions: tuple[Condition, ...]) -> list[tuple[Callable, Callable]]:
        compiled = []
        for cond in conditions:
            kind, getter = self._accessor(cond.var)
            if kind == DISCRETE:
                if cond.op not in _DISCRETE_OPS:
                    raise QueryError(f"operator {cond.op!r} is invalid for discrete {cond.var}")
                expect = self._normalize_value(cond.var, kind, cond.value)
                compiled.append((getter, lambda v, e=expect: v == e))
            else:
                if cond.op not in _CONTINUOUS_OPS:
                    raise QueryError(f"operator {cond.op!r} is invalid for continuous {cond.var}")
                if cond.op == "in":
                    try:
                        lo, hi = (float(x) for x in cond.value)
                    except (TypeError, ValueError):
                        raise QueryError(f"'in' needs an [lo, hi) pair, got {cond.value!r}") from None
                    compiled.append((getter, lambda v, lo=lo, hi=hi: lo <= v < hi))
                else:
                    try:
                        bound = float(cond.value)
                    except (TypeError, ValueError):
                        raise QueryError(f"bad numeric bound {cond.value!r}") from None
                    test = {
                        "<": lambda v, b=bound: v < b,
                        "<=": lambda v, b=bound: v <= b,
                        ">": lambda v, b=bound: v > b,
                        ">=": lambda v, b=bound: v >= b,
                    }[cond.op]
                    compiled.append((getter, test))
        return compiled

    def select(self, conditions: tuple[Condition, ...] = ()) -> list[EvaluationRecord]:
        """Records satisfying every condition; records missing any conditioned
        variable are excluded, mirroring the probability population rule."""
        compiled = self._compile(tuple(conditions))
        out = []
        for record in self.records:
            values = [getter(record) for getter, _ in compiled]
            if any(v is None for v in values):
                continue
            if all(test(v) for (_, test), v in zip(compiled, values)):
                out.append(record)
        return out

    def count(self, conditions: tuple[Condition, ...] = ()) -> tuple[int, int]:
        """(matching records, population). The population excludes records missing
        any conditioned variable; probabilities are the exact ratio of the two."""
        compiled = self._compile(tuple(conditions))
        hits = 0
        population = 0
        for record in self.records:
            values = [getter(record) for getter, _ in compiled]
            if any(v is None for v in values):
                continue
            population += 1
            if all(test(v) for (_, test), v in zip(compiled, values)):
                hits += 1
        return hits, population

    def probability(self, conditions: tuple[Condition, ...] = ()) -> float:
        hits, population = self.count(tuple(conditions))
        if population == 0:
            raise QueryError("no records carry every conditioned variable")
        return hits / population

    def conditional_probability(
        self,
        event: tuple[Condition, ...],
        given: tuple[Condition, ...],
    ) -> float:
        p_given = self.probability(tuple(given))
        if p_given == 0.0:
            raise UndefinedConditionalError("conditioning event has probability zero")
        p_joint = self.probability(tuple(event) + tuple(given))
        return p_joint / p_given

    def marginal_table(
        self,
        keep: tuple[KeepVariable | str, ...],
        conditions: tuple[Condition, ...] = (),
    ) -> list[MarginalRow]:
        """Joint probabilities over the kept variables, conditioned and renormalized.

        Continuous kept variables must carry bin boundaries; their cell value is
        the bin index (values below the first boundary map to bin 0).
        """
        keep_vars: list[tuple[KeepVariable, str, Callable]] = []
        for k in keep:
            kv = KeepVariable(k) if isinstance(k, str) else k
            kind, getter = self._accessor(kv.var)
            if kind == CONTINUOUS and kv.bins is None:
                raise QueryError(f"continuous variable {kv.var} needs bin boundaries")
            keep_vars.append((kv, kind, getter))

        compiled = self._compile(tuple(conditions))
        cells: dict[tuple, int] = {}
        population = 0
        for record in self.records:
            cond_values = [getter(record) for getter, _ in compiled]
            keep_values = [getter(record) for _, _, getter in keep_vars]
            if any(v is None for v in cond_values) or any(v is None for v in keep_values):
                continue
            population += 1
            if not all(test(v) for (_, test), v in zip(compiled, cond_values)):
                continue
            key = tuple(
                bisect_left(list(kv.bins), v) if kind == CONTINUOUS else v
                for (kv, kind, _), v in zip(keep_vars, keep_values)
            )
            cells[key] = cells.get(key, 0) + 1
        if population == 0:
            if conditions or keep_vars:
                return []
            raise QueryError("empty record store")
        total = sum(cells.values())
        if total == 0:
            return []
        return [
            MarginalRow(values=key, count=count, probability=count / total)
            for key, count in sorted(cells.items())
        ]


def parse_condition(doc: dict) -> Condition:
    try:
        var = doc["var"]
        op = doc["op"]
        value = doc["value"]
    except (KeyError, TypeError):
        raise QueryError(f"condition needs var/op/value, got {doc!r}") from None
    return Condition(var=str(var), op=str(op), value=value)


def parse_query(doc: dict) -> DistributionQuery:
    """Parse the JSON query grammar: {"keep": [...], "where": [{"var", "op", "value"}]}."""
    if not isinstance(doc, dict):
        raise QueryError("query must be a JSON object")
    keep: list[KeepVariable] = []
    for entry in doc.get("keep", []) or []:
        if isinstance(entry, str):
            keep.append(KeepVariable(entry))
        elif isinstance(entry, dict) and "var" in entry:
            bins = entry.get("bins")
            keep.append(KeepVariable(str(entry["var"]), tuple(float(b) for b in bins) if bins else None))
        else:
            raise QueryError(f"bad keep entry {entry!r}")
    conditions = tuple(parse_condition(c) for c in doc.get("where", []) or [])
    return DistributionQuery(keep=tuple(keep), conditions=conditions)
